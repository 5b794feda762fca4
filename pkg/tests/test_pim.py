import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_model
from varwsdl.diagnostics import ModelParseError, UnresolvedReferenceError
from varwsdl.pim import UNBOUNDED, PimConstraint, parse_pim, serialize_pim, validate_pim


def doc(body: str) -> str:
    return f'<varsoaml name="T" baseUri="http://t">{body}</varsoaml>'


SHOP = doc("""
  <participant name="Shop"><provides interface="shop"/></participant>
  <serviceInterface name="shop">
    <operation name="getCatalog" input="req" output="res"/>
    {ops}
  </serviceInterface>
  <messageType name="req"/>
  <messageType name="res"><attribute name="n" type="Integer"/></messageType>
  <variableMessage name="vreq" scope="required"><attribute name="n" type="String"/></variableMessage>
  <variableMessage name="vreq2" scope="required"><attribute name="n" type="String"/></variableMessage>
  {extra}
""")


def shop(ops="", extra=""):
    return parse_pim(SHOP.replace("{ops}", ops).replace("{extra}", extra))


class TestParse:
    def test_scms_structure(self, scms):
        assert len(scms.participants) == 5
        purchasing = scms.interface("purchasing")
        base = [op.name for op in purchasing.operations if not op.is_variable]
        variable = [op.name for op in purchasing.operations if op.is_variable]
        assert base == ["getCatalog", "submitOrder"]
        assert variable == ["isEligible"]
        assert purchasing.operations[2].variability.scope == "optional"

    def test_scms_conjugate_requests_strip_tilde(self, scms):
        client = scms.participants[0]
        assert client.provides == ()
        assert client.requests == ("purchasing", "shipStatus")

    def test_scms_auto_ids(self, scms):
        op = scms.interface("purchasing").operations[2]
        assert op.variability.id == "1"
        msgs = scms.messages_by_name
        assert msgs["isEligibleRequest"].variability.id == "1.2"
        assert msgs["isEligibleResponse"].variability.id == "1.3"
        assert scms.variable_types[0].mark.id is None

    def test_defaults_and_unbounded(self, scms):
        seq = scms.data_types_by_name["sequenceItem"].attributes[0]
        assert (seq.min_occurs, seq.max_occurs) == (0, UNBOUNDED)
        price = scms.data_types_by_name["item"].attributes[-1]
        assert (price.type, price.min_occurs, price.max_occurs) == ("Decimal", 1, 1)

    def test_empty_interface(self):
        m = parse_pim(doc('<serviceInterface name="empty"/>'))
        assert m.interface("empty").operations == ()

    def test_unresolved_message(self):
        text = doc('<serviceInterface name="s">\n<operation name="o" input="noSuchMsg"/></serviceInterface>')
        with pytest.raises(UnresolvedReferenceError) as info:
            parse_pim(text)
        assert info.value.name == "noSuchMsg"
        assert "noSuchMsg" in str(info.value)

    def test_unresolved_attribute_type(self):
        with pytest.raises(UnresolvedReferenceError, match="Float"):
            parse_pim(doc('<dataType name="d"><attribute name="a" type="Float"/></dataType>'))

    def test_unresolved_interface(self):
        with pytest.raises(UnresolvedReferenceError, match="nowhere"):
            parse_pim(doc('<participant name="p"><provides interface="nowhere"/></participant>'))

    def test_syntax_error_has_line_and_column(self):
        with pytest.raises(ModelParseError) as info:
            parse_pim('<varsoaml name="T" baseUri="u">\n  <dataType name="d">\n</varsoaml>')
        assert info.value.line == 3
        assert info.value.column > 0

    def test_structural_error_has_position(self):
        with pytest.raises(ModelParseError) as info:
            parse_pim(doc('\n<messageType/>'))
        assert info.value.line == 2
        assert "name" in str(info.value)

    @pytest.mark.parametrize("body, match", [
        ('<serviceInterface name="s"><variableOperation name="o" input="m" scope="sometimes"/></serviceInterface>'
         '<variableMessage name="m" scope="required"/>', "scope"),
        ('<serviceInterface name="s"><operation name="o"/></serviceInterface>', "input or an output"),
        ('<dataType name="d"/><simpleVariableType name="v" base="d" scope="optional"/>', "adds no attributes"),
        ('<constraint kind="implies" from="a" to="b"/>', "requires or excludes"),
        ('<messageType name="m"/><messageType name="m"/>', "duplicate message"),
        ('<dataType name="String"/>', "duplicate type"),
        ('<dataType name="d"><attribute name="a" type="String" maxOccurs="0"/></dataType>', "maxOccurs"),
        ('<dataType name="d"><attribute name="a" type="String" minOccurs="x"/></dataType>', "minOccurs"),
        ('<banana/>', "unexpected"),
    ])
    def test_structural_errors(self, body, match):
        with pytest.raises(ModelParseError, match=match):
            parse_pim(doc(body))

    def test_wrong_root(self):
        with pytest.raises(ModelParseError, match="varsoaml"):
            parse_pim("<model/>")

    def test_explicit_ids_kept_and_numbering_continues(self):
        m = shop(ops='<variableOperation name="a" input="vreq" scope="optional" id="7"/>'
                     '<variableOperation name="b" input="vreq2" scope="optional"/>')
        ops = m.interface("shop").operations
        assert [op.variability.id for op in ops[1:]] == ["7", "2"]
        assert m.messages_by_name["vreq"].variability.id == "7.2"
        assert m.messages_by_name["vreq2"].variability.id == "2.2"

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ModelParseError, match="duplicate variability id"):
            shop(ops='<variableOperation name="a" input="vreq" scope="optional" id="1"/>'
                     '<variableOperation name="b" input="vreq2" scope="optional" id="1"/>')

    def test_orphan_variable_message_gets_zero_prefixed_id(self):
        m = shop()
        assert m.messages_by_name["vreq"].variability.id == "0.1"
        assert m.messages_by_name["vreq2"].variability.id == "0.2"

    def test_id_assignment_is_deterministic(self, scms_text):
        assert parse_pim(scms_text) == parse_pim(scms_text)


class TestRoundTrip:
    def test_scms(self, scms):
        assert parse_pim(serialize_pim(scms)) == scms

    def test_serialized_text_is_stable(self, scms):
        text = serialize_pim(scms)
        assert serialize_pim(parse_pim(text)) == text

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_random_models(self, seed):
        m = random_model(random.Random(seed))
        assert parse_pim(serialize_pim(m)) == m


class TestValidate:
    def test_scms_clean(self, scms):
        assert validate_pim(scms).findings == []

    def test_alternative_without_group(self):
        m = shop(ops='<variableOperation name="a" input="vreq" scope="alternative"/>')
        report = validate_pim(m)
        assert "alternative requires group" in report.messages()
        assert not report.ok

    def test_alternative_group_too_small(self):
        m = shop(ops='<variableOperation name="a" input="vreq" scope="alternative" group="g"/>')
        [finding] = [f for f in validate_pim(m) if f.code == "alternative-group-too-small"]
        assert finding.element == "g"

    def test_constraint_on_plain_operation(self):
        # hand-built minimal model: one plain op, one variable op, constraint from the plain one
        m = shop(ops='<variableOperation name="a" input="vreq" scope="optional"/>',
                 extra='<constraint kind="requires" from="getCatalog" to="a"/>')
        report = validate_pim(m)
        assert [f.message for f in report.errors] == ["constraint endpoint must be variable: 'getCatalog'"]
        assert report.errors[0].element == "getCatalog"

    def test_constraint_by_id_accepted(self):
        m = shop(ops='<variableOperation name="a" input="vreq" scope="optional"/>'
                     '<variableOperation name="b" input="vreq2" scope="optional"/>',
                 extra='<constraint kind="excludes" from="1" to="b"/>')
        assert validate_pim(m).ok

    def test_constraint_unknown_endpoint(self):
        m = shop(extra='<constraint kind="requires" from="ghost" to="vreq"/>')
        assert "constraint-endpoint-unknown" in {f.code for f in validate_pim(m)}

    def test_variable_base_is_variable(self):
        m = parse_pim(doc(
            '<dataType name="d"><attribute name="a" type="String"/></dataType>'
            '<simpleVariableType name="v" base="d" scope="optional"><attribute name="x" type="String"/></simpleVariableType>'
            '<complexVariableType name="w" base="v" scope="optional"><attribute name="y" type="String"/></complexVariableType>'))
        assert "variable type base must not be variable: 'v'" in validate_pim(m).messages()

    def test_variable_type_outside_variable_message(self):
        m = parse_pim(doc(
            '<dataType name="d"><attribute name="a" type="String"/></dataType>'
            '<simpleVariableType name="v" base="d" scope="optional"><attribute name="x" type="String"/></simpleVariableType>'
            '<messageType name="m"><attribute name="p" type="v"/></messageType>'))
        assert "variable-type-misplaced" in {f.code for f in validate_pim(m).errors}

    def test_message_kind_mismatches(self):
        m = shop(ops='<operation name="plain" input="vreq"/>'
                     '<variableOperation name="v" input="req" scope="optional"/>')
        codes = {f.code for f in validate_pim(m).errors}
        assert {"plain-operation-variable-message", "variable-operation-plain-message"} <= codes

    def test_shared_variable_message(self):
        m = shop(ops='<variableOperation name="a" input="vreq" scope="optional"/>'
                     '<variableOperation name="b" input="vreq" scope="optional"/>')
        assert "variable-message-shared" in {f.code for f in validate_pim(m).errors}

    def test_required_cycle(self):
        m = parse_pim(doc(
            '<dataType name="a"><attribute name="b" type="b"/></dataType>'
            '<dataType name="b"><attribute name="a" type="a"/></dataType>'))
        [f] = [f for f in validate_pim(m) if f.code == "cyclic-required-containment"]
        assert "a -> b -> a" in f.message

    def test_optional_cycle_allowed(self):
        m = parse_pim(doc(
            '<dataType name="a"><attribute name="b" type="b" minOccurs="0"/></dataType>'
            '<dataType name="b"><attribute name="a" type="a"/></dataType>'))
        assert validate_pim(m).ok

    def test_warnings_do_not_block(self):
        m = parse_pim(doc('<serviceInterface name="lonely"/>'))
        report = validate_pim(m)
        assert report.ok
        assert [f.code for f in report] == ["interface-not-provided"]

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10 ** 6), st.lists(st.tuples(st.sampled_from(["requires", "excludes"]),
                                                       st.text("op0123.Vxyz", min_size=1, max_size=5),
                                                       st.text("op0123.Vxyz", min_size=1, max_size=5)),
                                             max_size=3))
    def test_never_crashes_and_cites_elements(self, seed, constraints):
        m = random_model(random.Random(seed))
        m = replace(m, constraints=tuple(PimConstraint(*c) for c in constraints))
        report = validate_pim(m)
        assert all(f.element for f in report)
