import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GOLDEN
from oracles import bind, closure, is_valid, random_model, selections, signature, variable_elements
from varwsdl.diagnostics import SelectionError, UnknownSelectionError
from varwsdl.emitter import emit_wsdl, emit_xsd
from varwsdl.pim import parse_pim
from varwsdl.psm import validate_psm
from varwsdl.resolver import Selection, resolve, validate_selection
from varwsdl.transform import transform_interface, transform_model
from varwsdl.xmlio import canonicalize

# alternatives, a requires and an excludes constraint, an optional message
TOY = """<varsoaml name="Toy" baseUri="http://toy">
  <participant name="P"><provides interface="pay"/></participant>
  <serviceInterface name="pay">
    <operation name="quote" input="quoteRequest"/>
    <variableOperation name="payCard" input="cardRequest" output="receipt" scope="alternative" group="method"/>
    <variableOperation name="payInvoice" input="invoiceRequest" scope="alternative" group="method"/>
    <variableOperation name="track" input="trackRequest" output="trackDetail" scope="optional"/>
    <variableOperation name="audit" input="auditRequest" scope="required"/>
  </serviceInterface>
  <messageType name="quoteRequest"><attribute name="amount" type="Decimal"/></messageType>
  <variableMessage name="cardRequest" scope="required"><attribute name="card" type="cardPlus"/></variableMessage>
  <variableMessage name="receipt" scope="optional"><attribute name="ok" type="Boolean"/></variableMessage>
  <variableMessage name="invoiceRequest" scope="required"><attribute name="to" type="String"/></variableMessage>
  <variableMessage name="trackRequest" scope="required"><attribute name="no" type="Integer"/></variableMessage>
  <variableMessage name="trackDetail" scope="optional"><attribute name="where" type="String"/></variableMessage>
  <variableMessage name="auditRequest" scope="required"><attribute name="who" type="String"/></variableMessage>
  <dataType name="card"><attribute name="number" type="String"/></dataType>
  <complexVariableType name="cardPlus" base="card" scope="optional">
    <attribute name="cvv" type="String"/>
  </complexVariableType>
  <constraint kind="requires" from="trackDetail" to="receipt"/>
  <constraint kind="excludes" from="payInvoice" to="track"/>
</varsoaml>"""


@pytest.fixture(scope="module")
def toy_model():
    return parse_pim(TOY)


@pytest.fixture(scope="module")
def toy(toy_model):
    return transform_interface(toy_model, toy_model.interface("pay"))


def included(spec, sel):
    return set(validate_selection(spec, sel).included)


class TestValidateSelection:
    def test_scms_operation_only(self, purchasing):
        report = validate_selection(purchasing.variability, Selection.of(["isEligible"]))
        assert report.ok and not report.warnings
        # the variable type has its own optional scope, so it is not pulled in
        assert set(report.included) == {"isEligible", "isEligibleRequest", "isEligibleResponse"}

    def test_scms_with_type(self, purchasing):
        report = validate_selection(purchasing.variability, {"isEligible", "customerVariable"})
        assert set(report.included) == {"isEligible", "isEligibleRequest", "isEligibleResponse",
                                        "customerVariable"}

    def test_ids_select_like_names(self, purchasing):
        spec = purchasing.variability
        assert validate_selection(spec, {"1"}).included == validate_selection(spec, {"isEligible"}).included

    def test_message_without_operation(self, purchasing):
        report = validate_selection(purchasing.variability, {"1.2"})
        assert not report.ok
        assert report.violations[0].code == "unmet-requires"
        assert report.violations[0].element == "isEligibleRequest"

    def test_redundant_required_selection_warns(self, purchasing):
        report = validate_selection(purchasing.variability, {"isEligible", "isEligibleRequest"})
        assert report.ok
        assert [w.message for w in report.warnings] == ["redundant selection of required element"]

    def test_unknown_id(self, purchasing):
        with pytest.raises(UnknownSelectionError) as info:
            validate_selection(purchasing.variability, {"isEligible", "7.7"})
        assert info.value.names == ["7.7"]

    def test_empty_spec(self, scms_bundles):
        report = validate_selection(scms_bundles["ship"].variability, ())
        assert report.ok and report.included == ()

    def test_alternative_needs_exactly_one(self, toy):
        spec = toy.variability
        none = validate_selection(spec, ())
        both = validate_selection(spec, {"payCard", "payInvoice"})
        assert [v.code for v in none.violations] == ["alternative-group"]
        assert "got 0" in none.violations[0].message
        assert "got 2" in both.violations[0].message
        assert validate_selection(spec, {"payCard"}).ok

    def test_required_operation_always_included(self, toy):
        assert {"audit", "auditRequest"} <= included(toy.variability, {"payCard"})

    def test_requires_is_followed(self, toy):
        got = included(toy.variability, {"payCard", "track", "trackDetail"})
        assert "receipt" in got

    def test_requires_into_excluded_operation_is_violation(self, toy):
        report = validate_selection(toy.variability, {"payInvoice", "trackDetail"})
        codes = [v.code for v in report.violations]
        assert "unmet-requires" in codes

    def test_excludes(self, toy):
        report = validate_selection(toy.variability, {"payInvoice", "track"})
        assert [v.code for v in report.violations] == ["excludes-conflict"]

    def test_optional_messages_are_opt_in(self, toy):
        got = included(toy.variability, {"payCard", "track"})
        assert "trackRequest" in got and "trackDetail" not in got and "receipt" not in got

    def test_agrees_with_oracle(self, toy_model, toy):
        for sel in selections(toy_model, "pay"):
            report = validate_selection(toy.variability, sel)
            assert report.ok == is_valid(toy_model, "pay", sel), sel
            assert set(report.included) == {e.name for e in closure(toy_model, "pay", sel)}, sel


class TestResolve:
    def test_scms_adds_operation(self, purchasing):
        r = resolve(purchasing, {"isEligible"})
        assert [op.name for op in r.definition.port_types[0].operations] == ["getCatalog", "submitOrder",
                                                                              "isEligible"]
        assert [op.name for op in r.definition.bindings[0].operations][-1] == "isEligible"
        assert r.definition.bindings[0].operations[-1].soap_action == "http://scms/purchasing.wsdl#isEligible"
        assert r.variability.is_empty
        assert (r.variability.service_id, r.variability.var_id) == ("1111", "11")
        assert not validate_psm(r).findings

    def test_excluded_type_falls_back_to_base(self, purchasing):
        r = resolve(purchasing, {"isEligible"})
        parts = {m.name: m.parts for m in r.definition.messages}
        assert parts["isEligibleRequest"][0].type == "ps:customer"
        assert "customerVariable" not in {t.name for t in r.schema.complex_types}

    def test_included_type_is_merged(self, purchasing):
        r = resolve(purchasing, {"isEligible", "customerVariable"})
        parts = {m.name: m.parts for m in r.definition.messages}
        assert parts["isEligibleRequest"][0].type == "ps:customerVariable"
        merged = r.schema.complex_types[-1]
        assert (merged.name, merged.extension_base) == ("customerVariable", "tns:customer")

    def test_matches_resolved_goldens(self, purchasing):
        r = resolve(purchasing, {"isEligible", "customerVariable"})
        ref = replace(r.definition.types.schema_ref, location="purchasingSchema.resolved.xsd")
        r = replace(r, definition=replace(r.definition, types=replace(r.definition.types, schema_ref=ref)))
        assert canonicalize(emit_wsdl(r)) == canonicalize((GOLDEN / "purchasing.resolved.wsdl").read_text())
        assert canonicalize(emit_xsd(r)) == canonicalize((GOLDEN / "purchasingSchema.resolved.xsd").read_text())

    def test_empty_selection_is_base(self, purchasing):
        r = resolve(purchasing)
        assert r.definition == purchasing.definition
        assert r.schema == purchasing.schema
        assert r.variability.is_empty

    def test_invalid_selection_raises(self, purchasing):
        with pytest.raises(SelectionError) as info:
            resolve(purchasing, {"isEligibleRequest"})
        assert not info.value.report.ok

    def test_idempotent(self, purchasing, toy):
        for p, sel in ((purchasing, {"isEligible"}), (toy, {"payCard", "track"})):
            once = resolve(p, sel)
            assert resolve(once) == once

    def test_toy_optional_message_dropped(self, toy):
        r = resolve(toy, {"payCard", "track"})
        ops = {op.name: op for op in r.definition.port_types[0].operations}
        assert ops["track"].output is None
        assert ops["payCard"].output is None
        assert set(ops) == {"quote", "payCard", "track", "audit"}


def test_monotone_inclusion(toy_model, toy):
    valid = [set(s) for s in selections(toy_model, "pay") if validate_selection(toy.variability, s).ok]
    for a, b in itertools.combinations(valid, 2):
        if a <= b:
            assert included(toy.variability, a) <= included(toy.variability, b)


def test_commutation_toy(toy_model, toy):
    for sel in selections(toy_model, "pay"):
        if is_valid(toy_model, "pay", sel):
            bound = bind(toy_model, "pay", sel)
            expected = transform_interface(bound, bound.interface("pay"))
            assert signature(resolve(toy, sel)) == signature(expected), sel


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_commutation_random(seed):
    m = random_model(random.Random(seed), max_variable_elements=4)
    [p] = transform_model(m)
    assert len(variable_elements(m, "svc")) <= 4
    for sel in selections(m, "svc"):
        report = validate_selection(p.variability, sel)
        assert report.ok == is_valid(m, "svc", sel)
        if report.ok:
            bound = bind(m, "svc", sel)
            assert signature(resolve(p, sel)) == signature(transform_interface(bound, bound.interface("svc")))
            assert validate_psm(resolve(p, sel)).ok
