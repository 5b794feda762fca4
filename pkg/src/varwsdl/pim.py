"""Platform-independent service models with explicit variability.

A model is read from a small XML interchange format (root ``<varsoaml>``)
whose elements mirror the modelling stereotypes one-to-one: participants,
service interfaces with plain and variable operations, plain and variable
message types, data types, variable types extending a data type, and
requires/excludes constraints between variable elements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import xmlio
from .diagnostics import (ModelParseError, UnresolvedReferenceError, ValidationReport,
                          XmlSyntaxError)

PRIMITIVES = ("String", "Integer", "Decimal", "Boolean", "Date")
SCOPES = ("optional", "alternative", "required")
CONSTRAINT_KINDS = ("requires", "excludes")
VARIABLE_TYPE_KINDS = ("complex", "simple")
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class VariabilityMark:
    scope: str
    group: str | None = None
    id: str | None = None


@dataclass(frozen=True)
class Attribute:
    name: str
    type: str
    min_occurs: int = 1
    max_occurs: int | str = 1


@dataclass(frozen=True)
class Operation:
    name: str
    input: str | None = None
    output: str | None = None
    fault: str | None = None
    variability: VariabilityMark | None = None

    @property
    def is_variable(self) -> bool:
        return self.variability is not None

    @property
    def messages(self) -> tuple[str, ...]:
        return tuple(m for m in (self.input, self.output, self.fault) if m)


@dataclass(frozen=True)
class ServiceInterface:
    name: str
    operations: tuple[Operation, ...] = ()
    # Identifiers written into the variability file; assigned when absent.
    service_id: str | None = None
    var_id: str | None = None


@dataclass(frozen=True)
class Participant:
    name: str
    provides: tuple[str, ...] = ()
    requests: tuple[str, ...] = ()


@dataclass(frozen=True)
class MessageType:
    name: str
    attributes: tuple[Attribute, ...] = ()
    variability: VariabilityMark | None = None

    @property
    def is_variable(self) -> bool:
        return self.variability is not None


@dataclass(frozen=True)
class DataType:
    name: str
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class VariableType:
    kind: str
    name: str
    base: str
    added_attributes: tuple[Attribute, ...]
    mark: VariabilityMark


@dataclass(frozen=True)
class PimConstraint:
    kind: str
    source: str
    target: str


@dataclass(frozen=True)
class PimModel:
    name: str
    base_uri: str
    participants: tuple[Participant, ...] = ()
    interfaces: tuple[ServiceInterface, ...] = ()
    message_types: tuple[MessageType, ...] = ()
    data_types: tuple[DataType, ...] = ()
    variable_types: tuple[VariableType, ...] = ()
    constraints: tuple[PimConstraint, ...] = ()

    @cached_property
    def messages_by_name(self) -> dict[str, MessageType]:
        return {m.name: m for m in self.message_types}

    @cached_property
    def data_types_by_name(self) -> dict[str, DataType]:
        return {d.name: d for d in self.data_types}

    @cached_property
    def variable_types_by_name(self) -> dict[str, VariableType]:
        return {v.name: v for v in self.variable_types}

    def interface(self, name: str) -> ServiceInterface:
        for si in self.interfaces:
            if si.name == name:
                return si
        raise KeyError(name)

    def providers(self, interface: str) -> list[Participant]:
        return [p for p in self.participants if interface in p.provides]


# -- parsing -----------------------------------------------------------------

def _require(node: xmlio.Node, attr: str) -> str:
    value = node.get(attr)
    if value is None or not value.strip():
        raise ModelParseError(f"<{node.tag}> is missing attribute {attr!r}", node.line, node.column)
    return value.strip()


def _mark(node: xmlio.Node) -> VariabilityMark:
    scope = _require(node, "scope")
    if scope not in SCOPES:
        raise ModelParseError(f"scope must be one of {', '.join(SCOPES)}, got {scope!r}",
                              node.line, node.column)
    return VariabilityMark(scope, node.get("group") or None, node.get("id") or None)


def _attribute(node: xmlio.Node) -> Attribute:
    if node.tag != "attribute":
        raise ModelParseError(f"unexpected <{node.tag}>", node.line, node.column)
    raw_min = node.get("minOccurs", "1")
    raw_max = node.get("maxOccurs", "1")
    try:
        min_occurs = int(raw_min)
        max_occurs: int | str = UNBOUNDED if raw_max == UNBOUNDED else int(raw_max)
    except ValueError:
        raise ModelParseError("minOccurs/maxOccurs must be integers or 'unbounded'",
                              node.line, node.column) from None
    if min_occurs < 0:
        raise ModelParseError("minOccurs must be non-negative", node.line, node.column)
    if max_occurs != UNBOUNDED and (max_occurs < 1 or max_occurs < min_occurs):
        raise ModelParseError("maxOccurs must be positive and not below minOccurs",
                              node.line, node.column)
    return Attribute(_require(node, "name"), _require(node, "type"), min_occurs, max_occurs)


def _attributes(node: xmlio.Node) -> tuple[Attribute, ...]:
    return tuple(_attribute(child) for child in node.elements)


def _operation(node: xmlio.Node) -> Operation:
    if node.tag not in ("operation", "variableOperation"):
        raise ModelParseError(f"unexpected <{node.tag}> in serviceInterface", node.line, node.column)
    op = Operation(
        _require(node, "name"),
        node.get("input") or None,
        node.get("output") or None,
        node.get("fault") or None,
        _mark(node) if node.tag == "variableOperation" else None,
    )
    if not (op.input or op.output):
        raise ModelParseError(f"operation {op.name!r} needs an input or an output",
                              node.line, node.column)
    return op


def _participant(node: xmlio.Node) -> Participant:
    provides, requests = [], []
    for child in node.elements:
        if child.tag == "provides":
            provides.append(_require(child, "interface"))
        elif child.tag == "requests":
            requests.append(_require(child, "interface").lstrip("~"))
        else:
            raise ModelParseError(f"unexpected <{child.tag}> in participant", child.line, child.column)
    return Participant(_require(node, "name"), tuple(provides), tuple(requests))


def parse_pim(text: str | bytes) -> PimModel:
    """Parse a service model document, resolve references and assign variability ids."""
    try:
        doc = xmlio.parse(text)
    except XmlSyntaxError as exc:
        raise ModelParseError(str(exc).split(": ", 1)[1], exc.line, exc.column) from None
    root = doc.root
    if root.tag != "varsoaml":
        raise ModelParseError(f"root element must be <varsoaml>, got <{root.tag}>", root.line, root.column)

    participants, interfaces, messages, data_types, variable_types, constraints = [], [], [], [], [], []
    positions: dict[tuple[str, str], xmlio.Node] = {}
    for node in root.elements:
        tag = node.tag
        if tag == "participant":
            participants.append(_participant(node))
        elif tag == "serviceInterface":
            ops = tuple(_operation(child) for child in node.elements)
            interfaces.append(ServiceInterface(_require(node, "name"), ops,
                                               node.get("serviceId"), node.get("varId")))
        elif tag in ("messageType", "variableMessage"):
            mark = _mark(node) if tag == "variableMessage" else None
            messages.append(MessageType(_require(node, "name"), _attributes(node), mark))
        elif tag == "dataType":
            data_types.append(DataType(_require(node, "name"), _attributes(node)))
        elif tag in ("complexVariableType", "simpleVariableType"):
            added = _attributes(node)
            if not added:
                raise ModelParseError(f"variable type {node.get('name')!r} adds no attributes",
                                      node.line, node.column)
            kind = "complex" if tag == "complexVariableType" else "simple"
            variable_types.append(VariableType(kind, _require(node, "name"), _require(node, "base"),
                                               added, _mark(node)))
        elif tag == "constraint":
            kind = _require(node, "kind")
            if kind not in CONSTRAINT_KINDS:
                raise ModelParseError(f"constraint kind must be requires or excludes, got {kind!r}",
                                      node.line, node.column)
            constraints.append(PimConstraint(kind, _require(node, "from"), _require(node, "to")))
        else:
            raise ModelParseError(f"unexpected <{tag}>", node.line, node.column)
        if node.get("name"):
            positions[(tag, node.get("name"))] = node

    model = PimModel(_require(root, "name"), _require(root, "baseUri"), tuple(participants),
                     tuple(interfaces), tuple(messages), tuple(data_types),
                     tuple(variable_types), tuple(constraints))
    _check_unique(model)
    _check_references(model, positions)
    return _assign_ids(model)


def _check_unique(m: PimModel) -> None:
    categories = {
        "participant": [p.name for p in m.participants],
        "service interface": [s.name for s in m.interfaces],
        "message": [x.name for x in m.message_types],
        "type": list(PRIMITIVES) + [d.name for d in m.data_types] + [v.name for v in m.variable_types],
    }
    for si in m.interfaces:
        categories[f"operation in {si.name}"] = [op.name for op in si.operations]
    for dt in m.data_types:
        categories[f"attribute in {dt.name}"] = [a.name for a in dt.attributes]
    for mt in m.message_types:
        categories[f"attribute in {mt.name}"] = [a.name for a in mt.attributes]
    for vt in m.variable_types:
        categories[f"attribute in {vt.name}"] = [a.name for a in vt.added_attributes]
    for what, names in categories.items():
        seen = set()
        for name in names:
            if name in seen:
                raise ModelParseError(f"duplicate {what} name {name!r}")
            seen.add(name)


def _check_references(m: PimModel, positions) -> None:
    def where(tag, name):
        node = positions.get((tag, name))
        return (node.line, node.column) if node else (0, 0)

    known_types = set(PRIMITIVES) | set(m.data_types_by_name) | set(m.variable_types_by_name)
    interfaces = {si.name for si in m.interfaces}
    for p in m.participants:
        for ref in p.provides + p.requests:
            if ref not in interfaces:
                raise UnresolvedReferenceError(ref, "interface", *where("participant", p.name))
    for si in m.interfaces:
        for op in si.operations:
            for ref in op.messages:
                if ref not in m.messages_by_name:
                    raise UnresolvedReferenceError(ref, "message", *where("serviceInterface", si.name))
    owners = ([("messageType", x) for x in m.message_types] + [("dataType", x) for x in m.data_types])
    for tag, owner in owners:
        for attr in owner.attributes:
            if attr.type not in known_types:
                raise UnresolvedReferenceError(attr.type, "type", *where(tag, owner.name))
    for vt in m.variable_types:
        tag = vt.kind + "VariableType"
        if vt.base not in m.data_types_by_name and vt.base not in m.variable_types_by_name:
            raise UnresolvedReferenceError(vt.base, "base type", *where(tag, vt.name))
        for attr in vt.added_attributes:
            if attr.type not in known_types:
                raise UnresolvedReferenceError(attr.type, "type", *where(tag, vt.name))


def _with_id(mark: VariabilityMark, new_id: str) -> VariabilityMark:
    return VariabilityMark(mark.scope, mark.group, new_id)


def _assign_ids(m: PimModel) -> PimModel:
    # Variable operations are numbered 1..n in document order across the model;
    # the messages they use get <n>.2 (input), <n>.3 (output), <n>.4 (fault).
    message_ids: dict[str, str] = {
        mt.name: mt.variability.id for mt in m.message_types if mt.is_variable and mt.variability.id
    }
    interfaces = []
    counter = 0
    for si in m.interfaces:
        ops = []
        for op in si.operations:
            if op.is_variable:
                counter += 1
                op_id = op.variability.id or str(counter)
                op = Operation(op.name, op.input, op.output, op.fault, _with_id(op.variability, op_id))
                for suffix, ref in (("2", op.input), ("3", op.output), ("4", op.fault)):
                    target = m.messages_by_name.get(ref) if ref else None
                    if target is not None and target.is_variable and ref not in message_ids:
                        message_ids[ref] = f"{op_id}.{suffix}"
            ops.append(op)
        interfaces.append(ServiceInterface(si.name, tuple(ops), si.service_id, si.var_id))

    orphan = 0
    messages = []
    for mt in m.message_types:
        if mt.is_variable:
            if mt.name not in message_ids:
                orphan += 1
                message_ids[mt.name] = f"0.{orphan}"
            mt = MessageType(mt.name, mt.attributes, _with_id(mt.variability, message_ids[mt.name]))
        messages.append(mt)

    ids = [op.variability.id for si in interfaces for op in si.operations if op.is_variable]
    ids += [mt.variability.id for mt in messages if mt.is_variable]
    ids += [vt.mark.id for vt in m.variable_types if vt.mark.id]
    seen = set()
    for vid in ids:
        if vid in seen:
            raise ModelParseError(f"duplicate variability id {vid!r}")
        seen.add(vid)

    return PimModel(m.name, m.base_uri, m.participants, tuple(interfaces), tuple(messages),
                    m.data_types, m.variable_types, m.constraints)


# -- serialization -----------------------------------------------------------

def _mark_attrs(mark: VariabilityMark) -> list[tuple[str, str | None]]:
    return [("scope", mark.scope), ("group", mark.group), ("id", mark.id)]


def _add_attributes(parent: xmlio.Node, attributes) -> None:
    for a in attributes:
        parent.add("attribute", ("name", a.name), ("type", a.type),
                   ("minOccurs", None if a.min_occurs == 1 else str(a.min_occurs)),
                   ("maxOccurs", None if a.max_occurs == 1 else str(a.max_occurs)))


def serialize_pim(m: PimModel) -> str:
    """Write ``m`` back to the interchange format; assigned ids are written explicitly."""
    root = xmlio.Node("varsoaml", [("name", m.name), ("baseUri", m.base_uri)])
    for p in m.participants:
        node = root.add("participant", ("name", p.name))
        for ref in p.provides:
            node.add("provides", ("interface", ref))
        for ref in p.requests:
            node.add("requests", ("interface", ref))
    for si in m.interfaces:
        node = root.add("serviceInterface", ("name", si.name), ("serviceId", si.service_id),
                        ("varId", si.var_id))
        for op in si.operations:
            attrs = [("name", op.name), ("input", op.input), ("output", op.output), ("fault", op.fault)]
            if op.is_variable:
                node.add("variableOperation", *attrs, *_mark_attrs(op.variability))
            else:
                node.add("operation", *attrs)
    for mt in m.message_types:
        if mt.is_variable:
            node = root.add("variableMessage", ("name", mt.name), *_mark_attrs(mt.variability))
        else:
            node = root.add("messageType", ("name", mt.name))
        _add_attributes(node, mt.attributes)
    for dt in m.data_types:
        _add_attributes(root.add("dataType", ("name", dt.name)), dt.attributes)
    for vt in m.variable_types:
        node = root.add(vt.kind + "VariableType", ("name", vt.name), ("base", vt.base),
                        *_mark_attrs(vt.mark))
        _add_attributes(node, vt.added_attributes)
    for c in m.constraints:
        root.add("constraint", ("kind", c.kind), ("from", c.source), ("to", c.target))
    return xmlio.serialize(root)


# -- validation --------------------------------------------------------------

@dataclass
class _VariableIndex:
    """Variable elements of a model addressable by id or by name."""

    by_key: dict[str, str] = field(default_factory=dict)

    @classmethod
    def of(cls, m: PimModel) -> "_VariableIndex":
        index = cls()
        for si in m.interfaces:
            for op in si.operations:
                if op.is_variable:
                    index.add(op.name, op.variability.id)
        for mt in m.message_types:
            if mt.is_variable:
                index.add(mt.name, mt.variability.id)
        for vt in m.variable_types:
            index.add(vt.name, vt.mark.id)
        return index

    def add(self, name: str, vid: str | None) -> None:
        self.by_key.setdefault(name, name)
        if vid:
            self.by_key.setdefault(vid, name)


def _marks(m: PimModel):
    for si in m.interfaces:
        for op in si.operations:
            if op.is_variable:
                yield op.name, op.variability
    for mt in m.message_types:
        if mt.is_variable:
            yield mt.name, mt.variability
    for vt in m.variable_types:
        yield vt.name, vt.mark


def _required_cycle(m: PimModel) -> list[str]:
    graph = {dt.name: [a.type for a in dt.attributes
                       if a.min_occurs >= 1 and a.type in m.data_types_by_name]
             for dt in m.data_types}
    state: dict[str, int] = {}
    stack: list[str] = []

    def visit(name):
        state[name] = 1
        stack.append(name)
        for nxt in graph[name]:
            if state.get(nxt) == 1:
                return stack[stack.index(nxt):] + [nxt]
            if nxt not in state:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        state[name] = 2
        return None

    for name in graph:
        if name not in state:
            found = visit(name)
            if found:
                return found
    return []


def validate_pim(m: PimModel) -> ValidationReport:
    """Check stereotype applicability and variability well-formedness.

    Violations are returned as data; nothing here raises for a parsed model.
    """
    report = ValidationReport()
    groups: dict[str, list[str]] = {}
    for name, mark in _marks(m):
        if mark.scope == "alternative":
            if not mark.group:
                report.add("alternative-without-group", name, "alternative requires group")
            else:
                groups.setdefault(mark.group, []).append(name)
        elif mark.group:
            report.add("group-without-alternative", name,
                       f"group {mark.group!r} is ignored for scope {mark.scope}", "warning")
    for group, members in groups.items():
        if len(members) < 2:
            report.add("alternative-group-too-small", group,
                       f"alternative group {group!r} needs at least two members, has {len(members)}")

    index = _VariableIndex.of(m)
    plain_names = ({op.name for si in m.interfaces for op in si.operations if not op.is_variable}
                   | {mt.name for mt in m.message_types if not mt.is_variable}
                   | set(m.data_types_by_name) | {si.name for si in m.interfaces}
                   | {p.name for p in m.participants})
    for c in m.constraints:
        for end in (c.source, c.target):
            if end in index.by_key:
                continue
            if end in plain_names:
                report.add("constraint-endpoint-not-variable", end,
                           f"constraint endpoint must be variable: {end!r}")
            else:
                report.add("constraint-endpoint-unknown", end,
                           f"constraint endpoint {end!r} names no variable element")

    for vt in m.variable_types:
        if vt.base in m.variable_types_by_name:
            report.add("variable-base-is-variable", vt.name,
                       f"variable type base must not be variable: {vt.base!r}")

    users: dict[str, list[str]] = {}
    for si in m.interfaces:
        for op in si.operations:
            for ref in op.messages:
                msg = m.messages_by_name[ref]
                if op.is_variable:
                    if not msg.is_variable:
                        report.add("variable-operation-plain-message", op.name,
                                   f"variable operation must use variable messages, {ref!r} is plain")
                    else:
                        users.setdefault(ref, []).append(op.name)
                elif msg.is_variable:
                    report.add("plain-operation-variable-message", op.name,
                               f"variable message {ref!r} used by non-variable operation")
    for mt in m.message_types:
        if not mt.is_variable:
            continue
        if len(users.get(mt.name, ())) > 1:
            report.add("variable-message-shared", mt.name,
                       "variable message shared by operations " + ", ".join(users[mt.name]))
        elif mt.name not in users:
            report.add("variable-message-unused", mt.name,
                       "variable message not used by any variable operation", "warning")

    used_variable_types = set()
    for owner, attributes, allowed in (
        [(mt.name, mt.attributes, mt.is_variable) for mt in m.message_types]
        + [(dt.name, dt.attributes, False) for dt in m.data_types]
        + [(vt.name, vt.added_attributes, False) for vt in m.variable_types]
    ):
        for a in attributes:
            if a.type in m.variable_types_by_name:
                if allowed:
                    used_variable_types.add(a.type)
                else:
                    report.add("variable-type-misplaced", owner,
                               f"variable type {a.type!r} used outside a variable message")
    for vt in m.variable_types:
        if vt.name not in used_variable_types:
            report.add("variable-type-unused", vt.name,
                       "variable type not used by any variable message", "warning")

    cycle = _required_cycle(m)
    if cycle:
        report.add("cyclic-required-containment", cycle[0],
                   "cyclic required containment: " + " -> ".join(cycle))

    for si in m.interfaces:
        if not m.providers(si.name):
            report.add("interface-not-provided", si.name,
                       "interface is not provided by any participant", "warning")
    return report
