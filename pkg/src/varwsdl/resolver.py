"""Variant selection and resolution into a variant-specific contract.

Inclusion rules:

* required operations and types are always included;
* a required message is included exactly when the variable operation using it is;
* ``requires`` constraints pull their target in, transitively;
* optional and alternative elements are included only when selected (or required by a constraint).

A ``vp="s"`` part whose variable type ends up excluded falls back to the type it extends.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from .diagnostics import Finding, SelectionError, UnknownSelectionError
from .psm import (BindingOperation, IoRef, Message, Part, PsmModel, PtOperation,
                  VariabilitySpecification, XsdComplexType, XsdElement)


@dataclass(frozen=True)
class Selection:
    chosen: frozenset[str] = frozenset()

    @classmethod
    def of(cls, items: Iterable[str] = ()) -> "Selection":
        return cls(frozenset(items))


@dataclass
class ResolutionReport:
    included: tuple[str, ...] = ()
    violations: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)
    # (kind, name) pairs; names alone may repeat across kinds
    included_keys: frozenset[tuple[str, str]] = field(default=frozenset(), repr=False)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def findings(self) -> list[Finding]:
        return self.violations + self.warnings


@dataclass(frozen=True)
class _Element:
    kind: str
    id: str
    name: str
    scope: str
    group: str | None
    owner: str | None = None  # operation using a message


def _elements(spec: VariabilitySpecification) -> list[_Element]:
    owners = {}
    for op in spec.variable_operations:
        for ref in op.refs:
            owners.setdefault(ref.message, op.name)
    out = [_Element("operation", op.id, op.name, op.scope, op.group) for op in spec.variable_operations]
    out += [_Element("message", vm.id, vm.name, vm.scope, vm.group, owners.get(vm.id))
            for vm in spec.variable_messages]
    out += [_Element("type", vt.id, vt.name, vt.scope, vt.group) for vt in spec.variable_types]
    return out


def _lookup(elements: list[_Element], key: str) -> _Element | None:
    for e in elements:
        if e.id and e.id == key:
            return e
    for e in elements:
        if e.name == key:
            return e
    return None


def _as_selection(sel) -> Selection:
    return sel if isinstance(sel, Selection) else Selection.of(sel)


def validate_selection(spec: VariabilitySpecification, sel: Selection | Iterable[str]) -> ResolutionReport:
    """Compute the inclusion closure of ``sel`` and report what makes it unusable.

    Raises UnknownSelectionError when an entry matches no variable element.
    """
    sel = _as_selection(sel)
    elements = _elements(spec)
    unknown = sorted(k for k in sel.chosen if _lookup(elements, k) is None)
    if unknown:
        raise UnknownSelectionError(unknown)
    selected = {_lookup(elements, k) for k in sel.chosen}
    report = ResolutionReport()

    included = set(selected)
    included |= {e for e in elements if e.scope == "required" and e.kind != "message"}
    edges = []
    for c in spec.constraints:
        source, target = _lookup(elements, c.source), _lookup(elements, c.target)
        if c.kind == "requires" and source is not None and target is not None:
            edges.append((source, target))
    while True:
        op_names = {e.name for e in included if e.kind == "operation"}
        grown = set(included)
        grown |= {e for e in elements
                  if e.kind == "message" and e.scope == "required" and e.owner in op_names}
        grown |= {target for source, target in edges if source in included}
        if grown == included:
            break
        included = grown

    op_names = {e.name for e in included if e.kind == "operation"}
    for e in elements:
        if e.kind == "message" and e in included and e.owner not in op_names:
            how = "selected" if e in selected else "required by a constraint"
            report.violations.append(Finding(
                "unmet-requires", e.name,
                f"unmet requires: message {e.name!r} is {how} but its operation {e.owner!r} is not included"))
    message_by_id = {e.id: e for e in elements if e.kind == "message"}
    for op in spec.variable_operations:
        if op.name in op_names and op.refs and not any(
                message_by_id.get(r.message) in included for r in op.refs):
            report.violations.append(Finding(
                "operation-without-message", op.name,
                f"operation {op.name!r} would have no input or output message"))
    for c in spec.constraints:
        if c.kind != "excludes":
            continue
        a, b = _lookup(elements, c.source), _lookup(elements, c.target)
        if a in included and b in included:
            report.violations.append(Finding(
                "excludes-conflict", a.name, f"excludes conflict: {a.name!r} excludes {b.name!r}"))
    groups: dict[str, list[_Element]] = {}
    for e in elements:
        if e.scope == "alternative" and e.group:
            if e.kind == "message" and e.owner not in op_names:
                continue
            groups.setdefault(e.group, []).append(e)
    for group, members in groups.items():
        chosen = [e.name for e in members if e in included]
        if len(chosen) != 1:
            report.violations.append(Finding(
                "alternative-group", group,
                f"alternative group: exactly one of {', '.join(e.name for e in members)} must be chosen, "
                f"got {len(chosen)}"))
    for e in sorted(selected, key=elements.index):
        if e.scope == "required":
            report.warnings.append(Finding(
                "redundant-selection", e.name, "redundant selection of required element", "warning"))

    report.included = tuple(e.name for e in elements if e in included)
    report.included_keys = frozenset((e.kind, e.name) for e in included)
    return report


def _retag(qname: str) -> str:
    # payload types are written against the ps prefix; inside the schema it is tns
    return "tns:" + qname[3:] if qname.startswith("ps:") else qname


def resolve(p: PsmModel, sel: Selection | Iterable[str] = ()) -> PsmModel:
    """Merge the selected variants into the base contract.

    Returns a model with an empty variability specification. Raises
    SelectionError (carrying the report) when the selection is invalid.
    """
    spec = p.variability
    report = validate_selection(spec, sel)
    if not report.ok:
        raise SelectionError(report)
    included = report.included_keys

    types = {vt.name: vt for vt in spec.variable_types}

    def retype(part: Part) -> Part:
        if part.variable_flag == "s" and part.type in types:
            vt = types[part.type]
            target = vt.name if ("type", vt.name) in included else vt.bound_element
            return Part(part.name, "ps:" + target)
        return Part(part.name, part.type)

    messages_by_id = {vm.id: vm for vm in spec.variable_messages}
    new_messages = tuple(Message(vm.name, tuple(retype(part) for part in vm.parts))
                         for vm in spec.variable_messages if ("message", vm.name) in included)

    def io(ref):
        if ref is None:
            return None
        vm = messages_by_id[ref.message]
        return IoRef(vm.name, ref.name) if ("message", vm.name) in included else None

    d = p.definition
    new_ops = tuple(PtOperation(op.name, io(op.input), io(op.output), io(op.fault))
                    for op in spec.variable_operations if ("operation", op.name) in included)
    new_bops = tuple(BindingOperation(op.name, f"{d.target_namespace}#{op.name}") for op in new_ops)
    port_types = tuple(replace(pt, operations=pt.operations + new_ops) for pt in d.port_types)
    bound = {pt.name for pt in d.port_types}
    bindings = tuple(replace(b, operations=b.operations + new_bops) if b.type in bound else b
                     for b in d.bindings)

    new_types = tuple(
        XsdComplexType(vt.name,
                       tuple(XsdElement(e.name, _retag(e.type), e.min_occurs, e.max_occurs)
                             for e in vt.payload.sequence),
                       _retag(vt.payload.extension_base) if vt.payload.extension_base else None)
        for vt in spec.variable_types if ("type", vt.name) in included)

    definition = replace(d, messages=d.messages + new_messages, port_types=port_types, bindings=bindings)
    schema = replace(p.schema, complex_types=p.schema.complex_types + new_types)
    return PsmModel(definition, schema, VariabilitySpecification(spec.service_id, spec.var_id))
