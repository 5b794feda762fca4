"""Platform-specific service models: WSDL 1.1 tree, XML Schema tree and the
variability specification, plus loading them back from emitted documents.

Message, port type and binding references are stored as local names; part and
element types are stored as qualified names exactly as they are written
(``ps:`` schema types and ``xsd:`` built-ins in the WSDL, ``tns:`` inside the
schema, bare variable-type names in the variability file).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import xmlio
from .diagnostics import BundleLoadError, CrossReferenceError, ValidationReport, XmlSyntaxError
from .pim import SCOPES, UNBOUNDED, PimConstraint

VARIABLE_FLAGS = ("no", "s")
STYLES = ("rpc", "document")

XSD_BUILTINS = frozenset({
    "string", "integer", "decimal", "boolean", "date", "dateTime", "time", "int", "long",
    "short", "byte", "float", "double", "anyURI", "base64Binary", "hexBinary", "QName",
    "token", "normalizedString", "positiveInteger", "nonNegativeInteger", "duration", "anyType",
})


@dataclass(frozen=True)
class Import:
    namespace: str
    location: str


@dataclass(frozen=True)
class XsdPackageImport:
    namespace: str
    location: str


@dataclass(frozen=True)
class Types:
    schema_ref: XsdPackageImport


@dataclass(frozen=True)
class Part:
    name: str
    type: str
    variable_flag: str = "no"


@dataclass(frozen=True)
class Message:
    name: str
    parts: tuple[Part, ...] = ()


@dataclass(frozen=True)
class IoRef:
    message: str
    name: str


@dataclass(frozen=True)
class PtOperation:
    name: str
    input: IoRef | None = None
    output: IoRef | None = None
    fault: IoRef | None = None

    @property
    def refs(self) -> tuple[IoRef, ...]:
        return tuple(r for r in (self.input, self.output, self.fault) if r)


@dataclass(frozen=True)
class PortType:
    name: str
    operations: tuple[PtOperation, ...] = ()


@dataclass(frozen=True)
class BindingOperation:
    name: str
    soap_action: str


@dataclass(frozen=True)
class Binding:
    name: str
    type: str
    transport: str
    style: str
    operations: tuple[BindingOperation, ...] = ()


@dataclass(frozen=True)
class Port:
    name: str
    binding: str
    address: str


@dataclass(frozen=True)
class WsdlService:
    name: str
    ports: tuple[Port, ...] = ()


@dataclass(frozen=True)
class Definition:
    name: str
    target_namespace: str
    types: Types
    imports: tuple[Import, ...] = ()
    messages: tuple[Message, ...] = ()
    port_types: tuple[PortType, ...] = ()
    bindings: tuple[Binding, ...] = ()
    services: tuple[WsdlService, ...] = ()


@dataclass(frozen=True)
class XsdElement:
    name: str
    type: str
    min_occurs: int = 1
    max_occurs: int | str = 1


@dataclass(frozen=True)
class XsdSimpleType:
    name: str
    base: str
    facets: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class XsdComplexType:
    name: str
    sequence: tuple[XsdElement, ...] = ()
    extension_base: str | None = None


@dataclass(frozen=True)
class XsdSchema:
    target_namespace: str
    imports: tuple[XsdPackageImport, ...] = ()
    elements: tuple[XsdElement, ...] = ()
    simple_types: tuple[XsdSimpleType, ...] = ()
    complex_types: tuple[XsdComplexType, ...] = ()


@dataclass(frozen=True)
class VarIoRef:
    message: str  # variability id of the variable message
    name: str


@dataclass(frozen=True)
class PsmVariableOperation:
    id: str
    name: str
    scope: str
    bound_element: str
    input: VarIoRef | None = None
    output: VarIoRef | None = None
    fault: VarIoRef | None = None
    group: str | None = None

    @property
    def refs(self) -> tuple[VarIoRef, ...]:
        return tuple(r for r in (self.input, self.output, self.fault) if r)


@dataclass(frozen=True)
class PsmVariableMessage:
    id: str
    name: str
    scope: str
    bound_element: str
    parts: tuple[Part, ...] = ()
    group: str | None = None


@dataclass(frozen=True)
class PsmVariableType:
    kind: str
    scope: str
    bound_element: str
    payload: XsdComplexType
    id: str = ""
    group: str | None = None

    @property
    def name(self) -> str:
        return self.payload.name


@dataclass(frozen=True)
class VariabilitySpecification:
    service_id: str = ""
    var_id: str = ""
    variable_operations: tuple[PsmVariableOperation, ...] = ()
    variable_messages: tuple[PsmVariableMessage, ...] = ()
    variable_types: tuple[PsmVariableType, ...] = ()
    constraints: tuple[PimConstraint, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.variable_operations or self.variable_messages
                    or self.variable_types or self.constraints)

    def endpoint(self, key: str) -> str | None:
        """Name of the variable element addressed by id or name, if any."""
        for element in (*self.variable_operations, *self.variable_messages, *self.variable_types):
            if key and key in (element.id, element.name):
                return element.name
        return None


@dataclass(frozen=True)
class PsmModel:
    definition: Definition
    schema: XsdSchema
    variability: VariabilitySpecification

    @property
    def name(self) -> str:
        return self.definition.name


# -- validation --------------------------------------------------------------

def _duplicates(report: ValidationReport, what: str, names) -> None:
    seen = set()
    for name in names:
        if name in seen:
            report.add("duplicate-name", name, f"duplicate {what} name {name!r}")
        seen.add(name)


def _split(qname: str) -> tuple[str, str]:
    prefix, _, local = qname.rpartition(":")
    return prefix, local


def validate_psm(p: PsmModel) -> ValidationReport:
    """Report dangling references, duplicate names/ids and bad enum values."""
    report = ValidationReport()
    d, schema, spec = p.definition, p.schema, p.variability

    schema_types = {t.name for t in schema.complex_types} | {t.name for t in schema.simple_types}
    variable_type_names = {t.name for t in spec.variable_types}

    def check_type(owner: str, qname: str, local_prefix: str, allow_variable: bool = False) -> None:
        prefix, local = _split(qname)
        if prefix == "xsd" and local in XSD_BUILTINS:
            return
        if prefix == local_prefix and local in schema_types:
            return
        if allow_variable and not prefix and local in variable_type_names:
            return
        report.add("unresolved-type", owner, f"type {qname!r} does not resolve")

    messages = {m.name for m in d.messages}
    port_types = {pt.name: pt for pt in d.port_types}
    bindings = {b.name for b in d.bindings}
    _duplicates(report, "message", [m.name for m in d.messages])
    _duplicates(report, "portType", [pt.name for pt in d.port_types])
    _duplicates(report, "binding", [b.name for b in d.bindings])
    _duplicates(report, "service", [s.name for s in d.services])
    _duplicates(report, "port", [port.name for s in d.services for port in s.ports])
    _duplicates(report, "complexType", [t.name for t in schema.complex_types] + [t.name for t in schema.simple_types])

    if d.types.schema_ref.namespace != schema.target_namespace:
        report.add("schema-namespace-mismatch", d.name,
                   f"types import {d.types.schema_ref.namespace!r} is not the schema namespace "
                   f"{schema.target_namespace!r}")
    for m in d.messages:
        _duplicates(report, f"part in {m.name}", [part.name for part in m.parts])
        for part in m.parts:
            check_type(f"{m.name}.{part.name}", part.type, "ps")
    for pt in d.port_types:
        _duplicates(report, f"operation in {pt.name}", [op.name for op in pt.operations])
        for op in pt.operations:
            if not (op.input or op.output):
                report.add("operation-without-message", op.name, "operation has neither input nor output")
            for ref in op.refs:
                if ref.message not in messages:
                    report.add("unknown-message", op.name,
                               f"operation references unknown message {ref.message!r}")
    for b in d.bindings:
        if b.type not in port_types:
            report.add("unknown-port-type", b.name, f"binding references unknown portType {b.type!r}")
        else:
            known = {op.name for op in port_types[b.type].operations}
            for bop in b.operations:
                if bop.name not in known:
                    report.add("unknown-binding-operation", b.name,
                               f"binding operation {bop.name!r} is not in portType {b.type!r}")
        if b.style not in STYLES:
            report.add("bad-style", b.name, f"binding style must be rpc or document, got {b.style!r}")
    for s in d.services:
        for port in s.ports:
            if port.binding not in bindings:
                report.add("unknown-binding", port.name, f"port references unknown binding {port.binding!r}")

    for t in schema.complex_types:
        _duplicates(report, f"element in {t.name}", [e.name for e in t.sequence])
        if t.extension_base:
            check_type(t.name, t.extension_base, "tns")
        for e in t.sequence:
            check_type(f"{t.name}.{e.name}", e.type, "tns")

    ids = [x.id for x in (*spec.variable_operations, *spec.variable_messages, *spec.variable_types) if x.id]
    seen: set[str] = set()
    for vid in ids:
        if vid in seen:
            report.add("duplicate-variability-id", vid, f"duplicate variability id {vid!r}")
        seen.add(vid)
    _duplicates(report, "variable element",
                [x.name for x in (*spec.variable_operations, *spec.variable_messages, *spec.variable_types)])
    message_ids = {m.id for m in spec.variable_messages}
    for x in (*spec.variable_operations, *spec.variable_messages, *spec.variable_types):
        if x.scope not in SCOPES:
            report.add("bad-scope", x.name, f"scope must be optional, alternative or required, got {x.scope!r}")
    for op in spec.variable_operations:
        for ref in op.refs:
            if ref.message not in message_ids:
                report.add("unknown-variable-message", op.name,
                           f"variable operation references unknown message id {ref.message!r}")
    for vm in spec.variable_messages:
        for part in vm.parts:
            if part.variable_flag not in VARIABLE_FLAGS:
                report.add("bad-variable-flag", vm.name, f"vp must be 'no' or 's', got {part.variable_flag!r}")
            check_type(f"{vm.name}.{part.name}", part.type, "ps", allow_variable=True)
    for vt in spec.variable_types:
        base = vt.payload.extension_base
        if base is None:
            report.add("variable-type-without-base", vt.name, "variable type payload has no extension base")
        else:
            check_type(vt.name, base, "ps")
            if _split(base)[1] != vt.bound_element:
                report.add("bound-element-mismatch", vt.name,
                           f"bound element {vt.bound_element!r} differs from extension base {base!r}")
        for e in vt.payload.sequence:
            check_type(f"{vt.name}.{e.name}", e.type, "ps")
    for c in spec.constraints:
        for end in (c.source, c.target):
            if spec.endpoint(end) is None:
                report.add("unknown-constraint-endpoint", end,
                           f"constraint endpoint {end!r} names no variable element")
    return report


# -- loading -----------------------------------------------------------------

def _doc(data: str | bytes, what: str) -> xmlio.Document:
    try:
        return xmlio.parse(data)
    except XmlSyntaxError as exc:
        raise BundleLoadError(f"{what}: {exc}") from None


def _need(node: xmlio.Node, attr: str) -> str:
    value = node.get(attr)
    if value is None:
        raise BundleLoadError(f"{node.line}:{node.column}: <{node.tag}> is missing attribute {attr!r}")
    return value


def _expect(node: xmlio.Node, uri: str, local: str) -> None:
    if node.local != local or node.uri != uri:
        raise BundleLoadError(f"{node.line}:{node.column}: expected {local} in {uri}, got <{node.tag}>")


def _local_ref(node: xmlio.Node, attr: str, prefix: str = "tns") -> str:
    value = _need(node, attr)
    got, local = _split(value)
    if got != prefix:
        raise BundleLoadError(f"{node.line}:{node.column}: {attr}={value!r} must use prefix {prefix!r}")
    return local


def _occurs(value: str | None, node: xmlio.Node) -> int | str:
    if value is None:
        return 1
    if value == UNBOUNDED:
        return value
    try:
        return int(value)
    except ValueError:
        raise BundleLoadError(f"{node.line}:{node.column}: bad occurrence value {value!r}") from None


def _load_element(node: xmlio.Node) -> XsdElement:
    _expect(node, xmlio.XSD_NS, "element")
    return XsdElement(_need(node, "name"), _need(node, "type"),
                      _occurs(node.get("minOccurs"), node), _occurs(node.get("maxOccurs"), node))


def _load_sequence(node: xmlio.Node | None) -> tuple[XsdElement, ...]:
    if node is None:
        return ()
    _expect(node, xmlio.XSD_NS, "sequence")
    return tuple(_load_element(e) for e in node.elements)


def _load_complex_type(node: xmlio.Node) -> XsdComplexType:
    _expect(node, xmlio.XSD_NS, "complexType")
    content = node.find("complexContent")
    if content is not None:
        ext = content.find("extension")
        if ext is None:
            raise BundleLoadError(f"{content.line}:{content.column}: complexContent without extension")
        return XsdComplexType(_need(node, "name"), _load_sequence(ext.find("sequence")), _need(ext, "base"))
    return XsdComplexType(_need(node, "name"), _load_sequence(node.find("sequence")))


def _load_io(node: xmlio.Node) -> IoRef:
    return IoRef(_local_ref(node, "message"), _need(node, "name"))


def _load_wsdl(doc: xmlio.Document) -> Definition:
    root = doc.root
    _expect(root, xmlio.WSDL_NS, "definitions")
    schema_ref = None
    imports, messages, port_types, bindings, services = [], [], [], [], []
    for node in root.elements:
        if node.uri != xmlio.WSDL_NS:
            raise BundleLoadError(f"{node.line}:{node.column}: unexpected <{node.tag}>")
        if node.local == "import":
            imports.append(Import(_need(node, "namespace"), _need(node, "location")))
        elif node.local == "types":
            schema = node.find("schema")
            imp = schema.find("import") if schema is not None else None
            if imp is None:
                raise BundleLoadError(f"{node.line}:{node.column}: types must import the schema")
            schema_ref = XsdPackageImport(_need(imp, "namespace"), _need(imp, "schemaLocation"))
        elif node.local == "message":
            parts = tuple(Part(_need(p, "name"), _need(p, "type")) for p in node.findall("part"))
            messages.append(Message(_need(node, "name"), parts))
        elif node.local == "portType":
            ops = []
            for op in node.findall("operation"):
                io = {child.local: _load_io(child) for child in op.elements}
                ops.append(PtOperation(_need(op, "name"), io.get("input"), io.get("output"), io.get("fault")))
            port_types.append(PortType(_need(node, "name"), tuple(ops)))
        elif node.local == "binding":
            soap = next((c for c in node.elements if c.uri == xmlio.SOAP_NS and c.local == "binding"), None)
            if soap is None:
                raise BundleLoadError(f"{node.line}:{node.column}: binding without soap:binding")
            bops = []
            for op in node.findall("operation"):
                soap_op = op.find("operation")
                bops.append(BindingOperation(_need(op, "name"),
                                             _need(soap_op, "soapAction") if soap_op is not None else ""))
            bindings.append(Binding(_need(node, "name"), _local_ref(node, "type"),
                                    _need(soap, "transport"), _need(soap, "style"), tuple(bops)))
        elif node.local == "service":
            ports = []
            for port in node.findall("port"):
                address = port.find("address")
                if address is None:
                    raise BundleLoadError(f"{port.line}:{port.column}: port without soap:address")
                ports.append(Port(_need(port, "name"), _local_ref(port, "binding"), _need(address, "location")))
            services.append(WsdlService(_need(node, "name"), tuple(ports)))
        else:
            raise BundleLoadError(f"{node.line}:{node.column}: unexpected <{node.tag}>")
    if schema_ref is None:
        raise BundleLoadError("WSDL has no types section")
    return Definition(_need(root, "name"), _need(root, "targetNamespace"), Types(schema_ref),
                      tuple(imports), tuple(messages), tuple(port_types), tuple(bindings), tuple(services))


def _load_xsd(doc: xmlio.Document) -> XsdSchema:
    root = doc.root
    _expect(root, xmlio.XSD_NS, "schema")
    imports, elements, simple, complex_ = [], [], [], []
    for node in root.elements:
        if node.local == "import":
            imports.append(XsdPackageImport(_need(node, "namespace"), _need(node, "schemaLocation")))
        elif node.local == "element":
            elements.append(_load_element(node))
        elif node.local == "simpleType":
            restriction = node.find("restriction")
            if restriction is None:
                raise BundleLoadError(f"{node.line}:{node.column}: simpleType without restriction")
            facets = tuple((f.local, _need(f, "value")) for f in restriction.elements)
            simple.append(XsdSimpleType(_need(node, "name"), _need(restriction, "base"), facets))
        elif node.local == "complexType":
            complex_.append(_load_complex_type(node))
        else:
            raise BundleLoadError(f"{node.line}:{node.column}: unexpected <{node.tag}>")
    return XsdSchema(_need(root, "targetNamespace"), tuple(imports), tuple(elements),
                     tuple(simple), tuple(complex_))


def _text(node: xmlio.Node, local: str, required: bool = True) -> str:
    child = node.find(local)
    if child is None:
        if required:
            raise BundleLoadError(f"{node.line}:{node.column}: <{node.tag}> has no <{local}>")
        return ""
    return child.text or ""


def _var_io(node: xmlio.Node, local: str) -> VarIoRef | None:
    child = node.find(local)
    return VarIoRef(_need(child, "message"), _need(child, "name")) if child is not None else None


def _section(root: xmlio.Node, local: str) -> list[xmlio.Node]:
    node = root.find(local)
    return node.elements if node is not None else []


def _load_variability(doc: xmlio.Document | None) -> VariabilitySpecification:
    if doc is None:
        return VariabilitySpecification()
    root = doc.root
    if root.tag != "variability":
        raise BundleLoadError(f"{root.line}:{root.column}: root must be <variability>, got <{root.tag}>")
    ops = []
    for node in _section(root, "Operations"):
        ops.append(PsmVariableOperation(
            _text(node, "ID"), _text(node, "NAME"), _text(node, "SCOPE"), _text(node, "BOUNDeLEMENT"),
            _var_io(node, "input"), _var_io(node, "output"), _var_io(node, "fault"),
            _text(node, "GROUP", required=False) or None))
    messages = []
    for node in _section(root, "messages"):
        parts = tuple(Part(_need(p, "name"), _need(p, "type"), _need(p, "vp")) for p in node.findall("part"))
        messages.append(PsmVariableMessage(
            _text(node, "ID"), _text(node, "NAME"), _text(node, "SCOPE"), _text(node, "BOUNDeLEMENT"),
            parts, _text(node, "GROUP", required=False) or None))
    types = []
    for node in _section(root, "types"):
        kinds = {"Simplevariabletype": "simple", "Complexvariabletype": "complex"}
        if node.tag not in kinds:
            raise BundleLoadError(f"{node.line}:{node.column}: unexpected <{node.tag}> in types")
        payload = node.find("complexType")
        if payload is None:
            raise BundleLoadError(f"{node.line}:{node.column}: variable type without complexType payload")
        types.append(PsmVariableType(
            kinds[node.tag], _text(node, "SCOPE"), _text(node, "BOUNDeLEMENT"),
            _load_complex_type(payload), _text(node, "ID"), _text(node, "GROUP", required=False) or None))
    constraints = tuple(PimConstraint(_need(c, "kind"), _need(c, "from"), _need(c, "to"))
                        for c in _section(root, "constraints"))
    return VariabilitySpecification(_text(root, "service", False), _text(root, "varId", False),
                                    tuple(ops), tuple(messages), tuple(types), constraints)


def load_bundle(wsdl: str | bytes, xsd: str | bytes, var: str | bytes | None = None) -> PsmModel:
    """Rebuild a :class:`PsmModel` from its three emitted documents.

    ``var`` may be None or blank for a bundle without variability. References that
    cross documents (schema namespace, variable message ids, part types) must
    resolve; purely WSDL-internal dangling references are left to validate_psm.
    """
    wsdl_doc = _doc(wsdl, "WSDL")
    xsd_doc = _doc(xsd, "XSD")
    blank = var is None or not (var.strip() if isinstance(var, (str, bytes)) else var)
    var_doc = None if blank else _doc(var, "variability file")

    definition = _load_wsdl(wsdl_doc)
    schema = _load_xsd(xsd_doc)
    spec = _load_variability(var_doc)

    if definition.types.schema_ref.namespace != schema.target_namespace:
        raise CrossReferenceError(
            f"WSDL imports schema namespace {definition.types.schema_ref.namespace!r} "
            f"but the XSD declares {schema.target_namespace!r}")
    if var_doc is not None:
        ps = var_doc.root.nsmap.get("ps")
        if ps is not None and ps != schema.target_namespace:
            raise CrossReferenceError(f"variability file binds ps to {ps!r}, "
                                      f"the schema namespace is {schema.target_namespace!r}")
    schema_names = {t.name for t in schema.complex_types} | {t.name for t in schema.simple_types}
    for m in definition.messages:
        for part in m.parts:
            prefix, local = _split(part.type)
            if prefix == "ps" and local not in schema_names:
                raise CrossReferenceError(f"part {m.name}.{part.name} type {part.type!r} is not in the schema")
    message_ids = {m.id for m in spec.variable_messages}
    for op in spec.variable_operations:
        for ref in op.refs:
            if ref.message not in message_ids:
                raise CrossReferenceError(f"variable operation {op.name!r} references message id "
                                          f"{ref.message!r} which matches no variable message")
    variable_names = {t.name for t in spec.variable_types}
    for vm in spec.variable_messages:
        for part in vm.parts:
            prefix, local = _split(part.type)
            if (prefix == "ps" and local not in schema_names) or (not prefix and local not in variable_names):
                raise CrossReferenceError(f"variable message part {vm.name}.{part.name} type "
                                          f"{part.type!r} does not resolve")
    for vt in spec.variable_types:
        prefix, local = _split(vt.payload.extension_base or "")
        if prefix == "ps" and local not in schema_names:
            raise CrossReferenceError(f"variable type {vt.name!r} extends {vt.payload.extension_base!r}, "
                                      "which is not in the schema")
    return PsmModel(definition, schema, spec)
