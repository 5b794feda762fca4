"""PIM to PSM mapping, one function per mapping rule.

Rule order within one interface: types, messages, operations, interface,
participants, variability.  Each interface is transformed independently.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import TransformError, UnknownPrimitiveError
from .pim import (Attribute, DataType, MessageType, Operation, Participant, PimModel,
                  ServiceInterface, VariableType, validate_pim)
from .psm import (Binding, BindingOperation, Definition, IoRef, Message, Part, Port, PortType,
                  PsmModel, PsmVariableMessage, PsmVariableOperation, PsmVariableType,
                  PtOperation, Types, VariabilitySpecification, VarIoRef, WsdlService,
                  XsdComplexType, XsdElement, XsdPackageImport, XsdSchema)
from .xmlio import SOAP_HTTP

DEFAULT_ADDRESS_BASE = "http://localhost/services"

PRIMITIVE_TYPES = {
    "String": "xsd:string",
    "Integer": "xsd:integer",
    "Decimal": "xsd:decimal",
    "Boolean": "xsd:boolean",
    "Date": "xsd:date",
}


@dataclass(frozen=True)
class TransformContext:
    model: PimModel
    interface: ServiceInterface
    address_base: str = DEFAULT_ADDRESS_BASE

    @property
    def wsdl_namespace(self) -> str:
        return f"{self.model.base_uri}/{self.interface.name}.wsdl"

    @property
    def schema_location(self) -> str:
        return f"{self.interface.name}Schema.xsd"

    @property
    def schema_namespace(self) -> str:
        return f"{self.model.base_uri}/{self.schema_location}"


def _cap(name: str) -> str:
    return name[:1].upper() + name[1:]


def ptype_to_simpletype(name: str) -> str:
    try:
        return PRIMITIVE_TYPES[name]
    except KeyError:
        raise UnknownPrimitiveError(name) from None


def _type_ref(type_name: str, ctx: TransformContext, prefix: str) -> str:
    if type_name in PRIMITIVE_TYPES:
        return ptype_to_simpletype(type_name)
    if type_name in ctx.model.variable_types_by_name:
        return type_name
    return f"{prefix}:{type_name}"


def attribute_to_element(attr: Attribute, ctx: TransformContext, prefix: str = "tns") -> XsdElement:
    return XsdElement(attr.name, _type_ref(attr.type, ctx, prefix), attr.min_occurs, attr.max_occurs)


def datatype_to_type(dt: DataType, ctx: TransformContext) -> XsdComplexType:
    return XsdComplexType(dt.name, tuple(attribute_to_element(a, ctx) for a in dt.attributes))


def _part(attr: Attribute, ctx: TransformContext) -> Part:
    flag = "s" if attr.type in ctx.model.variable_types_by_name else "no"
    return Part("part" + _cap(attr.name), _type_ref(attr.type, ctx, "ps"), flag)


def message_type_to_message(mt: MessageType, ctx: TransformContext) -> tuple[Message, XsdComplexType | None]:
    """Map a message type to a WSDL message with one part per attribute.

    Parts are bound directly to schema types (rpc style), so no wrapper
    complex type is produced and the second element is always None.
    """
    return Message(mt.name, tuple(_part(a, ctx) for a in mt.attributes)), None


def operation_to_operation(op: Operation, ctx: TransformContext) -> tuple[PtOperation, BindingOperation]:
    def ref(message):
        return IoRef(message, message) if message else None

    return (PtOperation(op.name, ref(op.input), ref(op.output), ref(op.fault)),
            BindingOperation(op.name, f"{ctx.wsdl_namespace}#{op.name}"))


def service_interface_to_wsdl(si: ServiceInterface, ctx: TransformContext) -> tuple[PortType, Binding]:
    # Variable operations are left out of the base contract.
    pairs = [operation_to_operation(op, ctx) for op in si.operations if not op.is_variable]
    port_type = PortType(si.name + "PortType", tuple(p for p, _ in pairs))
    binding = Binding(si.name + "Binding", port_type.name, SOAP_HTTP, "rpc", tuple(b for _, b in pairs))
    return port_type, binding


def participant_to_service(p: Participant, ctx: TransformContext) -> list[WsdlService]:
    services = []
    for name in p.provides:
        if len(ctx.model.providers(name)) > 1:
            stem, address = name + p.name, f"{ctx.address_base}/{p.name}/{name}"
        else:
            stem, address = name, f"{ctx.address_base}/{name}"
        port = Port(stem + "Port", name + "Binding", address)
        services.append(WsdlService(stem + "Service", (port,)))
    return services


def _variable_type(vt: VariableType, ctx: TransformContext) -> PsmVariableType:
    payload = XsdComplexType(vt.name, tuple(attribute_to_element(a, ctx, "ps") for a in vt.added_attributes),
                             f"ps:{vt.base}")
    return PsmVariableType(vt.kind, vt.mark.scope, vt.base, payload, vt.mark.id or "", vt.mark.group)


def variability_transfer(m: PimModel, ctx: TransformContext) -> VariabilitySpecification:
    si = ctx.interface
    position = [x.name for x in m.interfaces].index(si.name) + 1
    var_ops = [op for op in si.operations if op.is_variable]
    used_messages = {ref for op in var_ops for ref in op.messages}
    var_messages = [mt for mt in m.message_types if mt.is_variable and mt.name in used_messages]
    message_ids = {mt.name: mt.variability.id for mt in var_messages}

    def ref(message):
        return VarIoRef(message_ids[message], message) if message in message_ids else None

    operations = tuple(
        PsmVariableOperation(op.variability.id, op.name, op.variability.scope, op.name,
                             ref(op.input), ref(op.output), ref(op.fault), op.variability.group)
        for op in var_ops)
    messages = tuple(
        PsmVariableMessage(mt.variability.id, mt.name, mt.variability.scope, mt.name,
                           message_type_to_message(mt, ctx)[0].parts, mt.variability.group)
        for mt in var_messages)
    used_types = {a.type for mt in var_messages for a in mt.attributes}
    types = tuple(_variable_type(vt, ctx) for vt in m.variable_types if vt.name in used_types)

    spec = VariabilitySpecification(si.service_id or str(position), si.var_id or str(position),
                                    operations, messages, types)
    constraints = tuple(c for c in m.constraints
                        if spec.endpoint(c.source) is not None and spec.endpoint(c.target) is not None)
    return VariabilitySpecification(spec.service_id, spec.var_id, operations, messages, types, constraints)


def transform_interface(m: PimModel, si: ServiceInterface,
                        address_base: str = DEFAULT_ADDRESS_BASE) -> PsmModel:
    ctx = TransformContext(m, si, address_base)
    complex_types = tuple(datatype_to_type(dt, ctx) for dt in m.data_types)
    schema = XsdSchema(ctx.schema_namespace, complex_types=complex_types)

    base_refs = {ref for op in si.operations if not op.is_variable for ref in op.messages}
    messages = tuple(message_type_to_message(mt, ctx)[0]
                     for mt in m.message_types if mt.name in base_refs and not mt.is_variable)
    port_type, binding = service_interface_to_wsdl(si, ctx)
    services = tuple(s for p in m.providers(si.name) for s in participant_to_service(p, ctx)
                     if s.ports[0].binding == binding.name)
    definition = Definition(si.name, ctx.wsdl_namespace,
                            Types(XsdPackageImport(ctx.schema_namespace, ctx.schema_location)),
                            (), messages, (port_type,), (binding,), services)
    return PsmModel(definition, schema, variability_transfer(m, ctx))


def transform_model(m: PimModel, address_base: str = DEFAULT_ADDRESS_BASE) -> list[PsmModel]:
    """Transform every provided interface of ``m`` into its own PSM model."""
    report = validate_pim(m)
    if not report.ok:
        raise TransformError(report)
    return [transform_interface(m, si, address_base) for si in m.interfaces if m.providers(si.name)]
