"""Serialize a PSM model into its WSDL, XML Schema and variability documents."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from pathlib import Path

from . import xmlio
from .psm import PsmModel, XsdComplexType, XsdSchema
from .xmlio import Comment, Document, Node

VARIABLE_TYPE_TAGS = {"simple": "Simplevariabletype", "complex": "Complexvariabletype"}


def _occurs(value) -> str:
    return str(value)


def _complex_type(parent: Node, t: XsdComplexType) -> None:
    node = parent.add("xsd:complexType", ("name", t.name))
    if t.extension_base is not None:
        node = node.add("xsd:complexContent").add("xsd:extension", ("base", t.extension_base))
    seq = node.add("xsd:sequence")
    for e in t.sequence:
        seq.add("xsd:element", ("name", e.name), ("type", e.type),
                ("minOccurs", _occurs(e.min_occurs)), ("maxOccurs", _occurs(e.max_occurs)))


def wsdl_tree(p: PsmModel) -> Node:
    d = p.definition
    root = Node("wsdl:definitions", [
        ("xmlns:wsdl", xmlio.WSDL_NS), ("xmlns:soap", xmlio.SOAP_NS), ("xmlns:xsd", xmlio.XSD_NS),
        ("xmlns:ps", p.schema.target_namespace), ("xmlns:tns", d.target_namespace),
        ("name", d.name), ("targetNamespace", d.target_namespace)])
    for imp in d.imports:
        root.add("wsdl:import", ("namespace", imp.namespace), ("location", imp.location))
    ref = d.types.schema_ref
    root.add("wsdl:types").add("xsd:schema").add(
        "xsd:import", ("namespace", ref.namespace), ("schemaLocation", ref.location))
    for m in d.messages:
        node = root.add("wsdl:message", ("name", m.name))
        for part in m.parts:
            node.add("wsdl:part", ("name", part.name), ("type", part.type))
    for pt in d.port_types:
        node = root.add("wsdl:portType", ("name", pt.name))
        for op in pt.operations:
            op_node = node.add("wsdl:operation", ("name", op.name))
            for tag, io in (("wsdl:input", op.input), ("wsdl:output", op.output), ("wsdl:fault", op.fault)):
                if io is not None:
                    op_node.add(tag, ("message", "tns:" + io.message), ("name", io.name))
    for b in d.bindings:
        node = root.add("wsdl:binding", ("name", b.name), ("type", "tns:" + b.type))
        node.add("soap:binding", ("style", b.style), ("transport", b.transport))
        for bop in b.operations:
            node.add("wsdl:operation", ("name", bop.name)).add("soap:operation", ("soapAction", bop.soap_action))
    for s in d.services:
        node = root.add("wsdl:service", ("name", s.name))
        for port in s.ports:
            node.add("wsdl:port", ("name", port.name), ("binding", "tns:" + port.binding)).add(
                "soap:address", ("location", port.address))
    return root


def xsd_tree(schema: XsdSchema) -> Node:
    root = Node("xsd:schema", [("xmlns:xsd", xmlio.XSD_NS), ("elementFormDefault", "qualified"),
                               ("xmlns:tns", schema.target_namespace),
                               ("targetNamespace", schema.target_namespace)])
    for imp in schema.imports:
        root.add("xsd:import", ("namespace", imp.namespace), ("schemaLocation", imp.location))
    for e in schema.elements:
        root.add("xsd:element", ("name", e.name), ("type", e.type))
    for st in schema.simple_types:
        restriction = root.add("xsd:simpleType", ("name", st.name)).add("xsd:restriction", ("base", st.base))
        for facet, value in st.facets:
            restriction.add("xsd:" + facet, ("value", value))
    for ct in schema.complex_types:
        _complex_type(root, ct)
    return root


def _catalogue_fields(node: Node, vid: str, name: str, scope: str, group: str | None, bound: str) -> None:
    node.add("ID", text=vid)
    node.add("NAME", text=name)
    node.add("SCOPE", text=scope)
    if group:
        node.add("GROUP", text=group)
    node.add("BOUNDeLEMENT", text=bound)


def variability_tree(p: PsmModel) -> Node:
    spec = p.variability
    root = Node("variability", [("xmlns:ps", p.schema.target_namespace), ("xmlns:xsd", xmlio.XSD_NS)])
    root.add("service", text=spec.service_id)
    root.add("varId", text=spec.var_id)
    section = root.add("Operations")
    for op in spec.variable_operations:
        node = section.add("variableOperation")
        _catalogue_fields(node, op.id, op.name, op.scope, op.group, op.bound_element)
        for tag, io in (("input", op.input), ("output", op.output), ("fault", op.fault)):
            if io is not None:
                node.add(tag, ("message", io.message), ("name", io.name))
    section = root.add("messages")
    for vm in spec.variable_messages:
        node = section.add("variablemessage")
        _catalogue_fields(node, vm.id, vm.name, vm.scope, vm.group, vm.bound_element)
        for part in vm.parts:
            node.add("part", ("name", part.name), ("type", part.type), ("vp", part.variable_flag))
    section = root.add("types")
    for vt in spec.variable_types:
        node = section.add(VARIABLE_TYPE_TAGS[vt.kind])
        _complex_type(node, vt.payload)
        # the type's name lives in its payload, so NAME stays empty
        _catalogue_fields(node, vt.id, "", vt.scope, vt.group, vt.bound_element)
    section = root.add("constraints")
    for c in spec.constraints:
        section.add("constraint", ("kind", c.kind), ("from", c.source), ("to", c.target))
    return root


def emit_wsdl(p: PsmModel, comment: str | None = None) -> str:
    prolog = [Comment(comment)] if comment else []
    return xmlio.serialize(Document(wsdl_tree(p), prolog))


def emit_xsd(p: PsmModel) -> str:
    return xmlio.serialize(xsd_tree(p.schema))


def emit_variability(p: PsmModel) -> str:
    return xmlio.serialize(variability_tree(p))


@dataclass(frozen=True)
class ArtifactBundle:
    wsdl_path: Path
    xsd_path: Path
    variability_path: Path | None
    digests: dict[str, str]

    @property
    def paths(self) -> list[Path]:
        return [x for x in (self.wsdl_path, self.xsd_path, self.variability_path) if x is not None]


def _write(path: Path, text: str) -> str:
    data = text.encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def write_bundle(p: PsmModel, outdir: str | Path) -> ArtifactBundle:
    """Write ``<name>.wsdl``, ``<name>Schema.xsd`` and ``<name>-variability.xml``.

    Raises OSError (carrying the offending path) when the directory is unwritable.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "wsdl": outdir / f"{p.name}.wsdl",
        "xsd": outdir / f"{p.name}Schema.xsd",
        "variability": outdir / f"{p.name}-variability.xml",
    }
    texts = {"wsdl": emit_wsdl(p), "xsd": emit_xsd(p), "variability": emit_variability(p)}
    digests = {str(paths[k]): _write(paths[k], texts[k]) for k in paths}
    return ArtifactBundle(paths["wsdl"], paths["xsd"], paths["variability"], digests)


def write_resolved(p: PsmModel, outdir: str | Path, provenance: str | None = None) -> ArtifactBundle:
    """Write a resolved contract as ``<name>.resolved.wsdl`` + ``<name>Schema.resolved.xsd``.

    The WSDL's schema import is pointed at the resolved schema file.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    wsdl_path = outdir / f"{p.name}.resolved.wsdl"
    xsd_path = outdir / f"{p.name}Schema.resolved.xsd"
    ref = replace(p.definition.types.schema_ref, location=xsd_path.name)
    p = replace(p, definition=replace(p.definition, types=replace(p.definition.types, schema_ref=ref)))
    digests = {str(wsdl_path): _write(wsdl_path, emit_wsdl(p, provenance)),
               str(xsd_path): _write(xsd_path, emit_xsd(p))}
    return ArtifactBundle(wsdl_path, xsd_path, None, digests)
