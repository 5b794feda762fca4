"""Minimal XML tree with position tracking and canonical serialization.

The canonical form is what every emitted document looks like and what golden
files are compared under: UTF-8 declaration, two-space indentation, LF line
endings, one element per line, text-only elements inline, empty elements
self-closed, whitespace around text trimmed, and attributes in a fixed order
per element type.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat

from .diagnostics import XmlSyntaxError

DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>'

WSDL_NS = "http://schemas.xmlsoap.org/wsdl/"
SOAP_NS = "http://schemas.xmlsoap.org/wsdl/soap/"
XSD_NS = "http://www.w3.org/2001/XMLSchema"
SOAP_HTTP = "http://schemas.xmlsoap.org/soap/http"

# Attributes not listed keep document order after the listed ones.
ATTRIBUTE_ORDER: dict[str, tuple[str, ...]] = {
    "wsdl:definitions": ("xmlns:wsdl", "xmlns:soap", "xmlns:xsd", "xmlns:ps",
                         "xmlns:tns", "name", "targetNamespace"),
    "wsdl:import": ("namespace", "location"),
    "xsd:import": ("namespace", "schemaLocation"),
    "wsdl:message": ("name",),
    "wsdl:part": ("name", "type"),
    "wsdl:portType": ("name",),
    "wsdl:operation": ("name",),
    "wsdl:input": ("message", "name"),
    "wsdl:output": ("message", "name"),
    "wsdl:fault": ("message", "name"),
    "wsdl:binding": ("name", "type"),
    "soap:binding": ("style", "transport"),
    "soap:operation": ("soapAction",),
    "wsdl:service": ("name",),
    "wsdl:port": ("name", "binding"),
    "soap:address": ("location",),
    "xsd:schema": ("xmlns:xsd", "elementFormDefault", "xmlns:tns", "targetNamespace"),
    "xsd:element": ("name", "type", "minOccurs", "maxOccurs"),
    "xsd:complexType": ("name",),
    "xsd:simpleType": ("name",),
    "xsd:restriction": ("base",),
    "xsd:extension": ("base",),
    "variability": ("xmlns:ps", "xmlns:xsd"),
    "input": ("message", "name"),
    "output": ("message", "name"),
    "fault": ("message", "name"),
    "part": ("name", "type", "vp"),
    "constraint": ("kind", "from", "to"),
}


@dataclass
class Comment:
    text: str


@dataclass
class Node:
    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    children: list["Node | Comment"] = field(default_factory=list)
    text: str | None = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)
    nsmap: dict[str, str] = field(default_factory=dict, compare=False, repr=False)

    @property
    def prefix(self) -> str:
        return self.tag.partition(":")[0] if ":" in self.tag else ""

    @property
    def local(self) -> str:
        return self.tag.rpartition(":")[2]

    @property
    def uri(self) -> str | None:
        return self.nsmap.get(self.prefix)

    def get(self, name: str, default: str | None = None) -> str | None:
        for key, value in self.attrs:
            if key == name:
                return value
        return default

    @property
    def elements(self) -> list["Node"]:
        return [c for c in self.children if isinstance(c, Node)]

    def find(self, local: str) -> "Node | None":
        for child in self.elements:
            if child.local == local:
                return child
        return None

    def findall(self, local: str) -> list["Node"]:
        return [c for c in self.elements if c.local == local]

    def add(self, tag: str, *attrs: tuple[str, str | None], text: str | None = None) -> "Node":
        """Append and return a child; attributes whose value is None are dropped."""
        child = Node(tag, [(k, v) for k, v in attrs if v is not None], text=text)
        self.children.append(child)
        return child


@dataclass
class Document:
    root: Node
    prolog: list[Comment] = field(default_factory=list)


def parse(data: str | bytes) -> Document:
    """Parse ``data`` into a :class:`Document`, tracking element positions."""
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    stack: list[Node] = []
    buffers: list[list[str]] = []
    doc = Document(Node(""))
    seen_root = False

    def start(tag, flat):
        nonlocal seen_root
        attrs = list(zip(flat[::2], flat[1::2]))
        nsmap = dict(stack[-1].nsmap) if stack else {"xml": "http://www.w3.org/XML/1998/namespace"}
        for key, value in attrs:
            if key == "xmlns":
                nsmap[""] = value
            elif key.startswith("xmlns:"):
                nsmap[key[6:]] = value
        node = Node(tag, attrs, line=parser.CurrentLineNumber,
                    column=parser.CurrentColumnNumber + 1, nsmap=nsmap)
        if stack:
            stack[-1].children.append(node)
        else:
            doc.root = node
            seen_root = True
        stack.append(node)
        buffers.append([])

    def end(tag):
        node = stack.pop()
        text = "".join(buffers.pop()).strip()
        if text:
            if node.elements:
                raise XmlSyntaxError(f"mixed content in <{tag}> is not supported",
                                     node.line, node.column)
            node.text = text

    def chars(data):
        if buffers:
            buffers[-1].append(data)

    def comment(data):
        if stack:
            stack[-1].children.append(Comment(data.strip()))
        elif not seen_root:
            doc.prolog.append(Comment(data.strip()))

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.CommentHandler = comment
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise XmlSyntaxError(expat.errors.messages[exc.code], exc.lineno, exc.offset + 1) from None
    if not seen_root:
        raise XmlSyntaxError("no root element", 1, 1)
    return doc


def _escape_attr(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;").replace("\t", "&#9;").replace("\n", "&#10;")
            .replace("\r", "&#13;"))


def _escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _ordered(node: Node) -> list[tuple[str, str]]:
    order = ATTRIBUTE_ORDER.get(node.tag, ())
    rank = {name: i for i, name in enumerate(order)}
    indexed = list(enumerate(node.attrs))
    indexed.sort(key=lambda item: (rank.get(item[1][0], len(order)), item[0]))
    return [pair for _, pair in indexed]


def _comment(text: str) -> str:
    # "--" may not appear inside a comment
    return "<!-- " + text.replace("--", "- -") + " -->"


def _write(node: Node | Comment, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(node, Comment):
        out.append(pad + _comment(node.text))
        return
    head = "<" + node.tag + "".join(f' {k}="{_escape_attr(v)}"' for k, v in _ordered(node))
    if node.children:
        if node.text:
            raise ValueError(f"<{node.tag}> has both text and children")
        out.append(pad + head + ">")
        for child in node.children:
            _write(child, depth + 1, out)
        out.append(f"{pad}</{node.tag}>")
    elif node.text:
        out.append(f"{pad}{head}>{_escape_text(node.text)}</{node.tag}>")
    else:
        out.append(pad + head + "/>")


def serialize(doc: Document | Node) -> str:
    if isinstance(doc, Node):
        doc = Document(doc)
    out = [DECLARATION]
    for comment in doc.prolog:
        out.append(_comment(comment.text))
    _write(doc.root, 0, out)
    return "\n".join(out) + "\n"


def canonicalize(data: str | bytes) -> str:
    """Re-serialize any supported XML document in canonical form."""
    return serialize(parse(data))
