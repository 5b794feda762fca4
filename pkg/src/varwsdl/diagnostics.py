"""Error types and the finding/report containers shared by every stage."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


class VarwsdlError(Exception):
    """Base class for every error raised by the toolchain."""


class XmlSyntaxError(VarwsdlError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ModelParseError(VarwsdlError):
    """A service model document is well-formed XML but not a valid model."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"{line}:{column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


class UnresolvedReferenceError(ModelParseError):
    def __init__(self, name: str, what: str, line: int = 0, column: int = 0):
        super().__init__(f"unresolved {what} reference {name!r}", line, column)
        self.name = name


class UnknownPrimitiveError(VarwsdlError):
    def __init__(self, name: str):
        super().__init__(f"unknown primitive type {name!r}")
        self.name = name


class BundleLoadError(VarwsdlError):
    """One of the three bundle documents is malformed."""


class CrossReferenceError(BundleLoadError):
    """A reference from one bundle document (or catalogue) to another does not resolve."""


class TransformError(VarwsdlError):
    def __init__(self, report: "ValidationReport"):
        super().__init__(f"model has {len(report.errors)} validation violation(s)")
        self.report = report


class UnknownSelectionError(VarwsdlError):
    def __init__(self, names):
        self.names = list(names)
        super().__init__("unknown variability id or name: " + ", ".join(self.names))


class SelectionError(VarwsdlError):
    def __init__(self, report):
        super().__init__(f"selection has {len(report.violations)} violation(s)")
        self.report = report


@dataclass(frozen=True)
class Finding:
    code: str
    element: str
    message: str
    severity: str = "error"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def __str__(self) -> str:
        return f"{self.severity}: {self.element}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def add(self, code: str, element: str, message: str, severity: str = "error") -> None:
        self.findings.append(Finding(code, element, message, severity))

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def messages(self) -> list[str]:
        return [f.message for f in self.findings]

    def __len__(self) -> int:
        return len(self.findings)

    def __iter__(self):
        return iter(self.findings)
