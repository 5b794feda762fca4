"""Command-line entry point: ``varwsdl transform | resolve | validate``.

Exit codes: 0 clean, 1 validation findings, 2 parse or I/O error,
3 selection violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import (BundleLoadError, CrossReferenceError, Finding, ModelParseError,
                          SelectionError, UnknownSelectionError, VarwsdlError)
from .emitter import write_bundle, write_resolved
from .pim import parse_pim, validate_pim
from .psm import load_bundle, validate_psm
from .resolver import Selection, resolve, validate_selection
from .transform import DEFAULT_ADDRESS_BASE, transform_model

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR, EXIT_SELECTION = 0, 1, 2, 3


class _Output:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def finding(self, f: Finding) -> None:
        stream = sys.stdout if self.fmt == "json" else sys.stderr
        print(f.to_json() if self.fmt == "json" else str(f), file=stream)

    def error(self, code: str, element: str, message: str) -> None:
        self.finding(Finding(code, element, message))

    def written(self, path: Path) -> None:
        print(json.dumps({"written": str(path)}) if self.fmt == "json" else str(path))


def _read(path: str, out: _Output) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        out.error("io-error", path, f"cannot read {path}: {exc.strerror if isinstance(exc, OSError) else exc}")
        return None


def cmd_transform(args: argparse.Namespace, out: _Output) -> int:
    text = _read(args.input, out)
    if text is None:
        return EXIT_ERROR
    try:
        model = parse_pim(text)
    except ModelParseError as exc:
        out.error("parse-error", args.input, str(exc))
        return EXIT_ERROR
    report = validate_pim(model)
    for f in report:
        out.finding(f)
    if not report.ok:
        return EXIT_FINDINGS
    try:
        for psm in transform_model(model, args.address_base):
            for path in write_bundle(psm, args.out).paths:
                out.written(path)
    except OSError as exc:
        out.error("io-error", str(exc.filename or args.out), f"cannot write: {exc.strerror}")
        return EXIT_ERROR
    return EXIT_OK


def _selection(values: list[str] | None) -> list[str]:
    return [item.strip() for value in values or () for item in value.split(",") if item.strip()]


def _load(paths: list[str], out: _Output):
    texts = [_read(p, out) for p in paths]
    if any(t is None for t in texts):
        return None
    return load_bundle(*texts)


def cmd_resolve(args: argparse.Namespace, out: _Output) -> int:
    try:
        psm = _load([args.wsdl, args.xsd, args.var], out)
    except BundleLoadError as exc:
        out.error("load-error", args.wsdl, str(exc))
        return EXIT_ERROR
    if psm is None:
        return EXIT_ERROR
    chosen = _selection(args.select)
    try:
        report = validate_selection(psm.variability, Selection.of(chosen))
    except UnknownSelectionError as exc:
        for name in exc.names:
            out.error("unknown-id", name, f"unknown variability id or name {name!r}")
        return EXIT_SELECTION
    for f in report.findings:
        out.finding(f)
    if not report.ok:
        return EXIT_SELECTION
    try:
        resolved = resolve(psm, Selection.of(chosen))
    except SelectionError:  # pragma: no cover - validated above
        return EXIT_SELECTION
    provenance = None
    if args.provenance:
        provenance = "resolved variants: " + (", ".join(report.included) or "none")
    try:
        bundle = write_resolved(resolved, args.out, provenance)
    except OSError as exc:
        out.error("io-error", str(exc.filename or args.out), f"cannot write: {exc.strerror}")
        return EXIT_ERROR
    for path in bundle.paths:
        out.written(path)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, out: _Output) -> int:
    if args.input:
        text = _read(args.input, out)
        if text is None:
            return EXIT_ERROR
        try:
            report = validate_pim(parse_pim(text))
        except ModelParseError as exc:
            out.error("parse-error", args.input, str(exc))
            return EXIT_ERROR
    else:
        if len(args.bundle) not in (2, 3):
            out.error("usage", "validate", "give -i MODEL or the WSDL, XSD and variability paths")
            return EXIT_ERROR
        try:
            psm = _load(args.bundle, out)
        except CrossReferenceError as exc:
            out.error("cross-reference", args.bundle[0], str(exc))
            return EXIT_FINDINGS
        except BundleLoadError as exc:
            out.error("load-error", args.bundle[0], str(exc))
            return EXIT_ERROR
        if psm is None:
            return EXIT_ERROR
        report = validate_psm(psm)
    for f in report:
        out.finding(f)
    return EXIT_OK if report.ok else EXIT_FINDINGS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varwsdl", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text",
                        help="diagnostics as text or one JSON record per line")
    subs = parser.add_subparsers(dest="cmd", required=True)

    p = subs.add_parser("transform", parents=[common], help="service model -> WSDL/XSD/variability bundles")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--out", default=".")
    p.add_argument("--address-base", default=DEFAULT_ADDRESS_BASE)
    p.set_defaults(func=cmd_transform)

    p = subs.add_parser("resolve", parents=[common], help="merge selected variants into the contract")
    p.add_argument("wsdl")
    p.add_argument("xsd")
    p.add_argument("var")
    p.add_argument("--select", action="append", metavar="NAME|ID[,...]")
    p.add_argument("-o", "--out", default=".")
    p.add_argument("--provenance", action="store_true", help="record the chosen variants in a comment")
    p.set_defaults(func=cmd_resolve)

    p = subs.add_parser("validate", parents=[common], help="check a service model or an emitted bundle")
    p.add_argument("-i", "--input", help="service model document")
    p.add_argument("bundle", nargs="*", help="WSDL, XSD and variability file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = _Output(args.format)
    try:
        return args.func(args, out)
    except VarwsdlError as exc:
        out.error("error", args.cmd, str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
