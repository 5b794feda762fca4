"""Transform the SCMS model and resolve every valid selection of its variable service.

    python3 scripts/run_scms.py --out build/scms
"""
import argparse
import itertools
from dataclasses import dataclass
from pathlib import Path

from varwsdl import parse_pim, resolve, transform_model, validate_selection, write_bundle, write_resolved
from varwsdl.diagnostics import SelectionError

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class Config:
    model: Path = ROOT / "tests" / "fixtures" / "scms.varsoaml.xml"
    out: Path = Path("build/scms")
    address_base: str = "http://localhost/services"


def variable_names(spec) -> list[str]:
    return [x.name for x in (*spec.variable_operations, *spec.variable_messages, *spec.variable_types)]


def run(cfg: Config) -> None:
    model = parse_pim(cfg.model.read_text(encoding="utf-8"))
    for psm in transform_model(model, cfg.address_base):
        bundle = write_bundle(psm, cfg.out)
        spec = psm.variability
        print(f"{psm.name:16} ops={len(psm.definition.port_types[0].operations)} "
              f"variable={len(variable_names(spec))} -> {bundle.wsdl_path}")
        if spec.is_empty:
            continue
        names = variable_names(spec)
        for r in range(len(names) + 1):
            for sel in itertools.combinations(names, r):
                report = validate_selection(spec, sel)
                label = "+".join(sel) or "base"
                if not report.ok:
                    print(f"  {label:40} rejected: {report.violations[0].message}")
                    continue
                try:
                    resolved = resolve(psm, sel)
                except SelectionError as exc:  # not reached for a validated selection
                    print(f"  {label:40} failed: {exc}")
                    continue
                target = cfg.out / "resolved" / label
                write_resolved(resolved, target, "resolved variants: " + ", ".join(report.included))
                ops = [op.name for op in resolved.definition.port_types[0].operations]
                print(f"  {label:40} ops={ops}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", type=Path, default=Config.model)
    parser.add_argument("--out", type=Path, default=Config.out)
    parser.add_argument("--address-base", default=Config.address_base)
    args = parser.parse_args()
    run(Config(args.model, args.out, args.address_base))


if __name__ == "__main__":
    main()
