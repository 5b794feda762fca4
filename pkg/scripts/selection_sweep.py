"""Sweep random models: count valid selections and check resolution against rebinding.

For each seeded model every selection is validated; valid ones are resolved and
compared with the transformation of the model rewritten for that selection.
Prints one line per model and a summary.
"""
import argparse
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import bind, is_valid, random_model, selections, signature, variable_elements  # noqa: E402
from varwsdl import resolve, transform_interface, validate_selection  # noqa: E402


@dataclass
class SweepConfig:
    models: int = 100
    seed: int = 0
    max_ops: int = 8
    max_variable_elements: int = 4
    verbose: bool = False


def sweep(cfg: SweepConfig) -> int:
    total = valid = mismatches = 0
    start = time.perf_counter()
    for i in range(cfg.models):
        m = random_model(random.Random(cfg.seed + i), cfg.max_ops, max_variable_elements=cfg.max_variable_elements)
        si = m.interfaces[0]
        p = transform_interface(m, si)
        k = len(variable_elements(m, si.name))
        n_valid = 0
        for sel in selections(m, si.name):
            total += 1
            ok = validate_selection(p.variability, sel).ok
            if ok != is_valid(m, si.name, sel):
                mismatches += 1
                continue
            if ok:
                n_valid += 1
                bound = bind(m, si.name, sel)
                if signature(resolve(p, sel)) != signature(transform_interface(bound, bound.interface(si.name))):
                    mismatches += 1
        valid += n_valid
        if cfg.verbose:
            print(f"seed={cfg.seed + i:<6} ops={len(si.operations)} k={k} valid={n_valid}/{2 ** k}")
    elapsed = time.perf_counter() - start
    print(f"models={cfg.models} selections={total} valid={valid} mismatches={mismatches} time={elapsed:.2f}s")
    return mismatches


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--models", type=int, default=SweepConfig.models)
    parser.add_argument("--seed", type=int, default=SweepConfig.seed)
    parser.add_argument("--max-ops", type=int, default=SweepConfig.max_ops)
    parser.add_argument("--max-variable-elements", type=int, default=SweepConfig.max_variable_elements)
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args()
    cfg = SweepConfig(args.models, args.seed, args.max_ops, args.max_variable_elements, args.verbose)
    raise SystemExit(1 if sweep(cfg) else 0)


if __name__ == "__main__":
    main()
