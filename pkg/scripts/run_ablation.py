"""Parameterization on vs off: outcome category fractions and violation rates.

    python3 scripts/run_ablation.py --iters 10000 --seed 8
"""

from __future__ import annotations

import argparse
import json
import time

from mlirgraft.driver import FuzzConfig, bundled_corpus_dir, fuzz_loop, load_corpus
from mlirgraft.match import MatchConfig
from mlirgraft.targets import BUILTIN_REFERENCE, Category


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", default=None)
    ap.add_argument("--target", default=BUILTIN_REFERENCE)
    ap.add_argument("--iters", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--l", type=int, default=4)
    ap.add_argument("--r", type=int, default=4)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    corpus = load_corpus(args.seeds or bundled_corpus_dir())
    rows = {}
    for label, on in (("on", True), ("off", False)):
        start = time.perf_counter()
        cfg = FuzzConfig(target=args.target, iterations=args.iters, seed=args.seed,
                         parameterization=on, match=MatchConfig(args.k, args.l, args.r))
        report = fuzz_loop(cfg, corpus)
        rows[label] = {
            **{c.value: report.fraction(c) for c in Category},
            "invocations": report.invocations,
            "violation_rate": report.violation_rate,
            "seconds": time.perf_counter() - start,
        }
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
        return
    cols = [c.value for c in Category] + ["violation_rate"]
    print(f"{'param':<6}" + "".join(f"{c:>17}" for c in cols) + f"{'invocations':>13}")
    for label, row in rows.items():
        print(f"{label:<6}" + "".join(f"{row[c]:>17.3f}" for c in cols) + f"{row['invocations']:>13}")
    on, off = rows["on"][Category.GENERAL_MLIR.value], rows["off"][Category.GENERAL_MLIR.value]
    print(f"GeneralMLIR off/on ratio: {off / on if on else float('inf'):.2f}")


if __name__ == "__main__":
    main()
