"""A fuzzing campaign comparing dialect-aware and random pass selection,
and sweeping the matching context size.

    python3 scripts/run_campaign.py --iters 3000 --out runs/campaign
"""

from __future__ import annotations

import argparse
from pathlib import Path

from mlirgraft.driver import FuzzConfig, bundled_corpus_dir, fuzz_loop, load_corpus
from mlirgraft.match import MatchConfig
from mlirgraft.targets import BUILTIN_REFERENCE, Category


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", default=None)
    ap.add_argument("--target", default=BUILTIN_REFERENCE)
    ap.add_argument("--iters", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    corpus = load_corpus(args.seeds or bundled_corpus_dir())
    runs = [(sel, klr) for sel in ("heuristic", "random") for klr in ((0, 0, 0), (2, 1, 1), (4, 4, 4))]
    header = f"{'selection':<10} {'k,l,r':<7} {'valid':>7} {'no_site':>8} {'dialects':>9} {'control':>8} {'data':>5}"
    print(header)
    for sel, klr in runs:
        out = args.out / f"{sel}-{'-'.join(map(str, klr))}" if args.out else None
        cfg = FuzzConfig(target=args.target, iterations=args.iters, seed=args.seed,
                         pass_selection=sel, match=MatchConfig(*klr), out_dir=out)
        report = fuzz_loop(cfg, corpus)
        cov = report.valid_coverage.counts()
        print(f"{sel:<10} {','.join(map(str, klr)):<7} {report.fraction(Category.VALID):>7.3f} "
              f"{report.events['no_site']:>8} {cov['dialects']:>9} {cov['control']:>8} {cov['data']:>5}")


if __name__ == "__main__":
    main()
