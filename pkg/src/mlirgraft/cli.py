"""Command line: ``fuzz``, ``analyze`` and ``mutate``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from .coverage import CoverageReport
from .driver import (
    EmptyCorpus, FuzzConfig, NoSite, bundled_corpus_dir, fuzz_loop, load_corpus, mutate_once,
)
from .graft import IllegalGraft
from .match import MatchConfig
from .passes import default_passes, load_pass_file
from .syntax import MLIRSyntaxError, parse, print_tree
from .synth import NoEligibleNode, dump
from .targets import BUILTIN_REFERENCE, SpawnError


def _add_match_args(p: argparse.ArgumentParser):
    p.add_argument("--k", type=int, default=4, help="ancestor context depth")
    p.add_argument("--l", type=int, default=4, help="left sibling context width")
    p.add_argument("--r", type=int, default=4, help="right sibling context width")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlirgraft", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fuzz", help="run the fuzzing loop")
    f.add_argument("--seeds", type=Path, default=None, help="seed directory (default: bundled corpus)")
    f.add_argument("--target", default=BUILTIN_REFERENCE, help="opt-style command or builtin:reference")
    f.add_argument("--passes", type=Path, default=None, help="pass table file")
    f.add_argument("--p", type=int, default=5, help="passes per invocation")
    _add_match_args(f)
    budget = f.add_mutually_exclusive_group()
    budget.add_argument("--iters", type=int, default=None)
    budget.add_argument("--time", type=float, default=None, help="time budget in seconds")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", type=Path, default=None)
    f.add_argument("--no-parameterization", action="store_true")
    f.add_argument("--pass-selection", choices=("heuristic", "random"), default="heuristic")
    f.add_argument("--option-prob", type=float, default=0.25)
    f.add_argument("--timeout", type=float, default=10.0)
    f.add_argument("--workers", type=int, default=1)

    a = sub.add_parser("analyze", help="dialect and dialect-pair coverage of a corpus")
    a.add_argument("--corpus", type=Path, required=True)
    a.add_argument("--json", action="store_true")

    m = sub.add_parser("mutate", help="apply one mutation and print the result")
    m.add_argument("--donor", type=Path, required=True)
    m.add_argument("--recipient", type=Path, required=True)
    m.add_argument("--seed", type=int, default=0)
    _add_match_args(m)
    m.add_argument("--no-parameterization", action="store_true")
    m.add_argument("--explain", action="store_true", help="also print the mutation, site and binding")
    return ap


def _fuzz(args) -> int:
    iters = args.iters if args.iters is not None or args.time is not None else 100
    cfg = FuzzConfig(
        seed_dir=args.seeds, target=args.target,
        passes=load_pass_file(args.passes) if args.passes else default_passes(),
        p=args.p, match=MatchConfig(args.k, args.l, args.r), iterations=iters,
        time_budget=args.time, seed=args.seed, out_dir=args.out,
        parameterization=not args.no_parameterization, pass_selection=args.pass_selection,
        option_prob=args.option_prob, timeout=args.timeout, workers=args.workers,
    )
    report = fuzz_loop(cfg)
    sys.stdout.write(report.to_text())
    return 0


def _analyze(args) -> int:
    cov = CoverageReport()
    corpus = load_corpus(args.corpus)
    for tree in corpus:
        cov = cov.merge(CoverageReport.of(tree))
    if args.json:
        print(json.dumps({"seeds": len(corpus), **cov.to_json()}, indent=2, sort_keys=True))
    else:
        print(f"seeds {len(corpus)}")
        sys.stdout.write(cov.to_text())
    return 0


def _mutate(args) -> int:
    donor = parse(args.donor.read_bytes())
    recipient = parse(args.recipient.read_bytes())
    rng = random.Random(args.seed)
    result = mutate_once(donor, recipient, rng, MatchConfig(args.k, args.l, args.r),
                         not args.no_parameterization)
    if args.explain:
        print("// mutation:")
        for line in dump(result.mutation).splitlines():
            print("//   " + line)
        print(f"// site: {result.site.kind} at {' '.join(map(str, result.site.key[1:]))}")
        for pid in sorted(result.binding.values):
            print(f"// {pid} -> {result.binding.values[pid]}")
    sys.stdout.write(print_tree(result.tree))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"fuzz": _fuzz, "analyze": _analyze, "mutate": _mutate}
    try:
        return handlers[args.command](args)
    except (EmptyCorpus, MLIRSyntaxError, NoEligibleNode, NoSite, IllegalGraft,
            SpawnError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
