"""The fuzzing loop: corpus ingestion, one mutation per iteration, target
invocation with a random pass pipeline, classification and reporting."""

from __future__ import annotations

import itertools
import json
import logging
import random
import re
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .constraints import check_generic_constraints, use_name, def_name
from .coverage import CoverageReport, dialect_of
from .graft import IllegalGraft, graft, instantiate
from .match import MatchConfig, MutationSite, ParameterBinding, bind_parameters, donor_binding, locate
from .passes import PassSpec, default_passes, load_pass_file, option_pool
from .syntax import MLIRSyntaxError, SyntaxNode, SyntaxTree, parse, print_tree
from .synth import NoEligibleNode, ParameterizedMutation, synthesize
from .targets import BUILTIN_REFERENCE, Category, classify_outcome, run_target

log = logging.getLogger(__name__)

SPLIT_MARKER = re.compile(r"^// -----.*$", re.M)
MAX_SITES = 64


class EmptyCorpus(ValueError):
    pass


@dataclass
class FuzzConfig:
    seed_dir: Path | str | None = None
    target: str = BUILTIN_REFERENCE
    passes: list[PassSpec] = field(default_factory=default_passes)
    p: int = 5
    match: MatchConfig = field(default_factory=MatchConfig)
    iterations: int | None = 100
    time_budget: float | None = None
    seed: int = 0
    out_dir: Path | str | None = None
    parameterization: bool = True
    pass_selection: str = "heuristic"  # or "random"
    option_prob: float = 0.25
    timeout: float = 10.0
    max_sites: int = MAX_SITES
    workers: int = 1
    report_every: int = 1000

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.iterations is None and self.time_budget is None:
            raise ValueError("need an iteration or time budget")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if self.pass_selection not in ("heuristic", "random"):
            raise ValueError(f"unknown pass selection {self.pass_selection!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


# ---------------------------------------------------------------------------
# Corpus


def bundled_corpus_dir() -> Path:
    return Path(str(resources.files("mlirgraft").joinpath("corpus")))


def _top_level_groups(tree: SyntaxTree) -> list[list[SyntaxNode]]:
    """Group top-level operations that share SSA values or symbols."""
    ops = tree.root.children
    parent = list(range(len(ops)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, op in enumerate(ops):
        for node in op.iter_preorder():
            if node.rule == "attr-entry" and node.children[0].text == "sym_name" and len(node.children) > 1:
                owner.setdefault("@" + node.children[1].text.strip('"'), i)
        for term in op.children[0].children:
            owner.setdefault(def_name(term.text), i)
    for i, op in enumerate(ops):
        refs = set()
        for node in op.iter_preorder():
            if node.rule == "value-id" and node.parent.rule == "value-use":
                refs.add(use_name(node.text))
            elif node.rule == "attr-entry" and len(node.children) > 1:
                refs.update(re.findall(r"@[\w$.\-]+", node.children[1].text))
        for ref in refs:
            j = owner.get(ref)
            if j is not None and j != i:
                parent[find(i)] = find(j)
    groups: dict[int, list[SyntaxNode]] = {}
    for i, op in enumerate(ops):
        groups.setdefault(find(i), []).append(op)
    return list(groups.values())


def split_test_cases(text: str, name: str = "") -> list[SyntaxTree]:
    """Split at ``// -----`` markers, then at independent top-level operations."""
    cases = []
    for ci, chunk in enumerate(SPLIT_MARKER.split(text)):
        if not chunk.strip():
            continue
        try:
            tree = parse(chunk)
        except MLIRSyntaxError as exc:
            log.warning("skipping %s chunk %d: %s", name, ci, exc)
            continue
        for gi, group in enumerate(_top_level_groups(tree)):
            root = SyntaxNode("module-body", "", [op.copy() for op in group])
            case = SyntaxTree(root, "", f"{name}:{ci}:{gi}")
            case.source = print_tree(case)
            cases.append(case)
    return cases


def load_corpus(seed_dir) -> list[SyntaxTree]:
    seed_dir = Path(seed_dir)
    cases = []
    if seed_dir.is_dir():
        for path in sorted(seed_dir.rglob("*.mlir")):
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                log.warning("skipping %s: %s", path, exc)
                continue
            cases.extend(split_test_cases(text, str(path.relative_to(seed_dir))))
    if not cases:
        raise EmptyCorpus(f"no parseable test cases under {seed_dir}")
    return cases


# ---------------------------------------------------------------------------
# Pass selection


def select_passes(tree: SyntaxTree, passes: list[PassSpec], p: int, rng: random.Random,
                  mode: str = "heuristic", option_prob: float = 0.25,
                  pool: list[str] | None = None) -> list[tuple[str, str | None]]:
    """Pick up to ``p`` distinct passes, optionally each with a random option.

    In heuristic mode passes whose name mentions a dialect of the test case
    are taken first; random passes fill the remainder.
    """
    if not passes:
        raise ValueError("empty pass list")
    n = min(p, len(passes))
    if mode == "heuristic":
        present = {dialect_of(op.children[1].children[0].text) for op in tree.operations()}
        preferred = [ps for ps in passes if any(d in ps.name for d in present)]
        rest = [ps for ps in passes if ps not in preferred]
        chosen = rng.sample(preferred, min(n, len(preferred)))
        chosen += rng.sample(rest, n - len(chosen))
        rng.shuffle(chosen)
    else:
        chosen = rng.sample(passes, n)
    pool = option_pool(passes) if pool is None else pool
    pipeline = []
    for ps in chosen:
        opt = rng.choice(pool) if pool and rng.random() < option_prob else None
        pipeline.append((ps.name, opt))
    return pipeline


# ---------------------------------------------------------------------------
# One mutation


@dataclass
class MutationResult:
    tree: SyntaxTree
    mutation: ParameterizedMutation
    site: MutationSite
    binding: ParameterBinding
    sites_considered: int


class NoSite(LookupError):
    pass


def mutate_once(donor: SyntaxTree, recipient: SyntaxTree, rng: random.Random,
                cfg: MatchConfig = MatchConfig(), parameterization: bool = True,
                max_sites: int = MAX_SITES) -> MutationResult:
    """Synthesize from ``donor`` and transplant into ``recipient``.

    Raises NoEligibleNode, NoSite or IllegalGraft.
    """
    pm = synthesize(donor, rng)
    sites = list(itertools.islice(locate(pm, recipient, cfg), max_sites))
    if not sites:
        raise NoSite("no matching site in recipient")
    site = rng.choice(sites)
    if parameterization:
        binding = bind_parameters(pm, recipient, site, cfg, rng)
    else:
        binding = donor_binding(pm)
    mutant = graft(recipient, site, instantiate(pm, binding))
    return MutationResult(mutant, pm, site, binding, len(sites))


# ---------------------------------------------------------------------------
# Loop


EVENTS = ("no_mutation", "no_site", "illegal_graft", "pre_filtered") + tuple(c.value for c in Category)


@dataclass
class FuzzReport:
    corpus_size: int = 0
    iterations: int = 0
    events: Counter = field(default_factory=Counter)
    generic_violations: int = 0
    mutants: int = 0
    coverage: CoverageReport = field(default_factory=CoverageReport)
    valid_coverage: CoverageReport = field(default_factory=CoverageReport)
    saved: list[str] = field(default_factory=list)

    @property
    def invocations(self) -> int:
        return sum(self.events[c.value] for c in Category)

    def fraction(self, category: Category | str) -> float:
        n = self.invocations
        key = category.value if isinstance(category, Category) else category
        return self.events[key] / n if n else 0.0

    @property
    def violation_rate(self) -> float:
        return self.generic_violations / self.mutants if self.mutants else 0.0

    def merge(self, other: FuzzReport) -> FuzzReport:
        return FuzzReport(
            corpus_size=max(self.corpus_size, other.corpus_size),
            iterations=self.iterations + other.iterations,
            events=self.events + other.events,
            generic_violations=self.generic_violations + other.generic_violations,
            mutants=self.mutants + other.mutants,
            coverage=self.coverage.merge(other.coverage),
            valid_coverage=self.valid_coverage.merge(other.valid_coverage),
            saved=self.saved + other.saved,
        )

    def to_json(self, config: FuzzConfig | None = None) -> dict:
        out = {
            "corpus_size": self.corpus_size,
            "iterations": self.iterations,
            "events": {k: self.events.get(k, 0) for k in EVENTS},
            "invocations": self.invocations,
            "category_fractions": {c.value: round(self.fraction(c), 6) for c in Category},
            "mutants": self.mutants,
            "generic_violations": self.generic_violations,
            "coverage": self.coverage.to_json(),
            "coverage_counts": self.coverage.counts(),
            "valid_coverage_counts": self.valid_coverage.counts(),
            "saved": sorted(self.saved),
        }
        if config is not None:
            out["config"] = {
                "target": config.target, "p": config.p, "k": config.match.k,
                "l": config.match.l, "r": config.match.r, "seed": config.seed,
                "parameterization": config.parameterization,
                "pass_selection": config.pass_selection, "option_prob": config.option_prob,
                "iterations": config.iterations, "workers": config.workers,
            }
        return out

    def to_text(self) -> str:
        lines = [f"corpus size      {self.corpus_size}",
                 f"iterations       {self.iterations}",
                 f"invocations      {self.invocations}",
                 f"generic violations {self.generic_violations}/{self.mutants}"]
        for k in EVENTS:
            n = self.events.get(k, 0)
            extra = f"  ({self.fraction(k):.1%} of invocations)" if k in {c.value for c in Category} else ""
            lines.append(f"  {k:<16} {n}{extra}")
        lines.append("coverage (all invoked test cases)")
        lines += ["  " + s for s in self.coverage.to_text().splitlines()]
        lines.append("coverage (valid test cases)")
        lines += ["  " + s for s in self.valid_coverage.to_text().splitlines()]
        return "\n".join(lines) + "\n"


def _persist(out_dir: Path, sub: str, stem: str, text: str, meta: dict) -> str:
    d = out_dir / sub
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{stem}.mlir").write_text(text)
    (d / f"{stem}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return f"{sub}/{stem}.mlir"


def _run_worker(config: FuzzConfig, corpus: list[SyntaxTree], worker: int,
                iterations: int | None, deadline: float | None) -> FuzzReport:
    rng = random.Random(config.seed if config.workers == 1 else f"{config.seed}:{worker}")
    pool = option_pool(config.passes)
    out_dir = Path(config.out_dir) if config.out_dir is not None else None
    report = FuzzReport(corpus_size=len(corpus))
    for it in itertools.count():
        if iterations is not None and it >= iterations:
            break
        if deadline is not None and time.monotonic() >= deadline:
            break
        report.iterations += 1
        donor, recipient = rng.choice(corpus), rng.choice(corpus)
        try:
            result = mutate_once(donor, recipient, rng, config.match,
                                 config.parameterization, config.max_sites)
        except NoEligibleNode:
            report.events["no_mutation"] += 1
            continue
        except NoSite:
            report.events["no_site"] += 1
            continue
        except IllegalGraft:
            report.events["illegal_graft"] += 1
            continue
        mutant = result.tree
        report.mutants += 1
        violations = check_generic_constraints(mutant)
        if violations:
            report.generic_violations += 1
            if config.parameterization:
                report.events["pre_filtered"] += 1
                continue
        pipeline = select_passes(mutant, config.passes, config.p, rng, config.pass_selection,
                                 config.option_prob, pool)
        text = print_tree(mutant)
        raw = run_target(config.target, pipeline, text, config.timeout)
        outcome = classify_outcome(raw, pipeline)
        report.events[outcome.category.value] += 1
        case_cov = CoverageReport.of(mutant)
        report.coverage = report.coverage.merge(case_cov)
        if outcome.category is Category.VALID:
            report.valid_coverage = report.valid_coverage.merge(case_cov)
        if out_dir is not None and outcome.category in (Category.CRASH, Category.VALID):
            sub = "crashes" if outcome.category is Category.CRASH else "valid"
            meta = {"donor": donor.name, "recipient": recipient.name,
                    "pipeline": list(outcome.pass_pipeline), "exit_status": raw.exit_status,
                    "timed_out": raw.timed_out, "stderr": raw.stderr}
            report.saved.append(_persist(out_dir, sub, f"w{worker}-{it:07d}", text, meta))
        if config.report_every and report.iterations % config.report_every == 0:
            log.info("worker %d: %d iterations, %s", worker, report.iterations, dict(report.events))
    return report


def fuzz_loop(config: FuzzConfig, corpus: list[SyntaxTree] | None = None) -> FuzzReport:
    """Run the loop until the budget is spent; write reports if out_dir is set."""
    if corpus is None:
        corpus = load_corpus(config.seed_dir if config.seed_dir is not None else bundled_corpus_dir())
    deadline = time.monotonic() + config.time_budget if config.time_budget else None
    if config.workers == 1:
        report = _run_worker(config, corpus, 0, config.iterations, deadline)
    else:
        shares = [None] * config.workers
        if config.iterations is not None:
            base, extra = divmod(config.iterations, config.workers)
            shares = [base + (w < extra) for w in range(config.workers)]
        with ThreadPoolExecutor(config.workers) as ex:
            futures = [ex.submit(_run_worker, config, corpus, w, shares[w], deadline)
                       for w in range(config.workers)]
            report = FuzzReport(corpus_size=len(corpus))
            for fut in futures:
                report = report.merge(fut.result())
    if config.out_dir is not None:
        write_report(report, config)
    return report


def write_report(report: FuzzReport, config: FuzzConfig):
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "crashes").mkdir(exist_ok=True)
    (out / "valid").mkdir(exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_json(config), indent=2, sort_keys=True) + "\n")
    (out / "report.txt").write_text(report.to_text())
