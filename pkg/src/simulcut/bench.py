"""Single-run driver and the benchmark suite harness.

A suite is a JSON file: {"runs": [{...}, ...]} where each entry gives a
generator, a method, a guarantee, and a repetition count:

    {
      "name": "thm1-gnm40",
      "reps": 100,
      "generator": {"kind": "gnm", "n": 40, "m": 200, "ell": 2},
      "method": "derand",            // or "mc"
      "theorem": "thm1",             // thm1 | thm2 | thm3 | hyp
      "k": 2,                        // optional
      "epsilon": null,               // optional (thm3)
      "balanced": false,             // optional (mc only)
      "slack": null,                 // optional balance slack
      "order": "natural",            // optional (derand)
      "max_tries": 64,               // optional (mc)
      "seed": 1000                   // rep j uses seed + j
    }

Rep j generates its instance with seed+j and, for mc, samples with the
same seed+j, so a suite is a pure function of its file.  Runs are
independent and may execute concurrently (--jobs); aggregation order is
fixed by (run, rep) index either way.  A derandomized run that fails its
guarantee aborts the whole suite and serializes the offending instance
for replay.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .model import HypergraphFamily
from .estimator import specs_for
from .derandomize import derandomize
from .mc import McConfig, McExhausted, check_report, mc_partition, _resolve
from .instances import generate, serialize_instance
from .report import RunReport, instance_digest, render_report

THEOREM_TOKENS = {"1": "thm1", "2": "thm2", "3": "thm3", "hyp": "hyp",
                  "thm1": "thm1", "thm2": "thm2", "thm3": "thm3"}


@dataclass(frozen=True)
class RunOptions:
    """Everything needed to run one method on one instance."""

    method: str
    theorem: str
    k: int | None = None
    epsilon: float | None = None
    balanced: bool = False
    slack: float | None = None
    seed: int = 0
    order: str = "natural"
    max_tries: int = 64

    def __post_init__(self):
        if self.method not in ("mc", "derand"):
            raise ValueError(f"method must be 'mc' or 'derand', got {self.method!r}")
        if self.theorem not in THEOREM_TOKENS:
            raise ValueError(f"unknown theorem token {self.theorem!r}")
        if self.balanced and self.method == "derand":
            raise ValueError("balancing is a Monte-Carlo feature; "
                             "the descent does not track class sizes")


@dataclass
class RunOutcome:
    run_report: RunReport
    exhausted: bool = False
    tries: int | None = None
    derand_result: object = None


def execute_run(family, opts: RunOptions) -> RunOutcome:
    """Run one method on one instance and assemble its report."""
    theorem = THEOREM_TOKENS[opts.theorem]
    cfg = McConfig(kind=theorem, k=opts.k, eps=opts.epsilon,
                   balanced=opts.balanced, balance_slack=opts.slack,
                   max_tries=opts.max_tries, seed=opts.seed)
    k_eff, eps_eff, slack_eff = _resolve(family, cfg)
    is_hyper = isinstance(family, HypergraphFamily)
    common = dict(
        digest=instance_digest(family),
        kind="hypergraphs" if is_hyper else "graphs",
        n=family.n,
        ell=family.ell,
        r=family.r if is_hyper else None,
        theorem=theorem,
        k=k_eff,
        epsilon=float(eps_eff) if eps_eff is not None else None,
        balanced=opts.balanced,
        balance_slack=float(slack_eff) if slack_eff is not None else None,
    )

    if opts.method == "mc":
        start = time.perf_counter()
        try:
            result = mc_partition(family, cfg)
            assignment, cut_report, tries = result.assignment, result.report, result.tries_used
            exhausted = False
        except McExhausted as exc:
            assignment, cut_report, tries = exc.best_assignment, exc.best_report, exc.tries
            exhausted = True
        wall = (time.perf_counter() - start) * 1000
        rr = RunReport(method="mc", assignment=assignment.labels, cut_report=cut_report,
                       seed=opts.seed, max_tries=opts.max_tries, tries=tries,
                       wall_ms=wall, **common)
        return RunOutcome(run_report=rr, exhausted=exhausted, tries=tries)

    start = time.perf_counter()
    specs = specs_for(family, theorem, k=opts.k if theorem != "thm1" else None, eps=eps_eff)
    result = derandomize(family, specs, order=opts.order)
    wall = (time.perf_counter() - start) * 1000
    cut_report = check_report(family, result.assignment, cfg)
    rr = RunReport(method="derand", assignment=result.assignment.labels,
                   cut_report=cut_report, order=opts.order,
                   descent_steps=len(result.trace),
                   initial_estimator=result.initial_value,
                   final_estimator=result.final_value,
                   wall_ms=wall, **common)
    return RunOutcome(run_report=rr, derand_result=result)


class BenchAbort(RuntimeError):
    """A derandomized run failed its guarantee; the suite stops."""

    def __init__(self, message: str, instance_path: str):
        super().__init__(f"{message} (instance serialized to {instance_path})")
        self.instance_path = instance_path


@dataclass
class SuiteRun:
    name: str
    reps: int
    generator: dict
    options: RunOptions


def load_suite(path) -> list[SuiteRun]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return suite_from_dict(data)


def suite_from_dict(data: dict) -> list[SuiteRun]:
    runs = []
    for i, entry in enumerate(data.get("runs", [])):
        try:
            gen = dict(entry["generator"])
            opts = RunOptions(
                method=entry["method"],
                theorem=str(entry["theorem"]),
                k=entry.get("k"),
                epsilon=entry.get("epsilon"),
                balanced=bool(entry.get("balanced", False)),
                slack=entry.get("slack"),
                seed=int(entry.get("seed", 0)),
                order=entry.get("order", "natural"),
                max_tries=int(entry.get("max_tries", 64)),
            )
        except KeyError as exc:
            raise ValueError(f"suite run {i}: missing field {exc}") from None
        runs.append(SuiteRun(
            name=entry.get("name", f"run{i}"),
            reps=int(entry.get("reps", 1)),
            generator=gen,
            options=opts,
        ))
    if not runs:
        raise ValueError("suite has no runs")
    return runs


@dataclass
class StatAggregate:
    constraints: int = 0
    failures: int = 0
    min_margin: float | None = None
    sum_margin: float = 0.0

    def add(self, margin: float, passed: bool):
        self.constraints += 1
        if not passed:
            self.failures += 1
        self.sum_margin += margin
        if self.min_margin is None or margin < self.min_margin:
            self.min_margin = margin


@dataclass
class BenchResult:
    stats: dict = field(default_factory=dict)      # (name, stat) -> StatAggregate
    timings: dict = field(default_factory=dict)    # name -> [wall_ms]
    tries: dict = field(default_factory=dict)      # name -> [tries]
    exhausted: int = 0
    runs: int = 0

    @property
    def total_failures(self) -> int:
        return sum(agg.failures for agg in self.stats.values())

    def render(self) -> str:
        lines = []
        header = f"{'run':<24}{'stat':<14}{'rows':>6}{'fail':>6}{'min-margin':>14}{'mean-margin':>14}"
        lines.append(header)
        lines.append("-" * len(header))
        for (name, stat), agg in sorted(self.stats.items()):
            mean = agg.sum_margin / agg.constraints if agg.constraints else 0.0
            lines.append(f"{name:<24}{stat:<14}{agg.constraints:>6}{agg.failures:>6}"
                         f"{agg.min_margin:>14.4f}{mean:>14.4f}")
        lines.append("")
        header = f"{'run':<24}{'reps':>6}{'p50-ms':>10}{'p90-ms':>10}{'max-ms':>10}  tries(p50/max)"
        lines.append(header)
        lines.append("-" * len(header))
        for name in sorted(self.timings):
            walls = sorted(self.timings[name])
            p50 = _percentile(walls, 0.50)
            p90 = _percentile(walls, 0.90)
            tr = sorted(self.tries.get(name, []))
            tries_txt = f"{_percentile(tr, 0.5):.0f}/{tr[-1]}" if tr else "-"
            lines.append(f"{name:<24}{len(walls):>6}{p50:>10.2f}{p90:>10.2f}"
                         f"{walls[-1]:>10.2f}  {tries_txt}")
        lines.append("")
        lines.append(f"total runs {self.runs}, failed constraint rows {self.total_failures}, "
                     f"mc exhausted {self.exhausted}")
        return "\n".join(lines)


def _percentile(sorted_vals, q: float) -> float:
    if not sorted_vals:
        return 0.0
    idx = min(len(sorted_vals) - 1, int(round(q * (len(sorted_vals) - 1))))
    return float(sorted_vals[idx])


def _stat_class(stat: str) -> str:
    # constraint rows group by shape, not by class indices
    if stat.startswith("pair("):
        return "pair"
    if stat.startswith("within("):
        return "within"
    if stat.startswith("balance("):
        return "balance"
    return stat


def _one_rep(run: SuiteRun, rep: int):
    gen = dict(run.generator)
    kind = gen.pop("kind")
    seed = run.options.seed + rep
    family = generate(kind, seed=seed, **gen)
    opts = RunOptions(
        method=run.options.method, theorem=run.options.theorem, k=run.options.k,
        epsilon=run.options.epsilon, balanced=run.options.balanced,
        slack=run.options.slack, seed=seed, order=run.options.order,
        max_tries=run.options.max_tries)
    return family, execute_run(family, opts)


def run_bench(suite, out_dir=None, jobs: int = 1, echo=None) -> BenchResult:
    """Execute a suite and aggregate margins, failures, and timings.

    Rep results are folded in (run, rep) order regardless of `jobs`.  A
    derand rep whose report is not all-pass aborts everything: the instance
    is written next to the reports (or the working directory) and BenchAbort
    is raised.
    """
    result = BenchResult()
    out_path = Path(out_dir) if out_dir else None
    if out_path:
        out_path.mkdir(parents=True, exist_ok=True)

    for run in suite:
        reps = range(run.reps)
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(lambda rep: _one_rep(run, rep), reps))
        else:
            outcomes = [_one_rep(run, rep) for rep in reps]

        for rep, (family, outcome) in zip(reps, outcomes):
            rr = outcome.run_report
            result.runs += 1
            if out_path:
                (out_path / f"{run.name}-{rep}.report").write_text(
                    render_report(rr), encoding="utf-8", newline="\n")
            if rr.method == "derand" and not rr.passed:
                where = out_path if out_path else Path.cwd()
                path = where / f"{run.name}-{rep}-failed.instance"
                path.write_text(serialize_instance(family), encoding="utf-8", newline="\n")
                raise BenchAbort(
                    f"derandomized run {run.name} rep {rep} failed its guarantee", str(path))
            if outcome.exhausted:
                result.exhausted += 1
            for c in rr.cut_report.constraints:
                key = (run.name, _stat_class(c.stat))
                agg = result.stats.setdefault(key, StatAggregate())
                agg.add(c.margin, c.passed)
            result.timings.setdefault(run.name, []).append(rr.wall_ms)
            if rr.tries is not None:
                result.tries.setdefault(run.name, []).append(rr.tries)
            if echo:
                echo(f"{run.name} rep {rep}: "
                     f"{'pass' if rr.passed else 'FAIL'} ({rr.wall_ms:.1f} ms)")
    return result
