"""Command-line driver.

Subcommands:
  gen        write a generated instance
  partition  run mc or derand on an instance file and print a run report
  verify     recheck a run report against its instance
  oracle     exhaustive optima / feasibility / max-cut bound checks
  bench      run a JSON suite and print the aggregate margin table

Exit codes: 0 all constraints pass, 1 Monte-Carlo tries exhausted (or an
oracle check came out false), 2 input or contract error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .model import (
    EpsilonRangeError,
    GraphFamily,
    InstanceError,
    edwards_bound,
)
from .estimator import DegreePreconditionError, EstimatorBudgetError
from .oracle import SizeLimitError, enumerate_best, max_cut
from .instances import (
    GENERATOR_KINDS,
    InstanceFormatError,
    generate,
    parse_instance,
    serialize_instance,
)
from .report import parse_report, recheck, render_report
from .bench import BenchAbort, RunOptions, execute_run, load_suite, run_bench

_USER_ERRORS = (
    InstanceError,
    InstanceFormatError,
    EpsilonRangeError,
    DegreePreconditionError,
    EstimatorBudgetError,
    SizeLimitError,
    ValueError,
    TypeError,
    OSError,
)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _csv_floats(raw: str, what: str, want: int) -> list[float]:
    vals = [float(tok) for tok in raw.split(",") if tok.strip()]
    if len(vals) != want:
        raise ValueError(f"{what} needs {want} comma-separated values, got {len(vals)}")
    return vals


def _cmd_gen(args) -> int:
    family = generate(args.kind, n=args.n, m=args.m, ell=args.ell,
                      r=args.r, degree=args.degree, seed=args.seed)
    _write_text(args.out, serialize_instance(family))
    return 0


def _cmd_partition(args) -> int:
    family = parse_instance(_read_text(args.instance))
    opts = RunOptions(
        method=args.method,
        theorem=args.theorem,
        k=args.k,
        epsilon=args.epsilon,
        balanced=args.balanced,
        slack=args.slack,
        seed=args.seed,
        order=args.order,
        max_tries=args.max_tries,
    )
    outcome = execute_run(family, opts)
    _write_text(args.out, render_report(outcome.run_report))
    if args.trace and outcome.derand_result is not None:
        for step in outcome.derand_result.trace:
            cands = ",".join(repr(c) for c in step.candidates)
            print(f"step v={step.vertex} class={step.chosen} "
                  f"value={step.value!r} candidates={cands}")
    return 0 if outcome.run_report.passed else 1


def _cmd_verify(args) -> int:
    rr = parse_report(_read_text(args.report))
    family = parse_instance(_read_text(args.instance))
    problems = recheck(rr, family)
    if problems:
        for p in problems:
            print(f"mismatch: {p}", file=sys.stderr)
        return 2
    print(f"report verified: {len(rr.cut_report.constraints)} constraints consistent "
          f"with the instance")
    return 0


def _cmd_oracle(args) -> int:
    family = parse_instance(_read_text(args.instance))
    if not isinstance(family, GraphFamily):
        raise ValueError("oracle objectives operate on graph families")
    if args.objective == "maxcut":
        assignment, value = enumerate_best(family, args.k, "maxcut")
        print(f"max-cut {value}")
        print("assignment " + " ".join(str(x) for x in assignment.labels))
        return 0
    if args.objective == "simultaneous":
        if args.thresholds is not None:
            thresholds = _csv_floats(args.thresholds, "--thresholds", family.ell)
            witness, ok = enumerate_best(family, args.k, "feasible", thresholds=thresholds)
            print(f"feasible {'yes' if ok else 'no'}")
            if witness is not None:
                print("assignment " + " ".join(str(x) for x in witness.labels))
            return 0 if ok else 1
        centers = None
        if args.centers is not None:
            centers = _csv_floats(args.centers, "--centers", family.ell)
        assignment, value = enumerate_best(family, args.k, "simultaneous", centers=centers)
        print(f"best-min-margin {value!r}")
        print("assignment " + " ".join(str(x) for x in assignment.labels))
        return 0
    # edwards: every graph's exact max cut against the m-edge lower bound
    all_ok = True
    for i, edges in enumerate(family.graphs):
        sub = GraphFamily(n=family.n, graphs=(edges,))
        cut = max_cut(sub)
        bound = edwards_bound(family.m[i])
        ok = cut >= bound
        all_ok = all_ok and ok
        print(f"edwards graph={i} maxcut={cut} bound={bound!r} ok={'yes' if ok else 'no'}")
    return 0 if all_ok else 1


def _cmd_bench(args) -> int:
    suite = load_suite(args.suite)
    echo = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    result = run_bench(suite, out_dir=args.out_dir, jobs=args.jobs, echo=echo)
    print(result.render())
    return 1 if result.exhausted else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulcut",
        description="Vertex partitions with simultaneous cut guarantees "
                    "for several graphs or hypergraphs on one vertex set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("kind", choices=GENERATOR_KINDS)
    g.add_argument("--n", type=int, required=True, help="vertex count")
    g.add_argument("--m", type=int, help="edges per member (gnm, runiform)")
    g.add_argument("--ell", type=int, default=1, help="number of members")
    g.add_argument("--r", type=int, help="uniformity (runiform)")
    g.add_argument("--degree", type=int, help="max degree (bounded-degree, even)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=_cmd_gen)

    p = sub.add_parser("partition", help="partition an instance with a guarantee")
    p.add_argument("instance", help="instance file ('-' for stdin)")
    p.add_argument("--method", choices=["mc", "derand"], default="derand")
    p.add_argument("--theorem", required=True, choices=["1", "2", "3", "hyp"],
                   help="which guarantee to enforce")
    p.add_argument("--k", type=int, help="class count (theorems 2 and 3)")
    p.add_argument("--epsilon", type=float, help="degree ratio bound (theorem 3)")
    p.add_argument("--balanced", action="store_true",
                   help="also require near-equal class sizes (mc only)")
    p.add_argument("--slack", type=float, help="allowed class-size deviation from n/k")
    p.add_argument("--seed", type=int, default=0, help="mc stream seed")
    p.add_argument("--max-tries", type=int, default=64)
    p.add_argument("--order", choices=["natural", "degree"], default="natural",
                   help="derand vertex processing order")
    p.add_argument("--trace", action="store_true", help="print the descent steps")
    p.add_argument("--out", help="report file (default stdout)")
    p.set_defaults(func=_cmd_partition)

    v = sub.add_parser("verify", help="recheck a run report against its instance")
    v.add_argument("report")
    v.add_argument("--instance", required=True)
    v.set_defaults(func=_cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive ground truth on small instances")
    o.add_argument("instance")
    o.add_argument("--objective", required=True,
                   choices=["maxcut", "simultaneous", "edwards"])
    o.add_argument("--k", type=int, default=2)
    o.add_argument("--centers", help="comma-separated per-graph centers (simultaneous)")
    o.add_argument("--thresholds",
                   help="comma-separated per-graph cut thresholds; switches "
                        "simultaneous to a feasibility check")
    o.set_defaults(func=_cmd_oracle)

    b = sub.add_parser("bench", help="run a JSON suite and print the margin table")
    b.add_argument("suite")
    b.add_argument("--out-dir", help="write per-run reports here")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--verbose", action="store_true")
    b.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BenchAbort as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
