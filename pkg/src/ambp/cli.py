"""Command-line entry point.

Subcommands: build, verify, stats, eval, export-dot, union, audit-measure,
demo.  Exit codes are a contract: 0 all requested work passed, 1 a
verification or bound check failed (witness printed), 2 usage/parse/IO
errors, 3 build-guard refusals.  All output is deterministic for identical
arguments; randomness only enters through seeded `random:<seed>` function
specs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import errors
from .construction import (
    BuildOptions,
    build_amortized,
    forward_arity,
    size_report,
    transition_variable,
)
from .dot import DotOptions, export_dot
from .measures import accounting_check, audit_branching, audit_submodular, ceiling_check, load_measure
from .program import all_inputs, disjoint_union
from .serial import read_program, write_program
from .truthtable import evaluate, from_id, function_from_spec
from .verification import (
    VerificationReport,
    read_schedule,
    verify_disjoint_paths,
    verify_level_bijections,
    verify_m_copies,
    verify_m_copies_fast,
    verify_matching_decomposition,
    verify_node_semantics,
    vertex_traffic,
)

CHECK_NAMES = ("copies", "disjoint", "semantics", "schedule", "traffic", "bijections", "matching")
UNPRUNED_ONLY = ("semantics", "bijections", "matching")


def _parse_bits(text: str, n: int) -> tuple[int, ...]:
    if len(text) != n or any(ch not in "01" for ch in text):
        raise errors.RangeError(f"input must be {n} characters of 0/1, got {text!r}")
    return tuple(int(ch) for ch in text)


def _load(path: str):
    try:
        return read_program(path)
    except FileNotFoundError:
        raise errors.ParseError(f"no such file: {path}") from None


# --------------------------------------------------------------------------


def cmd_build(args) -> int:
    f = function_from_spec(args.function, args.n)
    opts = BuildOptions(
        prune=args.prune,
        memory_limit=args.memory_limit,
        allow_huge_n=args.unsafe_large_n,
    )
    program = build_amortized(f, opts)
    if args.out:
        write_program(program, args.out)
    report = size_report(program)
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0 if report.bounds_ok else 1


def cmd_stats(args) -> int:
    program = _load(args.input)
    report = size_report(program)
    print(json.dumps(report.to_json_dict(), indent=2))
    if args.csv:
        from .plots import write_level_csv

        write_level_csv(report, args.csv)
    if args.plot:
        from .plots import render_level_profile

        render_level_profile(report, args.plot)
    return 0


def cmd_eval(args) -> int:
    program = _load(args.input)
    x = _parse_bits(args.input_bits, program.n)
    if args.trace:
        outcome, path = program.walk(args.start, x, return_path=True)
        for node in path:
            print(f"  {node}: {program.ref(node)}")
    else:
        outcome = program.walk(args.start, x)
    print(str(outcome))
    return 0


def cmd_export_dot(args) -> int:
    program = _load(args.input)
    segments = tuple(args.segments.split(",")) if args.segments else None
    options = DotOptions(
        segments=segments,
        min_level=args.min_level,
        max_level=args.max_level,
    )
    text = export_dot(program, options)
    Path(args.out).write_text(text, encoding="ascii")
    print(f"wrote {args.out}")
    return 0


def cmd_union(args) -> int:
    if len(args.inputs) != 2:
        raise errors.RangeError("union takes exactly two --in files")
    merged = disjoint_union(_load(args.inputs[0]), _load(args.inputs[1]))
    write_program(merged, args.out)
    print(json.dumps(size_report(merged).to_json_dict(), indent=2))
    return 0


# --------------------------------------------------------------------------


def _expected_schedule(n: int) -> tuple[int, ...]:
    return tuple(transition_variable(n, t) for t in range(4 * n))


def _run_checks(program, f, checks, fast):
    reports = []
    skipped = []
    for name in checks:
        if name in ("copies", "semantics", "traffic") and f is None:
            raise errors.RangeError(f"check {name!r} needs --function")
        if name in UNPRUNED_ONLY and program.pruned:
            raise errors.RequiresUnpruned(
                f"check {name!r} is only meaningful on an unpruned build"
            )
        if name == "copies":
            runner = verify_m_copies_fast if fast else verify_m_copies
            reports.append(runner(program, f))
        elif name == "disjoint":
            reports.append(verify_disjoint_paths(program))
        elif name == "semantics":
            reports.append(verify_node_semantics(program, f))
        elif name == "bijections":
            reports.append(verify_level_bijections(program))
        elif name == "matching":
            reports.append(verify_matching_decomposition(program))
        elif name == "schedule":
            t0 = time.perf_counter()
            try:
                schedule = read_schedule(program)
            except errors.NotOblivious as exc:
                reports.append(
                    VerificationReport("schedule", False, {"problem": str(exc)}, {}, 0.0)
                )
                continue
            want = _expected_schedule(program.n)
            ok = (
                schedule.variables == want
                and all(c == 4 for c in schedule.var_counts.values())
                and len(schedule.var_counts) == program.n
                and all(c == 2 for c in schedule.forward_var_counts.values())
            )
            witness = None if ok else {
                "got": list(schedule.variables),
                "expected": list(want),
            }
            reports.append(
                VerificationReport(
                    "schedule",
                    ok,
                    witness,
                    {"transitions": len(schedule.variables)},
                    (time.perf_counter() - t0) * 1000.0,
                )
            )
        elif name == "traffic":
            t0 = time.perf_counter()
            yes = [x for x in all_inputs(program.n) if evaluate(f, x)]
            table = vertex_traffic(program, yes)
            ok = table.forward_levels_carry_m and table.within_bound
            reports.append(
                VerificationReport(
                    "traffic",
                    ok,
                    None if ok else table.to_json_dict(),
                    {"inputs": table.input_count},
                    (time.perf_counter() - t0) * 1000.0,
                )
            )
        else:
            raise errors.RangeError(f"unknown check {name!r}")
    return reports, skipped


def cmd_verify(args) -> int:
    program = _load(args.input)
    structure = program.validate_structure()
    if not structure.ok:
        print(f"structure: FAIL\n{structure}")
        return 1
    f = function_from_spec(args.function, program.n) if args.function else None
    if args.checks == "all":
        checks = list(CHECK_NAMES)
        skipped_names = []
        if program.pruned:
            for name in UNPRUNED_ONLY:
                checks.remove(name)
                skipped_names.append(f"{name} (requires an unpruned build)")
        if f is None:
            for name in ("copies", "semantics", "traffic"):
                if name in checks:
                    checks.remove(name)
                    skipped_names.append(f"{name} (needs --function)")
    else:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        for name in checks:
            if name not in CHECK_NAMES:
                raise errors.RangeError(
                    f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES)} or all"
                )
        skipped_names = []
    reports, _ = _run_checks(program, f, checks, args.fast)
    if args.json:
        payload = [r.to_json_dict() for r in reports]
        for name in skipped_names:
            payload.append({"check": name.split(" ")[0], "skipped": name})
        print(json.dumps(payload, indent=2))
    else:
        for report in reports:
            print(str(report))
        for name in skipped_names:
            print(f"{name.split(' ')[0]}: SKIPPED {name}")
    return 0 if all(r.passed for r in reports) else 1


# --------------------------------------------------------------------------


def cmd_audit_measure(args) -> int:
    table = load_measure(Path(args.measure).read_text(encoding="ascii"))
    results = {}
    failed = False
    kinds = ("branching", "submodular") if args.kind == "both" else (args.kind,)
    for kind in kinds:
        audit = audit_branching if kind == "branching" else audit_submodular
        violations = audit(table, allow_long=args.allow_long)
        results[kind] = {
            "pass": not violations,
            "violations": [str(v) for v in violations[:50]],
            "violation_count": len(violations),
        }
        failed = failed or bool(violations)
    if "branching" in kinds and results["branching"]["pass"]:
        ceiling = ceiling_check(table, allow_long=args.allow_long)
        results["ceiling"] = ceiling.to_json_dict()
        failed = failed or not ceiling.passed
    if args.bp:
        program = _load(args.bp)
        if not args.function:
            raise errors.RangeError("--bp needs --function")
        f = function_from_spec(args.function, program.n)
        accounting = accounting_check(program, table, f)
        results["accounting"] = accounting.to_json_dict()
        failed = failed or not accounting.passed
    print(json.dumps(results, indent=2))
    return 1 if failed else 0


# --------------------------------------------------------------------------


def _bits_labeler(program):
    n = program.n

    def arity_of(u):
        seg = int(program.seg[u])
        level = int(program.level[u])
        if seg == 0:
            return level
        if seg == 1:
            return 2 * n - level
        return forward_arity(n, 4 * n - level)

    def label(u):
        bits = from_id(arity_of(u), int(program.func[u])).text()
        return f"{bits}/{int(program.replica[u])}"

    return label


def cmd_demo(args) -> int:
    n = args.n
    f = function_from_spec(args.function, n)
    x = _parse_bits(args.input_bits, n) if args.input_bits else (1,) * n
    program = build_amortized(f)
    label = _bits_labeler(program)

    print(f"function {f.text()} on {n} variable(s); m = {program.m} copies, "
          f"{program.num_nodes} nodes")
    print()
    print("forward layers (label = truth table x replica count):")
    for level in range(2 * n + 1):
        mask = (program.level == level) & (program.seg <= 1)
        funcs = program.func[mask]
        arity = forward_arity(n, level)
        uniq, counts = np.unique(funcs, return_counts=True)
        cells = " ".join(
            f"{from_id(arity, int(g)).text()}x{int(c)}" for g, c in zip(uniq, counts)
        )
        reads = (
            f"reads x{transition_variable(n, level)}"
            if level < 2 * n
            else "sinks a'/r'"
        )
        print(f"  level {level} (arity {arity}, {reads}): {cells}")
    print()
    text = "".join(str(b) for b in x)
    print(f"occupancy on input {text} (start walks sit on prefix-true labels):")
    visited = program.reachable_under(x)
    for level in range(2 * n + 1):
        mask = visited & (program.level == level) & (program.seg <= 1)
        arity = forward_arity(n, level)
        cells = sorted(
            {from_id(arity, int(g)).text() for g in program.func[mask]}
        )
        print(f"  level {level}: {' '.join(cells)}")
    print()
    print(f"one walk per start on input {text}:")
    for i in range(1, program.m + 1):
        outcome, path = program.walk(i, x, return_path=True)
        steps = " > ".join(label(u) for u in path)
        print(f"  s{i}: {steps} = {outcome}")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    parts = {
        "fwd1.dot": DotOptions(graph_name="widening", segments=("FWD1",)),
        "fwd2.dot": DotOptions(
            graph_name="narrowing",
            segments=("FWD1", "FWD2"),
            min_level=n,
            max_level=2 * n,
        ),
        "full.dot": DotOptions(graph_name="full"),
    }
    for name, options in parts.items():
        (out_dir / name).write_text(
            export_dot(program, options, labeler=label), encoding="ascii"
        )
    print()
    print(f"wrote {', '.join(parts)} to {out_dir}")
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambp",
        description="Build, verify and audit amortized multi-copy branching programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the m-copy program for a function")
    p.add_argument("--n", type=int, required=True, help="variable count")
    p.add_argument("--function", required=True, help="and|or|xor|maj|const0|const1|random:<seed>|table:<bits>")
    p.add_argument("--prune", action="store_true", help="drop nodes no start walk can reach")
    p.add_argument("--out", help="write AMBP v1 text here")
    p.add_argument("--memory-limit", type=int, default=BuildOptions.memory_limit,
                   help="refuse builds estimated above this many bytes")
    p.add_argument("--unsafe-large-n", action="store_true",
                   help="lift the n<=4 guard (prints the size estimate first)")
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("verify", help="run semantic checks against a function")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--function", help="function spec (needed by copies/semantics/traffic)")
    p.add_argument("--checks", default="all",
                   help="all or a comma list of " + ",".join(CHECK_NAMES))
    p.add_argument("--fast", action="store_true",
                   help="use the composed-bijection evaluator for the copies check")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("stats", help="size report for a program file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--csv", help="also write the per-level profile as CSV")
    p.add_argument("--plot", help="also render the per-level profile (png/svg)")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("eval", help="walk one start on one input")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--start", type=int, required=True, help="1-based start index")
    p.add_argument("--input", dest="input_bits", required=True, help="x as a 0/1 string")
    p.add_argument("--trace", action="store_true", help="print every visited node")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("export-dot", help="graphviz rendering")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--segments", help="comma list of FWD1,FWD2,REVA,REVB")
    p.add_argument("--min-level", type=int)
    p.add_argument("--max-level", type=int)
    p.set_defaults(handler=cmd_export_dot)

    p = sub.add_parser("union", help="disjoint union of two programs")
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   help="give twice: the two operand files")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_union)

    p = sub.add_parser("audit-measure", help="axiom audits for a measure file")
    p.add_argument("--measure", required=True)
    p.add_argument("--kind", choices=("branching", "submodular", "both"), default="both")
    p.add_argument("--bp", help="pruned AMBP file for the accounting inequality")
    p.add_argument("--function", help="function spec the program was built for")
    p.add_argument("--allow-long", action="store_true",
                   help="permit the quadratic pair scan at n>=4")
    p.set_defaults(handler=cmd_audit_measure)

    p = sub.add_parser("demo", help="small worked example with DOT output")
    p.add_argument("--n", type=int, choices=(1, 2), required=True)
    p.add_argument("--function", default="xor")
    p.add_argument("--input", dest="input_bits", help="trace input (default all ones)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(handler=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (errors.ArityOutOfRange, errors.MemoryGuardExceeded) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except errors.AmbpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
