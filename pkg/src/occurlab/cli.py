"""Command-line front end.

Subcommands: unify, nsto, ocf-run, iequiv, derive, theorem-test,
corpus. Exit codes: 0 when the queried property holds (or the run
succeeds), 1 when it fails, 2 on usage or parse errors, 3 when a bound
was exhausted and the answer is unknown.

With --json, a single JSON document goes to standard output. The
document is deterministic for a fixed command line and seed except for
the elapsed_ms field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import corpus as corpus_mod
from . import difftest, iterms, mma, mma_minus, robinson, sld
from .parser import ParseError, parse_equations, parse_query, parse_program, render
from .terms import Compound, EquationSet

SCHEMA_VERSION = 1

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3


def _read_arg(text: str) -> str:
    """Argument strings may name a file with a leading @."""
    if text.startswith("@"):
        return Path(text[1:]).read_text()
    return text


def _binding_json(binding) -> dict | None:
    if binding is None:
        return None
    var, t = binding
    return {"var": var.name, "term": render(t)}


def _mma_trace_json(trace: mma.MmaTrace) -> dict:
    steps = []
    for st in trace.steps:
        entry: dict = {
            "action": st.action.kind,
            "number": st.action.number,
            "position": st.action.pos,
        }
        if st.action.binding is not None:
            entry["binding"] = _binding_json(st.action.binding)
        steps.append(entry)
    return {
        "initial": render(trace.initial.eqs),
        "steps": steps,
        "final": render(trace.final.eqs),
        "status": trace.status,
    }


def _minus_trace_json(trace: mma_minus.MinusTrace) -> dict:
    steps = []
    for st in trace.steps:
        entry: dict = {"action": st.action.kind, "position": st.action.pos}
        if st.action.binding is not None:
            entry["binding"] = _binding_json(st.action.binding)
        if st.action.occurrences is not None:
            entry["occurrences"] = [
                {"equation": q, "side": side, "path": list(path)}
                for q, side, path in st.action.occurrences
            ]
        steps.append(entry)
    return {
        "initial": render(trace.initial.eqs),
        "steps": steps,
        "final": render(trace.final.eqs),
        "status": trace.outcome,
    }


class _Output:
    def __init__(self, command: str, as_json: bool, seed=None):
        self.command = command
        self.as_json = as_json
        self.seed = seed
        self.started = time.perf_counter()

    def emit(self, payload: dict, human_lines: list[str]) -> None:
        if self.as_json:
            document = {
                "schema_version": SCHEMA_VERSION,
                "command": self.command,
                "seed": self.seed,
                "result": payload,
                "elapsed_ms": round(1000 * (time.perf_counter() - self.started), 3),
            }
            print(json.dumps(document, sort_keys=True))
        else:
            for line in human_lines:
                print(line)


# -- subcommand handlers ----------------------------------------------------


def _cmd_unify(args) -> int:
    eqs = parse_equations(_read_arg(args.equations))
    out = _Output("unify", args.json, args.seed)

    if args.algo == "robinson":
        chooser = robinson.choose_first
        if args.strategy in ("rightmost-first", "last"):
            chooser = robinson.choose_last
        elif args.strategy not in (None, "leftmost-first", "first"):
            chooser = robinson.seeded_chooser(int(args.strategy.rsplit(":", 1)[-1]))
        if len(eqs) == 1:
            a, h = eqs[0].lhs, eqs[0].rhs
        else:
            a = Compound("$tuple", tuple(eq.lhs for eq in eqs))
            h = Compound("$tuple", tuple(eq.rhs for eq in eqs))
        result = robinson.unify_robinson(a, h, choose=chooser)
        payload = {
            "status": result.status,
            "mgu": None if result.mgu is None else render(result.mgu),
            "steps": len(result.states) - 1,
        }
        lines = [f"status: {result.status}"]
        if result.mgu is not None:
            lines.append(f"mgu: {render(result.mgu)}")
        out.emit(payload, lines)
        return EXIT_HOLDS if result.succeeded else EXIT_FAILS

    strat = mma.strategy(args.seed if args.strategy is None and args.seed is not None else (args.strategy or "leftmost-first"))
    if args.algo == "mma":
        try:
            trace = mma.run(eqs, strat, args.fuel)
        except mma.DivergenceError:
            out.emit({"status": "fuel_exhausted"}, ["status: fuel_exhausted"])
            return EXIT_UNKNOWN
        payload = _mma_trace_json(trace)
        lines = [trace.describe()]
        if trace.status == "solved":
            payload["mgu"] = render(mma.extract_mgu(trace.final))
            lines.append(f"mgu: {payload['mgu']}")
        out.emit(payload, lines)
        return EXIT_HOLDS if trace.status == "solved" else EXIT_FAILS

    trace = mma_minus.run_minus(eqs, strat, args.mode, args.fuel)
    payload = _minus_trace_json(trace)
    lines = [trace.describe()]
    out.emit(payload, lines)
    if trace.outcome == "semi_solved":
        return EXIT_HOLDS
    if trace.outcome == "failed_clash":
        return EXIT_FAILS
    return EXIT_UNKNOWN


def _cmd_nsto(args) -> int:
    eqs = parse_equations(_read_arg(args.equations))
    verdict = mma.is_nsto(eqs, args.bound)
    summary = mma.enumerate_runs(eqs, args.bound)
    out = _Output("nsto", args.json)
    out.emit(
        {
            "verdict": verdict,
            "any_occur_halt": summary.any_occur_halt,
            "any_success": summary.any_success,
            "states_explored": summary.states_explored,
            "exhausted": summary.exhausted,
        },
        [f"verdict: {verdict}", f"states explored: {summary.states_explored}"],
    )
    return {"yes": EXIT_HOLDS, "no": EXIT_FAILS, "unknown": EXIT_UNKNOWN}[verdict]


def _cmd_ocf_run(args) -> int:
    eqs = parse_equations(_read_arg(args.equations))
    found = mma.exists_ocf_run(eqs, args.bound)
    out = _Output("ocf-run", args.json)
    payload: dict = {"verdict": found.verdict}
    lines = [f"verdict: {found.verdict}"]
    if found.trace is not None:
        payload["witness"] = _mma_trace_json(found.trace)
        lines.append(found.trace.describe())
    out.emit(payload, lines)
    return {"found": EXIT_HOLDS, "none": EXIT_FAILS, "unknown": EXIT_UNKNOWN}[found.verdict]


def _cmd_iequiv(args) -> int:
    e1 = parse_equations(_read_arg(args.equations1))
    e2 = parse_equations(_read_arg(args.equations2))
    s1, s2 = iterms.solve_rational(e1), iterms.solve_rational(e2)
    equivalent = iterms.i_equivalent(e1, e2, args.depth)
    out = _Output("iequiv", args.json)
    out.emit(
        {
            "equivalent": equivalent,
            "depth": args.depth,
            "left_solution": None if s1 is None else s1.describe(),
            "right_solution": None if s2 is None else s2.describe(),
        },
        [
            f"equivalent (to depth {args.depth}): {equivalent}",
            f"left solution: {'none' if s1 is None else s1.describe()}",
            f"right solution: {'none' if s2 is None else s2.describe()}",
        ],
    )
    return EXIT_HOLDS if equivalent else EXIT_FAILS


def _load_program(spec: str):
    if spec.startswith("corpus:"):
        return parse_program(corpus_mod.get(spec.split(":", 1)[1]).text)
    return parse_program(Path(spec).read_text())


def _cmd_derive(args) -> int:
    program = _load_program(args.program)
    query = parse_query(_read_arg(args.query))
    seed = args.seed
    rule = args.rule
    if rule == "random" and seed is not None:
        rule = f"random:{seed}"
    out = _Output("derive", args.json, seed)
    try:
        tree = sld.derive(
            program, query, rule, args.depth, args.traversal, args.engine, args.fuel
        )
    except sld.EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_FAILS

    from collections import Counter

    statuses = Counter(node.status for node in tree.nodes())
    payload: dict = {
        "rule": tree.rule_name,
        "engine": tree.engine,
        "depth_bound": tree.depth_bound,
        "traversal": tree.traversal,
        "nodes": tree.node_count(),
        "status_counts": dict(sorted(statuses.items())),
        "has_success": tree.has_success,
    }
    lines = [
        f"rule {tree.rule_name}, engine {tree.engine}, depth bound {tree.depth_bound}",
        f"nodes: {payload['nodes']} ({', '.join(f'{k}={v}' for k, v in sorted(statuses.items()))})",
        f"success branch: {'yes' if tree.has_success else 'no'}",
    ]
    report = None
    if args.check or args.report:
        report = sld.check_derivation_invariants(tree, args.bound)
        payload["invariants"] = report.as_dict()
        lines.append(
            "invariants: "
            + ", ".join(f"{k}={v}" for k, v in report.as_dict().items())
        )
    if args.report:
        from .report import write_derivation_report

        paths = write_derivation_report(tree, report, args.report)
        payload["report_files"] = [str(p) for p in paths]
        lines.extend(f"wrote {p}" for p in paths)
    out.emit(payload, lines)
    if tree.has_success:
        return EXIT_HOLDS
    if statuses["depth_cutoff"]:
        return EXIT_UNKNOWN
    return EXIT_FAILS


def _cmd_theorem_test(args) -> int:
    out = _Output("theorem-test", args.json, args.seed)
    result = difftest.run_theorem_suite(
        count=args.count,
        seed=args.seed,
        fuel=args.fuel,
        witness_bound=args.bound,
    )
    payload: dict = {
        "cases": len(result.cases),
        "generated": result.generated,
        "skipped_no_witness": result.skipped_no_witness,
        "runs": result.total_runs,
        "classifications": dict(sorted(result.classification_counts.items())),
        "outcomes": dict(sorted(result.outcome_counts.items())),
        "counterexamples": [
            {
                "equations": render(c.eqs),
                "shrunk": render(c.shrunk),
                "mode": c.mode,
                "strategy": c.strategy,
                "outcome": c.outcome,
            }
            for c in result.counterexamples
        ],
    }
    lines = result.summary_lines()
    for c in result.counterexamples:
        lines.append(f"  incorrect: {render(c.shrunk)}  [{c.mode}, {c.strategy}, {c.outcome}]")
    if args.report:
        from .report import write_theorem_report

        paths = write_theorem_report(result, args.report)
        payload["report_files"] = [str(p) for p in paths]
        lines.extend(f"wrote {p}" for p in paths)
    out.emit(payload, lines)
    if result.incorrect_runs:
        return EXIT_FAILS
    if len(result.cases) < args.count:
        return EXIT_UNKNOWN
    return EXIT_HOLDS


def _cmd_corpus(args) -> int:
    out = _Output("corpus", args.json)
    if args.action == "list":
        entries = corpus_mod.entries()
        out.emit(
            {"entries": [{"name": e.name, "description": e.description} for e in entries]},
            [f"{e.name}: {e.description}" for e in entries],
        )
        return EXIT_HOLDS
    try:
        entry = corpus_mod.get(args.name)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    out.emit({"name": entry.name, "text": entry.text}, [entry.text.rstrip("\n")])
    return EXIT_HOLDS


# -- argument parsing --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="occur-lab",
        description="unification with and without the occur check: run, enumerate, decide, derive",
    )
    sub = top.add_subparsers(dest="subcommand", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="machine-readable output on stdout")

    p = sub.add_parser("unify", help="run one unification schedule and show the trace")
    p.add_argument("equations", help="equation set 't = u, ...' (or @file)")
    p.add_argument("--algo", choices=("mma", "mma-minus", "robinson"), default="mma")
    p.add_argument("--strategy", default=None, help="leftmost-first, rightmost-first, bind-first-argument-eagerly, adversarial-delay-binding, or seeded-random:<seed>")
    p.add_argument("--mode", choices=("restricted", "unrestricted"), default="restricted")
    p.add_argument("--fuel", type=int, default=mma.DEFAULT_RUN_FUEL)
    p.add_argument("--seed", type=int, default=None)
    add_json(p)
    p.set_defaults(handler=_cmd_unify)

    p = sub.add_parser("nsto", help="can any schedule hit the occur halt?")
    p.add_argument("equations")
    p.add_argument("--bound", type=int, default=mma.DEFAULT_ENUM_BOUND)
    add_json(p)
    p.set_defaults(handler=_cmd_nsto)

    p = sub.add_parser("ocf-run", help="find a terminating schedule that avoids the occur halt")
    p.add_argument("equations")
    p.add_argument("--bound", type=int, default=mma.DEFAULT_ENUM_BOUND)
    add_json(p)
    p.set_defaults(handler=_cmd_ocf_run)

    p = sub.add_parser("iequiv", help="compare rational-tree solution sets of two equation sets")
    p.add_argument("equations1")
    p.add_argument("equations2")
    p.add_argument("--depth", type=int, default=32)
    add_json(p)
    p.set_defaults(handler=_cmd_iequiv)

    p = sub.add_parser("derive", help="build a bounded SLD tree for a program and query")
    p.add_argument("program", help="path to a .pl file, or corpus:<name>")
    p.add_argument("query", help="query text (or @file)")
    p.add_argument("--rule", default="leftmost", help="leftmost, rightmost, round-robin-fair, or random:<seed>")
    p.add_argument("--depth", type=int, default=30)
    p.add_argument("--engine", choices=("mma", "mma-minus"), default="mma")
    p.add_argument("--traversal", choices=("tree", "branch"), default="tree")
    p.add_argument("--fuel", type=int, default=mma.DEFAULT_RUN_FUEL)
    p.add_argument("--bound", type=int, default=mma.DEFAULT_ENUM_BOUND, help="enumeration bound for --check")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--check", action="store_true", help="aggregate linearity/groundness/occur-check reports")
    p.add_argument("--report", metavar="DIR", default=None, help="write CSV and figures into DIR")
    add_json(p)
    p.set_defaults(handler=_cmd_derive)

    p = sub.add_parser("theorem-test", help="differential suite: occur-check-free runs vs the reference")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=200)
    p.add_argument("--bound", type=int, default=20_000, help="witness search bound per case")
    p.add_argument("--report", metavar="DIR", default=None)
    add_json(p)
    p.set_defaults(handler=_cmd_theorem_test)

    p = sub.add_parser("corpus", help="list or show embedded programs")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?", default=None)
    add_json(p)
    p.set_defaults(handler=_cmd_corpus)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.subcommand == "corpus" and args.action == "show" and args.name is None:
        print("corpus show needs a name", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
