"""Command line front door: ``tyloc constraints|encode|localize|oracle|eval``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import frontend as fe
from .constraints import load_prelude
from .encoder import ENCODINGS, encode
from .errors import (HardConflict, NoErrorSource, ParseError, SolverError, SolverTimeout,
                     TooLarge, TylocError, UnboundVariable)
from .evalkit import Sample, classify, load_manifest, render_summary, summarize, tabulate
from .ir import parse_ir, print_ir
from .oracle import DEFAULT_LIMIT, brute_force_min_sources, classical_infer
from .pipeline import Report, localize_ir, program_to_ir
from .solver import DEFAULT_TIMEOUT, SolverConfig, default_command

EXIT_INPUT = 2
EXIT_TIMEOUT = 3
EXIT_CONFLICT = 4
EXIT_TOO_LARGE = 5
EXIT_SOLVER = 6


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, SolverTimeout):
        return EXIT_TIMEOUT
    if isinstance(exc, (HardConflict, NoErrorSource)):
        return EXIT_CONFLICT
    if isinstance(exc, TooLarge):
        return EXIT_TOO_LARGE
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    if isinstance(exc, (TylocError, OSError, ValueError)):
        return EXIT_INPUT
    return 1


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _diagnostic(path: str, exc: BaseException) -> str:
    if isinstance(exc, ParseError):
        return f"{path}:{exc.line};{exc.col}: syntax error: {exc.message}"
    if isinstance(exc, UnboundVariable) and exc.range is not None:
        return f"{path}:{exc.range}: unbound variable '{exc.name}'"
    return f"{path}: {type(exc).__name__}: {exc}"


def _load_doc(args):
    """IR document for a program (or IR file when ``--ir``)."""
    text = _read(args.input)
    if getattr(args, "ir", False):
        return parse_ir(text)
    return program_to_ir(fe.parse(text), load_prelude(args.prelude))


def _solver_config(args) -> SolverConfig:
    return SolverConfig(args.solver or default_command(), args.timeout, args.encoding)


def _hard_list(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(tok) for tok in text.replace(" ", "").split(",") if tok]


def cmd_constraints(args) -> int:
    doc = _load_doc(args)
    sys.stdout.write(print_ir(doc))
    return 0


def cmd_encode(args) -> int:
    doc = parse_ir(_read(args.input))
    if args.hard:
        doc = doc.with_hard(_hard_list(args.hard))
    sys.stdout.write(encode(doc, args.encoding, quote=args.quote).text)
    return 0


def cmd_localize(args) -> int:
    t0 = time.perf_counter()
    doc = _load_doc(args)
    timings = {"frontend": time.perf_counter() - t0}
    report = localize_ir(doc, _solver_config(args), _hard_list(args.hard), args.input, timings)
    print(json.dumps(report.to_json(), indent=2) if args.json else report.describe())
    return {"timeout": EXIT_TIMEOUT, "hard-conflict": EXIT_CONFLICT}.get(report.verdict, 0)


def cmd_oracle(args) -> int:
    doc = _load_doc(args)
    weight, sources = brute_force_min_sources(doc, args.limit)
    ordered = sorted(sorted(s) for s in sources)
    if args.json:
        print(json.dumps({"min_weight": weight, "sources": ordered}))
        return 0
    print(f"minimum weight: {weight}")
    for s in ordered:
        ranges = " ".join(str(doc.location(i).range) for i in s)
        print(f"  {{{', '.join(map(str, s))}}}" + (f"  {ranges}" if ranges else ""))
    return 0


def _eval_one(entry, cfg: SolverConfig, env) -> dict:
    row: dict = {"path": entry.path, "truth": entry.truth}
    try:
        text = Path(entry.path).read_text(encoding="utf-8")
        row["lines"] = sum(1 for l in text.splitlines() if l.strip())
        t0 = time.perf_counter()
        p = fe.parse(text)
        doc = program_to_ir(p, env)
        report = localize_ir(doc, cfg, program=entry.path,
                             timings={"frontend": time.perf_counter() - t0})
        row["seconds"] = time.perf_counter() - t0
        row["inferred"] = classical_infer(p, env)
    except (TylocError, OSError) as exc:
        report = Report(entry.path, "error", encoding=cfg.encoding, message=str(exc))
        row["inferred"] = None
    row["report"] = report
    if entry.truth:
        ours = report.source.ranges if report.source and report.source.removed else []
        cl = row["inferred"]
        blamed = [cl.blame_range] if cl is not None and not cl.ok else []
        row["tyloc"] = classify(ours, entry.truth).verdict if ours else "miss"
        row["classical"] = classify(blamed, entry.truth).verdict if blamed else "miss"
    return row


def cmd_eval(args) -> int:
    entries = load_manifest(args.input)
    cfg = _solver_config(args)
    env = load_prelude(args.prelude)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda e: _eval_one(e, cfg, env), entries))
    # all output comes from this thread, in manifest order
    table = tabulate((r["tyloc"], r["classical"]) for r in rows if "tyloc" in r)
    samples = [Sample(r["lines"], r["report"].constraint_count, r["report"].total_weight or 0,
                      r["seconds"]) for r in rows if r["report"].verdict in ("well-typed", "error-source")]
    summary = summarize(samples)
    if args.json:
        for r in rows:
            rec = r["report"].to_json()
            cl = r["inferred"]
            rec["classical"] = None if cl is None else {
                "ok": cl.ok, "blame": cl.blame,
                "range": str(cl.blame_range) if cl.blame_range else None}
            if "tyloc" in r:
                rec["outcome"] = {"tyloc": r["tyloc"], "classical": r["classical"]}
            print(json.dumps(rec))
        print(json.dumps({"table": table.records()}))
        print(json.dumps({"summary": summary}))
        return 0
    for r in rows:
        print(r["report"].describe())
        if "tyloc" in r:
            print(f"  outcome: tyloc={r['tyloc']} classical={r['classical']}")
    print()
    print(table.render())
    if summary:
        print()
        print(render_summary(summary))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tyloc", description="MaxSMT-based type error localization")
    sub = ap.add_subparsers(dest="command", required=True)

    def solver_opts(p):
        p.add_argument("--solver", help="solver command line (default $TYLOC_SOLVER or 'z3 -in')")
        p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds (default 100)")
        p.add_argument("--encoding", choices=ENCODINGS, default="flat")

    p = sub.add_parser("constraints", help="print the constraint IR of a program")
    p.add_argument("input", help="program file, or - for stdin")
    p.add_argument("--prelude", help="built-ins file of 'name : type' lines")
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("encode", help="translate an IR file to SMT-LIB")
    p.add_argument("input", help="IR file, or - for stdin")
    p.add_argument("--encoding", choices=ENCODINGS, default="flat")
    p.add_argument("--quote", action="store_true", help="quote the arrow constructor as |->|")
    p.add_argument("--hard", help="comma-separated location indices to make hard")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("localize", help="find a minimum error source")
    p.add_argument("input")
    p.add_argument("--prelude")
    p.add_argument("--ir", action="store_true", help="input is an IR file")
    solver_opts(p)
    p.add_argument("--hard", help="comma-separated location indices to make hard")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("oracle", help="enumerate every minimum error source by brute force")
    p.add_argument("input")
    p.add_argument("--prelude")
    p.add_argument("--ir", action="store_true", help="input is an IR file")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", help="localize a manifest of programs and tabulate accuracy")
    p.add_argument("input", help="manifest: one 'path[: ranges]' per line")
    p.add_argument("--prelude")
    solver_opts(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TylocError, OSError, ValueError) as exc:
        print(_diagnostic(args.input, exc), file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
