"""End-to-end localization: source -> constraints -> IR -> SMT -> error source."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import frontend as fe
from .constraints import TypingEnv, infer_constraints, load_prelude
from .errors import HardConflict, SolverTimeout
from .ir import IrDoc, LocEntry
from .solver import ErrorSource, SolverConfig, solve

VERDICTS = ("well-typed", "error-source", "hard-conflict", "timeout", "error")


def program_to_ir(p: fe.Program, env: TypingEnv | None = None) -> IrDoc:
    g = infer_constraints(p, env)
    return IrDoc([LocEntry(i, r) for i, r in g.locations], g.schemes, g.constraints)


def source_to_ir(text: str, env: TypingEnv | None = None) -> IrDoc:
    return program_to_ir(fe.parse(text), env)


@dataclass
class Report:
    program: str
    verdict: str
    source: ErrorSource | None = None
    timings: dict[str, float] = field(default_factory=dict)
    constraint_count: int = 0
    encoding: str = "flat"
    message: str = ""

    @property
    def total_weight(self) -> int | None:
        return self.source.total_weight if self.source else None

    def to_json(self) -> dict:
        return {
            "program": self.program,
            "verdict": self.verdict,
            "removed": self.source.to_json() if self.source else [],
            "total_weight": self.total_weight,
            "objective": self.source.objective if self.source else None,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "constraint_count": self.constraint_count,
            "encoding": self.encoding,
        }

    def describe(self) -> str:
        if self.verdict == "well-typed":
            return f"{self.program}: well-typed (weight 0)"
        if self.verdict == "error-source":
            lines = [f"{self.program}: error source of weight {self.source.total_weight}"]
            for i in sorted(self.source.removed):
                rng, w = self.source.per_location[i]
                lines.append(f"  location {i} at {rng} (weight {w})")
            return "\n".join(lines)
        return f"{self.program}: {self.verdict}" + (f" ({self.message})" if self.message else "")


def localize_ir(doc: IrDoc, cfg: SolverConfig | None = None, hard=(), program: str = "<ir>",
                timings: dict[str, float] | None = None) -> Report:
    cfg = cfg or SolverConfig()
    timings = dict(timings or {})
    if hard:
        doc = doc.with_hard(hard)
    report = Report(program, "error", timings=timings,
                    constraint_count=doc.equality_count(), encoding=cfg.encoding)
    t0 = time.perf_counter()
    try:
        src = solve(doc, cfg)
    except SolverTimeout as exc:
        report.verdict, report.message = "timeout", str(exc)
        return report
    except HardConflict as exc:
        report.verdict, report.message = "hard-conflict", str(exc)
        return report
    finally:
        timings["solve"] = time.perf_counter() - t0
    report.source = src
    report.verdict = "well-typed" if not src.removed and src.total_weight == 0 else "error-source"
    return report


def localize_source(text: str, cfg: SolverConfig | None = None, env: TypingEnv | None = None,
                    hard=(), program: str = "<stdin>") -> Report:
    timings = {}
    t0 = time.perf_counter()
    p = fe.parse(text)
    t1 = time.perf_counter()
    doc = program_to_ir(p, env if env is not None else load_prelude())
    t2 = time.perf_counter()
    timings["parse"] = t1 - t0
    timings["constraints"] = t2 - t1
    return localize_ir(doc, cfg, hard, program, timings)
