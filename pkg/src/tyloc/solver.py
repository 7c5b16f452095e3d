"""Drive an external MaxSMT solver over SMT-LIB text and read back the
minimum error source."""
from __future__ import annotations

import os
import shlex
import subprocess
from dataclasses import dataclass, field

from . import sexp
from .encoder import ENCODINGS, SmtScript, encode, forest_for
from .errors import (HardConflict, SolverCrash, SolverNotFound, SolverTimeout,
                     UnparseableOutput)
from .frontend import SourceRange
from .ir import IrDoc

SOLVER_ENV = "TYLOC_SOLVER"
DEFAULT_SOLVER = "z3 -in"
DEFAULT_TIMEOUT = 100.0
VERDICTS = ("sat", "unsat", "unknown")


def default_command() -> list[str]:
    return shlex.split(os.environ.get(SOLVER_ENV) or DEFAULT_SOLVER)


@dataclass
class SolverConfig:
    command: list[str] = field(default_factory=default_command)
    timeout: float = DEFAULT_TIMEOUT
    encoding: str = "flat"
    quote: bool = False

    def __post_init__(self):
        if isinstance(self.command, str):
            self.command = shlex.split(self.command)
        if not self.command:
            raise ValueError("empty solver command")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.encoding not in ENCODINGS:
            raise ValueError(f"encoding must be one of {ENCODINGS}")


@dataclass
class ErrorSource:
    removed: frozenset[int]
    total_weight: int
    per_location: dict[int, tuple[SourceRange, int]]
    objective: int | None = None

    @property
    def ranges(self) -> list[SourceRange]:
        return [self.per_location[i][0] for i in sorted(self.removed)]

    def to_json(self) -> list[dict]:
        return [{"index": i, "range": str(self.per_location[i][0]),
                 "weight": self.per_location[i][1]} for i in sorted(self.removed)]


class _MissingModel(UnparseableOutput):
    pass


def run_solver(script: SmtScript | str, cfg: SolverConfig) -> str:
    text = script.text if isinstance(script, SmtScript) else script
    try:
        proc = subprocess.run(cfg.command, input=text, capture_output=True,
                              text=True, timeout=cfg.timeout)
    except (FileNotFoundError, PermissionError) as exc:
        raise SolverNotFound(f"cannot run solver {cfg.command[0]!r}: {exc}") from None
    except subprocess.TimeoutExpired:
        raise SolverTimeout(f"solver exceeded {cfg.timeout:g} s") from None
    if proc.returncode != 0 and _verdict(proc.stdout) is None:
        detail = (proc.stderr or proc.stdout).strip().splitlines()[:3]
        raise SolverCrash(f"solver exited with {proc.returncode}: {' | '.join(detail)}",
                          proc.returncode)
    return proc.stdout


def _verdict(raw: str) -> str | None:
    for line in raw.splitlines():
        word = line.strip()
        if word in VERDICTS:
            return word
    return None


def _int_in(entry) -> int | None:
    items = entry if isinstance(entry, list) else [entry]
    for tok in reversed(items):
        if isinstance(tok, str) and tok.lstrip("-").isdigit():
            return int(tok)
    return None


def _read_blocks(exprs: list, names: dict[str, int]):
    """Pull the objective and the location assignment out of solver output,
    whatever order the blocks come in."""
    objective = None
    model: dict[int, bool] = {}
    for e in exprs:
        if not isinstance(e, list) or not e:
            continue
        if e[0] == "objectives":
            for entry in e[1:]:
                v = _int_in(entry)
                if v is not None:
                    objective = v
                    break
            continue
        if e[0] == "model":
            e = e[1:]
        for item in e:
            if not isinstance(item, list):
                continue
            if len(item) == 2 and item[0] in names and item[1] in ("true", "false"):
                model[names[item[0]]] = item[1] == "true"
            elif (len(item) == 5 and item[0] == "define-fun" and item[1] in names
                  and item[4] in ("true", "false")):
                model[names[item[1]]] = item[4] == "true"
    return objective, model


def parse_result(raw: str, doc: IrDoc) -> ErrorSource:
    try:
        exprs = sexp.parse_all(raw)
    except ValueError as exc:
        raise UnparseableOutput(f"malformed solver output: {exc}") from None
    verdict = next((e for e in exprs if isinstance(e, str) and e in VERDICTS), None)
    if verdict == "unsat":
        raise HardConflict("hard locations are inconsistent on their own")
    if verdict != "sat":
        raise UnparseableOutput(f"no sat verdict in solver output: {raw[:200]!r}")
    forest = forest_for(doc)
    names = {f"l{e.index}": e.index for e in doc.locations}
    objective, model = _read_blocks(exprs, names)
    if len(model) < len(names):
        raise _MissingModel("solver output carries no complete location assignment")
    removed = frozenset(i for i, kept in model.items() if not kept)
    per_location = {i: (forest.ranges[i], forest.weight[i]) for i in forest.nodes}
    total = objective if objective is not None else sum(forest.weight[i] for i in removed)
    return ErrorSource(removed, total, per_location, objective)


def solve(doc: IrDoc, cfg: SolverConfig | None = None,
          fixed: dict[int, bool] | None = None) -> ErrorSource:
    """Encode, run and decode. Retries once asking for the model explicitly
    when a ``sat`` answer arrives without location values."""
    cfg = cfg or SolverConfig()
    script = encode(doc, cfg.encoding, quote=cfg.quote, fixed=fixed)
    raw = run_solver(script, cfg)
    try:
        return parse_result(raw, doc)
    except _MissingModel:
        retry = "(set-option :produce-models true)\n" + script.text + "(get-model)\n"
        return parse_result(run_solver(retry, cfg), doc)


def check_error_source(doc: IrDoc, removed, cfg: SolverConfig | None = None) -> bool:
    """Is the script satisfiable with ``removed`` forced off and the rest on?"""
    cfg = cfg or SolverConfig()
    removed = set(removed)
    fixed = {e.index: e.index not in removed for e in doc.locations}
    raw = run_solver(encode(doc, cfg.encoding, quote=cfg.quote, fixed=fixed), cfg)
    return _verdict(raw) == "sat"
