"""Hit/close/miss bookkeeping for localization accuracy."""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import EmptyInput
from .frontend import SourceRange

OUTCOMES = ("hit", "close", "miss")


@dataclass(frozen=True)
class Outcome:
    verdict: str
    reported: frozenset[SourceRange]
    truth: frozenset[SourceRange]


def _near(a: SourceRange, b: SourceRange) -> bool:
    return a.overlaps(b) or bool({a.start, a.end} & {b.start, b.end})


def classify(reported: Iterable[SourceRange], truth: Iterable[SourceRange]) -> Outcome:
    """``hit`` on exact set equality; ``close`` when any reported range
    overlaps or shares an endpoint with a true range; ``miss`` otherwise."""
    reported, truth = frozenset(reported), frozenset(truth)
    if not reported or not truth:
        raise EmptyInput("both range sets must be non-empty")
    if reported == truth:
        verdict = "hit"
    elif any(_near(a, b) for a in reported for b in truth):
        verdict = "close"
    else:
        verdict = "miss"
    return Outcome(verdict, reported, truth)


class Table:
    """Counts of (tool A verdict, tool B verdict) pairs."""

    def __init__(self, labels: tuple[str, str] = ("tyloc", "classical")):
        self.labels = labels
        self.counts = {(a, b): 0 for a in OUTCOMES for b in OUTCOMES}

    def add(self, a: str, b: str) -> None:
        self.counts[(a, b)] += 1

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def rows(self) -> list[tuple[str, str, int]]:
        return [(a, b, self.counts[(a, b)]) for a in OUTCOMES for b in OUTCOMES]

    def render(self) -> str:
        la, lb = self.labels
        header = (la, lb, "# of outcomes")
        body = [(a, b, str(n)) for a, b, n in self.rows()]
        widths = [max(len(r[k]) for r in [header] + body) for k in range(3)]
        fmt = lambda r: " | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
        rule = "-+-".join("-" * w for w in widths)
        return "\n".join([fmt(header), rule] + [fmt(r) for r in body])

    def records(self) -> list[dict]:
        la, lb = (l.lower() for l in self.labels)
        return [{la: a, lb: b, "count": n} for a, b, n in self.rows()]


def tabulate(outcomes, labels: tuple[str, str] = ("tyloc", "classical")) -> Table:
    t = Table(labels)
    for a, b in outcomes:
        t.add(getattr(a, "verdict", a), getattr(b, "verdict", b))
    return t


# -- manifest / ground-truth files ------------------------------------------

@dataclass
class ManifestEntry:
    path: str
    truth: frozenset[SourceRange] | None


def parse_manifest(text: str, base: Path | None = None) -> list[ManifestEntry]:
    """Lines of ``path[: i;j-k;l i;j-k;l ...]``; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        path, sep, rest = line.partition(":")
        path = path.strip()
        if base is not None and not Path(path).is_absolute():
            path = str(base / path)
        truth = None
        if sep and rest.strip():
            try:
                truth = frozenset(SourceRange.parse(tok) for tok in rest.split())
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        out.append(ManifestEntry(path, truth))
    return out


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    path = Path(path)
    return parse_manifest(path.read_text(encoding="utf-8"), path.parent)


# -- timing summary ---------------------------------------------------------

@dataclass
class Sample:
    lines: int
    constraints: int
    weight: int
    seconds: float


def summarize(samples: list[Sample], bucket: int = 50) -> list[dict]:
    """min/median/max of constraints, weight and time per lines-of-code group."""
    groups: dict[int, list[Sample]] = {}
    for s in samples:
        groups.setdefault(s.lines // bucket, []).append(s)
    out = []
    for k in sorted(groups):
        g = groups[k]
        row = {"group": f"{k * bucket}-{(k + 1) * bucket}", "count": len(g)}
        for key in ("constraints", "weight", "seconds"):
            vals = [getattr(s, key) for s in g]
            row[key] = (min(vals), statistics.median(vals), max(vals))
        out.append(row)
    return out


def render_summary(rows: list[dict]) -> str:
    lines = [f"{'group':<10}{'n':>5}  {'constraints (min/med/max)':<28}{'weight (min/med/max)':<24}time s (min/med/max)"]
    for r in rows:
        c, w, t = r["constraints"], r["weight"], r["seconds"]
        lines.append(f"{r['group']:<10}{r['count']:>5}  "
                     f"{f'{c[0]}/{c[1]:g}/{c[2]}':<28}{f'{w[0]}/{w[1]:g}/{w[2]}':<24}"
                     f"{t[0]:.2f}/{t[1]:.2f}/{t[2]:.2f}")
    return "\n".join(lines)
