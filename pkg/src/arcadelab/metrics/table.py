"""Score tables (games x algorithms x samples) and pairwise significance counts.

Text format, tab separated::

    game<TAB>alg_1<TAB>alg_2 ...
    crossing<TAB>1.5;2.0;0.25<TAB>...

Cells hold ``;``-separated samples written with ``repr`` so they read back
bit-exactly; an empty cell means the combination was not run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Iterable

import numpy as np

from .stats import welch_test


@dataclass
class ScoreTable:
    games: list[str]
    algorithms: list[str]
    samples: dict[tuple[str, str], list[float]] = field(default_factory=dict)

    def add(self, game: str, algorithm: str, scores: Iterable[float]) -> None:
        vals = [float(s) for s in scores]
        if not vals:
            raise ValueError("a populated cell needs at least one sample")
        if not all(np.isfinite(vals)):
            raise ValueError("scores must be finite")
        if game not in self.games:
            self.games.append(game)
        if algorithm not in self.algorithms:
            self.algorithms.append(algorithm)
        self.samples[(game, algorithm)] = vals

    def cell(self, game: str, algorithm: str) -> list[float]:
        try:
            return self.samples[(game, algorithm)]
        except KeyError:
            raise KeyError(f"missing score cell ({game}, {algorithm})") from None

    def mean(self, game: str, algorithm: str) -> float:
        return float(np.mean(self.cell(game, algorithm)))

    def means(self) -> dict[str, list[float]]:
        """Per algorithm, its mean score on each game (in game order)."""
        return {a: [self.mean(g, a) for g in self.games] for a in self.algorithms}

    def check_complete(self) -> None:
        missing = [(g, a) for g in self.games for a in self.algorithms if (g, a) not in self.samples]
        if missing:
            raise KeyError(f"missing score cells: {missing}")

    def to_text(self) -> str:
        lines = ["\t".join(["game"] + self.algorithms)]
        for g in self.games:
            cells = [";".join(repr(float(v)) for v in self.samples.get((g, a), [])) for a in self.algorithms]
            lines.append("\t".join([g] + cells))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ScoreTable":
        rows = [line.split("\t") for line in text.splitlines() if line.strip()]
        if not rows or rows[0][0] != "game":
            raise ValueError("score table must start with a 'game' header row")
        algs = rows[0][1:]
        table = cls([], list(algs))
        for row in rows[1:]:
            if len(row) != len(algs) + 1:
                raise ValueError(f"row for {row[0]!r} has {len(row) - 1} cells, expected {len(algs)}")
            table.games.append(row[0])
            for a, cell in zip(algs, row[1:]):
                if cell:
                    table.add(row[0], a, [float(v) for v in cell.split(";")])
        return table

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_text())
        return path

    @classmethod
    def load(cls, path) -> "ScoreTable":
        return cls.from_text(Path(path).read_text())


def write_value_table(path, games: list[str], columns: list[str], values: dict[tuple[str, str], float]) -> Path:
    """Single value per cell, same layout as a score table."""
    lines = ["\t".join(["game"] + columns)]
    for g in games:
        lines.append("\t".join([g] + [repr(float(values[(g, c)])) if (g, c) in values else "" for c in columns]))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def paired_matrix(table: ScoreTable, confidence: float = 0.99) -> dict[tuple[str, str], tuple[int, int]]:
    """For each ordered pair (a, b), a != b: games where a is significantly better / worse."""
    table.check_complete()
    outcome = {}
    algs = table.algorithms
    for i, a in enumerate(algs):
        for b in algs[i + 1:]:
            for g in table.games:
                outcome[(g, a, b)] = welch_test(table.cell(g, a), table.cell(g, b), confidence).outcome
    out = {}
    for a, b in permutations(algs, 2):
        wins = losses = 0
        for g in table.games:
            o = outcome.get((g, a, b))
            if o is None:
                o = {"a_better": "b_better", "b_better": "a_better"}.get(outcome[(g, b, a)], "not_significant")
            wins += o == "a_better"
            losses += o == "b_better"
        out[(a, b)] = (wins, losses)
    return out


def render_paired_matrix(matrix: dict[tuple[str, str], tuple[int, int]], algorithms: list[str]) -> str:
    """Row algorithm vs column algorithm as ``wins-losses``; diagonal left as ``--``."""
    width = max(len(a) for a in algorithms) + 2
    lines = [" " * width + "".join(a.rjust(width) for a in algorithms)]
    for a in algorithms:
        cells = []
        for b in algorithms:
            if a == b:
                cells.append("--".rjust(width))
            else:
                w, l = matrix[(a, b)]
                cells.append(f"{w}-{l}".rjust(width))
        lines.append(a.ljust(width) + "".join(cells))
    return "\n".join(lines) + "\n"


def paired_summary(matrix: dict[tuple[str, str], tuple[int, int]], a: str, b: str) -> str:
    w, l = matrix[(a, b)]
    return f"{a} vs {b}: {w}-{l}"
