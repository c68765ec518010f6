"""Subjective-experiment data model: test conditions, score matrices, MOS.

Raw opinion scores live on a continuous 0-100 scale, one score per
(observer, condition) cell.  MOS is reported on the conventional 1-5
scale after an affine remapping of the raw grades.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SCORE_HEADER = ["observer_id", "condition_id", "score"]
CONDITION_HEADER = ["condition_id", "sequence_name", "width", "height", "fps", "bitrate_kbps"]

#: Normal-approximation multiplier for the MOS confidence interval.
DEFAULT_CI_Z = 1.96


class ScoreFileError(ValueError):
    """Malformed score or condition file."""


@dataclass(frozen=True)
class TestCondition:
    """One (sequence x coding configuration) test scenario."""

    id: str
    sequence_name: str
    width: int
    height: int
    frame_rate: float
    bitrate: float

    def __post_init__(self):
        if not self.id:
            raise ValueError("condition id must be nonempty")
        for name in ("width", "height", "frame_rate", "bitrate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class MOSRecord:
    """Per-condition mean opinion score with confidence bounds, 1-5 scale."""

    condition_id: str
    mos: float
    n: int
    ci_low: float
    ci_high: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("observer count must be >= 1")
        if not (1.0 <= self.ci_low <= self.mos <= self.ci_high <= 5.0):
            raise ValueError("MOS bounds must satisfy 1 <= ci_low <= mos <= ci_high <= 5")


class ScoreMatrix:
    """Rectangular observers x conditions table of raw scores in [0, 100].

    Immutable after construction; the backing array is read-only.
    """

    def __init__(self, observers: Sequence[str], conditions: Sequence[str],
                 scores: np.ndarray | Sequence[Sequence[float]]):
        observers = tuple(observers)
        conditions = tuple(conditions)
        arr = np.array(scores, dtype=float)
        if len(observers) == 0 or len(conditions) == 0:
            raise ValueError("need at least one observer and one condition")
        if len(set(observers)) != len(observers):
            raise ValueError("duplicate observer ids")
        if len(set(conditions)) != len(conditions):
            raise ValueError("duplicate condition ids")
        if arr.shape != (len(observers), len(conditions)):
            raise ValueError(
                f"score grid shape {arr.shape} does not match "
                f"{len(observers)} observers x {len(conditions)} conditions")
        if not np.all(np.isfinite(arr)):
            raise ValueError("scores must be finite")
        if arr.min() < 0.0 or arr.max() > 100.0:
            raise ValueError("scores must lie in [0, 100]")
        arr.setflags(write=False)
        self.observers = observers
        self.conditions = conditions
        self.scores = arr

    def __eq__(self, other):
        return (isinstance(other, ScoreMatrix)
                and self.observers == other.observers
                and self.conditions == other.conditions
                and np.array_equal(self.scores, other.scores))

    def __repr__(self):
        return f"ScoreMatrix({len(self.observers)} observers x {len(self.conditions)} conditions)"

    def column(self, condition_id: str) -> np.ndarray:
        """All observers' scores for one condition."""
        try:
            j = self.conditions.index(condition_id)
        except ValueError:
            raise KeyError(f"unknown condition {condition_id!r}") from None
        return self.scores[:, j]

    def row(self, observer_id: str) -> np.ndarray:
        """One observer's scores across all conditions."""
        try:
            i = self.observers.index(observer_id)
        except ValueError:
            raise KeyError(f"unknown observer {observer_id!r}") from None
        return self.scores[i, :]

    def restrict_observers(self, keep: Iterable[str]) -> "ScoreMatrix":
        """Submatrix with only the given observers, original order preserved."""
        keep = set(keep)
        idx = [i for i, o in enumerate(self.observers) if o in keep]
        if not idx:
            raise ValueError("restriction would leave no observers")
        return ScoreMatrix([self.observers[i] for i in idx], self.conditions,
                           self.scores[idx, :])


def load_scores(text: str) -> ScoreMatrix:
    """Parse the long-form score schema into a ScoreMatrix.

    Expected format (UTF-8, header required)::

        observer_id,condition_id,score

    Row and column order follow first appearance in the file.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ScoreFileError("empty score file") from None
    if [h.strip() for h in header] != SCORE_HEADER:
        raise ScoreFileError(f"expected header {','.join(SCORE_HEADER)!r}, got {header!r}")

    observers: list[str] = []
    conditions: list[str] = []
    cells: dict[tuple[str, str], float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ScoreFileError(f"line {lineno}: expected 3 fields, got {len(row)}")
        obs, cond, raw = (f.strip() for f in row)
        try:
            score = float(raw)
        except ValueError:
            raise ScoreFileError(f"line {lineno}: malformed score {raw!r}") from None
        if not (0.0 <= score <= 100.0):
            raise ScoreFileError(f"line {lineno}: score {score} outside [0, 100]")
        if (obs, cond) in cells:
            raise ScoreFileError(f"line {lineno}: duplicate cell ({obs}, {cond})")
        if obs not in observers:
            observers.append(obs)
        if cond not in conditions:
            conditions.append(cond)
        cells[(obs, cond)] = score

    if not cells:
        raise ScoreFileError("score file contains no data rows")
    grid = np.empty((len(observers), len(conditions)))
    for i, obs in enumerate(observers):
        for j, cond in enumerate(conditions):
            try:
                grid[i, j] = cells[(obs, cond)]
            except KeyError:
                raise ScoreFileError(
                    f"missing cell: observer {obs!r} has no score for {cond!r}") from None
    return ScoreMatrix(observers, conditions, grid)


def dump_scores(matrix: ScoreMatrix) -> str:
    """Serialize back to the long-form schema (inverse of load_scores)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCORE_HEADER)
    for i, obs in enumerate(matrix.observers):
        for j, cond in enumerate(matrix.conditions):
            writer.writerow([obs, cond, format_score(matrix.scores[i, j])])
    return out.getvalue()


def format_score(value: float) -> str:
    """Stable decimal rendering: integers without a trailing .0."""
    value = float(value)
    if value == int(value):
        return str(int(value))
    return repr(value)


def load_conditions(text: str) -> list[TestCondition]:
    """Parse the condition metadata schema."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ScoreFileError("empty condition file") from None
    if [h.strip() for h in header] != CONDITION_HEADER:
        raise ScoreFileError(f"expected header {','.join(CONDITION_HEADER)!r}, got {header!r}")
    out = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 6:
            raise ScoreFileError(f"line {lineno}: expected 6 fields, got {len(row)}")
        cid, seq, w, h, fps, kbps = (f.strip() for f in row)
        if cid in seen:
            raise ScoreFileError(f"line {lineno}: duplicate condition id {cid!r}")
        seen.add(cid)
        try:
            out.append(TestCondition(cid, seq, int(w), int(h), float(fps), float(kbps)))
        except ValueError as exc:
            raise ScoreFileError(f"line {lineno}: {exc}") from None
    return out


def map_scale(score: float) -> float:
    """Affine 0-100 -> 1-5 remapping: 1 + 4 * score / 100."""
    if not (0.0 <= score <= 100.0):
        raise ValueError(f"score {score} outside [0, 100]")
    return 1.0 + 4.0 * score / 100.0


def mos(matrix: ScoreMatrix, condition_id: str, z: float = DEFAULT_CI_Z) -> MOSRecord:
    """MOS and normal-approximation CI for one condition, 1-5 scale.

    Scores are mapped to 1-5 first, then averaged.  The interval is
    mean +/- z * s / sqrt(n) with s the sample standard deviation,
    clamped to [1, 5].  A single observer yields a zero-width interval.
    """
    column = matrix.column(condition_id)
    mapped = 1.0 + 4.0 * column / 100.0
    n = len(mapped)
    mean = float(np.mean(mapped))
    half = 0.0
    if n > 1:
        half = z * float(np.std(mapped, ddof=1)) / math.sqrt(n)
    return MOSRecord(condition_id=condition_id, mos=mean, n=n,
                     ci_low=max(1.0, mean - half), ci_high=min(5.0, mean + half))


def mos_table(matrix: ScoreMatrix, z: float = DEFAULT_CI_Z) -> list[MOSRecord]:
    """MOS records for every condition, in matrix column order."""
    return [mos(matrix, cid, z=z) for cid in matrix.conditions]
