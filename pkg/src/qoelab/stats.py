"""Correlation confidence intervals via the Fisher arctanh transform.

The 95% interval on a correlation r from n paired observations is

    tanh(arctanh(r) +/- z * 1 / sqrt(n - 3))

with z the (1 - alpha/2) standard-normal quantile, fixed to 1.96 at
alpha = 0.05.  Also provides the before/after-refining MOS comparison
that feeds the interval.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .scores import ScoreMatrix, mos

COMPARISON_HEADER = ["condition_id", "mos_before", "mos_after"]


@dataclass(frozen=True)
class CIResult:
    r: float
    n: int
    alpha: float
    z_critical: float
    low: float
    high: float


@dataclass(frozen=True)
class ComparisonRecord:
    condition_id: str
    mos_before: float
    mos_after: float


def critical_z(alpha: float) -> float:
    """(1 - alpha/2) standard-normal quantile; exactly 1.96 at alpha 0.05."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0, 1)")
    if alpha == 0.05:
        return 1.96
    return float(norm.ppf(1.0 - alpha / 2.0))


def pearson(x, y) -> float:
    """Product-moment correlation of two equally long series."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be 1-D and equally long")
    if x.size < 2:
        raise ValueError("need at least 2 paired values")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for a zero-variance series")
    r = float(dx @ dy) / (sx * sy)
    return max(-1.0, min(1.0, r))


def fisher_ci(r: float, n: int, alpha: float = 0.05) -> CIResult:
    """Confidence interval for a correlation via the arctanh transform."""
    if abs(r) >= 1.0:
        raise ValueError("|r| must be < 1 (arctanh diverges)")
    if n <= 3:
        raise ValueError("n must be >= 4 (interval width divides by sqrt(n - 3))")
    z = critical_z(alpha)
    half = z / math.sqrt(n - 3)
    center = math.atanh(r)
    return CIResult(r=r, n=n, alpha=alpha, z_critical=z,
                    low=math.tanh(center - half), high=math.tanh(center + half))


def compare_refining(raw: ScoreMatrix, refined: ScoreMatrix,
                     alpha: float = 0.05) -> tuple[list[ComparisonRecord], float, CIResult]:
    """Per-condition MOS before vs after refining, with correlation and CI.

    A perfect correlation (identical MOS series) is a legitimate outcome
    of refining, so |r| = 1 yields a degenerate [r, r] interval instead
    of an error.
    """
    if set(raw.conditions) != set(refined.conditions):
        raise ValueError("raw and refined matrices must share the same condition set")
    if not set(refined.observers) <= set(raw.observers):
        raise ValueError("refined observers must be a subset of raw observers")
    if len(raw.conditions) < 4:
        raise ValueError("need at least 4 conditions for the confidence interval")

    records = [
        ComparisonRecord(cid, mos(raw, cid).mos, mos(refined, cid).mos)
        for cid in raw.conditions
    ]
    before = [rec.mos_before for rec in records]
    after = [rec.mos_after for rec in records]
    r = pearson(before, after)
    n = len(records)
    if abs(r) >= 1.0 - 1e-12:
        r = math.copysign(1.0, r)
        ci = CIResult(r=r, n=n, alpha=alpha, z_critical=critical_z(alpha), low=r, high=r)
    else:
        ci = fisher_ci(r, n, alpha)
    return records, r, ci


def comparison_to_table(records: list[ComparisonRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COMPARISON_HEADER)
    for rec in records:
        writer.writerow([rec.condition_id, f"{rec.mos_before:.6f}", f"{rec.mos_after:.6f}"])
    return out.getvalue()


def ci_to_text(ci: CIResult) -> str:
    """Key-value rendering of a confidence-interval result."""
    return (f"r: {ci.r:.9f}\n"
            f"n: {ci.n}\n"
            f"alpha: {ci.alpha}\n"
            f"z: {ci.z_critical:.9f}\n"
            f"low: {ci.low:.9f}\n"
            f"high: {ci.high:.9f}\n")
