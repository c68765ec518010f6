"""Two-step refining of raw opinion scores by observer rejection.

Step 1 removes systematic deviants: observers whose votes frequently land
outside the per-condition acceptance band and mostly on one side of it.
Step 2, recomputed on the survivors, removes inconsistent observers whose
votes frequently leave the band regardless of direction.

The acceptance band for a condition is mean +/- 2*sigma when the score
distribution passes the kurtosis normality check (beta2 in [2, 4]),
and mean +/- sqrt(20)*sigma otherwise, sigma being the population
standard deviation of that condition's column.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .scores import ScoreMatrix, format_score

SQRT20 = math.sqrt(20.0)

VERDICT_HEADER = ["observer_id", "p_count", "q_count", "frequency_ratio",
                  "balance_ratio", "rejected", "step"]


class ScreeningError(ValueError):
    """Screening cannot produce a meaningful result on this input."""


class AllObserversRejected(ScreeningError):
    """Every observer failed the screening criteria."""


@dataclass(frozen=True)
class NormalityResult:
    """Kurtosis-coefficient normality check: normal iff beta2 in [2, 4]."""

    beta2: float
    is_normal: bool


@dataclass(frozen=True)
class ScreeningConfig:
    frequency_limit: float = 0.05
    balance_limit: float = 0.3

    def __post_init__(self):
        if not (0.0 < self.frequency_limit < 1.0):
            raise ValueError("frequency_limit must be in (0, 1)")
        if not (0.0 <= self.balance_limit <= 1.0):
            raise ValueError("balance_limit must be in [0, 1]")


@dataclass(frozen=True)
class ObserverVerdict:
    observer_id: str
    p_count: int
    q_count: int
    frequency_ratio: float
    balance_ratio: float | None  # None when p_count + q_count == 0
    rejected: bool
    step: int | None  # 1 or 2 when rejected, else None


@dataclass(frozen=True)
class ConditionSummary:
    condition_id: str
    mean: float
    std: float  # population standard deviation
    normality: NormalityResult | None  # None when undefined (n < 4 or zero variance)


@dataclass(frozen=True)
class ScreeningReport:
    verdicts: tuple[ObserverVerdict, ...]
    retained: tuple[str, ...]
    rejected: tuple[str, ...]
    condition_summaries: tuple[ConditionSummary, ...] = field(default=())


def kurtosis(samples) -> NormalityResult:
    """Kurtosis coefficient beta2 = m4 / m2^2 using population moments."""
    x = np.asarray(samples, dtype=float)
    if x.size < 4:
        raise ValueError("kurtosis needs at least 4 samples")
    centered = x - x.mean()
    m2 = float(np.mean(centered ** 2))
    if m2 == 0.0:
        raise ValueError("kurtosis undefined for zero-variance samples")
    beta2 = float(np.mean(centered ** 4)) / m2 ** 2
    return NormalityResult(beta2=beta2, is_normal=2.0 <= beta2 <= 4.0)


def condition_thresholds(column) -> tuple[float, float]:
    """Acceptance band (lower, upper) for one condition's score column.

    Columns too short for the kurtosis check (< 4 samples) fall back to
    the wide non-normal band.  Zero variance collapses the band to the
    mean, so degenerate conditions contribute no deviations.
    """
    x = np.asarray(column, dtype=float)
    if x.size == 0:
        raise ValueError("empty score column")
    mean = float(x.mean())
    sigma = float(x.std())
    if sigma == 0.0:
        return (mean, mean)
    factor = SQRT20
    if x.size >= 4 and kurtosis(x).is_normal:
        factor = 2.0
    return (mean - factor * sigma, mean + factor * sigma)


def count_deviations(matrix: ScoreMatrix, observer_id: str) -> tuple[int, int]:
    """(p_count, q_count): scores strictly above/below the condition bands."""
    row = matrix.row(observer_id)
    p = q = 0
    for j in range(len(matrix.conditions)):
        lower, upper = condition_thresholds(matrix.scores[:, j])
        if row[j] > upper:
            p += 1
        elif row[j] < lower:
            q += 1
    return p, q


def _evaluate(matrix: ScoreMatrix, observer_id: str) -> tuple[int, int, float, float | None]:
    p, q = count_deviations(matrix, observer_id)
    n = len(matrix.conditions)
    freq = (p + q) / n
    balance = abs(p - q) / (p + q) if p + q > 0 else None
    return p, q, freq, balance


def screen(matrix: ScoreMatrix,
           config: ScreeningConfig = ScreeningConfig()) -> tuple[ScoreMatrix, ScreeningReport]:
    """Run both screening steps once each and return the refined matrix.

    Step 1 rejects observers with frequency_ratio > frequency_limit and
    balance_ratio >= balance_limit.  Condition statistics are then
    recomputed on the survivors, and step 2 rejects any remaining
    observer with frequency_ratio > frequency_limit.
    """
    if len(matrix.observers) < 2:
        raise ScreeningError("screening needs at least two observers")

    verdicts: dict[str, ObserverVerdict] = {}
    step1_survivors = []
    for obs in matrix.observers:
        p, q, freq, balance = _evaluate(matrix, obs)
        systematic = (freq > config.frequency_limit
                      and balance is not None and balance >= config.balance_limit)
        if systematic:
            verdicts[obs] = ObserverVerdict(obs, p, q, freq, balance, True, 1)
        else:
            step1_survivors.append(obs)

    if not step1_survivors:
        raise AllObserversRejected("step 1 rejected every observer")

    interim = matrix.restrict_observers(step1_survivors)
    retained = []
    for obs in step1_survivors:
        p, q, freq, balance = _evaluate(interim, obs)
        if freq > config.frequency_limit:
            verdicts[obs] = ObserverVerdict(obs, p, q, freq, balance, True, 2)
        else:
            verdicts[obs] = ObserverVerdict(obs, p, q, freq, balance, False, None)
            retained.append(obs)

    if not retained:
        raise AllObserversRejected("no observer survived both screening steps")

    refined = matrix.restrict_observers(retained)
    summaries = []
    for j, cid in enumerate(matrix.conditions):
        col = matrix.scores[:, j]
        normality = None
        if col.size >= 4 and col.std() > 0.0:
            normality = kurtosis(col)
        summaries.append(ConditionSummary(cid, float(col.mean()), float(col.std()), normality))

    report = ScreeningReport(
        verdicts=tuple(verdicts[obs] for obs in matrix.observers),
        retained=tuple(retained),
        rejected=tuple(o for o in matrix.observers if verdicts[o].rejected),
        condition_summaries=tuple(summaries),
    )
    return refined, report


def report_to_table(report: ScreeningReport) -> str:
    """Machine-readable verdict table, one observer per row."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(VERDICT_HEADER)
    for v in report.verdicts:
        writer.writerow([
            v.observer_id, v.p_count, v.q_count,
            f"{v.frequency_ratio:.6f}",
            "" if v.balance_ratio is None else f"{v.balance_ratio:.6f}",
            int(v.rejected),
            "" if v.step is None else v.step,
        ])
    return out.getvalue()


def report_to_text(report: ScreeningReport) -> str:
    """Human-readable key-value report, one verdict per record."""
    lines = [
        f"observers: {len(report.verdicts)}",
        f"retained: {len(report.retained)}",
        f"rejected: {len(report.rejected)}",
        "",
    ]
    for v in report.verdicts:
        lines.append(f"observer: {v.observer_id}")
        lines.append(f"  p_count: {v.p_count}")
        lines.append(f"  q_count: {v.q_count}")
        lines.append(f"  frequency_ratio: {v.frequency_ratio:.6f}")
        if v.balance_ratio is not None:
            lines.append(f"  balance_ratio: {v.balance_ratio:.6f}")
        lines.append(f"  rejected: {'yes' if v.rejected else 'no'}")
        if v.step is not None:
            lines.append(f"  step: {v.step}")
        lines.append("")
    for s in report.condition_summaries:
        beta2 = "" if s.normality is None else f" beta2={s.normality.beta2:.4f}"
        lines.append(f"condition {s.condition_id}: mean={s.mean:.4f} sigma={s.std:.4f}{beta2}")
    return "\n".join(lines) + "\n"
