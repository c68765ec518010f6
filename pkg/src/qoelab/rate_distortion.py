"""Blahut-Arimoto solvers for channel capacity and the rate-distortion
function, plus operating-point classification against the R(D) curve.

Capacity of a discrete memoryless channel p(y|x) is found by alternating
input-distribution updates

    q'(x) = q(x) c(x) / sum_x q(x) c(x),
    c(x)  = exp( sum_y p(y|x) ln( p(y|x) / r(y) ) ),   r(y) = sum_x q(x) p(y|x)

which sandwich the capacity between log2(sum_x q(x) c(x)) and
log2(max_x c(x)).  The rate-distortion function of a source p(x) under a
distortion table d(x, xh) is traced parametrically in the Lagrange slope
s <= 0 via reproduction-distribution updates

    A(xh|x) prop q(xh) exp(s d(x, xh)),   q'(xh) = sum_x p(x) A(xh|x).

All rates are in bits; 0 * ln 0 = 0 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)

CURVE_HEADER = "slope,distortion,rate"

RATE_LIMITED = "rate_limited"
CODING_INEFFICIENT = "coding_inefficient"
ON_CURVE = "on_curve"


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance."""

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


def _check_prob_rows(arr: np.ndarray, what: str):
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{what} entries must lie in [0, 1]")
    if np.any(np.abs(arr.sum(axis=-1) - 1.0) > 1e-12):
        raise ValueError(f"{what} rows must sum to 1 within 1e-12")


@dataclass(frozen=True)
class DiscreteChannel:
    """Row-stochastic |X| x |Y| transition matrix p(y|x)."""

    transition: np.ndarray

    def __post_init__(self):
        arr = np.array(self.transition, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("transition matrix must be 2-D and nonempty")
        _check_prob_rows(arr, "transition matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "transition", arr)


@dataclass(frozen=True)
class SourceModel:
    """Probability mass function p(x) over the source alphabet."""

    pmf: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pmf, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pmf must be a nonempty vector")
        _check_prob_rows(arr, "pmf")
        arr.setflags(write=False)
        object.__setattr__(self, "pmf", arr)

    def entropy_bits(self) -> float:
        p = self.pmf[self.pmf > 0]
        return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class DistortionMatrix:
    """Nonnegative |X| x |Xh| per-pair distortion table."""

    d: np.ndarray

    def __post_init__(self):
        arr = np.array(self.d, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("distortion matrix must be 2-D and nonempty")
        if np.any(arr < 0.0) or np.any(np.isnan(arr)):
            raise ValueError("distortion entries must be nonnegative")
        if np.any(~np.isfinite(arr).any(axis=1)):
            raise ValueError("every source symbol needs at least one finite distortion")
        arr.setflags(write=False)
        object.__setattr__(self, "d", arr)


@dataclass(frozen=True)
class RDPoint:
    slope_s: float
    distortion: float
    rate: float


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    input_dist: np.ndarray
    iterations: int
    gap: float


def channel_capacity(channel: DiscreteChannel, tol: float = 1e-9,
                     max_iter: int = 10000) -> CapacityResult:
    """Capacity in bits/channel use, to within `tol` bits."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    P = channel.transition
    n_x = P.shape[0]
    q = np.full(n_x, 1.0 / n_x)

    lower = upper = None
    prev_lower = -math.inf
    for iteration in range(1, max_iter + 1):
        r = q @ P
        with np.errstate(divide="ignore", invalid="ignore"):
            log_ratio = np.where(P > 0.0, np.log(P / r), 0.0)
        c = np.exp((P * log_ratio).sum(axis=1))
        qc = float(q @ c)
        lower = math.log(qc) / LN2
        upper = math.log(float(c.max())) / LN2
        # the lower bound is monotone across iterations up to roundoff
        assert lower >= prev_lower - 1e-12
        prev_lower = lower
        if upper - lower < tol:
            return CapacityResult(capacity=max(lower, 0.0), input_dist=q,
                                  iterations=iteration, gap=upper - lower)
        q = q * c / qc
    raise ConvergenceError(
        f"capacity gap {upper - lower:.3e} bits after {max_iter} iterations "
        f"(bounds [{lower:.9f}, {upper:.9f}])",
        lower=lower, upper=upper)


def rd_point(source: SourceModel, dist: DistortionMatrix, slope_s: float,
             tol: float = 1e-9, max_iter: int = 10000) -> RDPoint:
    """One (distortion, rate) point at Lagrange slope `slope_s` <= 0."""
    if slope_s > 0.0:
        raise ValueError("slope must be <= 0")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    p = source.pmf
    d = dist.d
    if d.shape[0] != p.size:
        raise ValueError("distortion rows must match the source alphabet")

    if slope_s == 0.0:
        # zero-rate endpoint: reproduce with the single best symbol
        finite_cost = np.where(np.isfinite(d), d, np.inf)
        per_symbol = p @ finite_cost
        return RDPoint(slope_s=0.0, distortion=float(per_symbol.min()), rate=0.0)

    n_hat = d.shape[1]
    q = np.full(n_hat, 1.0 / n_hat)
    exponent = np.exp(slope_s * d)  # inf distortions decay to exactly 0
    prev_rate = math.inf
    for _ in range(max_iter):
        w = q * exponent
        z = w.sum(axis=1)
        A = w / z[:, None]
        with np.errstate(invalid="ignore"):
            contrib = np.where(A > 0.0, A * d, 0.0)
        distortion = float(p @ contrib.sum(axis=1))
        rate = (slope_s * distortion - float(p @ np.log(z))) / LN2
        if abs(rate - prev_rate) < tol:
            return RDPoint(slope_s=slope_s, distortion=distortion, rate=max(rate, 0.0))
        prev_rate = rate
        q = p @ A
    raise ConvergenceError(
        f"rate change above {tol} after {max_iter} iterations at slope {slope_s}")


def rd_curve(source: SourceModel, dist: DistortionMatrix, slopes,
             tol: float = 1e-9, max_iter: int = 10000) -> list[RDPoint]:
    """R(D) points for each slope, sorted by distortion ascending."""
    slopes = list(slopes)
    if not slopes:
        raise ValueError("need at least one slope")
    points = [rd_point(source, dist, s, tol=tol, max_iter=max_iter) for s in slopes]
    return sorted(points, key=lambda pt: pt.distortion)


def empirical_source(frame: np.ndarray) -> SourceModel:
    """Normalized 256-bin histogram of an 8-bit grayscale frame."""
    arr = np.asarray(frame)
    if arr.size == 0:
        raise ValueError("empty frame")
    flat = arr.ravel()
    if flat.min() < 0 or flat.max() > 255:
        raise ValueError("frame samples must be 8-bit (0..255)")
    counts = np.bincount(flat.astype(np.int64), minlength=256)
    return SourceModel(pmf=counts / flat.size)


def frame_distortion(reference: np.ndarray, reconstructed: np.ndarray) -> tuple[float, float]:
    """(MSE, PSNR in dB) between two equally sized 8-bit frames."""
    ref = np.asarray(reference, dtype=float)
    rec = np.asarray(reconstructed, dtype=float)
    if ref.shape != rec.shape:
        raise ValueError(f"frame dimensions differ: {ref.shape} vs {rec.shape}")
    mse = float(np.mean((ref - rec) ** 2))
    if mse == 0.0:
        return 0.0, math.inf
    return mse, 10.0 * math.log10(255.0 ** 2 / mse)


def operating_point_check(rd: list[RDPoint], rate_actual: float,
                          distortion_actual: float, tol_margin: float = 0.01) -> str:
    """Classify an observed (rate, distortion) pair against the R(D) curve.

    The theoretical rate at the observed distortion is read off the curve
    by linear interpolation (clamped at the endpoints).  An observed rate
    below that bound means the distortion is forced by the rate budget;
    a rate above it means the coding wastes rate.
    """
    if not rd:
        raise ValueError("empty rate-distortion curve")
    if rate_actual < 0.0 or distortion_actual < 0.0:
        raise ValueError("operating point must be nonnegative")
    ds = [pt.distortion for pt in rd]
    if any(b < a for a, b in zip(ds, ds[1:])):
        raise ValueError("curve must be sorted by distortion ascending")
    rs = [pt.rate for pt in rd]
    theoretical = float(np.interp(distortion_actual, ds, rs))
    if rate_actual < theoretical - tol_margin:
        return RATE_LIMITED
    if rate_actual > theoretical + tol_margin:
        return CODING_INEFFICIENT
    return ON_CURVE


# ---------------------------------------------------------------------------
# file formats


def load_channel(text: str) -> DiscreteChannel:
    """Channel matrix: comma-separated probability rows, one input per line."""
    return DiscreteChannel(transition=_parse_matrix(text, "channel"))


def load_pmf(text: str) -> SourceModel:
    """Source pmf: one probability per line."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"pmf line {lineno}: malformed value {line!r}") from None
    if not values:
        raise ValueError("empty pmf file")
    return SourceModel(pmf=np.array(values))


def load_distortion(text: str) -> DistortionMatrix:
    """Distortion matrix: comma-separated rows ('inf' allowed)."""
    return DistortionMatrix(d=_parse_matrix(text, "distortion"))


def _parse_matrix(text: str, what: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(f) for f in line.split(",")])
        except ValueError:
            raise ValueError(f"{what} line {lineno}: malformed row {line!r}") from None
    if not rows:
        raise ValueError(f"empty {what} file")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ValueError(f"{what} rows have inconsistent lengths")
    return np.array(rows)


def curve_to_text(points: list[RDPoint]) -> str:
    """Tabular `slope,distortion,rate` rendering of an R(D) curve."""
    lines = [CURVE_HEADER]
    for pt in points:
        lines.append(f"{pt.slope_s:.9g},{pt.distortion:.9f},{pt.rate:.9f}")
    return "\n".join(lines) + "\n"


def curve_from_text(text: str) -> list[RDPoint]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CURVE_HEADER:
        raise ValueError(f"expected curve header {CURVE_HEADER!r}")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 3:
            raise ValueError(f"curve line {lineno}: expected 3 fields")
        s, d, r = (float(f) for f in fields)
        points.append(RDPoint(slope_s=s, distortion=d, rate=r))
    return points


def read_pgm(data: bytes) -> np.ndarray:
    """Binary PGM (P5, maxval 255) to a 2-D uint8 array."""
    tokens = []
    i = 0
    while len(tokens) < 4:
        if i >= len(data):
            raise ValueError("truncated PGM header")
        ch = data[i:i + 1]
        if ch == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            tokens.append(data[i:j])
            i = j
    if tokens[0] != b"P5":
        raise ValueError("not a binary PGM (P5) file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"only maxval 255 supported, got {maxval}")
    if width < 1 or height < 1:
        raise ValueError("PGM dimensions must be positive")
    i += 1  # single whitespace after maxval
    pixels = data[i:i + width * height]
    if len(pixels) != width * height:
        raise ValueError("PGM pixel payload shorter than header promises")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)


def write_pgm(frame: np.ndarray) -> bytes:
    arr = np.asarray(frame, dtype=np.uint8)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("frame must be a nonempty 2-D array")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    return header + arr.tobytes()
