"""Threshold fits, hashing bound and sub-threshold scaling.

The threshold fit is the critical-exponent method: near threshold the
logical failure rate of all sizes collapses onto one quadratic,
``p_L = B0 + B1 x + B2 x^2`` with ``x = (p - p_th) d^beta`` (the product
form; a different rescaling can be passed in).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from .experiment import PointStats, TrialStatistics, size_kwargs
from .noise import channel_probs, parse_eta

__all__ = [
    "FitError",
    "NoCrossingError",
    "DegenerateFitError",
    "InsufficientFailuresError",
    "ThresholdEstimate",
    "ScalingFit",
    "PRESETS",
    "product_rescale",
    "fit_threshold",
    "collapse_csv",
    "hashing_bound",
    "channel_entropy",
    "fit_subthreshold",
    "find_crossings",
]


class FitError(ValueError):
    """Base class of fit failures; ``code`` names the failure kind."""

    code = "FIT_ERROR"

    def __init__(self, msg: str) -> None:
        super().__init__(f"{self.code}: {msg}")


class NoCrossingError(FitError):
    code = "NO_CROSSING"


class DegenerateFitError(FitError):
    code = "DEGENERATE_FIT"


class InsufficientFailuresError(FitError):
    code = "INSUFFICIENT_FAILURES"


#: Named sweep presets. The paper-scale distance schedules are included for
#: reference; desk-scale presets use fewer and smaller sizes.
PRESETS: dict[str, dict] = {
    "depolarizing": dict(
        family="x3z3", sizes=(9, 11, 13, 17), eta="0.5", decoder="restriction",
        p_grid=tuple(round(0.110 + 0.005 * i, 3) for i in range(7)), trials=200_000,
    ),
    "depolarizing-paper": dict(
        family="x3z3", sizes=(9, 11, 13, 15), eta="0.5", decoder="restriction",
        p_grid=tuple(round(0.110 + 0.005 * i, 3) for i in range(7)), trials=1_000_000, max_failures=5000,
    ),
    "infinite-bias": dict(
        family="x3z3-periodic", sizes=(6, 12, 18), eta="inf", decoder="infinite-bias",
        p_grid=tuple(round(0.40 + 0.02 * i, 2) for i in range(9)), trials=100_000,
    ),
    "desk-small": dict(
        family="x3z3", sizes=(5, 7, 9), eta="0.5", decoder="restriction",
        p_grid=(0.10, 0.12, 0.14), trials=20_000,
    ),
}


def product_rescale(p: NDArray, d: NDArray, p_th: float, beta: float) -> NDArray:
    """``x = (p - p_th) * d**beta``."""
    return (p - p_th) * np.power(d, beta)


@dataclass
class ThresholdEstimate:
    """Result of :func:`fit_threshold`."""

    p_th: float
    B0: float
    B1: float
    B2: float
    beta: float
    covariance: list[list[float]]
    stderr: dict[str, float]
    residual: float
    dof: int
    extrapolated: bool
    sizes: list[int] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass
class ScalingFit:
    """Straight line through ``(abscissa, log p_L)``."""

    slope: float
    intercept: float
    abscissa: str
    residual: float
    points: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _arrays(stats: Iterable[PointStats]):
    pts = list(stats)
    p = np.array([pt.p for pt in pts], float)
    d = np.array([pt.size for pt in pts], float)
    y = np.array([pt.p_L for pt in pts], float)
    n = np.array([pt.trials for pt in pts], float)
    f = np.array([pt.failures for pt in pts], float)
    return p, d, y, n, f


def find_crossings(stats: Iterable[PointStats]) -> list[float]:
    """Interpolated p where the curves of any two sizes swap order."""
    p, d, y, _, _ = _arrays(stats)
    sizes = sorted(set(d))
    out = []
    for d1, d2 in itertools.combinations(sizes, 2):
        a = {pp: yy for pp, yy, dd in zip(p, y, d) if dd == d1}
        b = {pp: yy for pp, yy, dd in zip(p, y, d) if dd == d2}
        common = sorted(set(a) & set(b))
        diff = [b[q] - a[q] for q in common]
        for i in range(len(common) - 1):
            u, v = diff[i], diff[i + 1]
            # a zero on a grid point counts once, as the right end of its interval
            if u < 0 <= v or u > 0 >= v or (i == 0 and u == 0 and v != 0):
                t = 0.0 if u == v else u / (u - v)
                out.append(common[i] + t * (common[i + 1] - common[i]))
    return out


def fit_threshold(
    stats: Iterable[PointStats],
    rescale: Callable[[NDArray, NDArray, float, float], NDArray] = product_rescale,
    min_failures: int = 100,
) -> ThresholdEstimate:
    """Critical-exponent threshold fit by weighted nonlinear least squares.

    Parameters
    ----------
    stats : iterable of PointStats
        At least three sizes; every point needs ``min_failures`` failures.
    rescale : callable
        ``rescale(p, d, p_th, beta) -> x``; defaults to the product form.

    Raises
    ------
    ValueError
        Fewer than three sizes.
    InsufficientFailuresError
        A point has fewer than ``min_failures`` failures.
    DegenerateFitError
        The data carry no p dependence, or the fit is singular.
    NoCrossingError
        No pair of sizes changes order within the p range.
    """
    pts = list(stats)
    p, d, y, n, f = _arrays(pts)
    sizes = sorted(set(int(v) for v in d))
    if len(sizes) < 3:
        raise ValueError(f"threshold fit needs at least 3 sizes, got {sizes}")
    if (f < min_failures).any():
        raise InsufficientFailuresError(f"every point needs >= {min_failures} failures")
    var = np.maximum(y * (1 - y), 1.0 / n) / n
    w = 1.0 / np.sqrt(var)
    # flat data: a constant explains everything
    ybar = np.sum(y / var) / np.sum(1 / var)
    chi2_const = float(np.sum(((y - ybar) * w) ** 2))
    if chi2_const <= 2.0 * max(1, len(y) - 1):
        raise DegenerateFitError("failure rates do not depend on p or d beyond noise")
    crossings = find_crossings(pts)
    if not crossings:
        raise NoCrossingError("no two size curves swap order in the sampled range")
    pmin, pmax = float(p.min()), float(p.max())
    span = pmax - pmin if pmax > pmin else max(pmax, 1e-3)

    def resid(theta):
        pth, beta, b0, b1, b2 = theta
        x = rescale(p, d, pth, beta)
        return (b0 + b1 * x + b2 * x * x - y) * w

    best = None
    for p0 in sorted(set(crossings + [float(np.median(crossings))])):
        x = rescale(p, d, p0, 1.0)
        A = np.stack([np.ones_like(x), x, x * x], 1) * w[:, None]
        B = np.linalg.lstsq(A, y * w, rcond=None)[0]
        theta0 = np.array([p0, 1.0, *B])
        lo = [pmin - span, 1e-3, -np.inf, -np.inf, -np.inf]
        hi = [pmax + span, 10.0, np.inf, np.inf, np.inf]
        theta0[0] = min(max(theta0[0], lo[0] + 1e-12), hi[0] - 1e-12)
        res = least_squares(resid, theta0, bounds=(lo, hi), x_scale="jac", max_nfev=5000)
        if best is None or res.cost < best.cost:
            best = res
    J = best.jac
    JTJ = J.T @ J
    if not np.isfinite(JTJ).all() or np.linalg.cond(JTJ) > 1e14:
        raise DegenerateFitError("fit Jacobian is singular")
    dof = max(1, len(y) - 5)
    chi2 = float(2 * best.cost)
    cov = np.linalg.inv(JTJ) * max(1.0, chi2 / dof)
    names = ("p_th", "beta", "B0", "B1", "B2")
    pth, beta, b0, b1, b2 = (float(v) for v in best.x)
    if abs(b1) < 1e-12 and abs(b2) < 1e-12:
        raise DegenerateFitError("fitted curve is flat")
    return ThresholdEstimate(
        p_th=pth, B0=b0, B1=b1, B2=b2, beta=beta,
        covariance=cov.tolist(),
        stderr={k: float(math.sqrt(max(cov[i, i], 0.0))) for i, k in enumerate(names)},
        residual=chi2, dof=dof, extrapolated=not (pmin <= pth <= pmax), sizes=sizes,
    )


def collapse_csv(stats: Iterable[PointStats], est: ThresholdEstimate, rescale=product_rescale) -> str:
    """Plot-ready CSV: p, d, p_L, ci_lo, ci_hi, rescaled x."""
    lines = ["p,d,p_L,ci_lo,ci_hi,x"]
    for pt in stats:
        x = float(rescale(np.float64(pt.p), np.float64(pt.size), est.p_th, est.beta))
        lines.append(f"{pt.p!r},{pt.size},{pt.p_L!r},{pt.ci_lo!r},{pt.ci_hi!r},{x!r}")
    return "\n".join(lines) + "\n"


def channel_entropy(p: float, eta: object) -> float:
    """Shannon entropy (bits) of the outcome distribution (1-p, p_X, p_Y, p_Z)."""
    probs = (1.0 - p, *channel_probs(p, eta))
    return float(-sum(q * math.log2(q) for q in probs if q > 0))


def hashing_bound(eta: object, tol: float = 1e-10) -> float:
    """Error rate at which the channel entropy reaches one bit."""
    e = parse_eta(eta)
    if e == math.inf:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if channel_entropy(mid, e) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def _num_qubits(family: str, size: int) -> int:
    from .code import make_code

    return make_code(family, **size_kwargs(family, size)).n


def fit_subthreshold(stats: Iterable[PointStats] | Sequence[tuple[float, float]], abscissa: str = "d") -> ScalingFit:
    """Least-squares line through ``(abscissa, log p_L)``.

    ``stats`` is either a collection of :class:`PointStats` at fixed (p, η),
    or a sequence of ``(x, p_L)`` pairs. ``abscissa`` is ``"d"`` (code size)
    or ``"N_q"`` (number of qubits).

    Raises
    ------
    InsufficientFailuresError
        A point has zero failures (``log p_L`` undefined).
    """
    if abscissa not in ("d", "N_q"):
        raise ValueError("abscissa must be 'd' or 'N_q'")
    items = list(stats)
    if items and isinstance(items[0], PointStats):
        if len({(pt.p, pt.eta) for pt in items}) > 1:
            raise ValueError("sub-threshold fit needs a fixed (p, eta)")
        if any(pt.failures == 0 for pt in items):
            raise InsufficientFailuresError("a point has zero failures")
        xs = [float(pt.size if abscissa == "d" else _num_qubits(pt.family, pt.size)) for pt in items]
        ys = [pt.p_L for pt in items]
    else:
        xs = [float(a) for a, _ in items]
        ys = [float(b) for _, b in items]
    if any(v <= 0 for v in ys):
        raise InsufficientFailuresError("a point has zero failures")
    if len(set(xs)) < 2:
        raise ValueError("sub-threshold fit needs at least two distinct sizes")
    x = np.asarray(xs)
    ly = np.log(np.asarray(ys))
    A = np.stack([x, np.ones_like(x)], 1)
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    r = float(np.sum((A @ np.array([slope, intercept]) - ly) ** 2))
    return ScalingFit(float(slope), float(intercept), abscissa, r, len(xs))
