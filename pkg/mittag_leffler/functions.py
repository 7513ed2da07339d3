"""
Mittag-Leffler Functions
Real-axis evaluation of E_{alpha,beta}, the generalized (Prabhakar) function and
the kernel integrals built on them
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, Union

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp, rgamma

from config import Config
from .errors import MlfAccuracyError, MlfDomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_EPS = float(np.finfo(float).eps)
# Rounding error of one double-precision term, in units of its magnitude
_ROUNDING_FACTOR = 4.0
# Terms below abs_tol * 1e-3 are dropped from the series
_LOG_TAIL_MARGIN = math.log(1e3)
_CHUNK = 256
_MAX_TERMS = 20000
_MAX_POSITIVE_Z = 50.0


@dataclass(frozen=True)
class MlfAccuracy:
    """Evaluation strategy and target accuracy"""

    abs_tol: float = 1e-13
    series_cutoff: float = 15.0
    asymptotic_terms: int = 20

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise MlfDomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.series_cutoff > 0:
            raise MlfDomainError(f"series_cutoff must be positive, got {self.series_cutoff}")
        if self.asymptotic_terms < 1:
            raise MlfDomainError(f"asymptotic_terms must be >= 1, got {self.asymptotic_terms}")


@dataclass(frozen=True)
class MlfBoundEstimate:
    """Empirical constant C with (1+|z|)|E_{alpha,beta}(z)| <= C on [-z_grid_max, 0]"""

    alpha: float
    beta: float
    c_constant: float
    z_grid_max: float


def default_accuracy() -> MlfAccuracy:
    return MlfAccuracy(abs_tol=Config.ABC_CONTROL_MLF_TOL)


# ── validation ────────────────────────────────────────────────

def _check_parameters(alpha: float, beta: float, rho: float = 1.0) -> None:
    for name, value in (("alpha", alpha), ("beta", beta), ("rho", rho)):
        if not math.isfinite(value):
            raise MlfDomainError(f"{name} must be finite, got {value}")
    if alpha <= 0:
        raise MlfDomainError(f"alpha must be positive, got {alpha}")
    if rho <= 0:
        raise MlfDomainError(f"rho must be positive, got {rho}")


def _check_arguments(z: np.ndarray) -> None:
    if not np.all(np.isfinite(z)):
        raise MlfDomainError("z must be finite")
    if z.size and float(np.max(z)) > _MAX_POSITIVE_Z:
        raise MlfDomainError(f"positive arguments are limited to z <= {_MAX_POSITIVE_Z}, got {float(np.max(z))}")


def _map_points(fn, z: ArrayLike) -> ArrayLike:
    z_arr = np.asarray(z, dtype=float)
    values = np.fromiter((fn(float(v)) for v in z_arr.ravel()), dtype=float, count=z_arr.size)
    if z_arr.ndim == 0:
        return float(values[0])
    return values.reshape(z_arr.shape)


# ── series ────────────────────────────────────────────────────

def _log_terms(alpha: float, beta: float, rho: float, log_x: float, k: np.ndarray) -> np.ndarray:
    # log|k-th term| at |z| = exp(log_x); Gamma poles give -inf
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = k * log_x - gammaln(alpha * k + beta)
        if rho != 1.0:
            logs = logs + gammaln(rho + k) - gammaln(rho) - gammaln(k + 1.0)
    return np.where(np.isnan(logs), -np.inf, logs)


def _series_plan(alpha: float, beta: float, rho: float, x: float, abs_tol: float) -> Optional[Tuple[int, float, float]]:
    """Number of terms, log of the largest term and log of the sum of magnitudes.

    Returns None when the series needs more than _MAX_TERMS terms.
    """
    log_x = math.log(x)
    threshold = math.log(abs_tol) - _LOG_TAIL_MARGIN
    chunks = []
    start = 0
    while start < _MAX_TERMS:
        k = np.arange(start, start + _CHUNK, dtype=float)
        chunks.append(_log_terms(alpha, beta, rho, log_x, k))
        finite = chunks[-1][np.isfinite(chunks[-1])]
        # log-concave in k: once below threshold and falling, the tail stays negligible
        if finite.size >= 2 and finite[-1] < threshold and finite[-1] < finite[-2]:
            logs = np.concatenate(chunks)
            above = np.nonzero(logs >= threshold)[0]
            n_terms = int(above[-1]) + 1 if above.size else 1
            kept = logs[:n_terms]
            kept = kept[np.isfinite(kept)]
            if kept.size == 0:
                return n_terms, -math.inf, -math.inf
            return n_terms, float(kept.max()), float(logsumexp(kept))
        start += _CHUNK
    return None


def _series_double(alpha: float, beta: float, rho: float, z: float, n_terms: int) -> float:
    k = np.arange(n_terms, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.power(z, k) * rgamma(alpha * k + beta)
    if rho != 1.0:
        ratios = np.ones(n_terms)
        ratios[1:] = (rho + k[:-1]) / k[1:]
        terms = terms * np.cumprod(ratios)
    return math.fsum(terms)


def _series_mp(alpha: float, beta: float, rho: float, z: float, n_terms: int, log_peak: float) -> float:
    # guard digits cover the cancellation between the largest terms
    dps = 20 + int(math.ceil(max(log_peak, 0.0) / math.log(10.0)))
    with mpmath.workdps(dps):
        a, b, r, zz = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(rho), mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        weight = mpmath.mpf(1)
        for k in range(n_terms):
            total += power * weight * mpmath.rgamma(a * k + b)
            power *= zz
            if rho != 1.0:
                weight = weight * (r + k) / (k + 1)
        return float(total)


def _well_conditioned(log_abs_sum: float, accuracy: MlfAccuracy) -> bool:
    # rounding of the double sum stays below abs_tol; compared in log space
    return log_abs_sum + math.log(_ROUNDING_FACTOR * _EPS) <= math.log(accuracy.abs_tol)


def _series(alpha: float, beta: float, rho: float, z: float, accuracy: MlfAccuracy, plan) -> float:
    n_terms, log_peak, log_abs_sum = plan
    overflow_free = n_terms * math.log(abs(z)) < 700.0
    if overflow_free and _well_conditioned(log_abs_sum, accuracy):
        return _series_double(alpha, beta, rho, z, n_terms)
    logger.debug(f"mpmath series for alpha={alpha}, beta={beta}, rho={rho}, z={z} ({n_terms} terms)")
    return _series_mp(alpha, beta, rho, z, n_terms, log_peak)


# ── asymptotic expansion on the negative axis ─────────────────

def _asymptotic(alpha: float, beta: float, x: float, n_terms: int) -> Tuple[float, float]:
    """Value of -sum_{k=1..K} z^-k / Gamma(beta - alpha k) at z = -x and a truncation estimate.

    For 1 <= alpha < 2 the estimate also covers the exponentially small terms
    the algebraic expansion leaves out.
    """
    k = np.arange(1, n_terms + 3, dtype=float)
    terms = -np.power(-1.0, k) * np.exp(-k * math.log(x)) * rgamma(beta - alpha * k)
    truncation = float(np.max(np.abs(terms[n_terms:])))
    if alpha >= 1.0:
        truncation += _exponential_terms_bound(alpha, beta, x)
    return math.fsum(terms[:n_terms]), truncation


def _exponential_terms_bound(alpha: float, beta: float, x: float) -> float:
    # |(2/alpha) x^((1-beta)/alpha) exp(x^(1/alpha) cos(pi/alpha))|, decaying for alpha < 2
    log_bound = (math.log(2.0 / alpha) + (1.0 - beta) / alpha * math.log(x)
                 + x ** (1.0 / alpha) * math.cos(math.pi / alpha))
    return math.exp(min(log_bound, 700.0))


def _asymptotic_applies(alpha: float, rho: float, z: float) -> bool:
    return z < 0 and alpha < 2.0 and rho == 1.0


@lru_cache(maxsize=256)
def _check_crossover(alpha: float, beta: float, accuracy: MlfAccuracy) -> None:
    x = accuracy.series_cutoff
    asymptotic_value, truncation = _asymptotic(alpha, beta, x, accuracy.asymptotic_terms)
    if truncation > accuracy.abs_tol:
        return
    plan = _series_plan(alpha, beta, 1.0, x, accuracy.abs_tol)
    if plan is None:
        logger.debug(f"crossover check skipped for alpha={alpha}, beta={beta}: series out of reach")
        return
    series_value = _series_mp(alpha, beta, 1.0, -x, plan[0], plan[1])
    if abs(series_value - asymptotic_value) > 10.0 * accuracy.abs_tol:
        raise MlfAccuracyError(
            f"series/asymptotic mismatch at z={-x} for alpha={alpha}, beta={beta}: "
            f"{series_value!r} vs {asymptotic_value!r}",
            series_value=series_value,
            asymptotic_value=asymptotic_value,
        )


@lru_cache(maxsize=1 << 17)
def _evaluate(alpha: float, beta: float, rho: float, z: float, accuracy: MlfAccuracy) -> float:
    if z == 0.0:
        return float(rgamma(beta))
    x = abs(z)
    asymptotic_ok = _asymptotic_applies(alpha, rho, z)
    asymptotic_value, truncation = math.nan, math.inf

    if asymptotic_ok and x > accuracy.series_cutoff:
        asymptotic_value, truncation = _asymptotic(alpha, beta, x, accuracy.asymptotic_terms)
        if truncation <= accuracy.abs_tol:
            _check_crossover(alpha, beta, accuracy)
            return asymptotic_value

    plan = _series_plan(alpha, beta, rho, x, accuracy.abs_tol)
    if plan is not None:
        n_terms, _, log_abs_sum = plan
        well_conditioned = _well_conditioned(log_abs_sum, accuracy)
        if well_conditioned or not asymptotic_ok:
            return _series(alpha, beta, rho, z, accuracy, plan)

    if asymptotic_ok and x <= accuracy.series_cutoff:
        asymptotic_value, truncation = _asymptotic(alpha, beta, x, accuracy.asymptotic_terms)
        if truncation <= accuracy.abs_tol:
            _check_crossover(alpha, beta, accuracy)
            return asymptotic_value

    if plan is None:
        raise MlfAccuracyError(
            f"cannot reach abs_tol={accuracy.abs_tol} for alpha={alpha}, beta={beta}, rho={rho}, z={z}",
            asymptotic_value=asymptotic_value,
        )
    return _series(alpha, beta, rho, z, accuracy, plan)


# ── public API ────────────────────────────────────────────────

def mlf(alpha: float, beta: float, z: ArrayLike, accuracy: Optional[MlfAccuracy] = None) -> ArrayLike:
    """
    Two-parameter Mittag-Leffler function E_{alpha,beta}(z) on the real axis.

    Args:
        alpha: Order, alpha > 0
        beta: Second parameter (any real)
        z: Scalar or array of real arguments, z <= 50
        accuracy: Evaluation strategy; defaults to the configured tolerance

    Returns:
        Float for scalar z, otherwise an array of the same shape
    """
    alpha, beta = float(alpha), float(beta)
    _check_parameters(alpha, beta)
    _check_arguments(np.asarray(z, dtype=float))
    acc = accuracy or default_accuracy()
    return _map_points(lambda v: _evaluate(alpha, beta, 1.0, v, acc), z)


def mlf_generalized(rho: float, alpha: float, beta: float, z: ArrayLike,
                    accuracy: Optional[MlfAccuracy] = None) -> ArrayLike:
    """Three-parameter function sum (rho)_k z^k / (Gamma(alpha k + beta) k!)."""
    rho, alpha, beta = float(rho), float(alpha), float(beta)
    _check_parameters(alpha, beta, rho)
    _check_arguments(np.asarray(z, dtype=float))
    acc = accuracy or default_accuracy()
    return _map_points(lambda v: _evaluate(alpha, beta, rho, v, acc), z)


def mlf_bound_constant(alpha: float, beta: float, z_max: float, n_probe: int,
                       accuracy: Optional[MlfAccuracy] = None) -> MlfBoundEstimate:
    """Probe (1+z)|E_{alpha,beta}(-z)| on {0} and a log grid up to z_max, plus a 5% margin."""
    if not 0 < alpha <= 1:
        raise MlfDomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not z_max > 0:
        raise MlfDomainError(f"z_max must be positive, got {z_max}")
    if n_probe < 2:
        raise MlfDomainError(f"n_probe must be >= 2, got {n_probe}")

    lower = min(1e-6, z_max)
    probes = np.concatenate(([0.0], np.geomspace(lower, z_max, n_probe - 1)))
    values = (1.0 + probes) * np.abs(mlf(alpha, beta, -probes, accuracy))
    c_constant = 1.05 * float(np.max(values))
    logger.debug(f"bound constant alpha={alpha}, beta={beta}, z_max={z_max}: C={c_constant:.6g}")
    return MlfBoundEstimate(alpha=alpha, beta=beta, c_constant=c_constant, z_grid_max=float(z_max))


def _check_times(t: ArrayLike) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)) or np.any(t_arr < 0):
        raise MlfDomainError("t must be finite and non-negative")
    return t_arr


def _scalar_or_array(values: np.ndarray, like: np.ndarray) -> ArrayLike:
    return float(values) if like.ndim == 0 else values


def kernel_primitive(alpha: float, gamma_rate: float, t: ArrayLike,
                     accuracy: Optional[MlfAccuracy] = None) -> ArrayLike:
    """Exact integral of E_alpha(-gamma s^alpha) over [0, t]: t E_{alpha,2}(-gamma t^alpha)."""
    t_arr = _check_times(t)
    if gamma_rate < 0:
        raise MlfDomainError(f"gamma_rate must be non-negative, got {gamma_rate}")
    values = t_arr * np.asarray(mlf(alpha, 2.0, -gamma_rate * t_arr ** alpha, accuracy))
    return _scalar_or_array(values, t_arr)


def kernel_integral(alpha: float, rate: float, t: ArrayLike,
                    accuracy: Optional[MlfAccuracy] = None) -> ArrayLike:
    """Integral of s^(alpha-1) E_{alpha,alpha}(-rate s^alpha) over [0, t]."""
    t_arr = _check_times(t)
    t_alpha = t_arr ** alpha
    values = t_alpha * np.asarray(mlf(alpha, alpha + 1.0, -rate * t_alpha, accuracy))
    return _scalar_or_array(values, t_arr)


def kernel_first_moment(alpha: float, rate: float, t: ArrayLike,
                        accuracy: Optional[MlfAccuracy] = None) -> ArrayLike:
    """Integral of s^alpha E_{alpha,alpha}(-rate s^alpha) over [0, t]."""
    t_arr = _check_times(t)
    t_alpha = t_arr ** alpha
    z = -rate * t_alpha
    first = np.asarray(mlf(alpha, alpha + 1.0, z, accuracy))
    second = np.asarray(mlf(alpha, alpha + 2.0, z, accuracy))
    values = t_arr * t_alpha * (first - second)
    return _scalar_or_array(values, t_arr)
