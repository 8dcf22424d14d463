"""Gamma distribution numerics, sub-exponential certificates and KS statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ParameterError, VerificationError

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

INCGAMMA_RTOL = 1e-15
INCGAMMA_MAX_ITER = 500


def lgamma(x: float) -> float:
    """``log |Gamma(x)|`` by the Lanczos approximation (g = 7, nine terms)."""
    x = float(x)
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        s = math.sin(math.pi * x)
        if s == 0.0:
            raise ParameterError(f"lgamma has a pole at {x}")
        return math.log(math.pi / abs(s)) - lgamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def _stirling_error(a: float) -> float:
    """``log Gamma(a) - [(a - 1/2) log a - a + log(2 pi)/2]``."""
    if a >= 10.0:
        a2 = a * a
        return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * a2)) / a2) / a2) / a2) / a
    return lgamma(a) - ((a - 0.5) * math.log(a) - a + _HALF_LOG_2PI)


def _log_prefactor(a: float, z: np.ndarray) -> np.ndarray:
    """``log(z**a exp(-z) / Gamma(a))`` for ``z > 0``, stable when ``z ~ a`` is large."""
    if a >= 10.0:
        t = (z - a) / a
        with np.errstate(divide="ignore"):  # z = 0 gives -inf, i.e. a zero prefactor
            return -a * (t - np.log1p(t)) + 0.5 * math.log(a / (2.0 * math.pi)) - _stirling_error(a)
    with np.errstate(divide="ignore"):
        return a * np.log(z) - z - lgamma(a)


def _max_iter(a: float) -> int:
    # both expansions need O(sqrt(a)) terms near the mode
    return max(INCGAMMA_MAX_ITER, int(20.0 * math.sqrt(a)))


def _lower_series(a: float, z: np.ndarray, rtol: float) -> np.ndarray:
    """``P(a, z)`` by the power series; intended for ``z < a + 1``."""
    term = np.full_like(z, 1.0 / a)
    total = term.copy()
    denom = a
    for _ in range(_max_iter(a)):
        denom += 1.0
        term = term * z / denom
        total = total + term
        if np.all(np.abs(term) <= np.abs(total) * rtol):
            break
    else:
        raise VerificationError(f"incomplete gamma series did not converge (a={a})")
    return total * np.exp(_log_prefactor(a, z))


def _upper_fraction(a: float, z: np.ndarray, rtol: float) -> np.ndarray:
    """``Q(a, z)`` by the modified Lentz continued fraction; for ``z >= a + 1``."""
    tiny = 1e-300
    b = z + 1.0 - a
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _max_iter(a) + 1):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        step = d * c
        h = h * step
        if np.all(np.abs(step - 1.0) <= rtol):
            break
    else:
        raise VerificationError(f"incomplete gamma continued fraction did not converge (a={a})")
    return h * np.exp(_log_prefactor(a, z))


def regularized_lower_gamma(a: float, z, rtol: float = INCGAMMA_RTOL):
    """``P(a, z) = gamma(a, z) / Gamma(a)``, elementwise over ``z``."""
    if not a > 0:
        raise ParameterError(f"shape must be positive, got {a}")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.zeros_like(z)
    pos = z > 0
    low = pos & (z < a + 1.0)
    high = pos & ~low
    if np.any(low):
        out[low] = _lower_series(a, z[low], rtol)
    if np.any(high):
        out[high] = 1.0 - _upper_fraction(a, z[high], rtol)
    out[np.isposinf(z)] = 1.0
    return float(out[0]) if scalar else out


def regularized_upper_gamma(a: float, z, rtol: float = INCGAMMA_RTOL):
    """``Q(a, z) = 1 - P(a, z)``, computed without cancellation in the upper tail."""
    if not a > 0:
        raise ParameterError(f"shape must be positive, got {a}")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.ones_like(z)
    pos = z > 0
    low = pos & (z < a + 1.0)
    high = pos & ~low & np.isfinite(z)
    if np.any(low):
        out[low] = 1.0 - _lower_series(a, z[low], rtol)
    if np.any(high):
        out[high] = _upper_fraction(a, z[high], rtol)
    out[np.isposinf(z)] = 0.0
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class GammaParams:
    """Gamma distribution with shape ``alpha`` and rate ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ParameterError(f"Gamma parameters must be positive, got ({self.alpha}, {self.beta})")

    @property
    def mean(self) -> float:
        return self.alpha / self.beta

    @property
    def variance(self) -> float:
        return self.alpha / self.beta**2

    @property
    def mode(self) -> float:
        return max(self.alpha - 1.0, 0.0) / self.beta

    @classmethod
    def quaternion_rayleigh(cls, m: int) -> "GammaParams":
        """Law of ``||Phi x||^2 / ||x||^2`` for ``m`` rows of ``N_H(0, 1/m)`` entries."""
        return cls(2.0 * m, 2.0 * m)

    @classmethod
    def real_rayleigh(cls, m: int) -> "GammaParams":
        return cls(m / 2.0, m / 2.0)

    @classmethod
    def chi_square(cls, k: float) -> "GammaParams":
        return cls(k / 2.0, 0.5)


@dataclass(frozen=True)
class SubExpParams:
    """Certificate ``E exp(t (X - EX)) <= exp(sigma2 t^2 / 2)`` for ``|t| <= delta``."""

    sigma2: float
    delta: float

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.delta > 0):
            raise ParameterError(f"sub-exponential parameters must be positive, got ({self.sigma2}, {self.delta})")

    @property
    def tail_range(self) -> float:
        """Largest deviation ``sigma2 * delta`` covered by the Gaussian-type tail bound."""
        return self.sigma2 * self.delta


def gamma_pdf(params: GammaParams, x):
    """Density of ``Gamma(alpha, beta)``; zero for ``x <= 0``."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    pos = (x > 0) & np.isfinite(x)
    z = params.beta * x[pos]
    # beta * z**(alpha-1) e^{-z} / Gamma(alpha), via the stable prefactor of z**alpha
    out[pos] = params.beta * np.exp(_log_prefactor(params.alpha, z) - np.log(z))
    return float(out[0]) if scalar else out


def gamma_cdf(params: GammaParams, x):
    """``P(X <= x)``: the regularized lower incomplete gamma ``P(alpha, beta x)``."""
    return regularized_lower_gamma(params.alpha, params.beta * np.asarray(x, dtype=float))


def gamma_sf(params: GammaParams, x):
    return regularized_upper_gamma(params.alpha, params.beta * np.asarray(x, dtype=float))


def subexp_params_for_gamma(params: GammaParams) -> SubExpParams:
    """``Gamma(alpha, beta)`` is ``SubExp(5/2 Var X, beta / 5)``."""
    return SubExpParams(2.5 * params.variance, params.beta / 5.0)


@dataclass(frozen=True)
class MgfReport:
    params: GammaParams
    certificate: SubExpParams
    grid: int
    max_ratio: float
    argmax_t: float

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0


def centered_log_mgf(params: GammaParams, t):
    """``log E exp(t (X - alpha/beta)) = -alpha log(1 - t/beta) - t alpha / beta`` for ``t < beta``."""
    u = np.asarray(t, dtype=float) / params.beta
    return params.alpha * (-np.log1p(-u) - u)


def verify_mgf_bound(params: GammaParams, grid: int = 1001) -> MgfReport:
    """Check the sub-exponential certificate on ``grid`` points of ``[-beta/5, beta/5]``.

    Both sides are closed forms, so this is exact up to rounding. The returned
    ``max_ratio`` is ``max_t MGF(t) / exp(sigma2 t^2 / 2)`` and must not exceed 1.
    """
    if grid < 2:
        raise ParameterError(f"grid must have at least 2 points, got {grid}")
    cert = subexp_params_for_gamma(params)
    t = np.linspace(-cert.delta, cert.delta, grid)
    log_ratio = centered_log_mgf(params, t) - 0.5 * cert.sigma2 * t * t
    i = int(np.argmax(log_ratio))
    return MgfReport(params, cert, grid, float(np.exp(log_ratio[i])), float(t[i]))


def subexp_tail_bound(cert: SubExpParams, t: float) -> float:
    """``P(|X - EX| >= t) <= 2 exp(-t^2 / (2 sigma2))`` for ``0 <= t <= sigma2 delta``."""
    if not 0.0 <= t <= cert.tail_range * (1.0 + 1e-12):
        raise ParameterError(f"t={t} outside the valid range [0, {cert.tail_range}]")
    return 2.0 * math.exp(-t * t / (2.0 * cert.sigma2))


def tail_bound(m: int, t: float) -> float:
    """Bound on ``P(|R - 1| >= t)`` for the quaternion Rayleigh quotient, ``0 <= t <= 1/2``."""
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    if not 0.0 <= t <= 0.5:
        raise ParameterError(f"t={t} outside the valid range [0, 1/2]")
    return 2.0 * math.exp(-2.0 * m * t * t / 5.0)


class EmpiricalDistribution:
    """Sorted sample with ECDF and histogram export.

    Parameters
    ----------
    samples : array-like
        Real observations; stored sorted.
    bins : int or array-like, optional
        Default binning for :meth:`histogram`.
    """

    def __init__(self, samples, bins=None):
        values = np.sort(np.asarray(samples, dtype=float).ravel())
        if values.size == 0:
            raise ParameterError("an empirical distribution needs at least one sample")
        self.samples = values
        self.bins = bins

    def __len__(self):
        return self.samples.size

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def variance(self) -> float:
        return float(np.var(self.samples, ddof=1)) if self.samples.size > 1 else 0.0

    def median(self) -> float:
        return float(np.median(self.samples))

    def cdf(self, x):
        """Right-continuous ECDF evaluated at ``x``."""
        return np.searchsorted(self.samples, x, side="right") / self.samples.size

    def ecdf(self):
        """Distinct sample values and the ECDF at each of them."""
        values, counts = np.unique(self.samples, return_counts=True)
        return values, np.cumsum(counts) / self.samples.size

    def histogram(self, bins=None):
        bins = bins if bins is not None else (self.bins if self.bins is not None else 50)
        counts, edges = np.histogram(self.samples, bins=bins)
        return edges, counts

    def write_ecdf_csv(self, path) -> Path:
        values, ecdf = self.ecdf()
        return write_csv(path, ("value", "ecdf"), zip(values.tolist(), ecdf.tolist()))

    def write_histogram_csv(self, path, bins=None) -> Path:
        edges, counts = self.histogram(bins)
        rows = zip(edges[:-1].tolist(), edges[1:].tolist(), counts.tolist())
        return write_csv(path, ("bin_left", "bin_right", "count"), rows)


def write_csv(path, header, rows) -> Path:
    """Write rows as CSV with ``repr`` floats, so values round-trip exactly."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def _as_distribution(samples) -> EmpiricalDistribution:
    return samples if isinstance(samples, EmpiricalDistribution) else EmpiricalDistribution(samples)


def ks_statistic(samples, params: GammaParams) -> float:
    """Kolmogorov-Smirnov distance between the sample ECDF and ``Gamma(alpha, beta)``."""
    x = _as_distribution(samples).samples
    n = x.size
    F = np.atleast_1d(gamma_cdf(params, x))
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_2samp_statistic(a, b) -> float:
    """Two-sample KS statistic ``sup_x |F_a(x) - F_b(x)|``."""
    a = _as_distribution(a)
    b = _as_distribution(b)
    grid = np.concatenate([a.samples, b.samples])
    return float(np.max(np.abs(a.cdf(grid) - b.cdf(grid))))


def ks_critical_coefficient(level: float) -> float:
    """Asymptotic ``c(level)`` with ``P(sqrt(N) D > c) ~ level``."""
    if not 0 < level < 1:
        raise ParameterError(f"level must lie in (0, 1), got {level}")
    return math.sqrt(-0.5 * math.log(level / 2.0))


def ks_critical_value(n: int, level: float = 0.001) -> float:
    return ks_critical_coefficient(level) / math.sqrt(n)


def ks_2samp_critical_value(n1: int, n2: int, level: float = 0.01) -> float:
    return ks_critical_coefficient(level) * math.sqrt((n1 + n2) / (n1 * n2))
