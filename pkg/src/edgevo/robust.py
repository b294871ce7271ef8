"""Robust IRLS weight functions and the t-distribution sensor model.

The weight of a residual r is the multiplier applied to r^2 inside the
reweighted least-squares objective.  Tuning constants for the classic
M-estimators follow the robust-statistics convention of expressing the
threshold as a multiple of a robust scale estimate (1.4826 * MAD); the
solver rescales them every iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

WEIGHT_KINDS = ("least_squares", "l1", "huber", "tukey", "cauchy", "t_distribution")

# Threshold multiples of the robust scale estimate, per Zhang's tutorial
# tuning of the classic M-estimators.
HUBER_K = 1.345
TUKEY_C = 4.6851
CAUCHY_C = 2.3849

L1_EPSILON = 1e-6
SIGMA_MIN = 1e-3
DEFAULT_NU = 5.0
DEFAULT_SIGMA = 1.0


@dataclass(frozen=True)
class WeightFunction:
    """A reweighting rule plus its tuning parameters."""

    kind: str
    huber_k: float = HUBER_K
    tukey_c: float = TUKEY_C
    cauchy_c: float = CAUCHY_C
    l1_eps: float = L1_EPSILON
    nu: float = DEFAULT_NU
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        for name in ("huber_k", "tukey_c", "cauchy_c", "l1_eps", "nu", "sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def with_sigma(self, sigma: float) -> "WeightFunction":
        return replace(self, sigma=max(sigma, SIGMA_MIN))


def weight(wf: WeightFunction, r) -> np.ndarray | float:
    """Per-residual IRLS weight; accepts scalars or arrays."""
    r = np.asarray(r, dtype=np.float64)
    a = np.abs(r)
    if wf.kind == "least_squares":
        out = np.ones_like(a)
    elif wf.kind == "l1":
        out = 1.0 / np.maximum(a, wf.l1_eps)
    elif wf.kind == "huber":
        out = np.where(a <= wf.huber_k, 1.0, wf.huber_k / np.maximum(a, wf.l1_eps))
    elif wf.kind == "tukey":
        z = r / wf.tukey_c
        out = np.where(a <= wf.tukey_c, (1.0 - z * z) ** 2, 0.0)
    elif wf.kind == "cauchy":
        z = r / wf.cauchy_c
        out = 1.0 / (1.0 + z * z)
    else:  # t_distribution
        z = r / wf.sigma
        out = (wf.nu + 1.0) / (wf.nu + z * z)
    if out.ndim == 0:
        return float(out)
    return out


def mad_scale(r: np.ndarray) -> float:
    """Robust scale estimate 1.4826 * median(|r - median(r)|)."""
    r = np.asarray(r, dtype=np.float64)
    return 1.4826 * float(np.median(np.abs(r - np.median(r))))


def scale_to_residuals(wf: WeightFunction, r: np.ndarray) -> WeightFunction:
    """Adapt the M-estimator thresholds to the current residual spread.

    Huber/Tukey/Cauchy thresholds are interpreted as multiples of the MAD
    scale of ``r``; other kinds pass through unchanged (the t-distribution
    keeps its recursively updated sigma).
    """
    if wf.kind not in ("huber", "tukey", "cauchy"):
        return wf
    s = max(mad_scale(r), SIGMA_MIN)
    return replace(
        wf, huber_k=wf.huber_k * s, tukey_c=wf.tukey_c * s, cauchy_c=wf.cauchy_c * s
    )


def update_sigma_tdist(
    residuals: np.ndarray,
    nu: float,
    sigma_init: float,
    tol: float = 1e-5,
    max_iter: int = 50,
) -> float:
    """Fixed-point scale update of the zero-mean t sensor model.

    Iterates sigma^2 <- mean(r^2 * (nu+1) / (nu + r^2/sigma^2)) until the
    relative change drops below ``tol``.  Returns the SIGMA_MIN floor when
    the residuals carry no spread at all.
    """
    r2 = np.square(np.asarray(residuals, dtype=np.float64))
    if r2.size < 10:
        raise ValueError("need at least 10 residuals to update sigma")
    if nu <= 0 or sigma_init <= 0:
        raise ValueError("nu and sigma_init must be positive")
    if not np.any(r2 > 0):
        return SIGMA_MIN
    s2 = sigma_init * sigma_init
    for _ in range(max_iter):
        new = float(np.mean(r2 * (nu + 1.0) / (nu + r2 / s2)))
        new = max(new, SIGMA_MIN * SIGMA_MIN)
        if abs(new - s2) < tol * s2:
            s2 = new
            break
        s2 = new
    return math.sqrt(s2)


@dataclass(frozen=True)
class SensorModelFit:
    """Fitted zero-mean t-distribution of the projected residuals."""

    nu0: float
    sigma0: float
    sample_count: int

    def __post_init__(self):
        if self.nu0 <= 0 or self.sigma0 <= 0:
            raise ValueError("fitted parameters must be positive")


def t_loglik(r: np.ndarray, nu: float, sigma: float) -> float:
    return float(np.sum(stats.t.logpdf(r, df=nu, loc=0.0, scale=sigma)))


def _golden_section(f, lo: float, hi: float, tol: float = 1e-3) -> float:
    """Minimize a unimodal f on [lo, hi] by golden-section search."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def fit_sensor_model(
    residuals: np.ndarray,
    nu_bounds: tuple[float, float] = (1.0, 100.0),
    rounds: int = 4,
) -> SensorModelFit:
    """Maximum-likelihood (nu, sigma) of a zero-mean t-distribution.

    Coordinate ascent: sigma via the fixed-point update, nu via golden
    section on the profile log-likelihood.
    """
    r = np.asarray(residuals, dtype=np.float64)
    if r.size < 1000:
        raise ValueError("need at least 1000 residuals to fit the sensor model")
    sigma = max(mad_scale(r), SIGMA_MIN)
    nu = DEFAULT_NU
    for _ in range(rounds):
        sigma = update_sigma_tdist(r, nu, sigma)

        def neg_loglik(nu_try, _sigma=sigma):
            s = update_sigma_tdist(r, nu_try, _sigma)
            return -t_loglik(r, nu_try, s)

        nu = _golden_section(neg_loglik, nu_bounds[0], nu_bounds[1])
        sigma = update_sigma_tdist(r, nu, sigma)
    return SensorModelFit(nu0=nu, sigma0=sigma, sample_count=r.size)


def compare_model_likelihoods(residuals: np.ndarray) -> list[tuple[str, float]]:
    """Rank candidate sensor models by held-out log-likelihood.

    Fits gaussian, laplace, cauchy and t models on the first half of the
    residuals and scores them on the second half; returns (name, loglik)
    pairs sorted best-first.
    """
    r = np.asarray(residuals, dtype=np.float64)
    if r.size < 2000:
        raise ValueError("need at least 2000 residuals to rank sensor models")
    train, test = r[: r.size // 2], r[r.size // 2 :]

    scores = {}
    sigma_g = max(float(np.std(train)), SIGMA_MIN)
    scores["gaussian"] = float(np.sum(stats.norm.logpdf(test, 0.0, sigma_g)))
    b = max(float(np.mean(np.abs(train))), SIGMA_MIN)
    scores["laplace"] = float(np.sum(stats.laplace.logpdf(test, 0.0, b)))
    _, scale_c = stats.cauchy.fit(train, floc=0.0)
    scores["cauchy"] = float(np.sum(stats.cauchy.logpdf(test, 0.0, scale_c)))
    fit = fit_sensor_model(train)
    scores["t"] = t_loglik(test, fit.nu0, fit.sigma0)

    return sorted(scores.items(), key=lambda kv: kv[1], reverse=True)
