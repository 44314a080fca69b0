"""Pointwise normal confidence bands for the estimated curves.

The band for the drift at x is centred on the bias-corrected estimate

    mu_hat(x) - (h^2/2) * mu''_hat(x) * B

with B the kernel bias constant, and has half-width

    z_{1-alpha/2} * sqrt(V * M_hat(x) / p_hat(x)) / sqrt(n * delta * h),

V the kernel variance constant and p_hat the kernel density of the proxies.
The curvature mu'' comes from a local cubic fit at a pilot bandwidth (second
derivatives need more smoothing than the curve itself).

The second-moment band replaces M_hat/p_hat by a plug-in for the local fourth
jump moment: second differences of an integrated path attenuate fourth-power
jump mass by the factor 2/5 (a jump lands uniformly inside the double window
and enters with weight s or 1-s, and E[s^4] + E[(1-s)^4] = 2/5), so the
kernel-weighted average of (delta-differences)^4/delta is rescaled by 5/2.
`scripts/calibrate_m_variance.py` re-derives this constant by simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import stats

from .errors import ValidationError
from .estimators import (
    LOCAL_LINEAR,
    CurveEstimate,
    EstimatorConfig,
    _check_series,
    density_estimate,
    drift_responses,
    fit_responses,
    second_derivative_fit,
    second_moment_responses,
)
from .kernels import bias_constant, moments
from .proxy import ProxySeries

__all__ = [
    "ConfidenceBands",
    "FOURTH_MOMENT_SCALE",
    "fourth_moment_responses",
    "mu_band",
    "m_band",
    "attach_bands",
]

# Rescaling from the raw local average of fourth-power differences to the
# fourth jump moment entering the second-moment asymptotic variance.
FOURTH_MOMENT_SCALE = 2.5

# Density below this is treated as an empty neighbourhood: no band.
DENSITY_FLOOR = 1e-10


@dataclass
class ConfidenceBands:
    """Pointwise bands over the estimate's grid; arrays are NaN where the
    band is undefined (empty neighbourhood, negative variance plug-in)."""

    alpha: float
    lo_mu: Optional[np.ndarray] = None
    hi_mu: Optional[np.ndarray] = None
    lo_m: Optional[np.ndarray] = None
    hi_m: Optional[np.ndarray] = None
    bias_corrected: bool = True
    pilot_h: float = float("nan")
    undefined_mu: int = 0
    undefined_m: int = 0


def fourth_moment_responses(xt: ProxySeries) -> np.ndarray:
    arr = _check_series(xt)
    return (arr[2:] - arr[1:-1]) ** 4 / xt.delta


def _band_inputs(est: CurveEstimate, xt: ProxySeries, alpha: float, pilot_h):
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    if est.method != LOCAL_LINEAR:
        raise ValidationError("confidence bands are defined for the local linear fit")
    if pilot_h is None:
        pilot_h = 2.0 * est.h
    if not (pilot_h > 0 and math.isfinite(pilot_h)):
        raise ValidationError(f"pilot bandwidth must be positive, got {pilot_h}")
    z = float(stats.norm.ppf(1.0 - alpha / 2.0))
    mom = moments(est.kernel)
    b_const = bias_constant(mom.k1)
    p_hat = density_estimate(xt, est.grid, est.kernel, est.h)
    rate = np.sqrt(est.n_terms * est.delta * est.h)
    return pilot_h, z, mom, b_const, p_hat, rate


def mu_band(
    est: CurveEstimate,
    xt: ProxySeries,
    alpha: float = 0.05,
    pilot_h: float | None = None,
    bias_corrected: bool = True,
) -> ConfidenceBands:
    """Pointwise normal band for the drift curve."""
    pilot_h, z, mom, b_const, p_hat, rate = _band_inputs(est, xt, alpha, pilot_h)
    mu2 = second_derivative_fit(
        xt, drift_responses(xt), est.grid, est.kernel, pilot_h, est.index_alignment
    )
    bias = 0.5 * est.h**2 * mu2 * b_const if bias_corrected else np.zeros_like(est.grid)
    ok = (
        np.isfinite(est.mu_hat)
        & np.isfinite(bias)
        & (p_hat > DENSITY_FLOOR)
        & (est.m_hat >= 0.0)
    )
    var = np.where(ok, mom.v * est.m_hat / np.where(ok, p_hat, 1.0), np.nan)
    half = z * np.sqrt(var) / rate
    center = est.mu_hat - bias
    lo = np.where(ok, center - half, np.nan)
    hi = np.where(ok, center + half, np.nan)
    return ConfidenceBands(
        alpha=alpha,
        lo_mu=lo,
        hi_mu=hi,
        bias_corrected=bias_corrected,
        pilot_h=pilot_h,
        undefined_mu=int((~ok).sum()),
    )


def m_band(
    est: CurveEstimate,
    xt: ProxySeries,
    alpha: float = 0.05,
    pilot_h: float | None = None,
    bias_corrected: bool = True,
) -> ConfidenceBands:
    """Pointwise normal band for the second-moment curve."""
    pilot_h, z, mom, b_const, p_hat, rate = _band_inputs(est, xt, alpha, pilot_h)
    m2 = second_derivative_fit(
        xt,
        second_moment_responses(xt),
        est.grid,
        est.kernel,
        pilot_h,
        est.index_alignment,
    )
    cfg = EstimatorConfig(
        bandwidth=est.h,
        kernel=est.kernel,
        method=LOCAL_LINEAR,
        index_alignment=est.index_alignment,
    )
    c4_raw, _, _ = fit_responses(xt, fourth_moment_responses(xt), est.grid, cfg)
    c4 = FOURTH_MOMENT_SCALE * c4_raw
    bias = 0.5 * est.h**2 * m2 * b_const if bias_corrected else np.zeros_like(est.grid)
    ok = (
        np.isfinite(est.m_hat)
        & np.isfinite(bias)
        & (p_hat > DENSITY_FLOOR)
        & np.isfinite(c4)
        & (c4 >= 0.0)
    )
    var = np.where(ok, mom.v * c4 / np.where(ok, p_hat, 1.0), np.nan)
    half = z * np.sqrt(var) / rate
    center = est.m_hat - bias
    lo = np.where(ok, center - half, np.nan)
    hi = np.where(ok, center + half, np.nan)
    return ConfidenceBands(
        alpha=alpha,
        lo_m=lo,
        hi_m=hi,
        bias_corrected=bias_corrected,
        pilot_h=pilot_h,
        undefined_m=int((~ok).sum()),
    )


def attach_bands(
    est: CurveEstimate,
    xt: ProxySeries,
    alpha: float = 0.05,
    pilot_h: float | None = None,
    bias_corrected: bool = True,
) -> ConfidenceBands:
    """Compute both bands, store them on the estimate, and return them."""
    bmu = mu_band(est, xt, alpha, pilot_h, bias_corrected)
    bm = m_band(est, xt, alpha, pilot_h, bias_corrected)
    both = replace(bmu, lo_m=bm.lo_m, hi_m=bm.hi_m, undefined_m=bm.undefined_m)
    est.bands = both
    return both
