"""Bandwidth selection: rule of thumb and leave-one-out cross-validation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .estimators import (
    DEGENERACY_FLOOR,
    LOCAL_LINEAR,
    EstimatorConfig,
    drift_responses,
    term_points,
)
from .proxy import ProxySeries

__all__ = ["BandwidthChoice", "rule_of_thumb", "default_cv_grid", "cross_validate"]


@dataclass(frozen=True)
class BandwidthChoice:
    h: float
    method: str  # rule_of_thumb | cross_validation | fixed
    cv_curve: Optional[tuple] = None  # ((h, cv), ...) when cross-validated
    cv_degenerate: Optional[tuple] = None  # per-h count of penalised terms


def rule_of_thumb(xt: ProxySeries, t_span: float | None = None) -> BandwidthChoice:
    """h = 1.06 * S * (n*delta)^(-1/5), S the sample standard deviation.

    The effective span n*delta defaults to the length of the series times its
    step, i.e. the observation window.
    """
    if t_span is None:
        t_span = len(xt.xt) * xt.delta
    if t_span <= 0:
        raise ValidationError(f"observation span must be positive, got {t_span}")
    s = float(np.std(xt.xt, ddof=1))
    if s == 0.0 or not math.isfinite(s):
        raise ValidationError("degenerate sample: proxy series has zero variance")
    return BandwidthChoice(h=1.06 * s * t_span ** (-0.2), method="rule_of_thumb")


def default_cv_grid(h_center: float, n_points: int = 25, span: float = 5.0) -> np.ndarray:
    """Log-spaced grid bracketing a pilot bandwidth by a factor of `span`
    either side."""
    if h_center <= 0 or span <= 1:
        raise ValidationError("need a positive pilot bandwidth and span > 1")
    return np.geomspace(h_center / span, h_center * span, n_points)


def cross_validate(
    xt: ProxySeries,
    h_grid,
    cfg: EstimatorConfig | None = None,
    chunk: int = 256,
) -> BandwidthChoice:
    """Leave-one-out cross-validation of the drift fit over a bandwidth grid.

    CV(h) averages the squared prediction errors of the fit evaluated at each
    regressor point with that observation deleted. Deleting observation i
    removes every estimating term it touches: as kernel point, as regressor,
    and as response-difference member, i.e. terms i-1, i, i+1. Terms whose
    deleted fit is degenerate contribute the squared deviation from the global
    response mean instead (a conservative penalty) and are counted.

    Returns the grid argmin; exact ties resolve to the smaller bandwidth. A
    bandwidth at which every term degenerates is undefined; if that happens on
    the whole grid, the grid is rejected.
    """
    h_grid = np.asarray(h_grid, dtype=float)
    if h_grid.ndim != 1 or len(h_grid) == 0:
        raise ValidationError("bandwidth grid must be a nonempty 1-d array")
    if np.any(h_grid <= 0) or np.any(np.diff(h_grid) < 0):
        raise ValidationError("bandwidth grid must be positive and sorted ascending")
    if cfg is None:
        cfg = EstimatorConfig(bandwidth=1.0)

    kpts, ppts = term_points(xt, cfg.index_alignment)
    resp = drift_responses(xt)
    n = len(resp)
    resp_mean = float(resp.mean())
    kernel = cfg.kernel.eval
    local_linear = cfg.method == LOCAL_LINEAR

    cv_vals = np.empty(len(h_grid))
    degen_counts = np.zeros(len(h_grid), dtype=int)
    for hi, h in enumerate(h_grid):
        sse = 0.0
        degen = 0
        for lo in range(0, n, chunk):
            idx = np.arange(lo, min(lo + chunk, n))
            x_eval = ppts[idx]
            kv = kernel((kpts[None, :] - x_eval[:, None]) / h)
            # delete the three terms touching each left-out observation
            rows = np.arange(len(idx))
            for off in (-1, 0, 1):
                cols = idx + off
                valid = (cols >= 0) & (cols < n)
                kv[rows[valid], cols[valid]] = 0.0
            s0 = kv.sum(axis=1)
            t0 = kv @ resp
            if local_linear:
                d = ppts[None, :] - x_eval[:, None]
                kd = kv * d
                s1 = kd.sum(axis=1)
                s2 = (kd * d).sum(axis=1)
                det = s0 * s2 - s1 * s1
                ok = (s0 >= DEGENERACY_FLOOR * n) & (det > 0) & np.isfinite(det)
                pred = np.where(ok, (s2 * t0 - s1 * (kd @ resp)) / np.where(ok, det, 1.0), 0.0)
            else:
                ok = s0 >= DEGENERACY_FLOOR * n
                pred = np.where(ok, t0 / np.where(ok, s0, 1.0), 0.0)
            err = np.where(ok, resp[idx] - pred, resp[idx] - resp_mean)
            sse += float(err @ err)
            degen += int((~ok).sum())
        degen_counts[hi] = degen
        cv_vals[hi] = sse / n if degen < n else np.nan

    if np.all(np.isnan(cv_vals)):
        raise ValidationError(
            "bandwidth grid too narrow: cross-validation undefined at every h"
        )
    best = int(np.nanargmin(cv_vals))
    return BandwidthChoice(
        h=float(h_grid[best]),
        method="cross_validation",
        cv_curve=tuple((float(h), float(c)) for h, c in zip(h_grid, cv_vals)),
        cv_degenerate=tuple(int(c) for c in degen_counts),
    )
