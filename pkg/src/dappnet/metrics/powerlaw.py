"""Discrete power-law fitting: approximate MLE exponent, KS-selected x_min."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta

MIN_SAMPLES = 50
MIN_TAIL = 10


@dataclass
class PowerLawFit:
    alpha: float
    x_min: int
    ks_distance: float
    n_tail: int
    reliable: bool = True
    note: str = ""


def mle_alpha(tail: np.ndarray, x_min: int) -> float:
    """alpha = 1 + n / sum(ln(x / (x_min - 1/2)))."""
    logs = np.log(tail / (x_min - 0.5)).sum()
    if logs <= 0:
        return float("inf")
    return 1.0 + tail.size / logs


def tail_ccdf(x: np.ndarray, alpha: float, x_min: int) -> np.ndarray:
    """P(X >= x) for the discrete power law starting at x_min."""
    x = np.asarray(x, dtype=float)
    denom = zeta(alpha, x_min)
    if denom > 0 and np.isfinite(denom):
        return zeta(alpha, x) / denom
    # huge alpha underflows both sums; the leading term dominates
    with np.errstate(over="ignore", divide="ignore"):
        return np.where(x <= x_min, 1.0, np.power(x_min / x, alpha))


def ks_distance(tail: np.ndarray, alpha: float, x_min: int) -> float:
    values, counts = np.unique(tail, return_counts=True)
    empirical_cdf = np.cumsum(counts) / tail.size
    model_cdf = 1.0 - tail_ccdf(values + 1.0, alpha, x_min)
    # compare just below each jump as well, where the step functions differ most
    empirical_before = np.concatenate(([0.0], empirical_cdf[:-1]))
    model_before = 1.0 - tail_ccdf(values.astype(float), alpha, x_min)
    return float(max(np.abs(empirical_cdf - model_cdf).max(), np.abs(empirical_before - model_before).max()))


def fit_powerlaw(samples: Sequence[int], min_tail: int = MIN_TAIL) -> PowerLawFit:
    """Scan candidate x_min values and keep the one with the smallest KS distance."""
    data = np.asarray([s for s in samples if s >= 1], dtype=float)
    if data.size == 0:
        return PowerLawFit(float("nan"), 1, float("nan"), 0, False, "no positive samples")
    candidates = np.unique(data)
    best: Optional[PowerLawFit] = None
    for x_min in candidates:
        tail = data[data >= x_min]
        if tail.size < min_tail and best is not None:
            break
        if np.unique(tail).size < 2:
            continue
        alpha = mle_alpha(tail, int(x_min))
        if not np.isfinite(alpha) or alpha <= 1.0:
            continue
        d = ks_distance(tail, alpha, int(x_min))
        if best is None or d < best.ks_distance:
            best = PowerLawFit(alpha, int(x_min), d, int(tail.size))
    if best is None:
        return PowerLawFit(float("nan"), int(candidates[0]), float("nan"), int(data.size), False,
                           "degenerate tail (fewer than two distinct values)")
    notes = []
    if data.size < MIN_SAMPLES:
        notes.append(f"only {data.size} samples")
    if best.n_tail < min_tail:
        notes.append(f"only {best.n_tail} tail points")
    if notes:
        best.reliable = False
        best.note = "; ".join(notes)
    return best


def sample_discrete_powerlaw(
    alpha: float, x_min: int, size: int, rng: np.random.Generator, table_max: int = 10**6
) -> np.ndarray:
    """Exact inverse-CDF sampling from P(x) proportional to x^-alpha, x >= x_min.

    The survival function is tabulated up to ``table_max``; draws beyond it
    fall back to the continuous approximation, which is accurate there.
    """
    xs, survival = _survival_table(float(alpha), int(x_min), int(table_max))
    u = rng.random(size)
    # X = largest x with P(X >= x) > u
    idx = np.searchsorted(-survival, -u, side="left") - 1
    out = xs[np.clip(idx, 0, xs.size - 1)]
    beyond = u < survival[-1]
    if beyond.any():
        cont = (x_min - 0.5) * (1.0 - rng.random(int(beyond.sum()))) ** (-1.0 / (alpha - 1.0)) + 0.5
        out[beyond] = np.maximum(np.floor(cont), table_max + 1)
    return out.astype(np.int64)


@lru_cache(maxsize=8)
def _survival_table(alpha: float, x_min: int, table_max: int):
    xs = np.arange(x_min, table_max + 1, dtype=float)
    survival = tail_ccdf(xs, alpha, x_min)  # decreasing, survival[0] == 1
    xs.flags.writeable = False
    survival.flags.writeable = False
    return xs, survival
