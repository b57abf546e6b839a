"""Regressivity checks and the time-scale exponential ``e_p(t, s)``.

On an isolated scale ``e_p(t_j, t_i) = prod_{k=i}^{j-1} (1 + mu_k p_k)`` for
``i <= j`` and the reciprocal of the reversed product otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, OverflowRisk, RegressivityViolation
from .timescale import GridFunction, TimeScale

#: minimal admissible modulus of a factor ``1 + mu p``
REGRESSIVITY_THRESHOLD = 1e-12
#: partial products outside [1/OVERFLOW_LIMIT, OVERFLOW_LIMIT] raise OverflowRisk
OVERFLOW_LIMIT = 1e150


@dataclass(frozen=True)
class RegressivityCertificate:
    ok: bool
    worst_index: int
    worst_value: complex
    threshold: float

    def __bool__(self):
        return self.ok


def regressivity_factors(ts: TimeScale, p: GridFunction) -> np.ndarray:
    """The factors ``1 + mu(t_i) p(t_i)`` over ``p``'s window."""
    if p.end >= ts.N:
        raise IndexOutOfRange(
            f"p window {p.window} must exclude the maximum point (index {ts.N})"
        )
    return 1.0 + ts.mu[p.start : p.end + 1] * p.values


def check_regressivity(
    ts: TimeScale, p: GridFunction, threshold: float = REGRESSIVITY_THRESHOLD
) -> RegressivityCertificate:
    factors = regressivity_factors(ts, p)
    k = int(np.argmin(np.abs(factors)))
    worst = complex(factors[k])
    return RegressivityCertificate(
        ok=bool(abs(worst) > threshold),
        worst_index=p.start + k,
        worst_value=worst,
        threshold=threshold,
    )


def _checked_factors(ts, p, lo, hi, threshold):
    if lo < p.start or hi - 1 > p.end:
        raise IndexOutOfRange(f"range [{lo}, {hi}) not covered by p window {p.window}")
    factors = 1.0 + ts.mu[lo:hi] * p.values[lo - p.start : hi - p.start]
    small = np.flatnonzero(np.abs(factors) <= threshold)
    if small.size:
        i = lo + int(small[0])
        raise RegressivityViolation(
            f"1 + mu*p = {complex(factors[small[0]])!r} at index {i} (t = {float(ts.points[i])!r})",
            index=i,
            value=complex(factors[small[0]]),
        )
    return factors


def _guarded_cumprod(factors: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        prods = np.cumprod(factors)
    mag = np.abs(prods)
    if not np.all(np.isfinite(mag)) or np.any(mag > OVERFLOW_LIMIT) or np.any(mag < 1.0 / OVERFLOW_LIMIT):
        raise OverflowRisk("partial product of the exponential left [1e-150, 1e150]")
    return prods


def ts_exp(
    ts: TimeScale, p: GridFunction, i_t: int, i_s: int, threshold: float = REGRESSIVITY_THRESHOLD
) -> complex:
    """``e_p(t_{i_t}, t_{i_s})``."""
    for i in (i_t, i_s):
        if not 0 <= i <= ts.N:
            raise IndexOutOfRange(f"index {i} outside scale [0, {ts.N}]")
    if i_t == i_s:
        return 1.0 + 0j
    lo, hi = sorted((i_s, i_t))
    prods = _guarded_cumprod(_checked_factors(ts, p, lo, hi, threshold))
    value = complex(prods[-1])
    return value if i_s < i_t else 1.0 / value


def exp_table(
    ts: TimeScale, p: GridFunction, anchor: int, threshold: float = REGRESSIVITY_THRESHOLD
) -> GridFunction:
    """``E(t) = e_p(t, t_anchor)`` for every t in ``[p.start, p.end + 1]``."""
    lo, hi = p.start, p.end + 1
    if not lo <= anchor <= hi:
        raise IndexOutOfRange(f"anchor {anchor} outside [{lo}, {hi}]")
    factors = _checked_factors(ts, p, lo, hi, threshold)
    k = anchor - lo
    right = _guarded_cumprod(factors[k:])
    # left of the anchor: e_p(t_i, t_a) = 1 / prod_{j=i}^{a-1} factors_j
    left = _guarded_cumprod(factors[:k][::-1])[::-1] if k else np.empty(0, complex)
    values = np.concatenate((1.0 / left, [1.0], right))
    return GridFunction(ts, lo, values)
