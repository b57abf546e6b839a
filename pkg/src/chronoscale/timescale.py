"""Delta calculus on finite isolated time scales.

Every point of a finite scale is right-scattered except the maximum, so the
delta derivative is a forward difference quotient and the delta integral is a
graininess-weighted left-endpoint sum. Both are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyScale, IndexOutOfRange, NonMonotonePoints, WindowTooSmall

#: relative tolerance (with magnitude floor 1.0) used for "exact" identities
EXACT_RTOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeScale:
    """Strictly increasing finite point set ``t_0 < ... < t_N``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size < 2:
            raise EmptyScale(f"a time scale needs at least 2 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise NonMonotonePoints("time scale points must be finite")
        gaps = np.diff(pts)
        bad = np.flatnonzero(gaps <= 0)
        if bad.size:
            i = int(bad[0])
            raise NonMonotonePoints(
                f"points not strictly increasing at index {i}: {float(pts[i])!r} >= {float(pts[i + 1])!r}"
            )
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "_mu", _readonly(gaps))

    @property
    def N(self) -> int:
        """Index of the maximum point."""
        return self.points.size - 1

    @property
    def mu(self) -> np.ndarray:
        """Graininess ``mu(t_i)`` for ``0 <= i < N``."""
        return self._mu

    @property
    def sigma(self) -> np.ndarray:
        """Forward jump ``sigma(t_i) = t_{i+1}`` for ``0 <= i < N``."""
        return self.points[1:]

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, TimeScale):
            return NotImplemented
        return self is other or np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    def __repr__(self):
        return f"TimeScale({self.points.tolist()!r})"

    def index_of(self, t: float) -> int:
        """Index of the point equal to ``t`` (exact match)."""
        hits = np.flatnonzero(self.points == t)
        if not hits.size:
            raise IndexOutOfRange(f"{t!r} is not a point of this time scale")
        return int(hits[0])


def make_time_scale(points: Sequence[float]) -> TimeScale:
    return TimeScale(np.asarray(points, dtype=float))


def forward_jump(ts: TimeScale, i: int) -> tuple[float, float]:
    """Return ``(sigma(t_i), mu(t_i))``. The maximum point has no forward jump."""
    if not 0 <= i < ts.N:
        raise IndexOutOfRange(f"forward jump needs 0 <= i < {ts.N}, got {i}")
    return float(ts.points[i + 1]), float(ts.mu[i])


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on the contiguous index window ``[start, end]`` of a scale."""

    scale: TimeScale
    start: int
    values: np.ndarray

    # numpy scalars must defer to our reflected operators
    __array_ufunc__ = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).ravel()
        start = int(self.start)
        if vals.size == 0:
            raise WindowTooSmall("grid function needs at least one value")
        if start < 0 or start + vals.size - 1 > self.scale.N:
            raise IndexOutOfRange(
                f"window [{start}, {start + vals.size - 1}] outside scale indices [0, {self.scale.N}]"
            )
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "values", _readonly(vals))

    @classmethod
    def from_callable(cls, ts: TimeScale, fn: Callable, start: int = 0, end: int | None = None):
        end = ts.N if end is None else end
        t = ts.points[start : end + 1]
        return cls(ts, start, np.broadcast_to(np.asarray(fn(t), dtype=complex), t.shape))

    @classmethod
    def constant(cls, ts: TimeScale, c: complex, start: int = 0, end: int | None = None):
        end = ts.N if end is None else end
        return cls(ts, start, np.full(end - start + 1, c, dtype=complex))

    @property
    def end(self) -> int:
        return self.start + self.values.size - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.start, self.end

    @property
    def t(self) -> np.ndarray:
        return self.scale.points[self.start : self.end + 1]

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i: int) -> complex:
        """Value at scale index ``i`` (not window offset)."""
        if not self.start <= i <= self.end:
            raise IndexOutOfRange(f"index {i} outside window [{self.start}, {self.end}]")
        return complex(self.values[i - self.start])

    def __repr__(self):
        return f"GridFunction(window={self.window}, values={self.values!r})"

    def restrict(self, start: int, end: int) -> "GridFunction":
        if start < self.start or end > self.end or start > end:
            raise IndexOutOfRange(
                f"cannot restrict window {self.window} to [{start}, {end}]"
            )
        return GridFunction(self.scale, start, self.values[start - self.start : end - self.start + 1])

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_real(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= atol))

    # arithmetic on the common window
    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            if other.scale != self.scale:
                raise ValueError("grid functions live on different time scales")
            lo, hi = max(self.start, other.start), min(self.end, other.end)
            if lo > hi:
                raise WindowTooSmall(f"windows {self.window} and {other.window} do not overlap")
            a = self.values[lo - self.start : hi - self.start + 1]
            b = other.values[lo - other.start : hi - other.start + 1]
            return GridFunction(self.scale, lo, op(a, b))
        return GridFunction(self.scale, self.start, op(self.values, complex(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __neg__(self):
        return GridFunction(self.scale, self.start, -self.values)


def delta_derivative(ts: TimeScale, g: GridFunction) -> GridFunction:
    """Forward difference quotient; the window loses its right endpoint."""
    if len(g) < 2:
        raise WindowTooSmall(f"delta derivative needs a window of length >= 2, got {len(g)}")
    mu = ts.mu[g.start : g.end]
    return GridFunction(ts, g.start, np.diff(g.values) / mu)


def delta_integral(ts: TimeScale, g: GridFunction, i_from: int, i_to: int) -> complex:
    """Oriented delta integral of ``g`` from ``t_{i_from}`` to ``t_{i_to}``."""
    for i in (i_from, i_to):
        if not g.start <= i <= g.end:
            raise IndexOutOfRange(f"integration limit {i} outside window {g.window}")
    lo, hi = sorted((i_from, i_to))
    seg = g.values[lo - g.start : hi - g.start] * ts.mu[lo:hi]
    total = complex(np.sum(seg))
    return total if i_from <= i_to else -total


def delta_antiderivative(ts: TimeScale, g: GridFunction, anchor: int) -> GridFunction:
    """``G(t) = int_{t_anchor}^t g(s) Delta s`` on ``[g.start, g.end + 1]``.

    The integrand is only sampled on ``g``'s window, so the result reaches one
    point further right than ``g`` itself.
    """
    end = g.end + 1
    if end > ts.N:
        raise IndexOutOfRange(f"antiderivative of window {g.window} needs index {end}")
    if not g.start <= anchor <= end:
        raise IndexOutOfRange(f"anchor {anchor} outside [{g.start}, {end}]")
    weighted = g.values * ts.mu[g.start : g.end + 1]
    return GridFunction(ts, g.start, anchored_cumsum(weighted, anchor - g.start))


def anchored_cumsum(h: np.ndarray, k: int) -> np.ndarray:
    """``S[j] = sum_{i=k}^{j-1} h_i`` (negated for ``j < k``), ``S[k] = 0``.

    Both sides are accumulated outward from ``k``; differencing one prefix sum
    would cancel catastrophically when the terms on the far side are large.
    """
    right = np.cumsum(h[k:])
    left = -np.cumsum(h[:k][::-1])[::-1]
    return np.concatenate((left, [0.0], right))


def close(a, b, rtol: float = EXACT_RTOL, floor: float = 1.0) -> bool:
    """Relative comparison against a magnitude floor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = np.maximum(floor, np.maximum(np.abs(a), np.abs(b)))
    return bool(np.all(np.abs(a - b) <= rtol * scale))
