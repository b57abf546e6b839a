"""Hyers-Ulam stability experiments and analytic stability constants.

Stage ``k`` of the cascade turns an input error bound ``B`` into the output
bound ``L_k B / A``. The error ``d = g_{n-k} - w_k`` solves
``phi d^Delta - lambda d = d_prev`` with ``d(tau_k) = 0``, so

    |d(t)| <= |int_tau^t |e(t, sigma(s))| Delta s| * sup|d_prev| / A

and ``L_k`` is the sup of the first factor over the stage window. Chaining the
stages gives ``|x - u| <= K eps`` with ``K = prod L_k / A^n``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .cascade import cascade_solve, residual, validate_anchors
from .errors import DegenerateCoefficient, IndexOutOfRange, InvalidFamilyParameters
from .exponential import REGRESSIVITY_THRESHOLD, exp_table
from .operator import DEGENERACY_THRESHOLD, CauchyEulerProblem, rate
from .timescale import GridFunction, TimeScale, anchored_cumsum

DEGENERATE_RESIDUAL = 1e-14
#: relative slack on the certified bound, for roundoff in computing u and eps
BOUND_RTOL = 1e-9
SHAPES = ("uniform", "spike", "sinusoid")


def stage_constant(
    ts: TimeScale,
    phi: GridFunction,
    lam: complex,
    tau: int,
    window: tuple[int, int],
    threshold: float = REGRESSIVITY_THRESHOLD,
) -> float:
    """``sup_t |int_tau^t |e_{lam/phi}(t, sigma(s))| Delta s|`` over targets in ``window``."""
    lo, hi = window
    if not lo <= tau <= hi:
        raise IndexOutOfRange(f"anchor {tau} outside window {window}")
    if hi == lo:
        return 0.0
    p = rate(phi.restrict(lo, hi - 1), lam)
    absE = np.abs(exp_table(ts, p, tau, threshold).values)
    # |e(t, sigma(s))| = |E(t)| / |E(s+1)|
    c = ts.mu[lo:hi] / absE[1:]
    return float(np.max(absE * np.abs(anchored_cumsum(c, tau - lo))))


def analytic_K(problem: CauchyEulerProblem, anchors: Sequence[int] | None = None) -> tuple[float, list]:
    """``K = prod_j L_j / A^n`` for the cascade with the given anchors."""
    N, n = problem.scale.N, problem.order
    anchors = validate_anchors(problem, anchors)
    A = problem.A
    if A <= DEGENERACY_THRESHOLD:
        raise DegenerateCoefficient(f"A = inf|phi| = {A!r} is degenerate")
    L = []
    for k in range(1, n + 1):
        L.append(
            stage_constant(
                problem.scale,
                problem.phi,
                problem.lambdas[n - k],
                anchors[k - 1],
                (0, N - n + k),
                problem.threshold,
            )
        )
    return math.prod(L) / A**n, L


# ---------------------------------------------------------------- scale families


@dataclass(frozen=True)
class ScaleFamilySpec:
    """Parameters of a generated time scale; ``N`` is the index of the last point."""

    kind: str
    N: int | None = None
    h: float | None = None
    q: float | None = None
    t0: float | None = None
    points: tuple | None = None
    min_gap: float | None = None
    max_gap: float | None = None
    seed: int | None = None

    def descriptor(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}

    @classmethod
    def uniform(cls, h, N, t0=0.0):
        return cls("uniform", N=N, h=h, t0=t0)

    @classmethod
    def qscale(cls, q, N, t0=1.0):
        return cls("qscale", N=N, q=q, t0=t0)

    @classmethod
    def harmonic(cls, N):
        return cls("harmonic", N=N)

    @classmethod
    def custom(cls, points):
        return cls("custom", points=tuple(float(p) for p in points))

    @classmethod
    def random(cls, N, min_gap, max_gap, seed, t0=0.0):
        return cls("random", N=N, min_gap=min_gap, max_gap=max_gap, seed=seed, t0=t0)


def _need_N(spec):
    if spec.N is None or int(spec.N) != spec.N or spec.N < 1:
        raise InvalidFamilyParameters(f"{spec.kind} scale needs an integer N >= 1, got {spec.N!r}")
    return int(spec.N)


def generate_scale(spec: ScaleFamilySpec) -> TimeScale:
    kind = spec.kind
    if kind == "custom":
        if not spec.points:
            raise InvalidFamilyParameters("custom scale needs points")
        try:
            return TimeScale(np.asarray(spec.points, dtype=float))
        except ValueError as exc:
            raise InvalidFamilyParameters(str(exc)) from exc
    N = _need_N(spec)
    i = np.arange(N + 1)
    if kind == "uniform":
        h, t0 = spec.h, 0.0 if spec.t0 is None else spec.t0
        if h is None or not h > 0:
            raise InvalidFamilyParameters(f"uniform scale needs step h > 0, got {h!r}")
        pts = t0 + i * h
    elif kind == "qscale":
        q, t0 = spec.q, 1.0 if spec.t0 is None else spec.t0
        if q is None or not q > 1:
            raise InvalidFamilyParameters(f"q-scale needs q > 1, got {q!r}")
        if not t0 > 0:
            raise InvalidFamilyParameters(f"q-scale needs t0 > 0, got {t0!r}")
        pts = t0 * float(q) ** i
    elif kind == "harmonic":
        pts = np.cumsum(1.0 / (i + 1))
    elif kind == "random":
        lo, hi, t0 = spec.min_gap, spec.max_gap, 0.0 if spec.t0 is None else spec.t0
        if lo is None or hi is None or not 0 < lo <= hi:
            raise InvalidFamilyParameters(f"random scale needs 0 < min_gap <= max_gap, got {lo!r}, {hi!r}")
        if spec.seed is None:
            raise InvalidFamilyParameters("random scale needs a seed")
        gaps = np.random.default_rng(spec.seed).uniform(lo, hi, N)
        pts = t0 + np.concatenate(([0.0], np.cumsum(gaps)))
    else:
        raise InvalidFamilyParameters(f"unknown scale family {kind!r}")
    if not np.all(np.isfinite(pts)) or np.any(np.diff(pts) <= 0):
        raise InvalidFamilyParameters(f"{kind} parameters do not give a strictly increasing finite scale")
    return TimeScale(pts)


# ---------------------------------------------------------------- experiments


@dataclass(frozen=True)
class Perturbation:
    """``magnitude * shape`` where the unit shape is drawn from PCG64 seeded with ``seed``.

    uniform: iid uniform on [-1, 1]; spike: 1 at one random index;
    sinusoid: ``sin(2 pi f s + phase)`` in normalised time ``s``, random f and phase.
    """

    magnitude: float
    shape: str = "uniform"
    seed: int = 0

    def unit(self, ts: TimeScale) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        size = len(ts)
        if self.shape == "uniform":
            return rng.uniform(-1.0, 1.0, size)
        if self.shape == "spike":
            v = np.zeros(size)
            v[rng.integers(0, size)] = 1.0
            return v
        if self.shape == "sinusoid":
            freq, phase = rng.uniform(0.5, 3.0), rng.uniform(0.0, 2 * np.pi)
            s = (ts.points - ts.points[0]) / (ts.points[-1] - ts.points[0])
            return np.sin(2 * np.pi * freq * s + phase)
        raise ValueError(f"unknown perturbation shape {self.shape!r}; expected one of {SHAPES}")

    def sample(self, ts: TimeScale) -> GridFunction:
        return GridFunction(ts, 0, self.magnitude * self.unit(ts))


_FLOAT_FIELDS = ("epsilon", "sup_deviation", "K_empirical", "K_analytic", "A", "magnitude")


@dataclass
class StabilityReport:
    epsilon: float
    sup_deviation: float
    K_empirical: float
    K_analytic: float
    stage_constants: list
    A: float
    anchors: list
    scale: dict = field(default_factory=dict)
    seed: int = 0
    magnitude: float = 0.0
    shape: str = "uniform"
    degenerate_residual: bool = False
    bound_ok: bool = True

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StabilityReport":
        # JSON writes non-finite floats as null
        d = dict(d)
        for key in _FLOAT_FIELDS:
            if d.get(key) is None:
                d[key] = math.nan
        d["stage_constants"] = [math.nan if v is None else v for v in d.get("stage_constants", [])]
        return cls(**d)


def bound_holds(sup_deviation: float, K: float, epsilon: float, x_norm: float) -> bool:
    if not math.isfinite(K):
        return True
    slack = BOUND_RTOL * K * epsilon + 64 * np.finfo(float).eps * (1.0 + x_norm)
    return sup_deviation <= K * epsilon + slack


def reference_solution(problem: CauchyEulerProblem) -> GridFunction:
    """The forced response with zero data: the cascade applied to ``x = 0``."""
    zero = GridFunction.constant(problem.scale, 0.0)
    return cascade_solve(problem, zero).u


def run_hus_experiment(
    problem: CauchyEulerProblem,
    perturbation: Perturbation,
    anchors: Sequence[int] | None = None,
    x_exact: GridFunction | None = None,
    scale_descriptor: dict | None = None,
) -> StabilityReport:
    anchors = validate_anchors(problem, anchors)
    if x_exact is None:
        x_exact = reference_solution(problem)
    x = x_exact + perturbation.sample(problem.scale)
    _, eps = residual(problem, x)
    u = cascade_solve(problem, x, anchors).u
    dev = (x - u).sup()
    K, L = analytic_K(problem, anchors)
    degenerate = eps < DEGENERATE_RESIDUAL
    return StabilityReport(
        epsilon=eps,
        sup_deviation=dev,
        K_empirical=math.nan if degenerate else dev / eps,
        K_analytic=K,
        stage_constants=list(L),
        A=problem.A,
        anchors=list(anchors),
        scale=scale_descriptor or {"kind": "custom", "points": problem.scale.points.tolist()},
        seed=perturbation.seed,
        magnitude=perturbation.magnitude,
        shape=perturbation.shape,
        degenerate_residual=degenerate,
        bound_ok=bound_holds(dev, K, eps, x.sup()),
    )
