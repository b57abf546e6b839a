"""Reconstruct an exact solution near an approximate one.

Given ``x`` on the whole scale, build ``g_k = (phi D - lambda_k I) g_{k-1}``
with ``g_0 = x``, then peel the factors off again from the outside in:

    phi w_k^Delta - lambda_{n-k+1} w_k = w_{k-1},   w_0 = f,
    w_k(tau_k) = g_{n-k}(tau_k).

Each stage is solved in closed form with the time-scale exponential. The last
stage ``u = w_n`` solves the full equation and stays within ``K eps`` of ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateCoefficient, IndexOutOfRange, WindowTooSmall
from .exponential import REGRESSIVITY_THRESHOLD, exp_table
from .operator import DEGENERACY_THRESHOLD, CauchyEulerProblem, factor_chain, rate
from .timescale import GridFunction, TimeScale, anchored_cumsum, delta_derivative


def first_order_solve(
    ts: TimeScale,
    phi: GridFunction,
    lam: complex,
    rhs: GridFunction,
    tau: int,
    init: complex,
    threshold: float = REGRESSIVITY_THRESHOLD,
) -> GridFunction:
    """Solve ``phi w^Delta - lam w = rhs`` with ``w(t_tau) = init``.

    ``rhs`` on ``[lo, hi]`` yields ``w`` on ``[lo, hi + 1]``:

        w(t) = e(t, tau) init + int_tau^t e(t, sigma(s)) rhs(s) / phi(s) Delta s

    where ``e = e_{lam/phi}``. We write ``e(t, sigma(s)) = E(t) / E(sigma(s))``
    with ``E = e(., tau)``, so one prefix sum covers every target.
    """
    lo, hi = rhs.window
    if hi + 1 > ts.N:
        raise IndexOutOfRange(f"rhs window {rhs.window} leaves no room for w^Delta")
    if not lo <= tau <= hi + 1:
        raise IndexOutOfRange(f"anchor {tau} outside solution window [{lo}, {hi + 1}]")
    if phi.start > lo or phi.end < hi:
        raise WindowTooSmall(f"phi window {phi.window} does not cover {rhs.window}")
    phi = phi.restrict(lo, hi)
    absphi = np.abs(phi.values)
    bad = np.flatnonzero(absphi < max(threshold, DEGENERACY_THRESHOLD))
    if bad.size:
        i = lo + int(bad[0])
        raise DegenerateCoefficient(f"|phi| = {float(absphi[bad[0]])!r} at index {i}", index=i)

    E = exp_table(ts, rate(phi, lam), tau, threshold).values
    h = rhs.values / (phi.values * E[1:]) * ts.mu[lo : hi + 1]
    integral = anchored_cumsum(h, tau - lo)
    return GridFunction(ts, lo, E * (init + integral))


def first_order_residual(phi: GridFunction, lam: complex, rhs: GridFunction, w: GridFunction) -> GridFunction:
    """``phi w^Delta - lam w - rhs`` where all three are defined."""
    dw = delta_derivative(w.scale, w)
    return phi * dw - lam * w - rhs


def residual(problem: CauchyEulerProblem, x: GridFunction) -> tuple[GridFunction, float]:
    """Pointwise ``sum alpha_k M_k x - f`` on the n-shrunken window, and its sup."""
    N, n = problem.scale.N, problem.order
    if x.start != 0 or x.end != N:
        raise WindowTooSmall(f"x must span the full scale [0, {N}], got {x.window}")
    r = problem.sum_operator(x) - problem.forcing.restrict(0, N - n)
    return r, r.sup()


@dataclass(frozen=True)
class CascadeResult:
    u: GridFunction
    stages: list  # w_1..w_n
    g_chain: list  # g_1..g_n
    anchors: tuple
    residual_sup: float
    stage_residuals: tuple

    @property
    def n(self) -> int:
        return len(self.stages)


def default_anchors(n: int) -> tuple:
    return (0,) * n


def validate_anchors(problem: CauchyEulerProblem, anchors: Sequence[int] | None) -> tuple:
    N, n = problem.scale.N, problem.order
    if anchors is None:
        return default_anchors(n)
    anchors = tuple(int(a) for a in anchors)
    if len(anchors) != n:
        raise IndexOutOfRange(f"need {n} anchors, got {len(anchors)}")
    for k, tau in enumerate(anchors, start=1):
        # stage k lives on [0, N - n + k]
        if not 0 <= tau <= N - n + k:
            raise IndexOutOfRange(f"anchor tau_{k} = {tau} outside [0, {N - n + k}]")
    return anchors


def cascade_solve(
    problem: CauchyEulerProblem, x: GridFunction, anchors: Sequence[int] | None = None
) -> CascadeResult:
    ts, phi, lam = problem.scale, problem.phi, problem.lambdas
    N, n = ts.N, problem.order
    if x.start != 0 or x.end != N:
        raise WindowTooSmall(f"x must span the full scale [0, {N}], got {x.window}")
    anchors = validate_anchors(problem, anchors)

    chain = factor_chain(phi, lam, x)
    g = [x] + chain  # g[j] = g_j
    w_prev = problem.forcing.restrict(0, N - n)
    stages, stage_res = [], []
    for k in range(1, n + 1):
        lam_k = lam[n - k]
        tau = anchors[k - 1]
        w = first_order_solve(ts, phi, lam_k, w_prev, tau, g[n - k][tau], problem.threshold)
        stage_res.append(first_order_residual(phi, lam_k, w_prev, w).sup())
        stages.append(w)
        w_prev = w

    u = stages[-1]
    r = problem.sum_operator(u) - problem.forcing.restrict(0, N - n)
    return CascadeResult(
        u=u,
        stages=stages,
        g_chain=chain,
        anchors=anchors,
        residual_sup=r.sup(),
        stage_residuals=tuple(stage_res),
    )
