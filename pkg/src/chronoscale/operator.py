"""The nth-order Cauchy-Euler operator on a finite time scale.

``M_0 y = y`` and ``M_{k+1} y = phi * (M_k y)^Delta``. The summed form is
``sum_k alpha_k M_k y``; the factored form composes ``(phi D - lambda_k I)`` for
``k = 1..n`` with ``lambda_1`` innermost. The two agree whenever the alphas are
the elementary symmetric polynomials of ``-lambda``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateCoefficient, RegressivityViolation, WindowTooSmall
from .exponential import REGRESSIVITY_THRESHOLD, check_regressivity
from .symmetric import alphas_to_lambdas, check_monic, lambdas_to_alphas
from .timescale import GridFunction, TimeScale, delta_derivative

DEGENERACY_THRESHOLD = 1e-12


def _phi_times_derivative(phi: GridFunction, g: GridFunction) -> GridFunction:
    dg = delta_derivative(g.scale, g)
    if phi.start > dg.start or phi.end < dg.end:
        raise WindowTooSmall(f"phi window {phi.window} does not cover {dg.window}")
    return phi * dg


def apply_M(phi: GridFunction, g: GridFunction, k: int) -> GridFunction:
    """``M_k g``; the window shrinks by ``k`` points at the right."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if len(g) <= k:
        raise WindowTooSmall(f"M_{k} needs a window longer than {k}, got {len(g)}")
    for _ in range(k):
        g = _phi_times_derivative(phi, g)
    return g


def _sum_terms(phi, alphas, g):
    n = alphas.size - 1
    if len(g) <= n:
        raise WindowTooSmall(f"order-{n} operator needs a window longer than {n}, got {len(g)}")
    lo, hi = g.start, g.end - n
    terms, m = [], g
    for k in range(n + 1):
        if k:
            m = _phi_times_derivative(phi, m)
        terms.append(alphas[k] * m.values[: hi - lo + 1])
    return lo, terms


def apply_sum_operator(phi: GridFunction, alphas: Sequence[complex], g: GridFunction) -> GridFunction:
    """``sum_k alpha_k M_k g`` on the n-shrunken window."""
    a = check_monic(alphas)
    lo, terms = _sum_terms(phi, a, g)
    return GridFunction(g.scale, lo, np.sum(terms, axis=0))


def factor_chain(phi: GridFunction, lambdas: Sequence[complex], g: GridFunction) -> list[GridFunction]:
    """``[g_1, ..., g_n]`` with ``g_k = (phi D - lambda_k I) g_{k-1}`` and ``g_0 = g``."""
    lam = np.asarray(lambdas, dtype=complex).ravel()
    if len(g) <= lam.size:
        raise WindowTooSmall(
            f"order-{lam.size} operator needs a window longer than {lam.size}, got {len(g)}"
        )
    chain = []
    for l in lam:
        g = _phi_times_derivative(phi, g) - l * g
        chain.append(g)
    return chain


def apply_factored_operator(phi: GridFunction, lambdas: Sequence[complex], g: GridFunction) -> GridFunction:
    return factor_chain(phi, lambdas, g)[-1]


def factorization_gap(phi: GridFunction, lambdas: Sequence[complex], g: GridFunction) -> float:
    """Sup-norm of summed minus factored operator output."""
    summed = apply_sum_operator(phi, lambdas_to_alphas(lambdas), g)
    factored = apply_factored_operator(phi, lambdas, g)
    return float(np.max(np.abs(summed.values - factored.values)))


def _abs_step(phi, g):
    # |phi| (|g_{i+1}| + |g_i|) / mu_i bounds the magnitudes entering phi g^Delta
    a = np.abs(g.values)
    mu = g.scale.mu[g.start : g.end]
    ph = np.abs(phi.values[g.start - phi.start : g.end - phi.start])
    return GridFunction(g.scale, g.start, ph * (a[1:] + a[:-1]) / mu)


def roundoff_scale(phi: GridFunction, lambdas: Sequence[complex], g: GridFunction) -> float:
    """Magnitude against which rounding error of either operator form is measured.

    Both forms are evaluated with every quantity replaced by its modulus and
    every subtraction by an addition, so the computed outputs differ from the
    exact ones by at most a small multiple of machine epsilon times this value.
    """
    lam = np.asarray(lambdas, dtype=complex).ravel()
    n = lam.size
    if len(g) <= n:
        raise WindowTooSmall(f"order-{n} operator needs a window longer than {n}, got {len(g)}")
    if phi.start > g.start or phi.end < g.end - 1:
        raise WindowTooSmall(f"phi window {phi.window} does not cover {g.start, g.end - 1}")
    alphas = np.abs(lambdas_to_alphas(lam))
    hi = len(g) - n
    m = GridFunction(g.scale, g.start, np.abs(g.values))
    summed = alphas[0] * m.values[:hi]
    for k in range(1, n + 1):
        m = _abs_step(phi, m)
        summed = summed + alphas[k] * m.values[:hi]
    c = GridFunction(g.scale, g.start, np.abs(g.values))
    for l in lam:
        c = _abs_step(phi, c) + abs(l) * c
    return float(max(np.max(np.abs(summed)), c.sup()))


def rate(phi: GridFunction, lam: complex) -> GridFunction:
    """``p = lambda / phi``, the exponent of the first-order factor ``phi D - lambda I``."""
    return GridFunction(phi.scale, phi.start, lam / phi.values)


@dataclass(frozen=True, eq=False)
class CauchyEulerProblem:
    """``sum_k alpha_k M_k y = f`` on ``scale`` with validated hypotheses.

    ``phi`` must cover ``[0, N-1]`` and ``forcing`` must cover ``[0, N-n]``.
    Construction checks ``inf |phi| > 0`` and ``phi + lambda_k mu != 0`` on
    ``[0, N-1]`` for every characteristic value.
    """

    scale: TimeScale
    phi: GridFunction
    lambdas: tuple
    forcing: GridFunction
    threshold: float = REGRESSIVITY_THRESHOLD
    A: float = field(init=False)

    def __post_init__(self):
        lam = tuple(complex(l) for l in np.asarray(self.lambdas, dtype=complex).ravel())
        object.__setattr__(self, "lambdas", lam)
        n, N = len(lam), self.scale.N
        if n < 1:
            raise WindowTooSmall("order must be at least 1")
        if N < n:
            raise WindowTooSmall(f"order-{n} problem needs at least {n + 1} points, got {N + 1}")
        for name, gf, hi in (("phi", self.phi, N - 1), ("forcing", self.forcing, N - n)):
            if gf.scale != self.scale:
                raise ValueError(f"{name} lives on a different time scale")
            if gf.start > 0 or gf.end < hi:
                raise WindowTooSmall(f"{name} window {gf.window} must cover [0, {hi}]")
        phi = self.phi.restrict(0, N - 1)
        absphi = np.abs(phi.values)
        k = int(np.argmin(absphi))
        if absphi[k] <= DEGENERACY_THRESHOLD:
            raise DegenerateCoefficient(
                f"|phi| = {float(absphi[k])!r} at index {k} (t = {float(self.scale.points[k])!r})",
                index=k,
                value=complex(phi.values[k]),
            )
        object.__setattr__(self, "A", float(absphi[k]))
        for j, l in enumerate(lam, start=1):
            cert = check_regressivity(self.scale, rate(phi, l), self.threshold)
            if not cert.ok:
                i = cert.worst_index
                raise RegressivityViolation(
                    f"phi + lambda_{j}*mu = 0 (factor {complex(cert.worst_value)!r}) at index {i} "
                    f"(t = {float(self.scale.points[i])!r}) for lambda_{j} = {complex(l)!r}",
                    index=i,
                    value=cert.worst_value,
                )

    @classmethod
    def from_alphas(cls, scale, phi, alphas, forcing, **kw):
        return cls(scale, phi, tuple(alphas_to_lambdas(alphas)), forcing, **kw)

    @property
    def order(self) -> int:
        return len(self.lambdas)

    @property
    def alphas(self) -> np.ndarray:
        return lambdas_to_alphas(self.lambdas)

    def sum_operator(self, g: GridFunction) -> GridFunction:
        return apply_sum_operator(self.phi, self.alphas, g)

    def factored_operator(self, g: GridFunction) -> GridFunction:
        return apply_factored_operator(self.phi, self.lambdas, g)

    def with_lambdas(self, lambdas) -> "CauchyEulerProblem":
        return CauchyEulerProblem(self.scale, self.phi, tuple(lambdas), self.forcing, self.threshold)
