"""Spectrum <-> coefficient maps for monic polynomials.

The operator coefficients are ``alpha_k = e_{n-k}(-lambda_1, ..., -lambda_n)``,
i.e. the ascending coefficients of ``prod_k (z - lambda_k)``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import NotMonic, RootFindingFailure, ValidationError

ROOT_TOL = 1e-10
ROOT_MAXITER = 500


def elementary_symmetric(values: Sequence[complex]) -> np.ndarray:
    """``[e_0, e_1, ..., e_n]`` of ``values`` by one-symbol-at-a-time updates."""
    e = np.zeros(len(values) + 1, dtype=complex)
    e[0] = 1.0
    for j, v in enumerate(values, start=1):
        e[1 : j + 1] = e[1 : j + 1] + v * e[:j]
    return e


def lambdas_to_alphas(lambdas: Sequence[complex]) -> np.ndarray:
    """Ascending monic coefficients ``alpha_0..alpha_n`` of ``prod (z - lambda_k)``.

    The values are put in a canonical order first, so any permutation of the
    input gives bitwise-identical coefficients.
    """
    lam = np.asarray(lambdas, dtype=complex).ravel() + 0.0  # drops signed zeros
    if lam.size < 1:
        raise ValidationError("need at least one characteristic value")
    lam = lam[np.lexsort((lam.imag, lam.real))]
    # alpha_k = e_{n-k}(-lambda)
    alphas = elementary_symmetric(-lam)[::-1].copy()
    alphas[-1] = 1.0
    return alphas


def check_monic(alphas: Sequence[complex]) -> np.ndarray:
    a = np.asarray(alphas, dtype=complex).ravel()
    if a.size < 2:
        raise ValidationError(f"need alpha_0..alpha_n with n >= 1, got {a.size} coefficient(s)")
    if a[-1] != 1.0:
        raise NotMonic(f"leading coefficient alpha_n must be exactly 1, got {complex(a[-1])!r}")
    return a


def _horner(coeffs: np.ndarray, z: np.ndarray):
    """Value and derivative of the ascending-coefficient polynomial at ``z``."""
    p = np.full(z.shape, coeffs[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for c in coeffs[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _coefficient_error(z, a, scale):
    return float(np.max(np.abs(lambdas_to_alphas(z) - a))) / scale


def _aberth_step(a, z):
    p, dp = _horner(a, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dp != 0, p / dp, p)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        w = ratio / (1.0 - ratio * np.sum(1.0 / diff, axis=1))
    w = np.where(np.isfinite(w), w, 0.0)
    return z - w, w


def alphas_to_lambdas(
    alphas: Sequence[complex], tol: float = ROOT_TOL, maxiter: int = ROOT_MAXITER
) -> np.ndarray:
    """All roots (with multiplicity) of ``sum alpha_k z^k``.

    Companion-matrix eigenvalues give the starting set; Aberth-Ehrlich steps
    refine it. Roots of a cluster are individually ill-conditioned but their
    symmetric functions are not, so acceptance is judged on how well the roots
    reproduce the coefficients (relative ``tol``), not on each root.
    """
    a = check_monic(alphas)
    n = a.size - 1
    if n == 1:
        return np.array([-a[0] + 0.0])
    scale = max(1.0, float(np.max(np.abs(a))))

    companion = np.zeros((n, n), dtype=complex)
    companion[1:, :-1] = np.eye(n - 1)
    companion[:, -1] = -a[:-1]
    z = np.linalg.eigvals(companion)
    err = _coefficient_error(z, a, scale) if np.all(np.isfinite(z)) else np.inf

    if not err <= tol:
        # restart from a circle inside the Fujiwara bound
        radius = max(1.0, 2.0 * max(abs(a[n - k]) ** (1.0 / k) for k in range(1, n + 1)))
        z = 0.5 * radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
        for _ in range(maxiter):
            z, _ = _aberth_step(a, z)
            err = _coefficient_error(z, a, scale)
            if err <= tol:
                break
        else:
            raise RootFindingFailure(f"Aberth iteration did not converge in {maxiter} steps")

    # polish separated roots; keep a step only if the coefficients stay within tol
    for _ in range(3):
        z_new, w = _aberth_step(a, z)
        if not np.all(np.isfinite(z_new)) or _coefficient_error(z_new, a, scale) > max(err, tol):
            break
        z = z_new
        if np.all(np.abs(w) <= np.finfo(float).eps * np.maximum(1.0, np.abs(z))):
            break
    return z[np.lexsort((z.imag, z.real))]


def power_sums(lambdas: Sequence[complex], kmax: int) -> np.ndarray:
    """``p_k = sum_i lambda_i^k`` for ``k = 1..kmax``."""
    lam = np.asarray(lambdas, dtype=complex)
    return np.array([np.sum(lam**k) for k in range(1, kmax + 1)])


def power_sums_from_alphas(alphas: Sequence[complex], kmax: int) -> np.ndarray:
    """Power sums of the roots via the Newton-Girard identities."""
    a = check_monic(alphas)
    n = a.size - 1
    # e_j(lambda) = (-1)^j alpha_{n-j}
    e = np.array([(-1) ** j * a[n - j] if j <= n else 0.0 for j in range(kmax + 1)], dtype=complex)
    p = np.zeros(kmax + 1, dtype=complex)
    for k in range(1, kmax + 1):
        acc = (-1) ** (k - 1) * k * e[k]
        for i in range(1, k):
            acc += (-1) ** (i - 1) * e[i] * p[k - i]
        p[k] = acc
    return p[1:]
