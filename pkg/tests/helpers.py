"""Independent oracles and random problem generators for the test suite.

The brute-force routines use plain Python loops over lists and never call the
library's calculus, so they can check it.
"""
import itertools
import math

import numpy as np

from chronoscale import CauchyEulerProblem, GridFunction, ScaleFamilySpec, generate_scale
from chronoscale.errors import DegeneracyError

FAMILIES = ("uniform", "qscale", "harmonic", "random")


# ------------------------------------------------------------------ oracles


def brute_delta(points, g):
    return [(g[i + 1] - g[i]) / (points[i + 1] - points[i]) for i in range(len(g) - 1)]


def brute_M(points, phi, g, k):
    vals = list(g)
    for _ in range(k):
        d = brute_delta(points, vals)
        vals = [phi[i] * d[i] for i in range(len(d))]
    return vals


def brute_alphas(lambdas):
    """alpha_k = e_{n-k}(-lambda) by subset enumeration."""
    n = len(lambdas)
    out = []
    for k in range(n + 1):
        total = 0j
        for combo in itertools.combinations(range(n), n - k):
            prod = 1 + 0j
            for i in combo:
                prod *= -lambdas[i]
            total += prod
        out.append(total)
    return out


def brute_sum_operator(points, phi, alphas, g):
    n = len(alphas) - 1
    m = len(g) - n
    out = [0j] * m
    for k, a in enumerate(alphas):
        mk = brute_M(points, phi, g, k)
        for i in range(m):
            out[i] += a * mk[i]
    return out


def brute_exp(points, p, j, i):
    """e_p(t_j, t_i) by an explicit product."""
    if j >= i:
        prod = 1 + 0j
        for k in range(i, j):
            prod *= 1 + (points[k + 1] - points[k]) * p[k]
        return prod
    return 1 / brute_exp(points, p, i, j)


def brute_first_order(points, phi, lam, rhs, tau, init):
    """Step phi w^Delta - lam w = rhs forward and backward from w(tau) = init."""
    n = len(rhs) + 1
    w = [0j] * n
    w[tau] = init
    for i in range(tau, n - 1):
        mu = points[i + 1] - points[i]
        w[i + 1] = w[i] + mu * (lam * w[i] + rhs[i]) / phi[i]
    for i in range(tau - 1, -1, -1):
        mu = points[i + 1] - points[i]
        w[i] = (w[i + 1] - mu * rhs[i] / phi[i]) / (1 + mu * lam / phi[i])
    return w


def brute_stage_constant(points, phi, lam, tau, hi):
    """sup_t |int_tau^t |e(t, sigma(s))| Delta s| by double enumeration."""
    p = [lam / phi[i] for i in range(hi)]
    best = 0.0
    for t in range(hi + 1):
        lo, up = sorted((tau, t))
        total = 0.0
        for s in range(lo, up):
            total += abs(brute_exp(points, p, t, s + 1)) * (points[s + 1] - points[s])
        best = max(best, total)
    return best


# ----------------------------------------------------------------- generators


def random_scale(rng, family, n_points):
    N = n_points - 1
    if family == "uniform":
        spec = ScaleFamilySpec.uniform(float(rng.uniform(0.3, 1.5)), N, float(rng.uniform(-1, 1)))
    elif family == "qscale":
        spec = ScaleFamilySpec.qscale(float(rng.uniform(1.05, 1.5)), N, float(rng.uniform(0.5, 2)))
    elif family == "harmonic":
        spec = ScaleFamilySpec.harmonic(N)
    elif family == "random":
        spec = ScaleFamilySpec.random(N, 0.1, 1.0, int(rng.integers(2**31)))
    else:
        raise ValueError(family)
    return spec, generate_scale(spec)


def random_lambdas(rng, n, kind):
    """Real, conjugate-paired or repeated characteristic values of order n."""
    if kind == "real":
        return list(rng.uniform(-0.5, 1.5, n))
    if kind == "conjugate":
        out = []
        while len(out) + 2 <= n:
            z = complex(rng.uniform(-0.3, 1.2), rng.uniform(0.2, 1.0))
            out += [z, z.conjugate()]
        if len(out) < n:
            out.append(complex(rng.uniform(-0.5, 1.5)))
        return out
    if kind == "repeated":
        z = float(rng.uniform(-0.5, 1.5))
        k = int(rng.integers(1, n + 1))
        return [z] * k + list(rng.uniform(-0.5, 1.5, n - k))
    raise ValueError(kind)


def random_phi(rng, ts, family):
    """Positive coefficient, proportional to t on q-scales so growth stays tame."""
    amp = rng.uniform(0.5, 2.0, len(ts))
    if family == "qscale":
        amp = amp * ts.points
    return GridFunction(ts, 0, amp)


def random_problem(rng, family, n_points, n, kind="real", forcing=True, max_K=None, threshold=1e-3):
    """Draw until the hypotheses hold (and, optionally, K stays below max_K)."""
    from chronoscale import analytic_K

    for _ in range(200):
        spec, ts = random_scale(rng, family, n_points)
        phi = random_phi(rng, ts, family)
        f = GridFunction(ts, 0, rng.uniform(-1, 1, len(ts)) if forcing else np.zeros(len(ts)))
        lam = random_lambdas(rng, n, kind)
        try:
            prob = CauchyEulerProblem(ts, phi, lam, f, threshold=threshold)
            if max_K is not None and not analytic_K(prob)[0] <= max_K:
                continue
        except DegeneracyError:
            continue
        return spec, prob
    raise RuntimeError("could not draw a regressive problem")


def rel_close(a, b, rtol, floor=1.0):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(floor, np.maximum(np.abs(a), np.abs(b)))))


def isclose_or_nan(a, b):
    if isinstance(a, float) and math.isnan(a):
        return isinstance(b, float) and math.isnan(b)
    return a == b
