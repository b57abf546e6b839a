"""scikit-learn transformer wrapping the cascade.

Rows of ``X`` are approximate solutions sampled on the scale; ``transform``
replaces each by the exact solution the cascade reconstructs from it, so a
projector can sit at the end of a pipeline that produces noisy trajectories.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cascade import cascade_solve, residual
from .exponential import REGRESSIVITY_THRESHOLD
from .operator import CauchyEulerProblem
from .stability import analytic_K
from .timescale import GridFunction, TimeScale


def _as_grid(ts, spec, name):
    if isinstance(spec, str):
        if spec != "t":
            raise ValueError(f"{name}: only the tag 't' is understood, got {spec!r}")
        return GridFunction.from_callable(ts, lambda t: t)
    if callable(spec):
        return GridFunction.from_callable(ts, spec)
    arr = np.asarray(spec, dtype=complex)
    if arr.ndim == 0:
        return GridFunction.constant(ts, complex(arr))
    if arr.shape != (len(ts),):
        raise ValueError(f"{name} needs {len(ts)} samples, got shape {arr.shape}")
    return GridFunction(ts, 0, arr)


class CascadeProjector(TransformerMixin, BaseEstimator):
    """Map approximate solutions of a Cauchy-Euler equation to exact ones.

    Parameters
    ----------
    points : array-like of shape (n_points,)
        The time scale. If None, ``0, 1, ..., n_features - 1`` is used.
    phi, forcing : "t", scalar, callable or array-like
        Coefficient function and right-hand side, sampled on ``points``.
    lambdas : sequence of complex
        Characteristic values; the order is the length.
    anchors : sequence of int or None
        Stage anchors tau_1..tau_n (default: all at the left endpoint).

    Attributes
    ----------
    problem_ : CauchyEulerProblem
    K_analytic_ : float
        Certified constant with ``|x - u| <= K_analytic_ * eps`` for every row.
    stage_constants_ : list of float
    A_ : float
    n_features_in_ : int
    """

    def __init__(self, points=None, phi="t", lambdas=(0.0,), forcing=0.0, anchors=None,
                 threshold=REGRESSIVITY_THRESHOLD):
        self.points = points
        self.phi = phi
        self.lambdas = lambdas
        self.forcing = forcing
        self.anchors = anchors
        self.threshold = threshold

    def fit(self, X=None, y=None):
        if self.points is None:
            if X is None:
                raise ValueError("give points or X to fix the time scale")
            n = check_array(X).shape[1]
            pts = np.arange(n, dtype=float)
        else:
            pts = np.asarray(self.points, dtype=float)
        ts = TimeScale(pts)
        self.problem_ = CauchyEulerProblem(
            ts,
            _as_grid(ts, self.phi, "phi"),
            tuple(np.atleast_1d(np.asarray(self.lambdas, dtype=complex))),
            _as_grid(ts, self.forcing, "forcing"),
            self.threshold,
        )
        self.K_analytic_, self.stage_constants_ = analytic_K(self.problem_, self.anchors)
        self.A_ = self.problem_.A
        self.n_features_in_ = len(ts)
        return self

    def _rows(self, X):
        check_is_fitted(self, "problem_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        ts = self.problem_.scale
        return [GridFunction(ts, 0, row) for row in X]

    def transform(self, X):
        us = [cascade_solve(self.problem_, x, self.anchors).u.values for x in self._rows(X)]
        out = np.array(us)
        return out.real if np.all(out.imag == 0) else out

    def epsilon(self, X):
        """Sup-norm residual of each row."""
        return np.array([residual(self.problem_, x)[1] for x in self._rows(X)])

    def score(self, X, y=None):
        """Negative mean residual; 0 for exact solutions."""
        return -float(np.mean(self.epsilon(X)))
