"""Scikit-learn style estimators wrapping the embedding algorithms.

Each estimator accepts, in ``fit``, either a precomputed (n, n) distance
matrix (validated for symmetry, zero diagonal, and unit minimum
distance), a ``DistanceMatrix``, or a ``Graph`` (converted through
shortest paths). ``fit`` populates ``embedding_``, ``stress_``, and
``normalized_stress_``; ``fit_transform`` returns the embedding, so the
estimators drop into pipelines expecting a transform-shaped step.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .baselines import GdParams, gradient_descent, gradient_descent_restarts, spectral_embed
from .exceptions import InvariantViolation
from .graphs import DistanceMatrix, Graph, apsp
from .scheme import SchemeParams, kk_scheme, run_with_restarts
from .stress import stress

__all__ = [
    "as_distance_matrix",
    "GreedyStressEmbedding",
    "GradientStressEmbedding",
    "HybridStressEmbedding",
    "LaplacianEmbedding",
]


def as_distance_matrix(X) -> DistanceMatrix:
    """Coerce estimator input into a validated DistanceMatrix."""
    if isinstance(X, DistanceMatrix):
        return X
    if isinstance(X, Graph):
        return apsp(X)
    return DistanceMatrix(np.asarray(X, dtype=np.float64))


class _StressEmbeddingBase(BaseEstimator):
    def fit(self, X, y=None):
        d = as_distance_matrix(X)
        self.embedding_ = self._solve(d)
        self.stress_ = stress(self.embedding_, d)
        self.normalized_stress_ = self.stress_ / d.n**2
        self.n_features_in_ = d.n
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X, y).embedding_

    def _solve(self, d: DistanceMatrix) -> np.ndarray:
        raise NotImplementedError


class GreedyStressEmbedding(_StressEmbeddingBase):
    """Net-discretized greedy stress minimizer with restarts.

    Parameters
    ----------
    n_components : target dimension.
    radius : radius of the ball the layout is confined to.
    net_resolution : covering radius of the discretization net.
    prefix_size : number of brute-forced variables in the greedy solver.
    n_restarts : independent runs; the lowest-stress layout is kept.
    random_state : base seed; run t uses random_state + t.
    symmetry_reduction : pin translation (and planar rotation) freedom
        in the brute-forced prefix.

    Attributes
    ----------
    embedding_ : (n, n_components) layout.
    stress_, normalized_stress_ : objective of ``embedding_``.
    trial_results_ : per-restart records (trial, seed, stress, ...).
    """

    def __init__(self, n_components=2, radius=2.5, net_resolution=0.5,
                 prefix_size=3, n_restarts=1, random_state=0, symmetry_reduction=True):
        self.n_components = n_components
        self.radius = radius
        self.net_resolution = net_resolution
        self.prefix_size = prefix_size
        self.n_restarts = n_restarts
        self.random_state = random_state
        self.symmetry_reduction = symmetry_reduction

    def _params(self) -> SchemeParams:
        return SchemeParams(
            r=self.n_components, R=self.radius, eps1=self.net_resolution,
            t0=self.prefix_size, seed=self.random_state, trials=self.n_restarts,
            symmetry_reduction=self.symmetry_reduction,
        )

    def _solve(self, d):
        layout, _, records = run_with_restarts(d, self._params())
        self.trial_results_ = records
        return layout


class GradientStressEmbedding(_StressEmbeddingBase):
    """Full-batch gradient descent on the stress objective.

    Fixed step size, best-iterate tracking, optional restarts with
    consecutive seeds; see GdParams for the initialization convention.
    """

    def __init__(self, n_components=2, learning_rate=0.005, n_steps=4000,
                 n_restarts=1, random_state=0, init_scale=0.25):
        self.n_components = n_components
        self.learning_rate = learning_rate
        self.n_steps = n_steps
        self.n_restarts = n_restarts
        self.random_state = random_state
        self.init_scale = init_scale

    def _solve(self, d):
        p = GdParams(lr=self.learning_rate, steps=self.n_steps,
                     seed=self.random_state, init_scale=self.init_scale)
        if self.n_restarts == 1:
            layout, trace = gradient_descent(d, self.n_components, p)
            self.trace_ = trace
            self.trial_results_ = []
            return layout
        layout, _, records = gradient_descent_restarts(d, self.n_components, p, self.n_restarts)
        self.trial_results_ = records
        return layout


class HybridStressEmbedding(_StressEmbeddingBase):
    """Greedy net solution refined by gradient descent."""

    def __init__(self, n_components=2, radius=2.5, net_resolution=0.5, prefix_size=3,
                 learning_rate=0.005, n_steps=4000, n_restarts=1, random_state=0):
        self.n_components = n_components
        self.radius = radius
        self.net_resolution = net_resolution
        self.prefix_size = prefix_size
        self.learning_rate = learning_rate
        self.n_steps = n_steps
        self.n_restarts = n_restarts
        self.random_state = random_state

    def _solve(self, d):
        best, best_e = None, np.inf
        for t in range(self.n_restarts):
            seed = self.random_state + t
            start = kk_scheme(d, SchemeParams(
                r=self.n_components, R=self.radius, eps1=self.net_resolution,
                t0=self.prefix_size, seed=seed))
            layout, _ = gradient_descent(d, self.n_components, GdParams(
                lr=self.learning_rate, steps=self.n_steps, seed=seed, init=start))
            e = stress(layout, d)
            if e < best_e:
                best, best_e = layout, e
        return best


class LaplacianEmbedding(BaseEstimator):
    """Spectral embedding from the bottom nontrivial Laplacian
    eigenvectors. ``fit`` requires a Graph (the Laplacian needs
    adjacency, not just distances)."""

    def __init__(self, n_components=2, normalized=False):
        self.n_components = n_components
        self.normalized = normalized

    def fit(self, X, y=None):
        if not isinstance(X, Graph):
            raise InvariantViolation("LaplacianEmbedding requires a Graph input")
        self.embedding_ = spectral_embed(X, self.n_components, normalized=self.normalized)
        d = apsp(X)
        self.stress_ = stress(self.embedding_, d)
        self.normalized_stress_ = self.stress_ / d.n**2
        self.n_features_in_ = X.n
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X, y).embedding_
