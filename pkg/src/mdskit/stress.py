"""The spring-energy stress objective and its exact gradient.

A layout is an (n, r) float array of point coordinates. The stress of a
layout x against a distance matrix d is

    sum over pairs i < j of (|x_i - x_j| / d_ij - 1)^2,

the squared relative deviation of realized from target distances. All
functions here are pure; evaluation is vectorized with a fixed
reduction, so repeated runs produce identical results.
"""
from __future__ import annotations

import numpy as np

from .exceptions import InvariantViolation
from .graphs import DistanceMatrix

__all__ = [
    "as_layout",
    "check_weights",
    "stress",
    "normalized_stress",
    "stress_subset",
    "stress_cross",
    "weighted_stress",
    "stress_gradient",
    "layout_to_json_dict",
    "layout_from_json_dict",
]


def as_layout(x, n: int | None = None) -> np.ndarray:
    """Validate and return a layout as a float64 (n, r) array.

    A 1-D input is treated as n points on a line.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[1] < 1:
        raise InvariantViolation(f"layout must be an (n, r) array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvariantViolation("layout contains non-finite coordinates")
    if n is not None and x.shape[0] != n:
        raise InvariantViolation(f"layout has {x.shape[0]} points but the metric has {n}")
    return x


def check_weights(mu, n: int) -> np.ndarray:
    """Validate a probability vector over the n vertices."""
    mu = np.asarray(mu, dtype=np.float64)
    if mu.shape != (n,):
        raise InvariantViolation(f"weights must have shape ({n},), got {mu.shape}")
    if mu.min() < 0:
        raise InvariantViolation("weights must be nonnegative")
    if abs(mu.sum() - 1.0) > 1e-12:
        raise InvariantViolation(f"weights must sum to 1, got {mu.sum()!r}")
    return mu


def _pairwise_norms(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def stress(x, d: DistanceMatrix) -> float:
    """Total stress of the layout against the metric."""
    x = as_layout(x, d.n)
    norms = _pairwise_norms(x)
    iu, ju = np.triu_indices(d.n, k=1)
    terms = (norms[iu, ju] / d.d[iu, ju] - 1.0) ** 2
    return float(terms.sum())


def normalized_stress(x, d: DistanceMatrix) -> float:
    """Stress divided by n^2, the scale used for cross-size comparison."""
    return stress(x, d) / d.n**2


def stress_subset(x, d: DistanceMatrix, S) -> float:
    """Stress restricted to pairs with both endpoints in S."""
    x = as_layout(x, d.n)
    idx = _as_index(S, d.n)
    if idx.size < 2:
        return 0.0
    sub = x[idx]
    norms = _pairwise_norms(sub)
    dsub = d.d[np.ix_(idx, idx)]
    iu, ju = np.triu_indices(idx.size, k=1)
    return float(((norms[iu, ju] / dsub[iu, ju] - 1.0) ** 2).sum())


def stress_cross(x, d: DistanceMatrix, S, T) -> float:
    """Stress over pairs with one endpoint in S and the other in T.

    S and T must be disjoint; every such pair is counted once.
    """
    x = as_layout(x, d.n)
    si = _as_index(S, d.n)
    ti = _as_index(T, d.n)
    if np.intersect1d(si, ti).size:
        raise InvariantViolation("cross-stress requires disjoint vertex sets")
    if si.size == 0 or ti.size == 0:
        return 0.0
    diff = x[si][:, None, :] - x[ti][None, :, :]
    norms = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return float(((norms / d.d[np.ix_(si, ti)] - 1.0) ** 2).sum())


def _as_index(S, n: int) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in S)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise InvariantViolation(f"vertex set out of range for n={n}")
    return idx


def weighted_stress(x, d: DistanceMatrix, mu) -> float:
    """Vertex-weighted stress n^2 * sum_{i<j} mu_i mu_j (|x_i-x_j|/d_ij - 1)^2.

    With uniform weights this equals the unweighted stress.
    """
    x = as_layout(x, d.n)
    mu = check_weights(mu, d.n)
    norms = _pairwise_norms(x)
    iu, ju = np.triu_indices(d.n, k=1)
    terms = mu[iu] * mu[ju] * (norms[iu, ju] / d.d[iu, ju] - 1.0) ** 2
    return float(d.n**2 * terms.sum())


def stress_gradient(x, d: DistanceMatrix) -> np.ndarray:
    """Exact gradient of the stress, shaped like the layout.

    dE/dx_i = sum_{j != i} (2/d_ij) (|x_i-x_j|/d_ij - 1) (x_i-x_j)/|x_i-x_j|.

    Coincident pairs use subgradient zero for the direction term, so no
    division by zero occurs and descent stays well-defined.
    """
    x = as_layout(x, d.n)
    diff = x[:, None, :] - x[None, :, :]
    norms = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    dd = d.d.copy()
    np.fill_diagonal(dd, 1.0)
    safe = np.where(norms > 0, norms, 1.0)
    coef = 2.0 / dd * (norms / dd - 1.0) / safe
    coef = np.where(norms > 0, coef, 0.0)
    np.fill_diagonal(coef, 0.0)
    return np.einsum("ij,ijk->ik", coef, diff)


def layout_to_json_dict(x, d: DistanceMatrix | None = None) -> dict:
    """Layout JSON payload; stress fields are filled when a metric is given."""
    x = as_layout(x)
    out = {"format": 1, "dim": int(x.shape[1]), "points": [[float(v) for v in row] for row in x]}
    if d is not None:
        e = stress(x, d)
        out["stress"] = e
        out["normalized_stress"] = e / d.n**2
    return out


def layout_from_json_dict(payload: dict) -> np.ndarray:
    pts = np.asarray(payload["points"], dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != int(payload["dim"]):
        raise InvariantViolation("layout JSON dim does not match points")
    return as_layout(pts)
