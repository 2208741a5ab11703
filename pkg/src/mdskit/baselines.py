"""Comparison methods: full-batch gradient descent on the stress
objective and Laplacian spectral embedding."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .exceptions import InvariantViolation
from .graphs import DistanceMatrix, Graph
from .scheme import SchemeParams, TrialRecord, kk_scheme
from .stress import as_layout, stress, stress_gradient
from .structural import check_energy_bound

__all__ = [
    "GdParams",
    "gradient_descent",
    "gradient_descent_restarts",
    "spectral_embed",
    "greedy_then_grad",
]

_DENSE_EIG_LIMIT = 2000


@dataclass(frozen=True)
class GdParams:
    """Gradient-descent settings.

    ``init`` is either "random-gaussian" (seeded standard normal scaled
    by ``init_scale``, one tenth of the default ball radius 2.5) or a
    concrete layout array. The descent uses a fixed step and tracks the
    best iterate seen, since a fixed step can overshoot near minima.
    """

    lr: float = 0.005
    steps: int = 4000
    seed: int = 0
    init: object = "random-gaussian"
    init_scale: float = 0.25
    trace_every: int = 100

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")
        if self.steps < 0:
            raise ValueError(f"step count must be nonnegative, got {self.steps}")
        if self.trace_every < 1:
            raise ValueError(f"trace interval must be positive, got {self.trace_every}")


def _initial_layout(d: DistanceMatrix, r: int, p: GdParams) -> np.ndarray:
    if isinstance(p.init, str):
        if p.init != "random-gaussian":
            raise ValueError(f"unknown init {p.init!r}")
        rng = np.random.default_rng(p.seed)
        return rng.standard_normal((d.n, r)) * p.init_scale
    return as_layout(p.init, d.n).copy()


def gradient_descent(d: DistanceMatrix, r: int, p: GdParams) -> tuple[np.ndarray, list[tuple[int, float]]]:
    """Minimize stress by fixed-step full gradient descent.

    Returns the best iterate encountered and a (step, stress) trace
    sampled every ``trace_every`` steps. Aborts with a diagnostic if the
    iterates go non-finite.
    """
    if d.n < 2:
        raise InvariantViolation("gradient descent needs at least two points")
    x = _initial_layout(d, r, p)
    best = x.copy()
    best_e = stress(x, d)
    trace = [(0, best_e)]
    for step in range(1, p.steps + 1):
        x = x - p.lr * stress_gradient(x, d)
        if not np.all(np.isfinite(x)):
            raise InvariantViolation(
                f"gradient descent diverged to non-finite coordinates at step {step} "
                f"(lr={p.lr}); lower the learning rate"
            )
        e = stress(x, d)
        if e < best_e:
            best_e = e
            best = x.copy()
        if step % p.trace_every == 0 or step == p.steps:
            trace.append((step, e))
    check_energy_bound(best_e, d.n, d.diameter, r)
    return best, trace


def gradient_descent_restarts(
    d: DistanceMatrix, r: int, p: GdParams, trials: int
) -> tuple[np.ndarray, float, list[TrialRecord]]:
    """Best-of-``trials`` gradient descent with seeds seed, seed+1, ..."""
    if trials < 1:
        raise ValueError(f"trial count must be at least 1, got {trials}")
    best_layout, best_e = None, np.inf
    records = []
    for t in range(trials):
        pt = GdParams(lr=p.lr, steps=p.steps, seed=p.seed + t, init=p.init,
                      init_scale=p.init_scale, trace_every=p.trace_every)
        t_start = time.perf_counter()
        layout, _ = gradient_descent(d, r, pt)
        elapsed = time.perf_counter() - t_start
        e = stress(layout, d)
        records.append(TrialRecord(t, p.seed + t, e, e / d.n**2, elapsed))
        if e < best_e:
            best_e, best_layout = e, layout
    return best_layout, best_e, records


def spectral_embed(g: Graph, r: int, normalized: bool = False) -> np.ndarray:
    """Coordinates from the eigenvectors of the r smallest nonzero
    Laplacian eigenvalues (optionally of the degree-normalized
    Laplacian). Deterministic sign: each eigenvector's first entry of
    magnitude above 1e-12 is made positive.
    """
    if r > g.n - 1:
        raise ValueError(f"need r <= n-1 nontrivial eigenvectors, got r={r}, n={g.n}")
    a = g.adjacency().astype(np.float64)
    deg = a.sum(axis=1)
    if np.any(deg == 0) and g.n > 1:
        raise InvariantViolation(f"graph is disconnected: vertex {int(np.argmin(deg))} is isolated")
    if normalized:
        dis = 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0))
        lap = np.eye(g.n) - dis[:, None] * a * dis[None, :]
    else:
        lap = np.diag(deg) - a
    if g.n <= _DENSE_EIG_LIMIT:
        vals, vecs = np.linalg.eigh(lap)
    else:
        k = min(r + 2, g.n - 1)
        vals, vecs = scipy.sparse.linalg.eigsh(
            scipy.sparse.csr_matrix(lap), k=k, which="SA", tol=1e-10
        )
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    if vals[1] < 1e-9:
        raise InvariantViolation("graph is disconnected: repeated zero Laplacian eigenvalue")
    coords = vecs[:, 1 : r + 1].copy()
    for c in range(coords.shape[1]):
        col = coords[:, c]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            coords[:, c] = -col
    return coords


def greedy_then_grad(
    d: DistanceMatrix, r: int, scheme_params: SchemeParams, gd_params: GdParams
) -> np.ndarray:
    """Net-greedy layout refined by gradient descent from that start."""
    start = kk_scheme(d, scheme_params)
    refined, _ = gradient_descent(
        d, r,
        GdParams(lr=gd_params.lr, steps=gd_params.steps, seed=gd_params.seed,
                 init=start, init_scale=gd_params.init_scale,
                 trace_every=gd_params.trace_every),
    )
    return refined
