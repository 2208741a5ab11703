"""Covering nets of Euclidean balls and layout snapping.

The net is an axis-aligned grid with spacing 2*eps/sqrt(r): every point
of the radius-R ball lies within the half cell diagonal eps of a grid
point. Grid points just outside the ball are projected radially onto its
surface, which cannot increase their distance to any ball point, so the
covering radius is preserved. For r <= 3 and eps not too close to R this
construction also meets the (3R/eps)^r cardinality bound, asserted at
construction time.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation
from .stress import as_layout

__all__ = ["EpsNet", "build_net", "snap", "net_to_csv"]

# above this size nearest-point lookup switches from a linear scan to a
# cell-bucket index
_LINEAR_SCAN_LIMIT = 4096

_SIZE_BOUND_FACTOR = (3.0 - np.sqrt(3.0)) * 0.9


@dataclass(frozen=True)
class EpsNet:
    """Finite eps-cover of the origin-centered radius-R ball in r dims."""

    R: float
    eps: float
    r: int
    points: np.ndarray

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.points)


def build_net(R: float, eps: float, r: int) -> EpsNet:
    """Construct the grid net. ``eps >= R`` yields the singleton {origin}."""
    if R <= 0 or eps <= 0:
        raise ValueError(f"radius and covering radius must be positive, got R={R}, eps={eps}")
    if r < 1:
        raise ValueError(f"dimension must be at least 1, got {r}")
    if eps >= R:
        return EpsNet(R=R, eps=eps, r=r, points=np.zeros((1, r)))
    spacing = 2.0 * eps / np.sqrt(r)
    kmax = int(np.floor((R + eps) / spacing))
    axis = np.arange(-kmax, kmax + 1, dtype=np.float64) * spacing
    pts = np.array(list(itertools.product(axis, repeat=r)), dtype=np.float64)
    norms = np.linalg.norm(pts, axis=1)
    keep = norms <= R + eps + 1e-12
    pts, norms = pts[keep], norms[keep]
    outside = norms > R
    pts[outside] *= (R / norms[outside])[:, None]
    net = EpsNet(R=R, eps=eps, r=r, points=pts)
    if r <= 3 and eps <= R * _SIZE_BOUND_FACTOR:
        bound = (3.0 * R / eps) ** r
        if net.size > bound:
            raise InvariantViolation(
                f"net size {net.size} exceeds the ({3 * R / eps:.3g})^{r} = {bound:.3g} bound"
            )
    return net


def snap(x, net: EpsNet, return_n_projected: bool = False):
    """Replace each layout point by its nearest net point.

    Points outside the ball are first projected radially onto it; the
    number of such points is returned when ``return_n_projected`` is set.
    Ties go to the lowest net index. For a layout inside the ball and a
    metric with unit minimum distance, the stress increase is at most
    4 * eps * R * n^2.
    """
    x = as_layout(x)
    if x.shape[1] != net.r:
        raise InvariantViolation(f"layout dimension {x.shape[1]} does not match net dimension {net.r}")
    norms = np.linalg.norm(x, axis=1)
    outside = norms > net.R
    n_projected = int(outside.sum())
    if n_projected:
        x = x.copy()
        x[outside] *= (net.R / norms[outside])[:, None]
    if net.size <= _LINEAR_SCAN_LIMIT:
        idx = _nearest_linear(x, net.points)
    else:
        idx = _nearest_bucketed(x, net)
    snapped = net.points[idx]
    if return_n_projected:
        return snapped, n_projected
    return snapped


def _nearest_linear(x: np.ndarray, pts: np.ndarray) -> np.ndarray:
    d2 = ((x[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _nearest_bucketed(x: np.ndarray, net: EpsNet) -> np.ndarray:
    """Cell-bucket lookup: net points hashed by grid cell, queries probe
    all cells within the covering radius. Tie-break matches the linear
    scan (lowest index)."""
    spacing = 2.0 * net.eps / np.sqrt(net.r)
    buckets: dict[tuple, list[int]] = {}
    cells = np.floor(net.points / spacing + 0.5).astype(np.int64)
    for i, cell in enumerate(cells):
        buckets.setdefault(tuple(cell), []).append(i)
    reach = int(np.ceil(net.eps / spacing)) + 1
    offsets = list(itertools.product(range(-reach, reach + 1), repeat=net.r))
    out = np.empty(len(x), dtype=np.int64)
    for qi, q in enumerate(x):
        cell = tuple(np.floor(q / spacing + 0.5).astype(np.int64))
        cand: list[int] = []
        radius = reach
        while not cand:
            for off in itertools.product(range(-radius, radius + 1), repeat=net.r) if radius != reach else offsets:
                cand.extend(buckets.get(tuple(c + o for c, o in zip(cell, off)), ()))
            radius += 1
        cand = sorted(cand)
        d2 = ((net.points[cand] - q) ** 2).sum(axis=1)
        out[qi] = cand[int(np.argmin(d2))]
    return out


def net_to_csv(net: EpsNet) -> str:
    """Dump net points as CSV rows (debugging aid)."""
    return "\n".join(",".join(repr(float(v)) for v in p) for p in net.points) + "\n"
