"""Net-discretized greedy stress minimization.

The pipeline: cover the radius-R ball with an eps1-net, pose stress
minimization as a dense max-CSP whose alphabet is the net (pair payoff
-(|p_a - p_b|/d_ij - 1)^2, negated so maximization minimizes stress),
and solve it with the greedy prefix solver. Discretization costs at most
4*eps1*R*n^2 stress and the greedy stage an additive term controlled by
the prefix size, so the result lands within an additive error of the
best layout inside the ball.

Translation and (in 2-D) rotation freedom are removed from the
brute-forced prefix by default: the first prefix point is pinned to the
net point nearest the origin and the second restricted to a closed
half-plane. On a discrete net this pruning is not exactly lossless, so
it can be disabled for oracle comparisons.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .csp import CspInstance, brute_force_csp, greedy_csp
from .exceptions import InvariantViolation, ResourceGuardError
from .graphs import DistanceMatrix
from .nets import EpsNet, build_net
from .stress import stress
from .structural import check_energy_bound

__all__ = [
    "SchemeParams",
    "TrialRecord",
    "kk_scheme",
    "run_trials",
    "run_with_restarts",
    "build_csp_instance",
    "net_restricted_optimum",
    "trials_to_csv",
]

_BRANCH_GUARD = 10**7


@dataclass(frozen=True)
class SchemeParams:
    """Knobs for the net-greedy scheme.

    eps2 is the nominal accuracy of the greedy stage; the theory maps it
    to a prefix size with an unspecified constant, so ``t0`` is always
    passed explicitly (default 3) and eps2 is recorded for reporting
    only. ``trials`` controls the restart driver.
    """

    r: int
    R: float
    eps1: float
    t0: int = 3
    eps2: float | None = None
    seed: int = 0
    trials: int = 1
    symmetry_reduction: bool = True

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"dimension must be at least 1, got {self.r}")
        if not (self.R > self.eps1 > 0):
            raise ValueError(f"need R > eps1 > 0, got R={self.R}, eps1={self.eps1}")
        if self.t0 < 0:
            raise ValueError(f"prefix size must be nonnegative, got {self.t0}")
        if self.trials < 1:
            raise ValueError(f"trial count must be at least 1, got {self.trials}")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    stress: float
    normalized_stress: float
    seconds: float


def payoff_bound(R: float) -> float:
    """Declared per-pair payoff bound M = (2R+1)^2: net points are at
    most 2R apart and target distances at least 1."""
    return (2.0 * R + 1.0) ** 2


def build_csp_instance(d: DistanceMatrix, net: EpsNet) -> CspInstance:
    """Dense CSP over the net alphabet whose maximum is minimum stress.

    Built in place: the (n, n, sigma, sigma) table is the dominant
    allocation, about n^2 * sigma^2 * 8 bytes.
    """
    nd = net.points[:, None, :] - net.points[None, :, :]
    net_dist = np.sqrt(np.einsum("ijk,ijk->ij", nd, nd))
    tables = np.empty((d.n, d.n, net.size, net.size))
    np.divide(net_dist[None, None, :, :], np.where(d.d > 0, d.d, 1.0)[:, :, None, None], out=tables)
    tables -= 1.0
    np.square(tables, out=tables)
    np.negative(tables, out=tables)
    idx = np.arange(d.n)
    tables[idx, idx] = 0.0
    return CspInstance(n=d.n, sigma=net.size, tables=tables, M=payoff_bound(net.R))


def _prefix_restrictions(net: EpsNet, p: SchemeParams) -> list[np.ndarray] | None:
    if not p.symmetry_reduction or p.t0 < 1:
        return None
    norms = np.linalg.norm(net.points, axis=1)
    choices = [np.array([int(np.argmin(norms))], dtype=np.int64)]
    if p.r == 2 and p.t0 >= 2:
        half = np.flatnonzero(net.points[:, 1] >= -1e-12)
        choices.append(half.astype(np.int64))
    return choices


def _check_metric(d: DistanceMatrix) -> None:
    if d.n < 2:
        raise InvariantViolation("the scheme needs at least two points")
    if abs(d.min_distance - 1.0) > 1e-9:
        raise InvariantViolation(
            f"minimum distance must be 1 (got {d.min_distance}); "
            "use DistanceMatrix.rescaled_to_unit_min() first"
        )


def run_trials(d: DistanceMatrix, p: SchemeParams) -> tuple[list[np.ndarray], list[TrialRecord]]:
    """Run ``p.trials`` scheme trials with seeds seed, seed+1, ...

    The net and payoff tables are built once and shared read-only across
    trials (only the greedy stage is randomized). Returns the per-trial
    layouts and records.
    """
    _check_metric(d)
    net = build_net(p.R, p.eps1, p.r)
    t0 = min(p.t0, d.n)
    choices = _prefix_restrictions(net, p)
    branches = 1.0
    for t in range(t0):
        if choices is not None and t < len(choices):
            branches *= len(choices[t])
        else:
            branches *= net.size
    if branches > _BRANCH_GUARD:
        raise ResourceGuardError(
            f"prefix enumeration would visit {branches:.3g} branches (guard {_BRANCH_GUARD}); "
            "reduce t0 or coarsen the net"
        )
    inst = build_csp_instance(d, net)
    layouts, records = [], []
    for t in range(p.trials):
        t_start = time.perf_counter()
        assignment, _ = greedy_csp(inst, t0=t0, seed=p.seed + t, prefix_choices=choices)
        layout = net.points[assignment]
        e = stress(layout, d)
        check_energy_bound(e, d.n, d.diameter, p.r)
        layouts.append(layout)
        records.append(TrialRecord(t, p.seed + t, e, e / d.n**2, time.perf_counter() - t_start))
    return layouts, records


def kk_scheme(d: DistanceMatrix, p: SchemeParams) -> np.ndarray:
    """One run of the scheme; returns the layout (n, r), points in the ball."""
    single = SchemeParams(r=p.r, R=p.R, eps1=p.eps1, t0=p.t0, eps2=p.eps2,
                          seed=p.seed, trials=1, symmetry_reduction=p.symmetry_reduction)
    layouts, _ = run_trials(d, single)
    return layouts[0]


def run_with_restarts(d: DistanceMatrix, p: SchemeParams) -> tuple[np.ndarray, float, list[TrialRecord]]:
    """Run the scheme ``p.trials`` times; return the best layout by
    stress plus the full trial record."""
    layouts, records = run_trials(d, p)
    best = int(np.argmin([rec.stress for rec in records]))
    return layouts[best], records[best].stress, records


def net_restricted_optimum(d: DistanceMatrix, net: EpsNet) -> tuple[np.ndarray, float]:
    """Exhaustive minimum-stress layout with all points on the net.

    Independent oracle for the greedy scheme; guarded to small
    instances by the brute-force enumeration limit.
    """
    inst = build_csp_instance(d, net)
    assignment, _ = brute_force_csp(inst)
    layout = net.points[assignment]
    return layout, stress(layout, d)


def trials_to_csv(records: list[TrialRecord]) -> str:
    lines = ["trial,seed,stress,normalized_stress,seconds"]
    for rec in records:
        lines.append(
            f"{rec.trial},{rec.seed},{rec.stress!r},{rec.normalized_stress!r},{rec.seconds:.6f}"
        )
    return "\n".join(lines) + "\n"
