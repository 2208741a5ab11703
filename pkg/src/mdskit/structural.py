"""Closed-form structural quantities of optimal layouts, used both as
diagnostics and as impossibility checks.

For a metric of diameter D on n points embedded in r dimensions:

* every layout of a low-diameter instance (D at most (n/2)^(1/r)/10)
  has stress at least n^2 / (81 (10 D)^r);
* any globally optimal layout has Euclidean diameter at most
  8D + 4D log2 log2 2D;
* in an optimal layout, few points sit far from the marginal median:
  at most 2 r n C^(-sqrt(2)^k) lie at L-infinity distance (C+k)D or more.

The first bound holds unconditionally, so a "violation" certifies an
evaluation bug; the latter two hold for global optima only, so a
violation certifies that a candidate layout is not globally optimal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvariantViolation
from .graphs import DistanceMatrix
from .stress import as_layout, stress

__all__ = [
    "energy_lower_bound",
    "check_energy_bound",
    "diameter_upper_bound",
    "layout_diameter",
    "check_diameter",
    "marginal_median",
    "concentration_profile",
    "clique_optimal",
    "clique_metric",
    "StructuralReport",
    "structural_report",
]


def energy_lower_bound(n: int, D: float, r: int) -> float | None:
    """Universal stress lower bound n^2/(81 (10D)^r), or None when the
    low-diameter hypothesis D <= (n/2)^(1/r)/10 fails."""
    if D <= 0 or n < 2:
        return None
    if D > (n / 2.0) ** (1.0 / r) / 10.0:
        return None
    return n**2 / (81.0 * (10.0 * D) ** r)


def check_energy_bound(value: float, n: int, D: float, r: int) -> None:
    """Raise if a reported stress undercuts the universal lower bound.

    The bound holds for every layout, so failing it means the stress
    was computed incorrectly.
    """
    bound = energy_lower_bound(n, D, r)
    if bound is not None and value < bound * (1.0 - 1e-9):
        raise InvariantViolation(
            f"stress {value} below the universal lower bound {bound} (n={n}, D={D}, r={r})"
        )


def diameter_upper_bound(D: float) -> float:
    """Diameter ceiling 8D + 4D log2 log2 2D for optimal layouts.

    The log-log term is clamped at zero (it is exactly zero at D=1).
    """
    if D < 1:
        raise ValueError(f"metric diameter must be at least 1, got {D}")
    return 8.0 * D + 4.0 * D * max(0.0, math.log2(math.log2(2.0 * D)))


def layout_diameter(x) -> float:
    """Largest pairwise Euclidean distance in the layout."""
    x = as_layout(x)
    if len(x) < 2:
        raise ValueError("layout diameter needs at least two points")
    diff = x[:, None, :] - x[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).max())


def check_diameter(x, D: float) -> bool:
    """True when the layout diameter respects the optimal-layout ceiling.

    False certifies the layout is not a global optimum; it is a
    diagnostic, not an error.
    """
    return layout_diameter(x) <= diameter_upper_bound(D)


def marginal_median(x) -> np.ndarray:
    """Per-coordinate median; even counts average the two middle values."""
    x = as_layout(x)
    return np.median(x, axis=0)


def concentration_profile(x, D: float, C: float, k_max: int) -> list[tuple[int, int, float]]:
    """Rows (k, observed count, bound) for the far-point concentration
    estimate around the marginal median.

    observed counts layout points with L-infinity distance >= (C+k)*D
    from the median; bound is 2 r n C^(-sqrt(2)^k). The bound is proved
    for globally optimal layouts, so this is diagnostic only.
    """
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    x = as_layout(x)
    n, r = x.shape
    med = marginal_median(x)
    linf = np.abs(x - med).max(axis=1)
    rows = []
    for k in range(1, k_max + 1):
        observed = int((linf >= (C + k) * D - 1e-12).sum())
        bound = 2.0 * r * n * C ** (-math.sqrt(2.0) ** k)
        rows.append((k, observed, bound))
    return rows


def clique_optimal(n: int) -> tuple[np.ndarray, float]:
    """Optimal 1-D layout of the n-clique and its stress.

    Points sit at (2i - (n+1))/n for i = 1..n; the stress is exactly
    (n-1)(n-2)/6.
    """
    if n < 2:
        raise ValueError(f"clique layout needs at least 2 vertices, got {n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    layout = ((2 * i - (n + 1)) / n).reshape(-1, 1)
    return layout, (n - 1) * (n - 2) / 6.0


def clique_metric(n: int) -> DistanceMatrix:
    """All-ones metric of the complete graph on n vertices."""
    d = np.ones((n, n)) - np.eye(n)
    return DistanceMatrix(d)


@dataclass
class StructuralReport:
    """Structural diagnostics of a layout against its metric."""

    n: int
    r: int
    diameter: float
    stress: float
    normalized_stress: float
    energy_lower_bound: float | None
    energy_bound_satisfied: bool | None
    layout_diameter: float
    diameter_bound: float
    diameter_bound_satisfied: bool
    diameter_ratio: float
    concentration_C: float | None = None
    concentration_rows: list[tuple[int, int, float]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "format": 1,
            "n": self.n,
            "r": self.r,
            "diameter": self.diameter,
            "stress": self.stress,
            "normalized_stress": self.normalized_stress,
            "energy_lower_bound": self.energy_lower_bound,
            "energy_bound_satisfied": self.energy_bound_satisfied,
            "layout_diameter": self.layout_diameter,
            "diameter_bound": self.diameter_bound,
            "diameter_bound_satisfied": self.diameter_bound_satisfied,
            "diameter_ratio": self.diameter_ratio,
            "concentration_C": self.concentration_C,
            "concentration": [
                {"k": k, "observed": obs, "bound": bound} for k, obs, bound in self.concentration_rows
            ],
        }


def structural_report(
    x,
    d: DistanceMatrix,
    concentration: tuple[float, int] | None = None,
) -> StructuralReport:
    """Assemble the full diagnostic report for a layout.

    ``concentration`` optionally gives (C, k_max) for the far-point
    profile. The layout-diameter/metric-diameter ratio is reported (a
    conjectured ceiling of 2 exists for optima) but never asserted.
    """
    x = as_layout(x, d.n)
    n, r = x.shape
    D = d.diameter
    e = stress(x, d)
    lo = energy_lower_bound(n, D, r)
    ld = layout_diameter(x) if n >= 2 else 0.0
    db = diameter_upper_bound(max(D, 1.0))
    C = None
    rows = []
    if concentration is not None:
        C, k_max = concentration
        rows = concentration_profile(x, D, C, int(k_max))
    return StructuralReport(
        n=n,
        r=r,
        diameter=D,
        stress=e,
        normalized_stress=e / n**2,
        energy_lower_bound=lo,
        energy_bound_satisfied=(e >= lo * (1 - 1e-9)) if lo is not None else None,
        layout_diameter=ld,
        diameter_bound=db,
        diameter_bound_satisfied=ld <= db,
        diameter_ratio=ld / D if D > 0 else float("inf"),
        concentration_C=C,
        concentration_rows=rows,
    )
