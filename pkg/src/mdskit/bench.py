"""Benchmark suites comparing the embedding methods on the reference
graphs, with restart protocol, CSV summary, and per-method SVG plots."""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import GdParams, gradient_descent, gradient_descent_restarts, spectral_embed
from .graphs import (
    Graph,
    apsp,
    davis_southern_women,
    gen_clique_path,
    gen_sbm,
    gen_watts_strogatz,
)
from .plotting import layout_svg
from .scheme import SchemeParams, run_trials, run_with_restarts
from .stress import stress
from .structural import check_energy_bound

__all__ = ["SuiteConfig", "MethodResult", "SUITES", "run_bench", "results_to_csv"]

SBM_PROBS = [[0.09, 0.03, 0.02], [0.03, 0.15, 0.04], [0.02, 0.04, 0.10]]
SBM_SIZES = [35, 35, 50]


@dataclass(frozen=True)
class SuiteConfig:
    name: str
    r: int
    radius: float
    eps1: float
    t0: int
    lr: float = 0.005
    steps: int = 4000
    normalized_laplacian: bool = False
    draw_edges: bool = True


SUITES = {
    "davis": SuiteConfig(name="davis", r=2, radius=2.5, eps1=0.4, t0=3),
    "ws": SuiteConfig(name="ws", r=2, radius=4.0, eps1=0.8, t0=3),
    "sbm": SuiteConfig(
        name="sbm", r=2, radius=4.0, eps1=0.8, t0=3, normalized_laplacian=True, draw_edges=False
    ),
    "clique-path": SuiteConfig(name="clique-path", r=1, radius=3.0, eps1=0.25, t0=3),
}


def suite_graph(name: str, seed: int) -> Graph:
    if name == "davis":
        return davis_southern_women()
    if name == "ws":
        return gen_watts_strogatz(50, 4, 0.3, seed)
    if name == "sbm":
        return gen_sbm(SBM_SIZES, SBM_PROBS, seed)
    if name == "clique-path":
        return gen_clique_path(3, 8)
    raise ValueError(f"unknown suite {name!r}")


@dataclass
class MethodResult:
    method: str
    trials: int
    mean_norm_stress: float
    best_norm_stress: float
    seconds: float
    layout: np.ndarray


def run_bench(
    suite: str,
    seed: int = 0,
    trials: int = 10,
    out_dir: str | Path | None = None,
    steps: int | None = None,
) -> list[MethodResult]:
    """Run greedy, greedy+grad, grad, and spectral on a suite.

    Each randomized method is restarted ``trials`` times with seeds
    seed, seed+1, ...; the summary reports the mean and best normalized
    stress and the total wall time. ``steps`` overrides the
    gradient-step budget (smoke testing). When ``out_dir`` is given,
    results.csv and one SVG per method are written there.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    cfg = SUITES[suite]
    g = suite_graph(suite, seed)
    d = apsp(g)
    n2 = d.n**2
    gd_steps = cfg.steps if steps is None else steps
    results = []

    t0 = time.perf_counter()
    sp = SchemeParams(r=cfg.r, R=cfg.radius, eps1=cfg.eps1, t0=cfg.t0, seed=seed, trials=trials)
    greedy_layout, greedy_best, greedy_records = run_with_restarts(d, sp)
    results.append(MethodResult(
        "greedy", trials,
        float(np.mean([rec.normalized_stress for rec in greedy_records])),
        greedy_best / n2, time.perf_counter() - t0, greedy_layout,
    ))

    t0 = time.perf_counter()
    combo_stresses = []
    combo_best, combo_best_e = None, np.inf
    starts, _ = run_trials(d, sp)
    for t, start in enumerate(starts):
        layout, _ = gradient_descent(
            d, cfg.r, GdParams(lr=cfg.lr, steps=gd_steps, seed=seed + t, init=start)
        )
        e = stress(layout, d)
        combo_stresses.append(e / n2)
        if e < combo_best_e:
            combo_best_e, combo_best = e, layout
    results.append(MethodResult(
        "greedy+grad", trials, float(np.mean(combo_stresses)),
        combo_best_e / n2, time.perf_counter() - t0, combo_best,
    ))

    t0 = time.perf_counter()
    gd_layout, gd_best, gd_records = gradient_descent_restarts(
        d, cfg.r, GdParams(lr=cfg.lr, steps=gd_steps, seed=seed), trials
    )
    results.append(MethodResult(
        "grad", trials,
        float(np.mean([rec.normalized_stress for rec in gd_records])),
        gd_best / n2, time.perf_counter() - t0, gd_layout,
    ))

    t0 = time.perf_counter()
    spec_layout = spectral_embed(g, min(cfg.r, g.n - 1), normalized=cfg.normalized_laplacian)
    spec_norm = stress(spec_layout, d) / n2
    check_energy_bound(spec_norm * n2, d.n, d.diameter, cfg.r)
    results.append(MethodResult(
        "spectral", 1, spec_norm, spec_norm, time.perf_counter() - t0, spec_layout,
    ))

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(results_to_csv(results))
        for res in results:
            svg = layout_svg(
                res.layout,
                edges=g.sorted_edges(),
                labels=g.labels,
                title=f"{suite}: {res.method}",
                subtitle=f"normalized stress {res.best_norm_stress:.4f}",
                draw_edges=cfg.draw_edges,
            )
            (out / f"{res.method.replace('+', '_')}.svg").write_text(svg)
    return results


def results_to_csv(results: list[MethodResult]) -> str:
    lines = ["method,trials,mean_norm_stress,best_norm_stress,seconds"]
    for res in results:
        lines.append(
            f"{res.method},{res.trials},{res.mean_norm_stress!r},{res.best_norm_stress!r},{res.seconds:.3f}"
        )
    return "\n".join(lines) + "\n"
