"""Command-line surface: generate graphs, embed them, check structural
bounds, drive the reduction-gadget lab, and run benchmark suites.

Exit codes: 0 success, 2 parse/parameter error, 3 invariant violation,
4 resource guard tripped. Set MDS_THREADS to cap BLAS parallelism (use
1 for bit-reproducible runs across machines).
"""
import os


def _configure_threads():
    v = os.environ.get("MDS_THREADS")
    if v:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, v)


_configure_threads()

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import GdParams, gradient_descent, gradient_descent_restarts, spectral_embed
from .bench import SBM_PROBS, SUITES, run_bench
from .exceptions import InvariantViolation, ParseError, ResourceGuardError
from .graphs import (
    apsp,
    davis_southern_women,
    format_edge_list,
    format_labels,
    gen_clique_path,
    gen_sbm,
    gen_watts_strogatz,
    parse_distance_csv,
    parse_edge_list,
    parse_labels,
)
from .hardness import (
    GadgetParams,
    build_reduction_graph,
    format_sat,
    gap_probe,
    parse_sat,
    regularity_failures,
    regularize,
)
from .plotting import layout_svg
from .scheme import SchemeParams, run_with_restarts, trials_to_csv
from .stress import layout_from_json_dict, layout_to_json_dict, stress
from .structural import structural_report

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_GUARD = 4


def _write_or_print(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_graph(path: str):
    return parse_edge_list(Path(path).read_text())


def _load_metric(path: str):
    if path.endswith(".csv"):
        return None, parse_distance_csv(Path(path).read_text()).rescaled_to_unit_min()
    g = _load_graph(path)
    return g, apsp(g)


def cmd_gen(args) -> int:
    if args.family == "watts-strogatz":
        g = gen_watts_strogatz(args.n, args.k, args.beta, args.seed)
    elif args.family == "sbm":
        sizes = [int(s) for s in args.sizes.split(",")]
        if args.probs:
            rows = [
                [float(tok) for tok in line.split(",")]
                for line in Path(args.probs).read_text().strip().splitlines()
            ]
        else:
            rows = SBM_PROBS
        g = gen_sbm(sizes, rows, args.seed)
    elif args.family == "clique-path":
        g = gen_clique_path(args.d, args.c)
    elif args.family == "davis":
        g = davis_southern_women()
    else:
        raise ParseError(f"unknown graph family {args.family!r}")
    _write_or_print(format_edge_list(g), args.out)
    if g.labels is not None and args.out:
        Path(args.out + ".labels").write_text(format_labels(g.labels))
    return EXIT_OK


_GREEDY_FLAGS = ("radius", "eps1", "t0")
_GRAD_FLAGS = ("lr", "steps")


def _validate_embed_flags(args):
    given = {name for name in _GREEDY_FLAGS + _GRAD_FLAGS + ("trials",)
             if getattr(args, name) is not None}
    allowed = {
        "greedy": set(_GREEDY_FLAGS) | {"trials"},
        "grad": set(_GRAD_FLAGS) | {"trials"},
        "greedy+grad": set(_GREEDY_FLAGS) | set(_GRAD_FLAGS) | {"trials"},
        "spectral": set(),
    }[args.algo]
    bad = given - allowed
    if bad:
        raise ParseError(f"flags not valid with --algo {args.algo}: " + ", ".join(sorted(f"--{b}" for b in bad)))


def cmd_embed(args) -> int:
    _validate_embed_flags(args)
    g, d = _load_metric(args.input)
    trials = args.trials if args.trials is not None else 1
    radius = args.radius if args.radius is not None else 2.5
    eps1 = args.eps1 if args.eps1 is not None else 0.5
    t0 = args.t0 if args.t0 is not None else 3
    lr = args.lr if args.lr is not None else 0.005
    steps = args.steps if args.steps is not None else 4000

    trial_records = []
    if args.algo == "greedy":
        sp = SchemeParams(r=args.dim, R=radius, eps1=eps1, t0=t0, seed=args.seed, trials=trials)
        layout, _, trial_records = run_with_restarts(d, sp)
    elif args.algo == "grad":
        layout, _, trial_records = gradient_descent_restarts(
            d, args.dim, GdParams(lr=lr, steps=steps, seed=args.seed), trials)
    elif args.algo == "greedy+grad":
        best, best_e = None, np.inf
        for t in range(trials):
            start, _, _ = run_with_restarts(
                d, SchemeParams(r=args.dim, R=radius, eps1=eps1, t0=t0, seed=args.seed + t, trials=1))
            refined, _ = gradient_descent(
                d, args.dim, GdParams(lr=lr, steps=steps, seed=args.seed + t, init=start))
            e = stress(refined, d)
            if e < best_e:
                best, best_e = refined, e
        layout = best
    elif args.algo == "spectral":
        if g is None:
            raise ParseError("spectral embedding needs a graph input, not a distance CSV")
        layout = spectral_embed(g, args.dim, normalized=args.normalized_laplacian)
    else:
        raise ParseError(f"unknown algorithm {args.algo!r}")

    payload = layout_to_json_dict(layout, d)
    text = json.dumps(payload, indent=2) + "\n"
    _write_or_print(text, args.out)
    if args.out:
        print(f"normalized stress: {payload['normalized_stress']!r}")
    if args.trials_csv and trial_records:
        Path(args.trials_csv).write_text(trials_to_csv(trial_records))
    if args.svg:
        labels = None
        if args.labels:
            lab = parse_labels(Path(args.labels).read_text())
            labels = [lab.get(i, 0) for i in range(d.n)]
        elif g is not None and g.labels is not None:
            labels = list(g.labels)
        Path(args.svg).write_text(layout_svg(
            layout,
            edges=g.sorted_edges() if g is not None else None,
            labels=labels,
            title=f"{Path(args.input).stem}: {args.algo}",
            subtitle=f"normalized stress {payload['normalized_stress']:.4f}",
            draw_edges=not args.no_edges,
        ))
    return EXIT_OK


def cmd_check(args) -> int:
    _, d = _load_metric(args.input)
    payload = json.loads(Path(args.layout).read_text())
    layout = layout_from_json_dict(payload)
    conc = None
    if args.concentration:
        c_str, k_str = args.concentration.split(",")
        conc = (float(c_str), int(k_str))
    report = structural_report(layout, d, concentration=conc)
    _write_or_print(json.dumps(report.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def _gadget_params(args) -> GadgetParams:
    return GadgetParams(Nv=args.nv, Nt=args.nt, Nc=args.nc)


def cmd_gadget(args) -> int:
    inst = parse_sat(Path(args.sat).read_text())
    if args.action == "regularize":
        _write_or_print(format_sat(regularize(inst)), args.out)
        return EXIT_OK
    params = _gadget_params(args)
    if args.action == "build":
        gadget = build_reduction_graph(inst, params)
        _write_or_print(format_edge_list(gadget.graph), args.out)
        if args.out:
            Path(args.out + ".labels").write_text(format_labels(gadget.graph.labels))
        return EXIT_OK
    if args.action == "verify":
        if not args.edges:
            raise ParseError("--edges is required for gadget verify")
        problems = list(regularity_failures(inst))
        expected = build_reduction_graph(inst, params)
        actual = parse_edge_list(Path(args.edges).read_text())
        if actual.n != expected.n:
            problems.append(f"vertex count {actual.n} != expected {expected.n}")
        else:
            missing = expected.graph.edges - actual.edges
            extra = actual.edges - expected.graph.edges
            if missing:
                problems.append(f"missing edges (e.g. {sorted(missing)[0]})")
            if extra:
                problems.append(f"unexpected non-gadget edges (e.g. {sorted(extra)[0]})")
            diam = apsp(actual).diameter
            if diam != 2:
                problems.append(f"graph diameter {diam} != 2")
        if problems:
            raise InvariantViolation("gadget verification failed: " + "; ".join(problems))
        print("gadget verified: diameter 2, edge set matches, instance regular")
        return EXIT_OK
    if args.action == "probe":
        report = gap_probe(inst, params, trials=args.trials, seed=args.seed)
        _write_or_print(json.dumps(report.to_json_dict(), indent=2) + "\n", args.out)
        return EXIT_OK
    raise ParseError(f"unknown gadget action {args.action!r}")


def cmd_bench(args) -> int:
    out = Path(args.out)
    if (out / "results.csv").exists() and not args.force:
        raise InvariantViolation(f"{out}/results.csv already exists; pass --force to overwrite")
    results = run_bench(args.suite, seed=args.seed, trials=args.trials, out_dir=out, steps=args.steps)
    for res in results:
        print(f"{res.method}: mean {res.mean_norm_stress:.4f} best {res.best_norm_stress:.4f} "
              f"({res.seconds:.1f}s, {res.trials} trials)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mdskit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph and write an edge list")
    gen.add_argument("family", choices=["watts-strogatz", "sbm", "clique-path", "davis"])
    gen.add_argument("--n", type=int, default=50)
    gen.add_argument("--k", type=int, default=4)
    gen.add_argument("--beta", type=float, default=0.3)
    gen.add_argument("--sizes", type=str, default="35,35,50")
    gen.add_argument("--probs", type=str, default=None, help="CSV file of block probabilities")
    gen.add_argument("--d", type=int, default=2, help="clique-path length")
    gen.add_argument("--c", type=int, default=4, help="clique-path clique size")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=str, default=None)
    gen.set_defaults(func=cmd_gen)

    emb = sub.add_parser("embed", help="embed a graph or distance CSV")
    emb.add_argument("--input", required=True)
    emb.add_argument("--dim", type=int, default=2)
    emb.add_argument("--algo", required=True, choices=["greedy", "grad", "greedy+grad", "spectral"])
    emb.add_argument("--radius", type=float, default=None)
    emb.add_argument("--eps1", type=float, default=None)
    emb.add_argument("--t0", type=int, default=None)
    emb.add_argument("--lr", type=float, default=None)
    emb.add_argument("--steps", type=int, default=None)
    emb.add_argument("--trials", type=int, default=None)
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--normalized-laplacian", action="store_true")
    emb.add_argument("--out", type=str, default=None)
    emb.add_argument("--trials-csv", type=str, default=None)
    emb.add_argument("--svg", type=str, default=None)
    emb.add_argument("--labels", type=str, default=None)
    emb.add_argument("--no-edges", action="store_true")
    emb.set_defaults(func=cmd_embed)

    chk = sub.add_parser("check", help="structural diagnostics of a layout")
    chk.add_argument("--input", required=True)
    chk.add_argument("--layout", required=True)
    chk.add_argument("--concentration", type=str, default=None, metavar="C,KMAX")
    chk.add_argument("--out", type=str, default=None)
    chk.set_defaults(func=cmd_check)

    gad = sub.add_parser("gadget", help="reduction-gadget lab")
    gad.add_argument("action", choices=["regularize", "build", "verify", "probe"])
    gad.add_argument("--sat", required=True)
    gad.add_argument("--nv", type=int, default=16)
    gad.add_argument("--nt", type=int, default=4)
    gad.add_argument("--nc", type=int, default=2)
    gad.add_argument("--edges", type=str, default=None, help="edge list to verify")
    gad.add_argument("--trials", type=int, default=16)
    gad.add_argument("--seed", type=int, default=0)
    gad.add_argument("--out", type=str, default=None)
    gad.set_defaults(func=cmd_gadget)

    ben = sub.add_parser("bench", help="run a comparison suite")
    ben.add_argument("--suite", required=True, choices=sorted(SUITES))
    ben.add_argument("--out", required=True)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--trials", type=int, default=10)
    ben.add_argument("--steps", type=int, default=None, help="override gradient steps")
    ben.add_argument("--force", action="store_true")
    ben.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
