"""Undirected graphs, metric matrices, generators, and file formats.

Vertices are 0-based integers everywhere. Graphs are simple (no
self-loops, no duplicate edges) and immutable after construction.
"""
from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .exceptions import InvariantViolation, ParseError, ResourceGuardError

__all__ = [
    "Graph",
    "DistanceMatrix",
    "parse_edge_list",
    "format_edge_list",
    "parse_distance_csv",
    "apsp",
    "gen_watts_strogatz",
    "gen_sbm",
    "gen_clique_path",
    "clique_path_integer_layout",
    "davis_southern_women",
    "parse_labels",
    "format_labels",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges are stored as a frozenset of ``(u, v)`` pairs with ``u < v``.
    ``labels`` optionally carries a per-vertex integer tag (community,
    role, ...) used for plot coloring; it plays no structural role.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) is not allowed")
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels length must equal vertex count")

    @staticmethod
    def from_edges(n, edges, labels=None):
        """Build a graph from an iterable of pairs, canonicalizing and
        deduplicating regardless of input order/orientation."""
        canon = frozenset((u, v) if u < v else (v, u) for u, v in edges)
        return Graph(n=n, edges=canon, labels=tuple(labels) if labels is not None else None)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


class DistanceMatrix:
    """Dense symmetric matrix of pairwise metric distances.

    Off-diagonal entries are at least 1 (the canonical normalization:
    any metric can be rescaled so the minimum distance is one). The
    underlying array is made read-only; ``check_triangle`` validates the
    triangle inequality on demand (O(n^3)).
    """

    def __init__(self, d, validate: bool = True):
        d = np.asarray(d, dtype=np.float64)
        if validate:
            if d.ndim != 2 or d.shape[0] != d.shape[1]:
                raise InvariantViolation(f"distance matrix must be square, got shape {d.shape}")
            if not np.all(np.isfinite(d)):
                raise InvariantViolation("distance matrix contains non-finite entries")
            if not np.allclose(d, d.T, rtol=0, atol=1e-9):
                i, j = np.unravel_index(np.argmax(np.abs(d - d.T)), d.shape)
                raise InvariantViolation(f"asymmetric distances: d[{i},{j}]={d[i, j]} vs d[{j},{i}]={d[j, i]}")
            if np.any(np.abs(np.diag(d)) > 1e-12):
                k = int(np.argmax(np.abs(np.diag(d))))
                raise InvariantViolation(f"nonzero diagonal entry d[{k},{k}]={d[k, k]}")
            off = d[~np.eye(d.shape[0], dtype=bool)]
            if off.size and off.min() < 1.0 - 1e-9:
                raise InvariantViolation(
                    f"minimum off-diagonal distance {off.min()} < 1; rescale the metric first"
                )
            d = (d + d.T) / 2.0
            np.fill_diagonal(d, 0.0)
        d.setflags(write=False)
        self._d = d

    @property
    def n(self) -> int:
        return self._d.shape[0]

    @property
    def d(self) -> np.ndarray:
        return self._d

    @property
    def diameter(self) -> float:
        if self.n < 2:
            return 0.0
        return float(self._d.max())

    @property
    def min_distance(self) -> float:
        """Smallest off-diagonal entry (1 for graph metrics)."""
        if self.n < 2:
            return 0.0
        return float(self._d[~np.eye(self.n, dtype=bool)].min())

    def __getitem__(self, idx):
        return self._d[idx]

    def check_triangle(self) -> None:
        """Raise InvariantViolation naming a violating triple if the
        triangle inequality fails anywhere."""
        d = self._d
        for k in range(self.n):
            slack = d[:, k, None] + d[None, k, :] - d
            if slack.min() < -1e-9:
                i, j = np.unravel_index(np.argmin(slack), slack.shape)
                raise InvariantViolation(
                    f"triangle inequality violated: d[{i},{j}]={d[i, j]} > "
                    f"d[{i},{k}]+d[{k},{j}]={d[i, k] + d[k, j]}"
                )

    def rescaled_to_unit_min(self) -> "DistanceMatrix":
        """Divide by the minimum off-diagonal distance so it becomes 1."""
        m = self.min_distance
        if m <= 0:
            raise InvariantViolation("cannot rescale a degenerate metric")
        if abs(m - 1.0) < 1e-12:
            return self
        return DistanceMatrix(self._d / m)


def parse_edge_list(text: str) -> Graph:
    """Parse the plain edge-list format.

    Lines hold two whitespace-separated vertex indices. Blank lines and
    ``#`` comments are ignored. An optional first data line ``n <count>``
    fixes the vertex count; otherwise it is max index + 1. Duplicate
    edges (in either orientation) collapse; self-loops are rejected.
    """
    n_declared = None
    edges = []
    max_idx = -1
    saw_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not saw_data and tok[0] == "n":
            if len(tok) != 2:
                raise ParseError(f"malformed header at line {lineno}: {raw!r}")
            try:
                n_declared = int(tok[1])
            except ValueError:
                raise ParseError(f"malformed vertex count at line {lineno}: {tok[1]!r}") from None
            if n_declared <= 0:
                raise ParseError(f"vertex count must be positive at line {lineno}")
            saw_data = True
            continue
        saw_data = True
        if len(tok) != 2:
            raise ParseError(f"expected two vertex indices at line {lineno}: {raw!r}")
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise ParseError(f"malformed token at line {lineno}: {raw!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex index at line {lineno}: {raw!r}")
        if u == v:
            raise ParseError(f"self-loop at line {lineno}")
        edges.append((u, v) if u < v else (v, u))
        max_idx = max(max_idx, u, v)
    if n_declared is None:
        if max_idx < 0:
            raise ParseError("empty edge list and no vertex count header")
        n = max_idx + 1
    else:
        if max_idx >= n_declared:
            raise ParseError(f"vertex index {max_idx} exceeds declared count {n_declared}")
        n = n_declared
    return Graph(n=n, edges=frozenset(edges))


def format_edge_list(g: Graph) -> str:
    """Serialize a graph so that ``parse_edge_list`` round-trips it."""
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def parse_labels(text: str) -> dict[int, int]:
    labels = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 2:
            raise ParseError(f"expected 'vertex label' at line {lineno}: {raw!r}")
        try:
            labels[int(tok[0])] = int(tok[1])
        except ValueError:
            raise ParseError(f"malformed token at line {lineno}: {raw!r}") from None
    return labels


def format_labels(labels) -> str:
    return "\n".join(f"{i} {lab}" for i, lab in enumerate(labels)) + "\n"


def parse_distance_csv(text: str) -> DistanceMatrix:
    """Parse an n x n CSV of distances, enforcing metric invariants."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise ParseError(f"malformed number at line {lineno}: {raw!r}") from None
    if not rows:
        raise ParseError("empty distance CSV")
    width = len(rows[0])
    if any(len(r) != width for r in rows) or width != len(rows):
        raise ParseError(f"distance CSV must be square, got {len(rows)} rows of width {width}")
    return DistanceMatrix(np.array(rows, dtype=np.float64))


def apsp(g: Graph) -> DistanceMatrix:
    """All-pairs shortest-path (hop) distances of a connected graph.

    Raises InvariantViolation naming two vertices in different
    components when the graph is disconnected.
    """
    if g.num_edges == 0 and g.n > 1:
        raise InvariantViolation("graph is disconnected: vertices 0 and 1 share no path")
    if g.n == 1:
        return DistanceMatrix(np.zeros((1, 1)))
    us, vs = zip(*g.sorted_edges())
    row = np.array(us + vs)
    col = np.array(vs + us)
    adj = csr_matrix((np.ones(len(row)), (row, col)), shape=(g.n, g.n))
    d = shortest_path(adj, method="D", unweighted=True, directed=False)
    if np.isinf(d).any():
        i, j = np.argwhere(np.isinf(d))[0]
        raise InvariantViolation(f"graph is disconnected: vertices {i} and {j} share no path")
    return DistanceMatrix(d)


def gen_watts_strogatz(n: int, k: int, beta: float, seed: int) -> Graph:
    """Small-world graph: ring lattice with clockwise-edge rewiring.

    Each vertex starts connected to its k/2 nearest neighbors on each
    side; every clockwise lattice edge is rewired with probability
    ``beta`` to a uniform random target, rejecting self-loops and
    duplicates so the edge count n*k/2 is preserved exactly. The draw is
    repeated (up to 100 times) until the graph is connected.
    """
    if k % 2 != 0:
        raise ValueError(f"k must be even, got {k}")
    if k >= n:
        raise ValueError(f"k must be smaller than n, got k={k}, n={n}")
    if not (0.0 <= beta <= 1.0):
        raise ValueError(f"beta must be in [0,1], got {beta}")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        edges = set()
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                edges.add((u, v) if u < v else (v, u))
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                e = (u, v) if u < v else (v, u)
                if rng.random() >= beta:
                    continue
                # bounded redraws; on exhaustion the lattice edge stays
                for _ in range(2 * n):
                    w = int(rng.integers(n))
                    if w == u:
                        continue
                    cand = (u, w) if u < w else (w, u)
                    if cand in edges:
                        continue
                    edges.discard(e)
                    edges.add(cand)
                    break
        g = Graph(n=n, edges=frozenset(edges))
        if _is_connected(g):
            return g
    raise ResourceGuardError("100 consecutive disconnected Watts-Strogatz draws")


def _is_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    adj = [[] for _ in range(g.n)]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == g.n


def gen_sbm(sizes, probs, seed: int) -> Graph:
    """Stochastic block model with the given community sizes and block
    edge probabilities; community labels are retained on the graph."""
    sizes = [int(s) for s in sizes]
    if not sizes or any(s <= 0 for s in sizes):
        raise ValueError(f"community sizes must be positive, got {sizes}")
    probs = np.asarray(probs, dtype=np.float64)
    c = len(sizes)
    if probs.shape != (c, c):
        raise ValueError(f"probs must be {c}x{c}, got shape {probs.shape}")
    if not np.allclose(probs, probs.T, rtol=0, atol=1e-12):
        raise ValueError("probs matrix must be symmetric")
    if probs.min() < 0.0 or probs.max() > 1.0:
        raise ValueError("probs entries must lie in [0,1]")
    labels = []
    for ci, s in enumerate(sizes):
        labels.extend([ci] * s)
    n = len(labels)
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < probs[labels[i], labels[j]]:
                edges.append((i, j))
    return Graph(n=n, edges=frozenset(edges), labels=tuple(labels))


def gen_clique_path(D: int, c: int) -> Graph:
    """Path of D cliques of size c, consecutive cliques fully joined.

    The lexicographic product of a D-vertex path with a c-clique:
    n = D*c vertices, intra-clique edges plus complete bipartite joins
    between neighboring cliques. Hop diameter is D-1 (for D >= 2).
    """
    if D < 1:
        raise ValueError(f"path length must be at least 1, got {D}")
    if c < 1:
        raise ValueError(f"clique size must be at least 1, got {c}")
    edges = []
    for q in range(D):
        base = q * c
        for a in range(c):
            for b in range(a + 1, c):
                edges.append((base + a, base + b))
        if q + 1 < D:
            for a in range(c):
                for b in range(c):
                    edges.append((base + a, base + c + b))
    labels = tuple(q for q in range(D) for _ in range(c))
    return Graph(n=D * c, edges=frozenset(edges), labels=labels)


def clique_path_integer_layout(D: int, c: int) -> np.ndarray:
    """1-D layout of ``gen_clique_path(D, c)`` placing clique q at
    coordinate q (all clique members coincident)."""
    return np.repeat(np.arange(D, dtype=np.float64), c).reshape(-1, 1)


def davis_southern_women() -> Graph:
    """The bundled Davis Southern Women attendance graph: 18 women
    (vertices 0-17) and 14 events (18-31), an edge per attendance."""
    ref = importlib.resources.files("mdskit.data")
    g = parse_edge_list((ref / "davis_southern_women.edges").read_text())
    labels = parse_labels((ref / "davis_southern_women.labels").read_text())
    return Graph(n=g.n, edges=g.edges, labels=tuple(labels[i] for i in range(g.n)))
