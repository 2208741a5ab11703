"""Dense pairwise max-CSP: instances, exact solver, and the greedy
prefix-enumeration solver.

An instance has a payoff table on every unordered variable pair. The
greedy solver shuffles the variables, brute-forces the first t0 of them,
extends each prefix by locally optimal choices, and keeps the best
completed assignment. With t0 growing like 1/eps^2 the expected value is
within eps*M*n^2 of optimal; with t0 = n it degenerates to exhaustive
search.

Values reported everywhere are sums over unordered pairs; the ordered
i != j sum used in some conventions is exactly twice this.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import ResourceGuardError

__all__ = ["CspInstance", "csp_value", "brute_force_csp", "greedy_csp", "random_instance"]

_BRUTE_FORCE_GUARD = 10**7
_BRANCH_CHUNK = 256


@dataclass(frozen=True)
class CspInstance:
    """Payoff tables for all variable pairs over a common alphabet.

    ``tables[i, j, a, b]`` is the payoff for symbol a at variable i and
    symbol b at variable j; the [j, i] slice mirrors it, so lookups never
    need pair ordering. Entries must lie within [-M, M].
    """

    n: int
    sigma: int
    tables: np.ndarray
    M: float

    def __post_init__(self):
        t = self.tables
        if t.shape != (self.n, self.n, self.sigma, self.sigma):
            raise ValueError(f"tables must have shape (n, n, sigma, sigma), got {t.shape}")
        if not np.array_equal(t, np.swapaxes(np.swapaxes(t, 0, 1), 2, 3)):
            raise ValueError("tables[j, i] must mirror tables[i, j]")
        if self.n > 1 and np.abs(t).max() > self.M + 1e-9:
            raise ValueError(f"table entries exceed the declared bound M={self.M}")
        t.setflags(write=False)

    @staticmethod
    def from_pair_tables(n: int, sigma: int, pair_tables, M: float) -> "CspInstance":
        """Build from a dict {(i, j): table} over pairs i < j."""
        t = np.zeros((n, n, sigma, sigma))
        for (i, j), f in pair_tables.items():
            f = np.asarray(f, dtype=np.float64)
            t[i, j] = f
            t[j, i] = f.T
        return CspInstance(n=n, sigma=sigma, tables=t, M=M)

    def negated(self) -> "CspInstance":
        """Flip all payoffs, turning minimization into maximization."""
        return CspInstance(n=self.n, sigma=self.sigma, tables=-self.tables, M=self.M)


def random_instance(n: int, sigma: int, seed: int, M: float = 1.0) -> CspInstance:
    """Instance with entries uniform in [-M, M] (test workloads)."""
    rng = np.random.default_rng(seed)
    t = np.zeros((n, n, sigma, sigma))
    for i in range(n):
        for j in range(i + 1, n):
            f = rng.uniform(-M, M, size=(sigma, sigma))
            t[i, j] = f
            t[j, i] = f.T
    return CspInstance(n=n, sigma=sigma, tables=t, M=M)


def _check_assignment(inst: CspInstance, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if a.shape != (inst.n,):
        raise ValueError(f"assignment must have length {inst.n}, got shape {a.shape}")
    if a.size and (a.min() < 0 or a.max() >= inst.sigma):
        raise ValueError(f"assignment symbol out of range [0, {inst.sigma})")
    return a


def csp_value(inst: CspInstance, a) -> float:
    """Objective value of an assignment: payoff summed once per pair."""
    a = _check_assignment(inst, a)
    total = 0.0
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            total += inst.tables[i, j, a[i], a[j]]
    return float(total)


def brute_force_csp(inst: CspInstance) -> tuple[np.ndarray, float]:
    """Exact maximizer by exhaustive enumeration.

    Ties break to the lexicographically smallest assignment. Guarded to
    sigma^n <= 10^7.
    """
    count = inst.sigma**inst.n
    if count > _BRUTE_FORCE_GUARD:
        raise ResourceGuardError(f"brute force would enumerate {count} assignments (guard {_BRUTE_FORCE_GUARD})")
    pairs = [(i, j) for i in range(inst.n) for j in range(i + 1, inst.n)]
    best_val = -np.inf
    best = None
    it = itertools.product(range(inst.sigma), repeat=inst.n)
    while True:
        chunk = np.array(list(itertools.islice(it, 65536)), dtype=np.int64)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, inst.n)
        vals = np.zeros(len(chunk))
        for i, j in pairs:
            vals += inst.tables[i, j, chunk[:, i], chunk[:, j]]
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best = chunk[k].copy()
    return best, best_val


def greedy_csp(
    inst: CspInstance,
    t0: int,
    seed: int,
    prefix_choices: list[np.ndarray] | None = None,
) -> tuple[np.ndarray, float]:
    """Greedy solver with a brute-forced random prefix.

    Shuffles the variables with the seeded RNG; enumerates all symbol
    combinations for the first ``t0`` shuffled variables (optionally
    restricted per position via ``prefix_choices``); extends each prefix
    by choosing, for every later variable, the symbol maximizing the
    payoff against already-placed variables (ties to the smallest
    symbol); returns the best completed assignment and its value.
    """
    if not (0 <= t0 <= inst.n):
        raise ValueError(f"prefix size must be in [0, {inst.n}], got {t0}")
    if prefix_choices is not None and len(prefix_choices) > t0:
        raise ValueError("more prefix restrictions than brute-forced positions")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(inst.n)
    choices = [np.arange(inst.sigma, dtype=np.int64)] * t0
    if prefix_choices is not None:
        for t, allowed in enumerate(prefix_choices):
            allowed = np.asarray(allowed, dtype=np.int64)
            if allowed.size == 0 or allowed.min() < 0 or allowed.max() >= inst.sigma:
                raise ValueError(f"invalid symbol restriction at prefix position {t}")
            choices[t] = allowed

    best_val = -np.inf
    best = None
    for chunk in _prefix_chunks(choices, _BRANCH_CHUNK, inst.n):
        assign, vals = _run_branches(inst, perm, chunk)
        k = int(np.argmax(vals)) if len(vals) else 0
        if len(vals) and vals[k] > best_val:
            best_val = float(vals[k])
            best = assign[k].copy()
    return best, best_val


def _prefix_chunks(choices: list[np.ndarray], chunk: int, n: int):
    """Yield (count, t0) arrays of prefix symbol combinations."""
    if not choices:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    buf = []
    for combo in itertools.product(*choices):
        buf.append(combo)
        if len(buf) == chunk:
            yield np.array(buf, dtype=np.int64)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


def _run_branches(inst: CspInstance, perm: np.ndarray, prefixes: np.ndarray):
    """Run the greedy extension for a block of prefix branches at once.

    Scores[b, i, s] accumulates the payoff of symbol s at variable i
    against the variables already placed in branch b, which is exactly
    the greedy selection criterion; gathering the score of each chosen
    symbol as it is placed yields the pair-sum objective for free.
    """
    B = len(prefixes)
    t0 = prefixes.shape[1]
    n, sigma = inst.n, inst.sigma
    rows = np.arange(B)
    scores = np.zeros((B, n, sigma))
    assign = np.zeros((B, n), dtype=np.int64)
    values = np.zeros(B)
    for t in range(n):
        v = int(perm[t])
        if t < t0:
            x = prefixes[:, t]
        else:
            # argmax takes the first maximum, i.e. the smallest symbol
            x = np.argmax(scores[:, v, :], axis=1)
        values += scores[rows, v, x]
        assign[:, v] = x
        if t + 1 < n:
            rest = perm[t + 1 :]
            block = inst.tables[v][rest]
            scores[:, rest, :] += block[:, x, :].transpose(1, 0, 2)
    return assign, values
