"""All-equal SAT instances, their regularization, and the clique-gadget
graph whose optimal 1-D layouts encode assignments.

The gadget: a large central anchor clique, one clique per literal, one
per clause, with every pair of vertices adjacent except (a) a literal
clique and the clique of its negation, and (b) a literal clique and the
cliques of clauses containing that literal. The anchor pins the scale,
literal cliques settle near +1 or -1 (negations on opposite sides), and
clause cliques settle opposite the majority of their literals, so good
layouts correspond to assignments with many all-equal clauses.

Everything here runs at desk scale: the quantitative hardness gap needs
clique sizes growing like the 20th power of the formula size, so the
micro defaults (16/4/2) only exercise the combinatorial invariants and a
qualitative stress-vs-satisfaction trend.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import spearmanr

from .baselines import GdParams, gradient_descent
from .exceptions import InvariantViolation, ParseError, ResourceGuardError
from .graphs import DistanceMatrix, Graph, apsp
from .stress import stress

__all__ = [
    "SatInstance",
    "GadgetParams",
    "GadgetGraph",
    "ProbeRow",
    "ProbeReport",
    "canonical_clause",
    "complement_clause",
    "literal_value",
    "all_equal_count",
    "is_balanced",
    "regularity_failures",
    "regularize",
    "build_reduction_graph",
    "assignment_to_layout",
    "gap_probe",
    "gap_threshold",
    "parse_sat",
    "format_sat",
]

# occurrences per variable in the fully regularized form (3 before
# complement-balancing doubles it)
REGULAR_OCCURRENCES = 6

_PROBE_VERTEX_GUARD = 400
_PROBE_EXHAUSTIVE_VARS = 10


def canonical_clause(lits) -> tuple[int, ...]:
    clause = tuple(sorted((int(l) for l in lits), key=lambda l: (abs(l), l < 0)))
    if not clause:
        raise ValueError("empty clause")
    if any(l == 0 for l in clause):
        raise ValueError("literal 0 is not allowed")
    return clause


def complement_clause(clause) -> tuple[int, ...]:
    return canonical_clause(-l for l in clause)


@dataclass(frozen=True)
class SatInstance:
    """All-equal SAT instance: variables 1..num_vars, clauses as tuples
    of nonzero signed literals (multiset semantics)."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError(f"variable count must be nonnegative, got {self.num_vars}")
        object.__setattr__(self, "clauses", tuple(canonical_clause(c) for c in self.clauses))
        for c in self.clauses:
            for l in c:
                if abs(l) > self.num_vars:
                    raise ValueError(f"literal {l} references a variable beyond {self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def literals(self) -> list[int]:
        """All 2*num_vars literals in canonical order +1, -1, +2, -2, ..."""
        out = []
        for v in range(1, self.num_vars + 1):
            out.extend((v, -v))
        return out


def literal_value(lit: int, assignment) -> bool:
    val = bool(assignment[abs(lit) - 1])
    return val if lit > 0 else not val


def all_equal_count(inst: SatInstance, assignment) -> int:
    """Number of clauses whose literals all evaluate to the same value."""
    if len(assignment) != inst.num_vars:
        raise ValueError(f"assignment length {len(assignment)} != {inst.num_vars} variables")
    count = 0
    for clause in inst.clauses:
        vals = [literal_value(l, assignment) for l in clause]
        if all(vals) or not any(vals):
            count += 1
    return count


def is_balanced(inst: SatInstance) -> bool:
    counts = Counter(inst.clauses)
    return all(counts[c] == counts[complement_clause(c)] for c in counts)


def regularity_failures(inst: SatInstance) -> list[str]:
    """Check the restricted form: exactly 3 literals per clause, no
    variable twice in a clause, every variable in exactly 6 clauses,
    clause multiset closed under complementation. Returns problem
    descriptions (empty means regular)."""
    problems = []
    occurrences = Counter()
    for idx, clause in enumerate(inst.clauses):
        if len(clause) != 3:
            problems.append(f"clause {idx} has {len(clause)} literals, expected 3")
        vars_in = [abs(l) for l in clause]
        if len(set(vars_in)) != len(vars_in):
            problems.append(f"clause {idx} repeats a variable")
        occurrences.update(vars_in)
    for v in range(1, inst.num_vars + 1):
        if occurrences[v] != REGULAR_OCCURRENCES:
            problems.append(f"variable {v} occurs in {occurrences[v]} clauses, expected {REGULAR_OCCURRENCES}")
    if not is_balanced(inst):
        problems.append("clause multiset is not closed under complementation")
    return problems


def regularize(inst: SatInstance) -> SatInstance:
    """Transform into the restricted balanced form.

    In order: pad short clauses with fresh free variables; triplicate
    every clause; give every variable occurring more than three times
    distinct copies chained by a ring of equality clauses (ring clauses
    are padded to width 3 in groups of three sharing one fresh free
    variable, so all occurrence counts stay at exactly three); append
    the complement of every clause. Unused variable ids are compacted.

    Occurrence reduction is done by the ring alone, so the
    approximation ratio is only preserved up to the instance's maximum
    occurrence count; at desk scale that is irrelevant.
    """
    for idx, c in enumerate(inst.clauses):
        if len(c) > 3:
            raise InvariantViolation(f"clause {idx} has {len(c)} literals; at most 3 supported")

    next_var = inst.num_vars + 1

    def fresh():
        nonlocal next_var
        v = next_var
        next_var += 1
        return v

    padded = []
    for clause in inst.clauses:
        clause = list(clause)
        while len(clause) < 3:
            clause.append(fresh())
        padded.append(clause)

    tripled = [list(c) for c in padded for _ in range(3)]

    occ: dict[int, list[tuple[int, int]]] = {}
    for ci, clause in enumerate(tripled):
        for li, lit in enumerate(clause):
            occ.setdefault(abs(lit), []).append((ci, li))

    ring_clauses = []
    for var in sorted(occ):
        slots = occ[var]
        if len(slots) == 3:
            continue
        copies = [fresh() for _ in slots]
        for (ci, li), copy in zip(slots, copies):
            sign = 1 if tripled[ci][li] > 0 else -1
            tripled[ci][li] = sign * copy
        d = len(copies)
        for start in range(0, d, 3):
            pad = fresh()
            for k in range(start, min(start + 3, d)):
                ring_clauses.append([copies[k], copies[(k + 1) % d], pad])

    clauses = [canonical_clause(c) for c in tripled + ring_clauses]
    clauses += [complement_clause(c) for c in clauses]

    used = sorted({abs(l) for c in clauses for l in c})
    remap = {v: i + 1 for i, v in enumerate(used)}
    renumbered = [tuple((1 if l > 0 else -1) * remap[abs(l)] for l in c) for c in clauses]
    return SatInstance(num_vars=len(used), clauses=tuple(renumbered))


@dataclass(frozen=True)
class GadgetParams:
    """Clique sizes of the reduction graph. The hardness argument needs
    Nv >> Nt >> Nc >> formula size; defaults are desk-scale stand-ins."""

    Nv: int = 16
    Nt: int = 4
    Nc: int = 2

    def __post_init__(self):
        if not (self.Nv >= self.Nt >= self.Nc >= 1):
            raise ValueError(f"need Nv >= Nt >= Nc >= 1, got {self.Nv}, {self.Nt}, {self.Nc}")


@dataclass
class GadgetGraph:
    """Reduction graph plus the block structure needed to navigate it."""

    graph: Graph
    instance: SatInstance
    params: GadgetParams

    @property
    def n(self) -> int:
        return self.graph.n

    def anchor_vertices(self) -> range:
        return range(self.params.Nv)

    def literal_index(self, lit: int) -> int:
        return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)

    def literal_vertices(self, lit: int) -> range:
        return _literal_range(self.params, lit)

    def clause_vertices(self, j: int) -> range:
        return _clause_range(self.instance, self.params, j)

    @cached_property
    def metric(self) -> DistanceMatrix:
        return apsp(self.graph)


def _literal_range(p: GadgetParams, lit: int) -> range:
    idx = 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)
    base = p.Nv + idx * p.Nt
    return range(base, base + p.Nt)


def _clause_range(inst: SatInstance, p: GadgetParams, j: int) -> range:
    base = p.Nv + 2 * inst.num_vars * p.Nt + j * p.Nc
    return range(base, base + p.Nc)


def build_reduction_graph(inst: SatInstance, p: GadgetParams) -> GadgetGraph:
    """Assemble the gadget graph for a balanced instance.

    Vertex layout: anchor clique first, then one clique per literal in
    order +1, -1, +2, -2, ..., then one clique per clause in instance
    order. Role labels: 0 anchor, 1 literal, 2 clause.
    """
    if not is_balanced(inst):
        raise InvariantViolation("reduction graph requires a complement-balanced instance")
    ell = inst.num_vars
    n = p.Nv + 2 * ell * p.Nt + inst.num_clauses * p.Nc

    allowed = np.ones((n, n), dtype=bool)
    np.fill_diagonal(allowed, False)
    for v in range(1, ell + 1):
        pos = list(_literal_range(p, v))
        neg = list(_literal_range(p, -v))
        allowed[np.ix_(pos, neg)] = False
        allowed[np.ix_(neg, pos)] = False
    for j, clause in enumerate(inst.clauses):
        cl = list(_clause_range(inst, p, j))
        for lit in set(clause):
            lv = list(_literal_range(p, lit))
            allowed[np.ix_(lv, cl)] = False
            allowed[np.ix_(cl, lv)] = False

    iu, ju = np.triu_indices(n, k=1)
    keep = allowed[iu, ju]
    edges = frozenset(zip(iu[keep].tolist(), ju[keep].tolist()))
    labels = [0] * p.Nv + [1] * (2 * ell * p.Nt) + [2] * (inst.num_clauses * p.Nc)
    return GadgetGraph(graph=Graph(n=n, edges=edges, labels=tuple(labels)), instance=inst, params=p)


def _clause_side_groups(inst: SatInstance, assignment) -> tuple[list[int], ...]:
    """Split clause indices into the four order groups: satisfied
    all-true, majority-true, majority-false, satisfied all-false. The
    clause sits opposite its literal majority; an exact tie counts as
    nonnegative, i.e. the clause goes to the negative side."""
    t1, t2, t6, t7 = [], [], [], []
    for j, clause in enumerate(inst.clauses):
        vals = [literal_value(l, assignment) for l in clause]
        n_true = sum(vals)
        n_false = len(vals) - n_true
        if n_false == 0:
            t1.append(j)
        elif n_true == 0:
            t7.append(j)
        elif n_true >= n_false:
            t2.append(j)
        else:
            t6.append(j)
    return t1, t2, t6, t7


def assignment_to_layout(inst: SatInstance, assignment, p: GadgetParams,
                         gadget: GadgetGraph | None = None) -> tuple[np.ndarray, float]:
    """One-dimensional layout encoding the assignment, plus its stress.

    Blocks are ordered (most negative first): satisfied clause cliques
    whose literals are all true; unsatisfied clauses with true majority;
    false literal cliques (grouped by how many of their clauses share
    their side); the anchor; then the mirror image. Each vertex at
    global rank i sits at (2i-(n+1))/n plus its block offset, the
    clique-optimal spacing perturbed by the block's first-order shift.
    """
    if len(assignment) != inst.num_vars:
        raise InvariantViolation(f"assignment length {len(assignment)} != {inst.num_vars} variables")
    if gadget is None:
        gadget = build_reduction_graph(inst, p)
    n = gadget.n
    k = REGULAR_OCCURRENCES
    t1, t2, t6, t7 = _clause_side_groups(inst, assignment)
    clause_side = {}
    for j in t1 + t2:
        clause_side[j] = -1
    for j in t6 + t7:
        clause_side[j] = +1

    neg_lits, pos_lits = [], []
    for lit in inst.literals():
        side = +1 if literal_value(lit, assignment) else -1
        containing = [j for j, c in enumerate(inst.clauses) if lit in c]
        phi = sum(1 for j in containing if clause_side[j] == side)
        (pos_lits if side > 0 else neg_lits).append((phi, lit))
    t3 = [lit for phi, lit in sorted(neg_lits, key=lambda t: (t[0], gadget.literal_index(t[1])))]
    t3_phi = {lit: phi for phi, lit in neg_lits}
    t5 = [lit for phi, lit in sorted(pos_lits, key=lambda t: (-t[0], gadget.literal_index(t[1])))]
    t5_phi = {lit: phi for phi, lit in pos_lits}

    Nt, Nc = p.Nt, p.Nc
    blocks: list[tuple[list[int], float]] = []
    for j in t1:
        blocks.append((list(gadget.clause_vertices(j)), -3.0 * Nt / n))
    for j in t2:
        blocks.append((list(gadget.clause_vertices(j)), -1.5 * Nt / n))
    for lit in t3:
        blocks.append((list(gadget.literal_vertices(lit)), -(Nt + (k - t3_phi[lit] / 2.0) * Nc) / n))
    blocks.append((list(gadget.anchor_vertices()), 0.0))
    for lit in t5:
        blocks.append((list(gadget.literal_vertices(lit)), +(Nt + (k - t5_phi[lit] / 2.0) * Nc) / n))
    for j in t6:
        blocks.append((list(gadget.clause_vertices(j)), +1.5 * Nt / n))
    for j in t7:
        blocks.append((list(gadget.clause_vertices(j)), +3.0 * Nt / n))

    layout = np.zeros((n, 1))
    rank = 1
    for vertices, offset in blocks:
        for v in vertices:
            layout[v, 0] = (2.0 * rank - (n + 1)) / n + offset
            rank += 1
    return layout, stress(layout, gadget.metric)


def gap_threshold(inst: SatInstance, p: GadgetParams, satisfied: int) -> int:
    """Decision threshold from the construction's layout-value upper
    bound, for an instance satisfying ``satisfied`` (= 2p) clauses.
    Reported for reference only; the quantitative gap is void at micro
    scale."""
    ell = inst.num_vars
    two_m = inst.num_clauses
    m = two_m / 2.0
    half_p = satisfied / 2.0
    n = p.Nv + 2 * ell * p.Nt + two_m * p.Nc
    bound = (
        (n - 1) * (n - 2) / 6.0
        - ell * p.Nt**2
        - 2.0 * (2.0 * m + half_p) * p.Nt * p.Nc
        + 200.0 * m**2 * p.Nc**2
    )
    return math.ceil(bound)


@dataclass(frozen=True)
class ProbeRow:
    assignment: tuple[bool, ...]
    satisfied: int
    initial_stress: float
    refined_stress: float


@dataclass
class ProbeReport:
    rows: list[ProbeRow] = field(default_factory=list)
    spearman: float | None = None
    consistent: bool | None = None
    threshold: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "format": 1,
            "rows": [
                {
                    "assignment": [int(b) for b in r.assignment],
                    "satisfied": r.satisfied,
                    "initial_stress": r.initial_stress,
                    "refined_stress": r.refined_stress,
                }
                for r in self.rows
            ],
            "spearman": self.spearman,
            "consistent": self.consistent,
            "threshold": self.threshold,
        }


def gap_probe(
    inst: SatInstance,
    p: GadgetParams,
    trials: int,
    seed: int = 0,
    refine_steps: int = 500,
    refine_lr: float = 1e-3,
) -> ProbeReport:
    """Stress-vs-satisfaction probe over assignments.

    Enumerates all assignments when the instance has at most 10
    variables, otherwise samples ``trials`` of them; builds the encoded
    layout for each, refines it with gradient descent, and reports
    whether refined stress decreases as the all-equal count grows
    (Spearman rank correlation of count against negated stress).
    ``trials = 0`` returns an empty report.
    """
    gadget = build_reduction_graph(inst, p)
    if gadget.n > _PROBE_VERTEX_GUARD:
        raise ResourceGuardError(
            f"gadget has {gadget.n} vertices (probe guard {_PROBE_VERTEX_GUARD}); shrink the clique sizes"
        )
    report = ProbeReport()
    if trials == 0:
        return report
    if inst.num_vars <= _PROBE_EXHAUSTIVE_VARS:
        assignments = [tuple(bits) for bits in itertools.product((False, True), repeat=inst.num_vars)]
    else:
        rng = np.random.default_rng(seed)
        assignments = [tuple(bool(b) for b in rng.integers(0, 2, inst.num_vars)) for _ in range(trials)]

    for a in assignments:
        layout, e0 = assignment_to_layout(inst, a, p, gadget=gadget)
        refined, _ = gradient_descent(
            gadget.metric, 1, GdParams(lr=refine_lr, steps=refine_steps, seed=seed, init=layout)
        )
        report.rows.append(ProbeRow(a, all_equal_count(inst, a), e0, stress(refined, gadget.metric)))

    best = max(r.satisfied for r in report.rows)
    report.threshold = gap_threshold(inst, p, best)
    counts = [r.satisfied for r in report.rows]
    if len(set(counts)) > 1:
        rho = spearmanr(counts, [-r.refined_stress for r in report.rows]).statistic
        report.spearman = float(rho)
        report.consistent = bool(rho > 0)
    return report


def parse_sat(text: str) -> SatInstance:
    """Parse the SAT text form: header ``p aeq <vars> <clauses>``, one
    clause per line as signed integers (optional trailing 0), ``c``
    comment lines ignored."""
    num_vars = None
    declared = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            tok = line.split()
            if len(tok) != 4 or tok[1] != "aeq":
                raise ParseError(f"malformed header at line {lineno}: {raw!r}")
            try:
                num_vars, declared = int(tok[2]), int(tok[3])
            except ValueError:
                raise ParseError(f"malformed header counts at line {lineno}: {raw!r}") from None
            continue
        if num_vars is None:
            raise ParseError(f"clause before 'p aeq' header at line {lineno}")
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise ParseError(f"malformed literal at line {lineno}: {raw!r}") from None
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        if not lits:
            raise ParseError(f"empty clause at line {lineno}")
        clauses.append(lits)
    if num_vars is None:
        raise ParseError("missing 'p aeq' header")
    if declared is not None and declared != len(clauses):
        raise ParseError(f"header declares {declared} clauses but {len(clauses)} found")
    return SatInstance(num_vars=num_vars, clauses=tuple(clauses))


def format_sat(inst: SatInstance) -> str:
    lines = [f"p aeq {inst.num_vars} {inst.num_clauses}"]
    lines.extend(" ".join(str(l) for l in c) for c in inst.clauses)
    return "\n".join(lines) + "\n"
