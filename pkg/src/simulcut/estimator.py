"""Exact conditional moments of cut statistics under partial assignments.

Every statistic tracked here is a sum X = sum_e X_e of per-edge indicators
over a uniformly random k-labelling of the undecided vertices:

  crossing   X_e = 1 iff the endpoints of e land in different classes
  pair(s,t)  X_e = 1 iff e has one endpoint in class s and one in class t
  within(s)  X_e = 1 iff both endpoints of e land in class s
  rainbow    X_e = 1 iff the r vertices of hyperedge e cover all r classes

Conditional on the decided labels U, the indicators of vertex-disjoint edges
are independent, and edges sharing vertices become independent once the
shared labels are fixed, so first and second moments have exact closed
forms.  All probabilities are Fractions; only the final division by a
term's normalizer happens in floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    UNDECIDED,
    Assignment,
    GraphFamily,
    HypergraphFamily,
    epsilon_cap,
    _check_epsilon,
    partition_counts,
    rainbow_count,
)

STAT_KINDS = ("crossing", "pair", "within", "rainbow")


class EstimatorBudgetError(ValueError):
    """The penalty terms cannot certify success (initial estimator >= 1)."""


class DegreePreconditionError(ValueError):
    """A graph's maximum degree exceeds eps * m, breaking the pairwise bound."""


@dataclass(frozen=True)
class EventSpec:
    """One quadratic penalty term ((mu - X)^2 / normalizer) over a statistic.

    ``mu`` must be the unconditional mean of the statistic and
    ``var_bound`` an upper bound on its variance; a list of specs is only
    usable when sum(var_bound / normalizer) < 1, which is what forces the
    greedy descent to end below every threshold mu - sqrt(normalizer).
    """

    graph: int
    kind: str
    k: int
    mu: Fraction
    normalizer: float
    var_bound: Fraction | None = None
    s: int | None = None
    t: int | None = None

    def __post_init__(self):
        if self.kind not in STAT_KINDS:
            raise ValueError(f"unknown statistic kind {self.kind!r}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not self.normalizer > 0:
            raise ValueError(f"normalizer must be > 0, got {self.normalizer}")
        if self.kind == "pair":
            if self.s is None or self.t is None or not 0 <= self.s < self.t < self.k:
                raise ValueError(f"pair statistic needs classes s < t < k, got {self.s}, {self.t}")
        elif self.kind == "within":
            if self.s is None or not 0 <= self.s < self.k:
                raise ValueError(f"within statistic needs a class s < k, got {self.s}")
        object.__setattr__(self, "mu", Fraction(self.mu))

    @property
    def stat(self) -> str:
        if self.kind == "pair":
            return f"pair({self.s},{self.t})"
        if self.kind == "within":
            return f"within({self.s})"
        return self.kind

    @property
    def threshold(self) -> float:
        """The certified lower bound mu - sqrt(normalizer)."""
        return float(self.mu) - math.sqrt(self.normalizer)


def stat_mean(kind: str, m: int, k: int, s: int | None = None, t: int | None = None) -> Fraction:
    """Unconditional mean of a statistic on an m-edge member under uniform labels."""
    if kind == "crossing":
        return Fraction((k - 1) * m, k)
    if kind == "pair":
        return Fraction(2 * m, k * k)
    if kind == "within":
        return Fraction(m, k * k)
    if kind == "rainbow":
        return Fraction(math.factorial(k) * m, k ** k)
    raise ValueError(f"unknown statistic kind {kind!r}")


def stat_count(edges, a: Assignment, spec: EventSpec) -> int:
    """Realized value of the statistic on a total assignment."""
    if spec.kind == "rainbow":
        return rainbow_count(edges, a, spec.k)
    pairs, within, crossing = partition_counts(edges, a)
    if spec.kind == "crossing":
        return crossing
    if spec.kind == "pair":
        return pairs[(spec.s, spec.t)]
    return within[spec.s]


def _edge_prob(labels, edge, spec: EventSpec) -> Fraction:
    """P[X_e = 1 | decided labels], by case analysis on the endpoints."""
    k = spec.k
    if spec.kind == "rainbow":
        seen = 0
        undecided = 0
        for x in edge:
            lab = labels[x]
            if lab == UNDECIDED:
                undecided += 1
            else:
                bit = 1 << lab
                if seen & bit:
                    return Fraction(0)
                seen |= bit
        return Fraction(math.factorial(undecided), k ** undecided)

    u, v = edge
    lu, lv = labels[u], labels[v]
    if spec.kind == "crossing":
        if lu == UNDECIDED or lv == UNDECIDED:
            return Fraction(k - 1, k)
        return Fraction(1) if lu != lv else Fraction(0)
    if spec.kind == "pair":
        s, t = spec.s, spec.t
        if lu == UNDECIDED and lv == UNDECIDED:
            return Fraction(2, k * k)
        if lu == UNDECIDED or lv == UNDECIDED:
            decided = lv if lu == UNDECIDED else lu
            return Fraction(1, k) if decided in (s, t) else Fraction(0)
        return Fraction(1) if (lu, lv) in ((s, t), (t, s)) else Fraction(0)
    # within(s)
    s = spec.s
    if lu == UNDECIDED and lv == UNDECIDED:
        return Fraction(1, k * k)
    if lu == UNDECIDED or lv == UNDECIDED:
        decided = lv if lu == UNDECIDED else lu
        return Fraction(1, k) if decided == s else Fraction(0)
    return Fraction(1) if lu == lv == s else Fraction(0)


def conditional_edge_prob(edge, a: Assignment, spec: EventSpec) -> Fraction:
    """Exact P[X_e = 1 | decided labels in a]."""
    return _edge_prob(a.labels, edge, spec)


def _joint_prob(labels, e1, e2, spec: EventSpec) -> Fraction:
    shared = [x for x in e1 if x in e2]
    p1 = _edge_prob(labels, e1, spec)
    p2 = _edge_prob(labels, e2, spec)
    if not shared:
        return p1 * p2
    open_shared = [w for w in shared if labels[w] == UNDECIDED]
    if not open_shared:
        # shared labels fixed: the remaining endpoints are disjoint, hence independent
        return p1 * p2
    k = spec.k
    scratch = list(labels)
    total = Fraction(0)
    for assigned in itertools.product(range(k), repeat=len(open_shared)):
        for w, c in zip(open_shared, assigned):
            scratch[w] = c
        total += _edge_prob(scratch, e1, spec) * _edge_prob(scratch, e2, spec)
    for w in open_shared:
        scratch[w] = UNDECIDED
    return total / k ** len(open_shared)


def conditional_joint_prob(e1, e2, a: Assignment, spec: EventSpec) -> Fraction:
    """Exact E[X_e1 * X_e2 | decided labels] for two distinct edges.

    Disjoint edges factor into the product of their single-edge
    probabilities; edges with shared vertices are averaged over the
    uniform labels of the undecided shared vertices, under which the two
    indicators become conditionally independent.
    """
    if tuple(sorted(e1)) == tuple(sorted(e2)):
        raise ValueError("joint probability needs two distinct edges")
    return _joint_prob(a.labels, e1, e2, spec)


def _incidence(edges, n: int):
    inc: list[list[int]] = [[] for _ in range(n)]
    for idx, e in enumerate(edges):
        for x in e:
            inc[x].append(idx)
    return inc


def overlapping_pairs(edges):
    """Unordered index pairs of edges sharing at least one vertex."""
    n = 1 + max((x for e in edges for x in e), default=-1)
    inc = _incidence(edges, n)
    pairs: set[tuple[int, int]] = set()
    for ids in inc:
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                pairs.add((ids[a], ids[b]))
    return sorted(pairs)


def conditional_moments(edges, a: Assignment, spec: EventSpec):
    """Exact (E[X | U], E[X^2 | U]) for one member's statistic.

    The second moment is assembled from S1 = sum of edge probabilities,
    S2 = sum of their squares, and a correction for edge pairs that share
    vertices; pairs of disjoint edges contribute exactly the product of
    their probabilities.  Cost is O(m * max_degree) per call.
    """
    return _moments(a.labels, edges, spec)


def _moments(labels, edges, spec: EventSpec):
    k = spec.k
    p = [_edge_prob(labels, e, spec) for e in edges]
    s1 = sum(p, Fraction(0))
    s2 = sum((q * q for q in p), Fraction(0))
    ex2 = s1 + s1 * s1 - s2

    if spec.kind == "rainbow":
        for i, j in overlapping_pairs(edges):
            ex2 += 2 * (_joint_prob(labels, edges[i], edges[j], spec) - p[i] * p[j])
        return s1, ex2

    # Graph statistics: distinct edges share at most one vertex, so pair
    # corrections decompose over the shared vertex.  Pairs through a decided
    # vertex are conditionally independent and cancel exactly.
    inc = _incidence(edges, len(labels))
    scratch = list(labels)
    for w in range(len(labels)):
        ids = inc[w]
        if labels[w] != UNDECIDED or len(ids) < 2:
            continue
        t_all = sum((p[i] for i in ids), Fraction(0))
        q_all = sum((p[i] * p[i] for i in ids), Fraction(0))
        joint_w = Fraction(0)
        for c in range(k):
            scratch[w] = c
            t_c = Fraction(0)
            q_c = Fraction(0)
            for i in ids:
                pc = _edge_prob(scratch, edges[i], spec)
                t_c += pc
                q_c += pc * pc
            joint_w += t_c * t_c - q_c
        scratch[w] = UNDECIDED
        ex2 += joint_w / k - (t_all * t_all - q_all)
    return s1, ex2


def term_quadratic(edges, a: Assignment, spec: EventSpec) -> Fraction:
    """Exact mu^2 - 2*mu*E[X|U] + E[X^2|U] for one penalty term."""
    s1, ex2 = conditional_moments(edges, a, spec)
    return spec.mu * spec.mu - 2 * spec.mu * s1 + ex2


def _quadratic(labels, edges, spec: EventSpec) -> Fraction:
    s1, ex2 = _moments(labels, edges, spec)
    return spec.mu * spec.mu - 2 * spec.mu * s1 + ex2


def _member_edges(family, spec: EventSpec):
    if spec.kind == "rainbow":
        return family.hypergraphs[spec.graph]
    return family.graphs[spec.graph]


def estimator_value(family, a: Assignment, specs) -> float:
    """Sum over specs of the penalty terms, each exact until the final division."""
    total = 0.0
    for spec in specs:
        quad = term_quadratic(_member_edges(family, spec), a, spec)
        total += float(quad) / spec.normalizer
    return total


def validate_specs(family, specs) -> None:
    """Check means against their closed forms and the combined variance budget."""
    budget = 0.0
    for spec in specs:
        edges = _member_edges(family, spec)
        m = len(edges)
        expected = stat_mean(spec.kind, m, spec.k)
        if spec.mu != expected:
            raise ValueError(
                f"spec for member {spec.graph} ({spec.stat}): mu={spec.mu} "
                f"but the statistic's mean is {expected}"
            )
        if spec.var_bound is not None:
            budget += float(spec.var_bound) / spec.normalizer
    if budget >= 1.0:
        raise EstimatorBudgetError(
            f"variance budget sum(var_bound/normalizer) = {budget:.6g} >= 1; "
            "these terms cannot certify a partition"
        )


def specs_for(family, theorem: str, k: int | None = None, eps=None) -> tuple[EventSpec, ...]:
    """Build the standard penalty terms for one guarantee over a family.

    thm1: one bipartition-crossing term per graph, normalizer ell*m/2.
    thm2: one k-way crossing term per graph, normalizer 2*ell*m.
    thm3: one term per (graph, class pair) and (graph, class), normalizer
          sqrt(eps)*m^2; requires max_degree <= eps*m per graph and
          eps <= 1/(9*ell^2*k^4).
    hyp:  one rainbow term per hypergraph, normalizer
          2*ell*(1 + r*(r-1)*delta2)*m.

    Members with no edges contribute nothing (their thresholds are <= 0).
    """
    specs: list[EventSpec] = []
    if theorem in ("thm1", "thm2", "thm3"):
        if not isinstance(family, GraphFamily):
            raise TypeError(f"{theorem} applies to graph families, got {type(family).__name__}")
        ell = family.ell
        if theorem == "thm1":
            if k not in (None, 2):
                raise ValueError(f"thm1 partitions into exactly 2 classes, got k={k}")
            k = 2
        elif k is None:
            k = 2
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        if theorem == "thm3":
            if eps is None:
                eps = epsilon_cap(ell, k)
            _check_epsilon(eps, ell, k)
            for i in range(ell):
                if family.max_degree[i] > eps * family.m[i]:
                    raise DegreePreconditionError(
                        f"graph {i}: max degree {family.max_degree[i]} exceeds "
                        f"eps*m = {float(eps) * family.m[i]:.6g}"
                    )
        for i in range(ell):
            m = family.m[i]
            if m == 0:
                continue
            if theorem == "thm1":
                specs.append(EventSpec(
                    graph=i, kind="crossing", k=2, mu=Fraction(m, 2),
                    normalizer=ell * m / 2, var_bound=Fraction(m, 4)))
            elif theorem == "thm2":
                specs.append(EventSpec(
                    graph=i, kind="crossing", k=k, mu=Fraction((k - 1) * m, k),
                    normalizer=2 * ell * m, var_bound=Fraction(m)))
            else:
                norm = math.sqrt(float(eps)) * m * m
                var = Fraction(3 * family.max_degree[i] * m)
                for s in range(k):
                    for t in range(s + 1, k):
                        specs.append(EventSpec(
                            graph=i, kind="pair", k=k, s=s, t=t,
                            mu=Fraction(2 * m, k * k), normalizer=norm, var_bound=var))
                for s in range(k):
                    specs.append(EventSpec(
                        graph=i, kind="within", k=k, s=s,
                        mu=Fraction(m, k * k), normalizer=norm, var_bound=var))
    elif theorem == "hyp":
        if not isinstance(family, HypergraphFamily):
            raise TypeError(f"hyp applies to hypergraph families, got {type(family).__name__}")
        r = family.r
        if k not in (None, r):
            raise ValueError(f"rainbow partitions use k == r == {r}, got k={k}")
        ell = family.ell
        for i in range(ell):
            m = family.m[i]
            if m == 0:
                continue
            weight = 1 + r * (r - 1) * family.delta2[i]
            specs.append(EventSpec(
                graph=i, kind="rainbow", k=r,
                mu=Fraction(math.factorial(r) * m, r ** r),
                normalizer=2 * ell * weight * m, var_bound=Fraction(weight * m)))
    else:
        raise ValueError(f"unknown guarantee {theorem!r}; expected thm1, thm2, thm3 or hyp")
    out = tuple(specs)
    validate_specs(family, out)
    return out
