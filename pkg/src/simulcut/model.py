"""Instance types, cut counting, and closed-form guarantee thresholds.

The objects here are deliberately dumb and immutable: a family of simple
graphs (or r-uniform hypergraphs) on a shared vertex set, a per-vertex class
assignment, and a report of cut statistics against their thresholds.  All
counting operations are pure functions of (instance, assignment), so they
double as the ground truth that the samplers and the derandomizer are
checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

#: Label value marking a vertex whose class has not been decided yet.
UNDECIDED = -1

Edge = tuple[int, int]


class InstanceError(ValueError):
    """An instance violates a structural invariant (loaders never repair)."""


class PartialAssignmentError(ValueError):
    """An operation that requires a total assignment got a partial one."""


class EpsilonRangeError(ValueError):
    """Epsilon outside the admissible range for the pairwise guarantee."""


def _normalize_edge(e, n: int, where: str) -> Edge:
    try:
        u, v = e
    except (TypeError, ValueError):
        raise InstanceError(f"{where}: edge {e!r} is not a vertex pair") from None
    u, v = int(u), int(v)
    if not (0 <= u < n and 0 <= v < n):
        raise InstanceError(f"{where}: endpoint out of range in edge ({u}, {v}), n={n}")
    if u == v:
        raise InstanceError(f"{where}: self-loop ({u}, {v})")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class GraphFamily:
    """Simple graphs G_1..G_ell on a shared vertex set {0, .., n-1}.

    Edges are stored as sorted pairs; each member graph must be simple,
    but different members may repeat each other's edges.  Isolated
    vertices are fine: every guarantee depends only on edges.
    """

    n: int
    graphs: tuple[tuple[Edge, ...], ...]
    m: tuple[int, ...] = field(init=False, compare=False)
    degrees: tuple[tuple[int, ...], ...] = field(init=False, compare=False)
    max_degree: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise InstanceError(f"negative vertex count {self.n}")
        if len(self.graphs) < 1:
            raise InstanceError("a family needs at least one graph")
        norm = []
        degrees = []
        for i, edges in enumerate(self.graphs):
            where = f"graph {i}"
            seen: set[Edge] = set()
            out = []
            deg = [0] * self.n
            for e in edges:
                e = _normalize_edge(e, self.n, where)
                if e in seen:
                    raise InstanceError(f"{where}: duplicate edge {e}")
                seen.add(e)
                out.append(e)
                deg[e[0]] += 1
                deg[e[1]] += 1
            norm.append(tuple(out))
            degrees.append(tuple(deg))
        object.__setattr__(self, "graphs", tuple(norm))
        object.__setattr__(self, "m", tuple(len(g) for g in self.graphs))
        object.__setattr__(self, "degrees", tuple(degrees))
        object.__setattr__(self, "max_degree", tuple(max(d, default=0) for d in degrees))

    @property
    def ell(self) -> int:
        return len(self.graphs)


@dataclass(frozen=True)
class HypergraphFamily:
    """r-uniform hypergraphs H_1..H_ell on a shared vertex set {0, .., n-1}.

    Besides edge counts, each member carries its pair degree
    ``delta2 = max over vertex pairs x != y of #{edges containing both}``,
    which controls the derived rainbow-count guarantee.
    """

    n: int
    r: int
    hypergraphs: tuple[tuple[tuple[int, ...], ...], ...]
    m: tuple[int, ...] = field(init=False, compare=False)
    delta2: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise InstanceError(f"negative vertex count {self.n}")
        if self.r < 2:
            raise InstanceError(f"uniformity must be >= 2, got {self.r}")
        if len(self.hypergraphs) < 1:
            raise InstanceError("a family needs at least one hypergraph")
        norm = []
        d2 = []
        for i, edges in enumerate(self.hypergraphs):
            where = f"hypergraph {i}"
            seen: set[tuple[int, ...]] = set()
            out = []
            pair_incidence: dict[Edge, int] = {}
            for e in edges:
                e = tuple(sorted(int(x) for x in e))
                if len(set(e)) != self.r or len(e) != self.r:
                    raise InstanceError(
                        f"{where}: edge {e} does not have exactly {self.r} distinct vertices"
                    )
                if not all(0 <= x < self.n for x in e):
                    raise InstanceError(f"{where}: endpoint out of range in edge {e}, n={self.n}")
                if e in seen:
                    raise InstanceError(f"{where}: duplicate edge {e}")
                seen.add(e)
                out.append(e)
                for a in range(self.r):
                    for b in range(a + 1, self.r):
                        key = (e[a], e[b])
                        pair_incidence[key] = pair_incidence.get(key, 0) + 1
            norm.append(tuple(out))
            d2.append(max(pair_incidence.values(), default=0))
        object.__setattr__(self, "hypergraphs", tuple(norm))
        object.__setattr__(self, "m", tuple(len(h) for h in self.hypergraphs))
        object.__setattr__(self, "delta2", tuple(d2))

    @property
    def ell(self) -> int:
        return len(self.hypergraphs)

    def pair_count(self, i: int, x: int, y: int) -> int:
        """Number of edges of member ``i`` containing both ``x`` and ``y``."""
        if x == y:
            raise ValueError("pair_count needs two distinct vertices")
        return sum(1 for e in self.hypergraphs[i] if x in e and y in e)


@dataclass(frozen=True)
class Assignment:
    """Per-vertex class labels in {0..k-1}, or UNDECIDED for open vertices."""

    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"class count must be >= 2, got {self.k}")
        labels = tuple(int(x) for x in self.labels)
        for v, lab in enumerate(labels):
            if lab != UNDECIDED and not (0 <= lab < self.k):
                raise ValueError(f"vertex {v}: label {lab} outside 0..{self.k - 1}")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_total(self) -> bool:
        return UNDECIDED not in self.labels

    def undecided_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, lab in enumerate(self.labels) if lab == UNDECIDED)

    def class_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.k
        for lab in self.labels:
            if lab != UNDECIDED:
                sizes[lab] += 1
        return tuple(sizes)

    def with_label(self, v: int, c: int) -> "Assignment":
        labels = list(self.labels)
        labels[v] = c
        return Assignment(tuple(labels), self.k)

    @classmethod
    def from_side(cls, n: int, side: set[int] | frozenset[int]) -> "Assignment":
        """Bipartition helper: vertices in ``side`` get class 0, the rest class 1."""
        return cls(tuple(0 if v in side else 1 for v in range(n)), 2)


def _require_total(a: Assignment) -> None:
    if not a.is_total:
        raise PartialAssignmentError(
            f"assignment has {len(a.undecided_vertices())} undecided vertices"
        )


def crossing_count(edges, a: Assignment) -> int:
    """Number of edges with one endpoint on each side of a bipartition."""
    if a.k != 2:
        raise ValueError(f"crossing_count needs a 2-class assignment, got k={a.k}")
    _require_total(a)
    lab = a.labels
    return sum(1 for u, v in edges if lab[u] != lab[v])


def partition_counts(edges, a: Assignment):
    """Classify every edge of one graph under a total k-assignment.

    Returns ``(pairs, within, crossing)`` where ``pairs[(s, t)]`` counts
    edges between classes s < t, ``within[s]`` counts edges inside class s,
    and ``crossing`` is the number of edges whose endpoints differ.  Always
    ``sum(pairs) + sum(within) == len(edges)``.
    """
    _require_total(a)
    lab = a.labels
    k = a.k
    pairs = {(s, t): 0 for s in range(k) for t in range(s + 1, k)}
    within = [0] * k
    for u, v in edges:
        cu, cv = lab[u], lab[v]
        if cu == cv:
            within[cu] += 1
        elif cu < cv:
            pairs[(cu, cv)] += 1
        else:
            pairs[(cv, cu)] += 1
    crossing = len(edges) - sum(within)
    return pairs, tuple(within), crossing


def rainbow_count(edges, a: Assignment, r: int) -> int:
    """Number of r-uniform edges meeting all r classes (one vertex per class)."""
    if a.k != r:
        raise ValueError(f"rainbow count needs k == r, got k={a.k}, r={r}")
    _require_total(a)
    lab = a.labels
    count = 0
    for e in edges:
        if len({lab[x] for x in e}) == r:
            count += 1
    return count


def edwards_bound(m: int) -> float:
    """Tight lower bound on the max cut of any single graph with m edges."""
    if m < 0:
        raise ValueError(f"edge count must be >= 0, got {m}")
    return m / 2 + math.sqrt(m / 8 + 1 / 64) - 1 / 8


def epsilon_cap(ell: int, k: int) -> Fraction:
    """Largest admissible epsilon for the pairwise guarantee: 1/(9*ell^2*k^4)."""
    return Fraction(1, 9 * ell * ell * k ** 4)


def _check_epsilon(eps, ell: int, k: int) -> None:
    # Compared at float precision: float(cap) may round a hair above the
    # exact rational, and an epsilon echoed through a report must revalidate.
    cap = epsilon_cap(ell, k)
    if eps is None or not 0 < float(eps) <= float(cap):
        raise EpsilonRangeError(
            f"epsilon must satisfy 0 < eps <= 1/(9*ell^2*k^4) = {float(cap):.6g} "
            f"(ell={ell}, k={k}); got {eps!r}"
        )


THRESHOLD_KINDS = ("thm1", "thm2", "thm3_pair", "thm3_within", "hyp")


def threshold_for(kind: str, *, m: int, ell: int = 1, k: int = 2,
                  eps=None, r: int | None = None, delta2: int | None = None) -> float:
    """Guarantee threshold for one constraint.

    kind:
      thm1        bipartition cut:        m/2 - sqrt(ell*m/2)
      thm2        k-way crossing:         (k-1)*m/k - sqrt(2*ell*m)
      thm3_pair   between classes s,t:    2*m/k^2 - eps^(1/4)*m
      thm3_within inside one class:       m/k^2 - eps^(1/4)*m
      hyp         rainbow hyperedges:     r!*m/r^r - sqrt(2*ell*(1+r*(r-1)*delta2)*m)

    thm3 kinds require 0 < eps <= 1/(9*ell^2*k^4).  The thresholds are
    real-valued and are compared against integer counts without rounding.
    """
    if m < 0 or ell < 1:
        raise ValueError(f"need m >= 0 and ell >= 1, got m={m}, ell={ell}")
    if kind == "thm1":
        return m / 2 - math.sqrt(ell * m / 2)
    if kind == "thm2":
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        return (k - 1) * m / k - math.sqrt(2 * ell * m)
    if kind in ("thm3_pair", "thm3_within"):
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        _check_epsilon(eps, ell, k)
        mean = 2 * m / k ** 2 if kind == "thm3_pair" else m / k ** 2
        return mean - float(eps) ** 0.25 * m
    if kind == "hyp":
        if r is None or delta2 is None:
            raise ValueError("hyp threshold needs r and delta2")
        mean = math.factorial(r) * m / r ** r
        return mean - math.sqrt(2 * ell * (1 + r * (r - 1) * delta2) * m)
    raise ValueError(f"unknown threshold kind {kind!r}; expected one of {THRESHOLD_KINDS}")


@dataclass(frozen=True)
class Constraint:
    """One guarantee row: an integer statistic checked against a real threshold."""

    graph: int
    stat: str
    count: int
    threshold: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class CutReport:
    """All cut statistics of one assignment, with pass/fail per constraint.

    ``pairs[i][(s, t)]`` and ``within[i][s]`` are per-member edge
    classifications (graph families only); ``rainbow[i]`` the rainbow edge
    counts (hypergraph families only).  Every number here is re-derivable
    from (instance, assignment).
    """

    kind: str
    class_sizes: tuple[int, ...]
    crossing: tuple[int, ...]
    pairs: tuple
    within: tuple
    rainbow: tuple[int, ...]
    constraints: tuple[Constraint, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.constraints)

    def constraint(self, graph: int, stat: str) -> Constraint:
        for c in self.constraints:
            if c.graph == graph and c.stat == stat:
                return c
        raise KeyError((graph, stat))
