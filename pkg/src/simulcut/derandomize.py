"""Greedy conditional-expectation descent to a certified partition.

The estimator is a sum of quadratic penalty terms (mu - X)^2 / normalizer,
one per tracked statistic, evaluated as exact conditional expectations
given the labels decided so far.  Deciding a vertex uniformly at random
leaves the estimator unchanged in expectation, so some class choice never
increases it; committing the minimizing class at every vertex therefore
ends with the estimator below its initial value.  When the initial value
is below 1, no statistic can finish under mu - sqrt(normalizer), because a
single violated constraint already pushes its own term above 1.

Arithmetic: per-edge conditional probabilities have denominators dividing
k^2 (r^r for rainbow terms), so each term's quadratic is accumulated as a
plain integer over a fixed power of k; only the final division by the
term's real normalizer is floating point.  Incremental state makes one
candidate evaluation O(deg(v) * k); `naive=True` switches to a from-scratch
recompute of every moment, kept as the correctness oracle for the
incremental bookkeeping.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    UNDECIDED,
    Assignment,
    Constraint,
    CutReport,
    GraphFamily,
    HypergraphFamily,
    partition_counts,
    rainbow_count,
)
from .estimator import (
    EstimatorBudgetError,
    EventSpec,
    _member_edges,
    _quadratic,
    stat_count,
    validate_specs,
)


@dataclass(frozen=True)
class DescentStep:
    """Audit record for one vertex decision."""

    vertex: int
    chosen: int
    value: float
    candidates: tuple[float, ...]


@dataclass(frozen=True)
class DerandResult:
    assignment: Assignment
    report: CutReport
    trace: tuple[DescentStep, ...]
    initial_value: float
    final_value: float


class _GraphTerm:
    """Incremental penalty term for a crossing/pair/within statistic.

    Stores, per edge, the integer numerator P of its conditional probability
    over k^2, plus per-vertex aggregates that make the pair-correlation
    correction for edges through each undecided vertex O(1) to look up:

      sumP, sumP2      sums of P and P^2
      Tw[w], Qw[w]     sums of P and P^2 over edges at w
      Twc[w][c]        sum over edges at w of the numerator (over k) of the
                       edge probability given w -> c
      contrib[w]       k * sum_c(Twc^2 - Qwc) - (Tw^2 - Qw), the correction
                       (over k^4) for ordered edge pairs meeting at w; zero
                       once w is decided

    The exact quadratic is then an integer over k^4:
      mu_k2^2 - 2*mu_k2*sumP + k^2*sumP + sumP^2 - sumP2 + sum(contrib).
    """

    def __init__(self, edges, spec: EventSpec, labels, adj):
        k = spec.k
        self.k = k
        self.k2 = k * k
        self.k4 = self.k2 * self.k2
        self.spec = spec
        self.norm = spec.normalizer
        self.edges = edges
        self.labels = labels
        self.adj = adj
        mu_k2 = spec.mu * self.k2
        if mu_k2.denominator != 1:
            raise ValueError(f"mean {spec.mu} is not a multiple of 1/k^2")
        self.mu_k2 = int(mu_k2)

        kind = spec.kind
        if kind == "crossing":
            p_uu = k * (k - 1)
            p_du = [k * (k - 1)] * k
            p_dd = [[0 if c1 == c2 else self.k2 for c2 in range(k)] for c1 in range(k)]
        elif kind == "pair":
            s, t = spec.s, spec.t
            p_uu = 2
            p_du = [k if c in (s, t) else 0 for c in range(k)]
            p_dd = [[self.k2 if (c1, c2) in ((s, t), (t, s)) else 0
                     for c2 in range(k)] for c1 in range(k)]
        elif kind == "within":
            s = spec.s
            p_uu = 1
            p_du = [k if c == s else 0 for c in range(k)]
            p_dd = [[self.k2 if c1 == c2 == s else 0 for c2 in range(k)] for c1 in range(k)]
        else:
            raise ValueError(f"graph term cannot track {kind!r}")
        self.p_uu = p_uu
        self.p_du = p_du
        self.p_dd = p_dd
        adu = [x // k for x in p_du]
        add = [[x // k for x in row] for row in p_dd]
        # Committing a neighbor of w to class c shifts w's hypothesis row by
        # these per-class deltas (entry c2: edge prob numerator given w -> c2).
        self.d_a = [[add[c2][c] - adu[c2] for c2 in range(k)] for c in range(k)]
        self.d_a2 = [[add[c2][c] ** 2 - adu[c2] ** 2 for c2 in range(k)] for c in range(k)]
        self.adu = adu
        self.add = add
        self.reset()

    def _pnum(self, lu, lv) -> int:
        if lu == UNDECIDED:
            return self.p_uu if lv == UNDECIDED else self.p_du[lv]
        if lv == UNDECIDED:
            return self.p_du[lu]
        return self.p_dd[lu][lv]

    def reset(self):
        labels = self.labels
        k = self.k
        n = len(labels)
        P = [self._pnum(labels[u], labels[v]) for u, v in self.edges]
        self.P = P
        Tw = [0] * n
        Qw = [0] * n
        for eid, (u, v) in enumerate(self.edges):
            p = P[eid]
            Tw[u] += p
            Qw[u] += p * p
            Tw[v] += p
            Qw[v] += p * p
        self.Tw = Tw
        self.Qw = Qw
        Twc = [None] * n
        Qwc = [None] * n
        contrib = [0] * n
        total = 0
        adu, add = self.adu, self.add
        for w in range(n):
            if labels[w] != UNDECIDED:
                Twc[w] = [0] * k
                Qwc[w] = [0] * k
                continue
            trow = [0] * k
            qrow = [0] * k
            for eid, u in self.adj[w]:
                lu = labels[u]
                row = adu if lu == UNDECIDED else [add[c][lu] for c in range(k)]
                for c in range(k):
                    a = row[c]
                    trow[c] += a
                    qrow[c] += a * a
            Twc[w] = trow
            Qwc[w] = qrow
            s = 0
            for c in range(k):
                s += trow[c] * trow[c] - qrow[c]
            cw = k * s - (Tw[w] * Tw[w] - Qw[w])
            contrib[w] = cw
            total += cw
        self.Twc = Twc
        self.Qwc = Qwc
        self.contrib = contrib
        self.total_contrib = total
        self.sumP = sum(P)
        self.sumP2 = sum(p * p for p in P)

    def _quad_num(self, sumP, sumP2, total_contrib) -> int:
        ex2 = self.k2 * sumP + sumP * sumP - sumP2 + total_contrib
        return self.mu_k2 * self.mu_k2 - 2 * self.mu_k2 * sumP + ex2

    def exact_quadratic(self) -> Fraction:
        return Fraction(self._quad_num(self.sumP, self.sumP2, self.total_contrib), self.k4)

    def current_value(self) -> float:
        return float(self.exact_quadratic()) / self.norm

    def candidate_value(self, v, c) -> float:
        labels = self.labels
        k = self.k
        nsumP = self.sumP + k * self.Twc[v][c] - self.Tw[v]
        nsumP2 = self.sumP2 + self.k2 * self.Qwc[v][c] - self.Qw[v]
        ncontrib = self.total_contrib - self.contrib[v]
        da = self.d_a[c]
        da2 = self.d_a2[c]
        newP = self.p_du[c]
        for eid, u in self.adj[v]:
            if labels[u] != UNDECIDED:
                continue
            oldP = self.P[eid]
            tU = self.Tw[u] + newP - oldP
            qU = self.Qw[u] + newP * newP - oldP * oldP
            trow = self.Twc[u]
            qrow = self.Qwc[u]
            s = 0
            for c2 in range(k):
                t2 = trow[c2] + da[c2]
                s += t2 * t2 - qrow[c2] - da2[c2]
            ncontrib += k * s - (tU * tU - qU) - self.contrib[u]
        return float(Fraction(self._quad_num(nsumP, nsumP2, ncontrib), self.k4)) / self.norm

    def commit(self, v, c):
        labels = self.labels
        k = self.k
        self.sumP += k * self.Twc[v][c] - self.Tw[v]
        self.sumP2 += self.k2 * self.Qwc[v][c] - self.Qw[v]
        self.total_contrib -= self.contrib[v]
        self.contrib[v] = 0
        da = self.d_a[c]
        da2 = self.d_a2[c]
        p_new_open = self.p_du[c]
        pdd_c = self.p_dd[c]
        for eid, u in self.adj[v]:
            lu = labels[u]
            oldP = self.P[eid]
            if lu == UNDECIDED:
                self.P[eid] = p_new_open
                self.Tw[u] += p_new_open - oldP
                self.Qw[u] += p_new_open * p_new_open - oldP * oldP
                trow = self.Twc[u]
                qrow = self.Qwc[u]
                s = 0
                for c2 in range(k):
                    trow[c2] += da[c2]
                    qrow[c2] += da2[c2]
                    s += trow[c2] * trow[c2] - qrow[c2]
                cw = k * s - (self.Tw[u] * self.Tw[u] - self.Qw[u])
                self.total_contrib += cw - self.contrib[u]
                self.contrib[u] = cw
            else:
                self.P[eid] = pdd_c[lu]
        self.Tw[v] = k * self.Twc[v][c]
        self.Qw[v] = self.k2 * self.Qwc[v][c]


class _RainbowTerm:
    """Incremental penalty term for the rainbow statistic of one hypergraph.

    Hyperedge pairs may share up to r-1 vertices, so pair corrections are
    kept per overlapping pair instead of per vertex: pairval[p] is
    (E[X_e X_e'] - p_e p_e') over r^(3r), nonzero only while the pair still
    has an undecided shared vertex.  All integers; denominators divide
    r^(3r).
    """

    def __init__(self, edges, spec: EventSpec, labels, n):
        r = spec.k
        self.r = r
        self.D1 = r ** r
        self.D2 = self.D1 * self.D1
        self.D3 = self.D2 * self.D1
        self.spec = spec
        self.norm = spec.normalizer
        self.labels = labels
        self.edges = [tuple(e) for e in edges]
        self.mu_rr = math.factorial(r) * len(edges)
        self.fact = [math.factorial(i) for i in range(r + 1)]
        self.rpow = [r ** i for i in range(r + 1)]
        inc: list[list[int]] = [[] for _ in range(n)]
        for eid, e in enumerate(self.edges):
            for x in e:
                inc[x].append(eid)
        self.inc = inc
        pairs = []
        seen: set[tuple[int, int]] = set()
        for ids in inc:
            for a in range(len(ids)):
                for b in range(a + 1, len(ids)):
                    key = (ids[a], ids[b])
                    if key in seen:
                        continue
                    seen.add(key)
                    shared = tuple(x for x in self.edges[key[0]] if x in self.edges[key[1]])
                    pairs.append((key[0], key[1], shared))
        self.pairs = pairs
        touch: list[list[int]] = [[] for _ in range(n)]
        for pid, (i, j, _) in enumerate(pairs):
            for x in set(self.edges[i]) | set(self.edges[j]):
                touch[x].append(pid)
        self.touch = touch
        self.reset()

    def _pnum(self, e, ov) -> int:
        labels = self.labels
        seen = 0
        undecided = 0
        for x in e:
            lab = labels[x]
            if ov is not None and x in ov:
                lab = ov[x]
            if lab == UNDECIDED:
                undecided += 1
            else:
                bit = 1 << lab
                if seen & bit:
                    return 0
                seen |= bit
        return self.fact[undecided] * self.rpow[self.r - undecided]

    def _pairval(self, pid, ov) -> int:
        i, j, shared = self.pairs[pid]
        labels = self.labels
        open_shared = []
        for w in shared:
            lab = labels[w]
            if ov is not None and w in ov:
                lab = ov[w]
            if lab == UNDECIDED:
                open_shared.append(w)
        if not open_shared:
            return 0
        ei, ej = self.edges[i], self.edges[j]
        pi = self._pnum(ei, ov)
        pj = self._pnum(ej, ov)
        sub = dict(ov) if ov is not None else {}
        total = 0
        for combo in itertools.product(range(self.r), repeat=len(open_shared)):
            for w, cc in zip(open_shared, combo):
                sub[w] = cc
            total += self._pnum(ei, sub) * self._pnum(ej, sub)
        joint = total * self.rpow[self.r - len(open_shared)]
        return joint - pi * pj * self.D1

    def reset(self):
        self.P = [self._pnum(e, None) for e in self.edges]
        self.sumP = sum(self.P)
        self.sumP2 = sum(p * p for p in self.P)
        self.pairvals = [self._pairval(pid, None) for pid in range(len(self.pairs))]
        self.jma = sum(self.pairvals)

    def _quad_num(self, sumP, sumP2, jma) -> int:
        ex2 = sumP * self.D2 + (sumP * sumP - sumP2) * self.D1 + 2 * jma
        return (self.mu_rr * self.mu_rr - 2 * self.mu_rr * sumP) * self.D1 + ex2

    def exact_quadratic(self) -> Fraction:
        return Fraction(self._quad_num(self.sumP, self.sumP2, self.jma), self.D3)

    def current_value(self) -> float:
        return float(self.exact_quadratic()) / self.norm

    def candidate_value(self, v, c) -> float:
        ov = {v: c}
        dsumP = 0
        dsumP2 = 0
        for eid in self.inc[v]:
            old = self.P[eid]
            new = self._pnum(self.edges[eid], ov)
            dsumP += new - old
            dsumP2 += new * new - old * old
        djma = 0
        for pid in self.touch[v]:
            djma += self._pairval(pid, ov) - self.pairvals[pid]
        quad = self._quad_num(self.sumP + dsumP, self.sumP2 + dsumP2, self.jma + djma)
        return float(Fraction(quad, self.D3)) / self.norm

    def commit(self, v, c):
        ov = {v: c}
        for eid in self.inc[v]:
            old = self.P[eid]
            new = self._pnum(self.edges[eid], ov)
            self.sumP += new - old
            self.sumP2 += new * new - old * old
            self.P[eid] = new
        for pid in self.touch[v]:
            nv = self._pairval(pid, ov)
            self.jma += nv - self.pairvals[pid]
            self.pairvals[pid] = nv


class _NaiveTerm:
    """From-scratch recompute of one term; the incremental engines' oracle."""

    def __init__(self, edges, spec: EventSpec, labels):
        self.edges = edges
        self.spec = spec
        self.labels = labels
        self.norm = spec.normalizer

    def exact_quadratic(self) -> Fraction:
        return _quadratic(self.labels, self.edges, self.spec)

    def current_value(self) -> float:
        return float(self.exact_quadratic()) / self.norm

    def candidate_value(self, v, c) -> float:
        labels = self.labels
        labels[v] = c
        quad = _quadratic(labels, self.edges, self.spec)
        labels[v] = UNDECIDED
        return float(quad) / self.norm

    def commit(self, v, c):
        pass


def resolve_order(family, order) -> tuple[int, ...]:
    """Vertex processing order: None/'natural', 'degree', or a permutation."""
    n = family.n
    if order is None or order == "natural":
        return tuple(range(n))
    if order == "degree":
        if isinstance(family, HypergraphFamily):
            deg = [0] * n
            for edges in family.hypergraphs:
                for e in edges:
                    for x in e:
                        deg[x] += 1
        else:
            deg = [sum(d[v] for d in family.degrees) for v in range(n)]
        return tuple(sorted(range(n), key=lambda v: (-deg[v], v)))
    order = tuple(int(v) for v in order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of all vertices")
    return order


def _build_terms(family, specs, labels, naive: bool):
    terms = []
    if naive:
        return [_NaiveTerm(_member_edges(family, s), s, labels) for s in specs]
    adj_cache: dict[int, list] = {}
    n = family.n
    for spec in specs:
        if spec.kind == "rainbow":
            terms.append(_RainbowTerm(family.hypergraphs[spec.graph], spec, labels, n))
        else:
            gi = spec.graph
            if gi not in adj_cache:
                rows: list[list[tuple[int, int]]] = [[] for _ in range(n)]
                for eid, (u, v) in enumerate(family.graphs[gi]):
                    rows[u].append((eid, v))
                    rows[v].append((eid, u))
                adj_cache[gi] = [tuple(r) for r in rows]
            terms.append(_GraphTerm(family.graphs[gi], spec, labels, adj_cache[gi]))
    return terms


def derandomize(family, specs, order=None, naive: bool = False) -> DerandResult:
    """Deterministic partition meeting every spec's threshold.

    Processes vertices in `order`; at each one evaluates the estimator for
    all k classes and commits the minimizer (ties break to the lowest
    class).  Requires the initial estimator to be below 1, which specs_for
    guarantees by construction; given that, the result always satisfies
    count >= mu - sqrt(normalizer) for every spec.
    """
    specs = tuple(specs)
    validate_specs(family, specs)
    is_hyper = isinstance(family, HypergraphFamily)
    if specs:
        ks = {s.k for s in specs}
        if len(ks) != 1:
            raise ValueError(f"specs mix class counts {sorted(ks)}")
        k = ks.pop()
    else:
        k = family.r if is_hyper else 2
    order = resolve_order(family, order)
    labels = [UNDECIDED] * family.n
    terms = _build_terms(family, specs, labels, naive)

    initial = 0.0
    for term in terms:
        initial += term.current_value()
    if initial >= 1.0:
        raise EstimatorBudgetError(
            f"initial estimator {initial:.6g} >= 1: these penalty terms cannot certify "
            "a partition (config contract broken)"
        )

    trace: list[DescentStep] = []
    for v in order:
        candidates = []
        for c in range(k):
            val = 0.0
            for term in terms:
                val += term.candidate_value(v, c)
            candidates.append(val)
        chosen = 0
        for c in range(1, k):
            if candidates[c] < candidates[chosen]:
                chosen = c
        for term in terms:
            term.commit(v, chosen)
        labels[v] = chosen
        trace.append(DescentStep(v, chosen, candidates[chosen], tuple(candidates)))

    assignment = Assignment(tuple(labels), k)
    report = _report_from_specs(family, assignment, specs, is_hyper)
    if not report.all_pass:
        raise AssertionError(
            "descent finished above a threshold; estimator bookkeeping is broken"
        )
    final = trace[-1].value if trace else initial
    return DerandResult(assignment=assignment, report=report, trace=tuple(trace),
                        initial_value=initial, final_value=final)


def _report_from_specs(family, assignment, specs, is_hyper: bool) -> CutReport:
    constraints = []
    for spec in specs:
        count = stat_count(_member_edges(family, spec), assignment, spec)
        thr = spec.threshold
        constraints.append(Constraint(
            graph=spec.graph, stat=spec.stat, count=count,
            threshold=thr, margin=count - thr, passed=count >= thr))
    if is_hyper:
        rainbow = tuple(rainbow_count(family.hypergraphs[i], assignment, family.r)
                        for i in range(family.ell))
        crossing, pairs, within = (), (), ()
    else:
        rainbow = ()
        per_graph = [partition_counts(g, assignment) for g in family.graphs]
        pairs = tuple(p for p, _, _ in per_graph)
        within = tuple(w for _, w, _ in per_graph)
        crossing = tuple(c for _, _, c in per_graph)
    return CutReport(
        kind="hypergraphs" if is_hyper else "graphs",
        class_sizes=assignment.class_sizes(),
        crossing=crossing,
        pairs=pairs,
        within=within,
        rainbow=rainbow,
        constraints=tuple(constraints),
    )
