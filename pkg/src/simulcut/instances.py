"""Instance file format and seeded instance generators.

Text format (UTF-8, LF line endings, '#' starts a full-line comment,
blank lines ignored):

    graphs <ell> vertices <n>
    edges <m_1>
    <u> <v>            one edge per line, m_1 lines
    ...
    edges <m_ell>
    ...

    hypergraphs <ell> vertices <n> uniformity <r>
    edges <m_1>
    <v1> ... <vr>      r vertex indices per line
    ...

Anything structurally wrong raises InstanceFormatError naming the line and
the violation; loaders never repair an instance.
"""

from __future__ import annotations

import math

from .model import GraphFamily, HypergraphFamily, InstanceError
from .mc import substream

GENERATOR_KINDS = ("gnm", "disjoint-cycles", "star", "bounded-degree", "runiform")


class InstanceFormatError(ValueError):
    """Malformed instance text; carries the offending 1-based line number."""

    def __init__(self, line: int | None, message: str):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def _int_token(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceFormatError(lineno, f"{what} must be an integer, got {tok!r}") from None


def parse_instance(text: str):
    """Parse instance text into a GraphFamily or HypergraphFamily."""
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise InstanceFormatError(None, "empty instance: missing header") from None

    tokens = header.split()
    if tokens[0] == "graphs":
        if len(tokens) != 4 or tokens[2] != "vertices":
            raise InstanceFormatError(lineno, "expected 'graphs <ell> vertices <n>'")
        ell = _int_token(tokens[1], lineno, "ell")
        n = _int_token(tokens[3], lineno, "n")
        r = None
    elif tokens[0] == "hypergraphs":
        if len(tokens) != 6 or tokens[2] != "vertices" or tokens[4] != "uniformity":
            raise InstanceFormatError(
                lineno, "expected 'hypergraphs <ell> vertices <n> uniformity <r>'")
        ell = _int_token(tokens[1], lineno, "ell")
        n = _int_token(tokens[3], lineno, "n")
        r = _int_token(tokens[5], lineno, "r")
    else:
        raise InstanceFormatError(lineno, f"unknown header {tokens[0]!r}")
    if ell < 1:
        raise InstanceFormatError(lineno, f"ell must be >= 1, got {ell}")
    if n < 0:
        raise InstanceFormatError(lineno, f"n must be >= 0, got {n}")
    if r is not None and r < 2:
        raise InstanceFormatError(lineno, f"uniformity must be >= 2, got {r}")

    width = 2 if r is None else r
    members = []
    for g in range(ell):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise InstanceFormatError(
                None, f"member {g}: expected 'edges <m>' but the file ended") from None
        tokens = line.split()
        if len(tokens) != 2 or tokens[0] != "edges":
            raise InstanceFormatError(lineno, f"member {g}: expected 'edges <m>', got {line!r}")
        m = _int_token(tokens[1], lineno, "edge count")
        if m < 0:
            raise InstanceFormatError(lineno, f"member {g}: edge count must be >= 0")
        edges = []
        seen: set[tuple[int, ...]] = set()
        for j in range(m):
            try:
                lineno, line = next(lines)
            except StopIteration:
                raise InstanceFormatError(
                    None,
                    f"member {g}: declared {m} edges but the file ended after {j}",
                ) from None
            tokens = line.split()
            if tokens[0] == "edges":
                raise InstanceFormatError(
                    lineno, f"member {g}: declared {m} edges but the block has only {j}")
            if len(tokens) != width:
                raise InstanceFormatError(
                    lineno, f"member {g}: expected {width} vertex indices, got {len(tokens)}")
            verts = tuple(_int_token(t, lineno, "vertex index") for t in tokens)
            for x in verts:
                if not 0 <= x < n:
                    raise InstanceFormatError(
                        lineno, f"member {g}: vertex index {x} out of range [0, {n})")
            if len(set(verts)) != width:
                kindword = "self-loop" if width == 2 else "repeated vertex"
                raise InstanceFormatError(
                    lineno, f"member {g}: {kindword} in edge {' '.join(tokens)}")
            key = tuple(sorted(verts))
            if key in seen:
                raise InstanceFormatError(
                    lineno, f"member {g}: duplicate edge {' '.join(tokens)}")
            seen.add(key)
            edges.append(key)
        members.append(tuple(edges))
    try:
        lineno, line = next(lines)
    except StopIteration:
        pass
    else:
        raise InstanceFormatError(lineno, f"trailing content {line!r} after the last member")

    try:
        if r is None:
            return GraphFamily(n=n, graphs=tuple(members))
        return HypergraphFamily(n=n, r=r, hypergraphs=tuple(members))
    except InstanceError as exc:
        raise InstanceFormatError(None, str(exc)) from exc


def serialize_instance(family) -> str:
    """Canonical text for an instance; parse(serialize(x)) reproduces x."""
    out = []
    if isinstance(family, HypergraphFamily):
        out.append(f"hypergraphs {family.ell} vertices {family.n} uniformity {family.r}")
        members = family.hypergraphs
    else:
        out.append(f"graphs {family.ell} vertices {family.n}")
        members = family.graphs
    for edges in members:
        out.append(f"edges {len(edges)}")
        for e in edges:
            out.append(" ".join(str(x) for x in e))
    return "\n".join(out) + "\n"


def _pair_from_index(x: int, n: int) -> tuple[int, int]:
    """Decode a rank in [0, C(n,2)) to the pair (u, v), u < v, in row order."""
    # offset(u) = u*(2n - u - 1)/2 ranks the first pair of row u
    disc = (2 * n - 1) ** 2 - 8 * x
    u = (2 * n - 1 - math.isqrt(disc)) // 2
    while u * (2 * n - u - 1) // 2 > x:
        u -= 1
    while (u + 1) * (2 * n - u - 2) // 2 <= x:
        u += 1
    v = x - u * (2 * n - u - 1) // 2 + u + 1
    return u, v


def _gnm_edges(n: int, m: int, rng) -> tuple:
    ncr = n * (n - 1) // 2
    ranks = rng.choice(ncr, size=m, replace=False)
    return tuple(sorted(_pair_from_index(int(x), n) for x in ranks))


def _hamilton_union(n: int, cycles: int, rng) -> tuple:
    """Edge-disjoint union of `cycles` random Hamilton cycles (degree 2*cycles)."""
    edges: set[tuple[int, int]] = set()
    for _ in range(cycles):
        for _attempt in range(1000):
            perm = rng.permutation(n)
            cyc = set()
            ok = True
            for i in range(n):
                u, v = int(perm[i]), int(perm[(i + 1) % n])
                e = (u, v) if u < v else (v, u)
                if e in edges or e in cyc:
                    ok = False
                    break
                cyc.add(e)
            if ok and len(cyc) == n:
                edges |= cyc
                break
        else:
            raise ValueError(
                f"could not place {cycles} edge-disjoint Hamilton cycles on {n} vertices")
    return tuple(sorted(edges))


def _runiform_edges(n: int, m: int, r: int, rng) -> tuple:
    total = math.comb(n, r)
    if m > total:
        raise ValueError(f"m={m} exceeds the {total} distinct {r}-subsets of {n} vertices")
    edges: set[tuple[int, ...]] = set()
    while len(edges) < m:
        e = tuple(sorted(int(x) for x in rng.choice(n, size=r, replace=False)))
        edges.add(e)
    return tuple(sorted(edges))


def generate(kind: str, *, n: int, m: int | None = None, ell: int = 1,
             r: int | None = None, degree: int | None = None, seed: int = 0):
    """Deterministic seeded instance generators.

    gnm             ell independent uniform graphs with exactly m edges
    disjoint-cycles two edge-disjoint Hamilton cycles (n odd >= 5); for
                    n = 5 their union is the complete graph
    star            one graph: vertex 0 joined to everyone (max degree n-1)
    bounded-degree  ell graphs, each a union of degree/2 random
                    edge-disjoint Hamilton cycles (so max degree = degree
                    exactly and m = n*degree/2)
    runiform        ell independent r-uniform hypergraphs with m edges

    Member g of the instance is drawn from substream (seed, g), so output
    is a pure function of the parameters.
    """
    if kind == "gnm":
        if m is None:
            raise ValueError("gnm needs m")
        if not 0 <= m <= n * (n - 1) // 2:
            raise ValueError(f"gnm needs 0 <= m <= n(n-1)/2 = {n * (n - 1) // 2}, got m={m}")
        graphs = tuple(_gnm_edges(n, m, substream(seed, g)) for g in range(ell))
        return GraphFamily(n=n, graphs=graphs)
    if kind == "disjoint-cycles":
        if n < 5 or n % 2 == 0:
            raise ValueError(f"disjoint-cycles needs odd n >= 5, got {n}")
        step1 = tuple(sorted((i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i)
                             for i in range(n)))
        step2 = tuple(sorted((i, (i + 2) % n) if i < (i + 2) % n else ((i + 2) % n, i)
                             for i in range(n)))
        return GraphFamily(n=n, graphs=(step1, step2))
    if kind == "star":
        if n < 2:
            raise ValueError(f"star needs n >= 2, got {n}")
        return GraphFamily(n=n, graphs=(tuple((0, i) for i in range(1, n)),))
    if kind == "bounded-degree":
        if degree is None or degree < 2 or degree % 2 != 0:
            raise ValueError(f"bounded-degree needs an even degree >= 2, got {degree}")
        if degree >= n:
            raise ValueError(f"degree {degree} does not fit on {n} vertices")
        if n < 5:
            raise ValueError(f"bounded-degree needs n >= 5, got {n}")
        graphs = tuple(_hamilton_union(n, degree // 2, substream(seed, g))
                       for g in range(ell))
        return GraphFamily(n=n, graphs=graphs)
    if kind == "runiform":
        if r is None or m is None:
            raise ValueError("runiform needs r and m")
        hypergraphs = tuple(_runiform_edges(n, m, r, substream(seed, g))
                            for g in range(ell))
        return HypergraphFamily(n=n, r=r, hypergraphs=hypergraphs)
    raise ValueError(f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")
