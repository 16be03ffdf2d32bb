"""Simple graphs, the standard families, joins, clique gluings and chromatic
polynomials.

Vertices are always the dense ids ``0..n-1``.  Every builder documents where
the vertices of its inputs land so that covers built on parts can be moved
onto the result deterministically.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import FormulaDomainError, ParseError


def _edge(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph.

    ``edges`` keeps the order in which edges were given, each stored as
    ``(min, max)``.  Equality ignores that order.
    """

    num_vertices: int
    edges: tuple = ()
    labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        n = self.num_vertices
        if n < 0:
            raise ValueError("negative vertex count")
        seen = set()
        normalized = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            e = _edge(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            normalized.append(e)
        object.__setattr__(self, "edges", tuple(normalized))
        if self.labels is not None:
            if len(self.labels) != n:
                raise ValueError("labels must name every vertex")
            object.__setattr__(self, "labels", tuple(self.labels))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_vertices == other.num_vertices and self.edge_set == other.edge_set

    def __hash__(self):
        return hash((self.num_vertices, self.edge_set))

    @cached_property
    def edge_set(self):
        return frozenset(self.edges)

    @cached_property
    def adjacency(self):
        adj = [set() for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(s) for s in adj)

    @cached_property
    def edge_index(self):
        return {e: i for i, e in enumerate(self.edges)}

    def has_edge(self, u, v):
        return _edge(u, v) in self.edge_set

    def degree(self, v):
        return len(self.adjacency[v])

    @property
    def num_edges(self):
        return len(self.edges)

    def is_clique(self, vertices):
        return all(self.has_edge(a, b) for a, b in itertools.combinations(vertices, 2))

    def components(self):
        seen = [False] * self.num_vertices
        comps = []
        for s in range(self.num_vertices):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in sorted(self.adjacency[x]):
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self):
        return self.num_vertices > 0 and len(self.components()) == 1

    def cyclomatic_number(self):
        return self.num_edges - self.num_vertices + len(self.components())

    def bfs_tree(self, root=0):
        """Edges of the BFS spanning tree from ``root``, neighbors visited in
        increasing id order.  Requires a connected graph."""
        parent = {root: None}
        order = [root]
        queue = deque([root])
        tree = []
        while queue:
            x = queue.popleft()
            for y in sorted(self.adjacency[x]):
                if y not in parent:
                    parent[y] = x
                    order.append(y)
                    tree.append(_edge(x, y))
                    queue.append(y)
        if len(order) != self.num_vertices:
            raise ValueError("graph is not connected")
        return tuple(tree)

    def induced_subgraph(self, vertices):
        """Subgraph on ``vertices`` relabelled to ``0..k-1`` in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(vertices), edges)

    def remove_vertex(self, w):
        keep = [v for v in range(self.num_vertices) if v != w]
        return self.induced_subgraph(keep)

    def is_cycle(self):
        n = self.num_vertices
        return (
            n >= 3
            and self.num_edges == n
            and all(len(a) == 2 for a in self.adjacency)
            and self.is_connected()
        )

    def cycle_order(self):
        """Vertices of a cycle graph in cyclic order starting 0, then its
        smaller neighbor."""
        if not self.is_cycle():
            raise ValueError("graph is not a cycle")
        order = [0]
        prev, cur = None, 0
        nxt = min(self.adjacency[0])
        while nxt != 0:
            order.append(nxt)
            prev, cur = cur, nxt
            (nxt,) = [y for y in self.adjacency[cur] if y != prev]
        return order


# -- families and operations -------------------------------------------------


def cycle(n):
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def path(n):
    if n < 1:
        raise ValueError("a path needs at least 1 vertex")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    if n < 1:
        raise ValueError("a complete graph needs at least 1 vertex")
    return Graph(n, list(itertools.combinations(range(n), 2)))


def build_family(family, n):
    builders = {"cycle": cycle, "path": path, "complete": complete}
    try:
        return builders[family](n)
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None


def disjoint_union(parts: Sequence[Graph]) -> Graph:
    """Vertex-disjoint union; part ``i`` is shifted by the sizes of the parts
    before it."""
    if not parts:
        raise ValueError("need at least one part")
    edges = []
    offset = 0
    for g in parts:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.num_vertices
    return Graph(offset, edges)


def join(g: Graph, h: Graph) -> Graph:
    """``g`` keeps ids ``0..|g|-1``, ``h`` is shifted after it, and every
    cross pair becomes an edge."""
    if g.num_vertices == 0 or h.num_vertices == 0:
        raise ValueError("join of an empty graph")
    n = g.num_vertices
    edges = list(g.edges)
    edges.extend((u, v) for u in range(n) for v in range(n, n + h.num_vertices))
    edges.extend((u + n, v + n) for u, v in h.edges)
    return Graph(n + h.num_vertices, edges)


def wheel(n):
    """K_1 joined with C_n: hub 0, rim 1..n in cyclic order."""
    return join(complete(1), cycle(n))


def cone(g):
    return join(complete(1), g)


def complete_join_cycle(p, n):
    """K_p joined with C_n: clique on 0..p-1, cycle on p..p+n-1."""
    return join(complete(p), cycle(n))


def cone_of_cycles(lengths):
    """K_1 joined with the disjoint union of cycles of the given lengths."""
    return join(complete(1), disjoint_union([cycle(k) for k in lengths]))


@dataclass(frozen=True)
class GluingMap:
    parts: tuple
    p: int
    chosen_cliques: tuple
    glued_vertex_ids: tuple
    part_vertex_map: tuple  # per part, tuple indexed by part vertex


def glue(parts: Sequence[Graph], cliques: Sequence[Sequence[int]]):
    """K_p-gluing: the ``q``-th vertex of every chosen clique becomes one vertex.

    Part 0 keeps its ids, so the glued vertices are the ids of part 0's
    clique.  The remaining vertices of each later part are appended in
    increasing id order.
    """
    parts = tuple(parts)
    if len(parts) < 2:
        raise ValueError("gluing needs at least two parts")
    if len(cliques) != len(parts):
        raise ValueError("one clique per part is required")
    p = len(cliques[0])
    if p < 1:
        raise ValueError("clique size must be at least 1")
    for g, clique in zip(parts, cliques):
        if len(clique) != p:
            raise ValueError("all chosen cliques must have the same size")
        if len(set(clique)) != p or not all(0 <= v < g.num_vertices for v in clique):
            raise ValueError(f"invalid clique {tuple(clique)}")
        if not g.is_clique(clique):
            raise ValueError(f"{tuple(clique)} is not a clique")

    glued = tuple(cliques[0])
    maps = [tuple(range(parts[0].num_vertices))]
    n = parts[0].num_vertices
    for g, clique in zip(parts[1:], cliques[1:]):
        pos = {v: q for q, v in enumerate(clique)}
        vmap = []
        for v in range(g.num_vertices):
            if v in pos:
                vmap.append(glued[pos[v]])
            else:
                vmap.append(n)
                n += 1
        maps.append(tuple(vmap))

    edges = []
    seen = set()
    for g, vmap in zip(parts, maps):
        for u, v in g.edges:
            e = _edge(vmap[u], vmap[v])
            if e not in seen:
                seen.add(e)
                edges.append(e)
    result = Graph(n, edges)
    gmap = GluingMap(
        parts=parts,
        p=p,
        chosen_cliques=tuple(tuple(c) for c in cliques),
        glued_vertex_ids=glued,
        part_vertex_map=tuple(maps),
    )
    return result, gmap


def bowtie():
    return glue([complete(3), complete(3)], [(0,), (0,)])[0]


# -- text format -------------------------------------------------------------


def format_graph(g: Graph) -> str:
    lines = [f"{g.num_vertices} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise ParseError("empty graph file")
    lineno, header = rows[0]
    try:
        n, e = (int(x) for x in header)
    except ValueError:
        raise ParseError("header must be 'n e'", lineno) from None
    body = rows[1:]
    if len(body) != e:
        raise ParseError(f"header announces {e} edges, found {len(body)}", lineno)
    edges = []
    for lineno, fields in body:
        try:
            u, v = (int(x) for x in fields)
        except ValueError:
            raise ParseError("edge line must be 'u v'", lineno) from None
        edges.append((u, v))
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# -- chromatic polynomials ---------------------------------------------------


class Polynomial:
    """Integer polynomial in one variable; ``coefficients[i]`` multiplies m**i."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        coeffs = [int(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    @classmethod
    def monomial(cls, degree):
        return cls([0] * degree + [1])

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, m):
        value = 0
        for c in reversed(self.coefficients):
            value = value * m + c
        return value

    def __add__(self, other):
        a, b = self.coefficients, other.coefficients
        size = max(len(a), len(b))
        return Polynomial(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size)
        )

    def __neg__(self):
        return Polynomial(-c for c in self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial(c * other for c in self.coefficients)
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1) if a and b else []
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"Polynomial({list(self.coefficients)})"

    def __str__(self):
        terms = []
        for i in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                power = "m" if i == 1 else f"m^{i}"
                body = power if mag == 1 else f"{mag}{power}"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


_MEMO_MAX_VERTICES = 10


def _canonical_key(n, edges):
    # Relabel by (degree, neighbor degree multiset); ties keep id order.  Equal
    # keys imply isomorphic graphs, not the converse.
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    nbr = [[] for _ in range(n)]
    for u, v in edges:
        nbr[u].append(deg[v])
        nbr[v].append(deg[u])
    order = sorted(range(n), key=lambda x: (deg[x], sorted(nbr[x]), x))
    pos = {v: i for i, v in enumerate(order)}
    return n, tuple(sorted(_edge(pos[u], pos[v]) for u, v in edges))


def _contract(n, edges, u, v):
    """Merge ``v`` into ``u`` (u < v); ids above ``v`` shift down by one."""

    def relabel(x):
        if x == v:
            x = u
        return x - 1 if x > v else x

    out = set()
    for a, b in edges:
        if (a, b) == (u, v):
            continue
        a, b = relabel(a), relabel(b)
        if a != b:
            out.add(_edge(a, b))
    return n - 1, frozenset(out)


def _dc(n, edges, memo):
    if not edges:
        return Polynomial.monomial(n)
    key = _canonical_key(n, edges) if n <= _MEMO_MAX_VERTICES else None
    if key is not None and key in memo:
        return memo[key]
    e = min(edges)
    deleted = _dc(n, edges - {e}, memo)
    contracted = _dc(*_contract(n, edges, *e), memo)
    result = deleted - contracted
    if key is not None:
        memo[key] = result
    return result


_CHROMATIC_MEMO: dict = {}


def chromatic_polynomial(g: Graph) -> Polynomial:
    """Deletion-contraction on the smallest edge, memoized on a degree-sorted
    relabelling for graphs of at most 10 vertices."""
    return _dc(g.num_vertices, frozenset(g.edges), _CHROMATIC_MEMO)


def chromatic_number(g: Graph) -> int:
    """Smallest positive m with P(g, m) != 0."""
    poly = chromatic_polynomial(g)
    m = 1
    while poly(m) == 0:
        m += 1
    return m


def falling_factorial(m, p):
    out = 1
    for i in range(p):
        out *= m - i
    return out


def _exact_div(num, den, what):
    if den == 0 or num % den:
        raise FormulaDomainError(f"{what}: {num} is not divisible by {den}")
    return num // den


def chromatic_closed_form(family, m, **params):
    """Evaluate a textbook closed form for P(G, m).

    Families and their parameters: ``cycle(n)``, ``complete(n)``, ``tree(n)``,
    ``join_complete(g, n)`` for K_n joined with ``g``, and
    ``gluing(parts, p)`` for any K_p-gluing of ``parts``.
    """
    if m < 0:
        raise FormulaDomainError("m must be non-negative")
    if family == "cycle":
        n = params["n"]
        if n < 3:
            raise FormulaDomainError("cycle needs n >= 3")
        return (m - 1) ** n + (-1) ** n * (m - 1)
    if family == "complete":
        return falling_factorial(m, params["n"])
    if family == "tree":
        n = params["n"]
        return m * (m - 1) ** (n - 1)
    if family == "join_complete":
        g, n = params["g"], params["n"]
        if m < n + 1:
            raise FormulaDomainError(f"join with K_{n} needs m >= {n + 1}")
        return falling_factorial(m, n) * chromatic_polynomial(g)(m - n)
    if family == "gluing":
        parts, p = params["parts"], params["p"]
        if m < p:
            raise FormulaDomainError(f"K_{p}-gluing formula needs m >= {p}")
        num = math.prod(chromatic_polynomial(g)(m) for g in parts)
        den = falling_factorial(m, p) ** (len(parts) - 1)
        return _exact_div(num, den, "gluing quotient")
    raise ValueError(f"unknown family {family!r}")


# -- chordality ----------------------------------------------------------------


@dataclass(frozen=True)
class PeoData:
    ordering: tuple
    alphas: tuple


def _alphas(g, ordering):
    pos = {v: i for i, v in enumerate(ordering)}
    return tuple(sum(1 for y in g.adjacency[v] if pos[y] > pos[v]) for v in ordering)


def is_perfect_elimination_ordering(g: Graph, ordering) -> bool:
    pos = {v: i for i, v in enumerate(ordering)}
    for v in ordering:
        later = [y for y in g.adjacency[v] if pos[y] > pos[v]]
        if not g.is_clique(later):
            return False
    return True


def _mcs_order(g, end):
    # Maximum cardinality search; the reverse of the visit order is a PEO
    # whenever g is chordal.
    n = g.num_vertices
    weight = [0] * n
    visited = [False] * n
    visit = []
    for step in range(n):
        if step == 0 and end is not None:
            z = end
        else:
            z = max((v for v in range(n) if not visited[v]), key=lambda v: (weight[v], -v))
        visited[z] = True
        visit.append(z)
        for y in g.adjacency[z]:
            if not visited[y]:
                weight[y] += 1
    return tuple(reversed(visit))


def perfect_elimination_ordering(g: Graph, end: Optional[int] = None) -> Optional[PeoData]:
    """A PEO of ``g`` ending at ``end`` (when given), or None if ``g`` is not
    chordal."""
    if g.num_vertices == 0:
        return PeoData((), ())
    ordering = _mcs_order(g, end)
    if is_perfect_elimination_ordering(g, ordering):
        return PeoData(ordering, _alphas(g, ordering))
    if g.num_vertices < 8:
        rest = [v for v in range(g.num_vertices) if v != end]
        for perm in itertools.permutations(rest):
            ordering = perm + (end,) if end is not None else perm
            if is_perfect_elimination_ordering(g, ordering):
                return PeoData(ordering, _alphas(g, ordering))
    return None


def is_chordal(g: Graph) -> bool:
    return perfect_elimination_ordering(g) is not None
