"""m-fold covers of a graph and the counting of their colorings.

A cover is stored as one matching per base edge.  For the edge ``(u, v)`` with
``u < v`` the matching is a tuple ``t`` of length ``m``: fiber index ``i`` of
``u`` is joined to fiber index ``t[i]`` of ``v``, or to nothing when
``t[i] is None``.  Fibers are implicit cliques, so a coloring is just a map
``f: V -> range(m)`` that avoids every matched pair.

Fiber indices are 0-based in this API.  The text serialization is 1-based and
writes 0 for an undefined entry.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Optional

import numpy as np

from .errors import BudgetExceeded, ParseError
from .graphs import Graph, _edge


def _invert(matching, m):
    inv = [None] * m
    for i, j in enumerate(matching):
        if j is not None:
            inv[j] = i
    return tuple(inv)


def _compose(first, second):
    """Apply ``first`` then ``second`` (None propagates)."""
    return tuple(None if i is None else second[i] for i in first)


@dataclass(frozen=True, eq=False)
class Cover:
    base: Graph
    m: int
    matchings: tuple  # aligned with base.edges

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("fold size must be at least 1")
        if len(self.matchings) != self.base.num_edges:
            raise ValueError("one matching per base edge is required")
        normalized = []
        for e, t in zip(self.base.edges, self.matchings):
            t = tuple(None if x is None else int(x) for x in t)
            if len(t) != self.m:
                raise ValueError(f"matching on {e} has length {len(t)}, expected {self.m}")
            images = [x for x in t if x is not None]
            if any(not 0 <= x < self.m for x in images):
                raise ValueError(f"matching on {e} leaves the fiber")
            if len(set(images)) != len(images):
                raise ValueError(f"matching on {e} is not injective")
            normalized.append(t)
        object.__setattr__(self, "matchings", tuple(normalized))

    @classmethod
    def from_edges(cls, base: Graph, m: int, matchings: Mapping, default="identity"):
        """Build from ``{(u, v): images}``; keys may use either orientation.
        Edges not mentioned get the identity (or nothing, with
        ``default=None``)."""
        table = {}
        for (u, v), t in matchings.items():
            t = tuple(t)
            if u > v:
                t = _invert(t, m)
                u, v = v, u
            if (u, v) not in base.edge_index:
                raise ValueError(f"({u}, {v}) is not an edge of the base graph")
            table[(u, v)] = t
        ident = tuple(range(m)) if default == "identity" else (None,) * m
        return cls(base, m, tuple(table.get(e, ident) for e in base.edges))

    def matching(self, u, v):
        """Images of u's fiber indices in v's fiber."""
        t = self.matchings[self.base.edge_index[_edge(u, v)]]
        return t if u < v else _invert(t, self.m)

    @cached_property
    def is_full(self):
        return all(None not in t for t in self.matchings)

    def key(self):
        """Comparison key in base-edge order; mirrors the serialized form."""
        return tuple(tuple(-1 if x is None else x for x in t) for t in self.matchings)

    def _as_dict(self):
        return dict(zip(self.base.edges, self.matchings))

    def __eq__(self, other):
        if not isinstance(other, Cover):
            return NotImplemented
        return self.base == other.base and self.m == other.m and self._as_dict() == other._as_dict()

    def __hash__(self):
        return hash((self.base, self.m, frozenset(self._as_dict().items())))

    def relabel(self, relabelings):
        """Rename fiber index ``i`` of vertex ``x`` to ``relabelings[x][i]``."""
        out = []
        for (u, v), t in zip(self.base.edges, self.matchings):
            new = [None] * self.m
            for i, j in enumerate(t):
                if j is not None:
                    new[relabelings[u][i]] = relabelings[v][j]
            out.append(tuple(new))
        return Cover(self.base, self.m, tuple(out))

    def cross_edges(self):
        """Cover-graph cross edges as ``((u, i), (v, j))`` pairs."""
        out = []
        for (u, v), t in zip(self.base.edges, self.matchings):
            out.extend(((u, i), (v, j)) for i, j in enumerate(t) if j is not None)
        return out


def canonical_cover(g: Graph, m: int) -> Cover:
    ident = tuple(range(m))
    return Cover(g, m, (ident,) * g.num_edges)


# -- counting ------------------------------------------------------------------


def is_independent(cover: Cover, assignment: Mapping[int, int]) -> bool:
    for (u, v), t in zip(cover.base.edges, cover.matchings):
        if u in assignment and v in assignment and t[assignment[u]] == assignment[v]:
            return False
    return True


def _count(cover: Cover, fixed: Mapping[int, int]) -> int:
    g, m = cover.base, cover.m
    free = [v for v in range(g.num_vertices) if v not in fixed]
    if not free:
        return 1
    free.sort(key=lambda v: (-g.degree(v), v))
    assign = [None] * g.num_vertices
    for v, i in fixed.items():
        assign[v] = i
    placed = set(fixed)
    # For each free vertex, the matchings from already-placed neighbors.
    constraints = []
    for v in free:
        constraints.append([(x, cover.matching(x, v)) for x in sorted(g.adjacency[v]) if x in placed])
        placed.add(v)
    last = len(free) - 1
    full_mask = (1 << m) - 1

    def rec(t):
        mask = 0
        for x, fmap in constraints[t]:
            y = fmap[assign[x]]
            if y is not None:
                mask |= 1 << y
        if t == last:
            return m - mask.bit_count()
        if mask == full_mask:
            return 0
        v = free[t]
        total = 0
        for i in range(m):
            if not (mask >> i) & 1:
                assign[v] = i
                total += rec(t + 1)
        assign[v] = None
        return total

    return rec(0)


def count_colorings(cover: Cover) -> int:
    """Number of cover-colorings (independent transversals), by backtracking
    over vertices in descending-degree order."""
    return _count(cover, {})


def count_colorings_containing(cover: Cover, assignment: Mapping[int, int]) -> int:
    """Number of colorings extending the partial assignment ``vertex -> index``."""
    for v, i in assignment.items():
        if not 0 <= v < cover.base.num_vertices or not 0 <= i < cover.m:
            raise ValueError(f"assignment {v}->{i} out of range")
    if not is_independent(cover, assignment):
        raise ValueError("partial assignment is not independent in the cover graph")
    return _count(cover, dict(assignment))


def fiber_counts(cover: Cover, v: int) -> tuple:
    """``N((v, j))`` for every fiber index ``j``."""
    return tuple(count_colorings_containing(cover, {v: j}) for j in range(cover.m))


def brute_force_count(cover: Cover) -> int:
    """Enumerate all m**n maps; an oracle for small covers."""
    g, m = cover.base, cover.m
    mats = [(u, v, t) for (u, v), t in zip(g.edges, cover.matchings)]
    return sum(
        1
        for f in itertools.product(range(m), repeat=g.num_vertices)
        if all(t[f[u]] != f[v] for u, v, t in mats)
    )


_TALLY_LIMIT = 2_000_000


def all_fiber_counts(cover: Cover):
    """``(total, N)`` with ``N[v][j]`` the colorings through ``(v, j)``, by a
    vectorized sweep over all m**n maps.  Meant for small covers."""
    g, m, n = cover.base, cover.m, cover.base.num_vertices
    if m**n > _TALLY_LIMIT:
        raise ValueError(f"{m}**{n} maps exceed the tally limit")
    grid = np.indices((m,) * n, dtype=np.int16).reshape(n, -1)
    ok = np.ones(grid.shape[1], dtype=bool)
    for (u, v), t in zip(g.edges, cover.matchings):
        clash = np.array([[t[i] == j for j in range(m)] for i in range(m)])
        ok &= ~clash[grid[u], grid[v]]
    good = grid[:, ok]
    counts = [tuple(int(c) for c in np.bincount(good[v], minlength=m)) for v in range(n)]
    return int(ok.sum()), counts


# -- spanning-tree normalization -----------------------------------------------


def _check_spanning_tree(g: Graph, tree):
    tree = [_edge(u, v) for u, v in tree]
    if len(tree) != g.num_vertices - 1 or not all(e in g.edge_set for e in tree):
        raise ValueError("not a spanning tree of the base graph")
    sub = Graph(g.num_vertices, tree)
    if not sub.is_connected():
        raise ValueError("not a spanning tree of the base graph")
    return sub


def spanning_tree_relabeling(cover: Cover, tree=None, root=0):
    """Per-vertex fiber relabelings that turn every tree matching into the
    identity.  ``root`` keeps its names."""
    if not cover.is_full:
        raise ValueError("normalization needs a full cover")
    g, m = cover.base, cover.m
    if tree is None:
        tree = g.bfs_tree(root)
    sub = _check_spanning_tree(g, tree)
    rho = [None] * g.num_vertices
    rho[root] = tuple(range(m))
    stack = [root]
    while stack:
        x = stack.pop()
        for y in sorted(sub.adjacency[x]):
            if rho[y] is None:
                pi = cover.matching(x, y)
                new = [None] * m
                for i in range(m):
                    new[pi[i]] = rho[x][i]
                rho[y] = tuple(new)
                stack.append(y)
    return tuple(rho)


def normalize_by_spanning_tree(cover: Cover, tree=None) -> Cover:
    return cover.relabel(spanning_tree_relabeling(cover, tree))


# -- enumeration ---------------------------------------------------------------


class TreeLabelingSpace:
    """All maps ``V -> range(m)`` that are proper on a spanning tree, as the
    bit positions of Python ints.

    With every tree matching fixed to the identity, a full cover is determined
    by one permutation per co-tree edge, and its colorings are the labelings
    whose bit survives in the AND of those edges' masks.
    """

    def __init__(self, g: Graph, m: int, tree=None):
        if not g.is_connected():
            raise ValueError("labeling space needs a connected graph")
        self.graph = g
        self.m = m
        self.tree = tuple(tree) if tree is not None else g.bfs_tree(0)
        sub = _check_spanning_tree(g, self.tree)
        tree_set = set(_edge(u, v) for u, v in self.tree)
        self.cotree = tuple(e for e in g.edges if e not in tree_set)
        self.perms = tuple(itertools.permutations(range(m)))
        self.perm_index = {p: i for i, p in enumerate(self.perms)}
        self.labels = self._tree_labelings(sub)
        self.size = self.labels.shape[0]
        self.full = (1 << self.size) - 1
        self._edge_masks = {}
        self._vertex_masks = {}

    def _tree_labelings(self, sub):
        m, n = self.m, self.graph.num_vertices
        order, parent = [0], {0: None}
        for x in order:
            for y in sorted(sub.adjacency[x]):
                if y not in parent:
                    parent[y] = x
                    order.append(y)
        labels = np.zeros((m, n), dtype=np.int16)
        labels[:, 0] = np.arange(m)
        for v in order[1:]:
            rows = labels.shape[0]
            labels = np.repeat(labels, m - 1, axis=0)
            shift = np.tile(np.arange(1, m), rows)
            labels[:, v] = (labels[:, parent[v]] + shift) % m
        return labels

    @staticmethod
    def _pack(flags):
        return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")

    def edge_masks(self, pos):
        """Per permutation index, the labelings that respect co-tree edge
        ``self.cotree[pos]`` carrying that permutation."""
        masks = self._edge_masks.get(pos)
        if masks is None:
            u, v = self.cotree[pos]
            perms = np.array(self.perms, dtype=np.int16).reshape(len(self.perms), self.m)
            ok = perms[:, self.labels[:, u]] != self.labels[:, v][None, :]
            masks = [self._pack(row) for row in ok]
            self._edge_masks[pos] = masks
        return masks

    def vertex_masks(self, v):
        masks = self._vertex_masks.get(v)
        if masks is None:
            masks = [self._pack(self.labels[:, v] == j) for j in range(self.m)]
            self._vertex_masks[v] = masks
        return masks

    def mask(self, digits):
        out = self.full
        for pos, d in enumerate(digits):
            out &= self.edge_masks(pos)[d]
        return out

    def count(self, digits):
        return self.mask(digits).bit_count()

    def cover(self, digits) -> Cover:
        ident = tuple(range(self.m))
        cot = dict(zip(self.cotree, (self.perms[d] for d in digits)))
        return Cover(self.graph, self.m, tuple(cot.get(e, ident) for e in self.graph.edges))

    def digits_of(self, cover: Cover):
        """Permutation indices of a cover already normalized to this tree."""
        ident = tuple(range(self.m))
        for u, v in self.tree:
            if cover.matching(u, v) != ident:
                raise ValueError("cover is not normalized to this spanning tree")
        return tuple(self.perm_index[cover.matching(u, v)] for u, v in self.cotree)

    def search_size(self):
        return len(self.perms) ** len(self.cotree)


def required_search(g: Graph, m: int):
    """(cover count, budget units) of the exhaustive full-cover search."""
    covers = _factorial(m) ** g.cyclomatic_number()
    return covers, covers * g.num_vertices


def _factorial(m):
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def check_budget(g: Graph, m: int, budget):
    covers, units = required_search(g, m)
    if budget is not None and units > budget:
        raise BudgetExceeded(covers, units, budget)
    return covers


def shard_bounds(total, shard, shards):
    if not 0 <= shard < shards:
        raise ValueError("shard index out of range")
    return shard * total // shards, (shard + 1) * total // shards


def _decode(index, radix, width):
    digits = [0] * width
    for pos in range(width - 1, -1, -1):
        index, digits[pos] = divmod(index, radix)
    return digits


def iter_prefix_blocks(space: TreeLabelingSpace, start, stop):
    """Walk co-tree assignments with flat indices in ``[start, stop)``.

    Yields ``(prefix_digits, lo, hi, prefix_mask)``: every digit but the last
    is fixed, the last digit ranges over ``lo..hi-1``, and ``prefix_mask`` is
    the AND of the fixed digits' masks.  Consumers AND in the last edge's
    masks themselves, which keeps the innermost loop in C.
    """
    c = len(space.cotree)
    radix = len(space.perms)
    if start >= stop:
        return
    if c == 0:
        yield (), 0, 1, space.full
        return
    width = c - 1
    first, final = start // radix, (stop - 1) // radix
    digits = _decode(first, radix, width)
    masks = [space.edge_masks(pos) for pos in range(width)]
    prefix = [space.full] * (width + 1)
    for pos in range(width):
        prefix[pos + 1] = prefix[pos] & masks[pos][digits[pos]]
    q = first
    while True:
        lo = max(start - q * radix, 0)
        hi = min(stop - q * radix, radix)
        yield tuple(digits), lo, hi, prefix[width]
        if q == final:
            return
        q += 1
        pos = width - 1
        while digits[pos] == radix - 1:
            digits[pos] = 0
            pos -= 1
        digits[pos] += 1
        for p in range(pos, width):
            prefix[p + 1] = prefix[p] & masks[p][digits[p]]


def iter_cotree_assignments(space: TreeLabelingSpace, start=0, stop=None):
    if stop is None:
        stop = space.search_size()
    for prefix, lo, hi, _ in iter_prefix_blocks(space, start, stop):
        if not space.cotree:
            yield ()
            continue
        for d in range(lo, hi):
            yield prefix + (d,)


def enumerate_full_covers(g: Graph, m: int, budget=None, shard=0, shards=1) -> Iterator[Cover]:
    """One full cover per co-tree permutation assignment, BFS tree edges fixed
    to the identity, in lexicographic order.  ``shard``/``shards`` select a
    contiguous slice of that order."""
    if not g.is_connected():
        raise ValueError("enumeration needs a connected graph")
    check_budget(g, m, budget)
    space = TreeLabelingSpace(g, m)
    start, stop = shard_bounds(space.search_size(), shard, shards)
    for digits in iter_cotree_assignments(space, start, stop):
        yield space.cover(digits)


def random_full_cover(g: Graph, m: int, rng: random.Random) -> Cover:
    return Cover(g, m, tuple(tuple(rng.sample(range(m), m)) for _ in g.edges))


def random_cover(g: Graph, m: int, rng: random.Random, p_undefined=0.2) -> Cover:
    """Random partial cover: a random permutation with entries dropped."""
    out = []
    for _ in g.edges:
        perm = rng.sample(range(m), m)
        out.append(tuple(None if rng.random() < p_undefined else x for x in perm))
    return Cover(g, m, tuple(out))


# -- cycles ----------------------------------------------------------------------


def classify_cycle_cover(cover: Cover) -> str:
    """'canonical', 'twisted' or 'not_full', from the composite of the
    matchings around the cycle."""
    g = cover.base
    if not g.is_cycle():
        raise ValueError("base graph is not a cycle")
    if not cover.is_full:
        return "not_full"
    order = g.cycle_order()
    composite = tuple(range(cover.m))
    for a, b in zip(order, order[1:] + order[:1]):
        composite = _compose(composite, cover.matching(a, b))
    return "canonical" if composite == tuple(range(cover.m)) else "twisted"


def cross_edge_cycle(cover: Cover) -> Graph:
    """The cross-edge subgraph of an uncolorable 2-fold cover of an even cycle,
    certified to be a single cycle on all 2n cover vertices.  Cover vertex
    ``(x, i)`` gets id ``2 * x + i``."""
    g = cover.base
    if not g.is_cycle() or g.num_vertices % 2:
        raise ValueError("base graph must be an even cycle")
    if cover.m != 2:
        raise ValueError("cover must be 2-fold")
    if count_colorings(cover) != 0:
        raise ValueError("cover admits a coloring")
    edges = [(2 * u + i, 2 * v + j) for (u, i), (v, j) in cover.cross_edges()]
    h = Graph(2 * g.num_vertices, edges)
    if not h.is_cycle():
        raise AssertionError("cross edges do not form a single cycle")
    return h


# -- cones -----------------------------------------------------------------------


@dataclass(frozen=True)
class ConeCover:
    """A cover of a cone whose hub matchings are all the identity."""

    cover: Cover
    universal_vertex: int = 0

    def __post_init__(self):
        g, w = self.cover.base, self.universal_vertex
        if g.degree(w) != g.num_vertices - 1:
            raise ValueError(f"vertex {w} is not universal")
        ident = tuple(range(self.cover.m))
        for x in g.adjacency[w]:
            if self.cover.matching(w, x) != ident:
                raise ValueError("hub matchings must all be the identity")

    @classmethod
    def from_cover(cls, cover: Cover, w=0):
        """Relabel a full cover so that the hub convention holds."""
        star = [(w, x) for x in sorted(cover.base.adjacency[w])]
        rho = spanning_tree_relabeling(cover, star, root=w)
        return cls(cover.relabel(rho), w)

    @property
    def m(self):
        return self.cover.m


def cone_reduction(cc: ConeCover, j: int) -> Cover:
    """The (m-1)-fold cover of the base minus the hub left after deleting the
    closed neighborhood of hub element ``j``.  Vertex ids above the hub and
    fiber indices above ``j`` shift down by one."""
    cover, w, m = cc.cover, cc.universal_vertex, cc.m
    if not 0 <= j < m:
        raise ValueError("fiber index out of range")
    if m < 2:
        raise ValueError("cone reduction of a 1-fold cover is empty")
    g = cover.base
    rest = [v for v in range(g.num_vertices) if v != w]
    sub = g.induced_subgraph(rest)

    def shrink(i):
        return None if i is None or i == j else (i if i < j else i - 1)

    out = []
    for a, b in sub.edges:
        t = cover.matching(rest[a], rest[b])
        new = [None] * (m - 1)
        for i, k in enumerate(t):
            si = shrink(i)
            if si is not None:
                new[si] = shrink(k)
        out.append(tuple(new))
    return Cover(sub, m - 1, tuple(out))


def level_vertices(cc: ConeCover) -> frozenset:
    return frozenset(t for t in range(cc.m) if cone_reduction(cc, t).is_full)


# -- serialization -----------------------------------------------------------------


def format_cover(cover: Cover) -> str:
    lines = [f"# cover n={cover.base.num_vertices}", str(cover.m)]
    for (u, v), t in zip(cover.base.edges, cover.matchings):
        images = " ".join("0" if x is None else str(x + 1) for x in t)
        lines.append(f"{u} {v} : {images}")
    return "\n".join(lines) + "\n"


def parse_cover(text: str) -> Cover:
    n = None
    m = None
    edges, mats = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("# cover n="):
            try:
                n = int(stripped[len("# cover n="):])
            except ValueError:
                raise ParseError("bad vertex count", lineno) from None
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m is None:
            try:
                m = int(line)
            except ValueError:
                raise ParseError("first line must be the fold size", lineno) from None
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise ParseError("edge line must be 'u v : images'", lineno)
        try:
            u, v = (int(x) for x in head.split())
            images = [int(x) for x in tail.split()]
        except ValueError:
            raise ParseError("non-integer field", lineno) from None
        if len(images) != m or any(not 0 <= x <= m for x in images):
            raise ParseError(f"expected {m} images in 0..{m}", lineno)
        t = tuple(None if x == 0 else x - 1 for x in images)
        if u > v:
            u, v = v, u
            t = _invert(t, m)
        edges.append((u, v))
        mats.append(t)
    if m is None:
        raise ParseError("empty cover file")
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    try:
        return Cover(Graph(n, edges), m, tuple(mats))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
