"""Explicit covers with known coloring counts.

Every builder counts its result before returning it and raises
CertificationError when the count is not the advertised one.  Vertex layouts
follow graphs.join / graphs.glue: hubs and cliques first, cycle vertices after
them in cyclic order, so the cycle-closing edge of a rim starting at ``a`` with
length ``k`` is ``(a, a + k - 1)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import graphs
from .covers import ConeCover, Cover, count_colorings, count_colorings_containing, fiber_counts, is_independent
from .errors import CertificationError
from .graphs import GluingMap


def _certify(what, value, ok, expected):
    if not ok:
        raise CertificationError(f"{what}: count {value}, expected {expected}")
    return value


@dataclass(frozen=True)
class AmalgamSpec:
    """Covers to amalgamate at one vertex each.

    ``bijections[i - 1][s]`` is the index in part ``i``'s glue fiber that is
    identified with index ``s`` of part 0's glue fiber.
    """

    parts: tuple
    glue_vertices: tuple
    bijections: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "glue_vertices", tuple(self.glue_vertices))
        object.__setattr__(self, "bijections", tuple(tuple(f) for f in self.bijections))
        if len(parts) < 2:
            raise ValueError("need at least two parts")
        m = parts[0].m
        if any(c.m != m for c in parts):
            raise ValueError("all parts must share m")
        if len(self.glue_vertices) != len(parts) or len(self.bijections) != len(parts) - 1:
            raise ValueError("one glue vertex per part and one bijection per later part")
        for f in self.bijections:
            if sorted(f) != list(range(m)):
                raise ValueError(f"{f} is not a permutation of the fiber")

    @property
    def m(self):
        return self.parts[0].m


def amalgam_sum(spec: AmalgamSpec) -> int:
    """Sum over j of N((u_1, j)) times the product of N(f_i(j)) in the later parts."""
    first = fiber_counts(spec.parts[0], spec.glue_vertices[0])
    later = [fiber_counts(c, u) for c, u in zip(spec.parts[1:], spec.glue_vertices[1:])]
    return sum(
        first[j] * math.prod(n[f[j]] for n, f in zip(later, spec.bijections))
        for j in range(spec.m)
    )


def amalgamated_cover(spec: AmalgamSpec, certify=True) -> Cover:
    m = spec.m
    g, gmap = graphs.glue([c.base for c in spec.parts], [(u,) for u in spec.glue_vertices])
    identity = tuple(range(m))
    fs = (identity,) + spec.bijections
    table = {}
    for part, u, f, vmap in zip(spec.parts, spec.glue_vertices, fs, gmap.part_vertex_map):
        finv = [None] * m
        for s, t in enumerate(f):
            finv[t] = s
        for (x, y), t in zip(part.base.edges, part.matchings):
            new = [None] * m
            for a in range(m):
                src = f[a] if x == u else a
                img = t[src]
                if img is not None:
                    new[a] = finv[img] if y == u else img
            table[(vmap[x], vmap[y])] = tuple(new)
    cover = Cover.from_edges(g, m, table)
    if not certify:
        return cover
    expected = amalgam_sum(spec)
    value = count_colorings(cover)
    _certify("amalgamated cover", value, value == expected, expected)
    return cover


def best_shift_amalgam(c1: Cover, c2: Cover, u1: int, u2: int):
    """Amalgamate with the cyclic shift ``j -> j + d`` of smallest total,
    returning ``(cover, d)``; ties go to the smallest ``d``."""
    if c1.m != c2.m:
        raise ValueError("covers must share m")
    m = c1.m
    a = fiber_counts(c1, u1)
    b = fiber_counts(c2, u2)
    totals = [sum(a[j] * b[(j + d) % m] for j in range(m)) for d in range(m)]
    d = min(range(m), key=lambda x: (totals[x], x))
    if Fraction(totals[d]) > Fraction(sum(a) * sum(b), m):
        raise CertificationError("best shift exceeds the averaging bound")
    spec = AmalgamSpec((c1, c2), (u1, u2), (tuple((j + d) % m for j in range(m)),))
    return amalgamated_cover(spec), d


def separated_covers(cover: Cover, gmap: GluingMap) -> list:
    """The cover each gluing part inherits from a cover of the glued graph."""
    glued_graph, _ = graphs.glue(gmap.parts, gmap.chosen_cliques)
    if glued_graph != cover.base:
        raise ValueError("gluing map does not describe the cover's base graph")
    m = cover.m
    out = []
    for part, vmap in zip(gmap.parts, gmap.part_vertex_map):
        mats = tuple(cover.matching(vmap[x], vmap[y]) for x, y in part.edges)
        out.append(Cover(part, m, mats))
    _check_product_identity(cover, gmap, out)
    return out


def _check_product_identity(cover, gmap, parts):
    # Spot-check N(P) = prod N(P_i) on the first independent glue assignment.
    glued = gmap.glued_vertex_ids
    for idx in itertools.product(range(cover.m), repeat=gmap.p):
        assignment = dict(zip(glued, idx))
        if not is_independent(cover, assignment):
            continue
        whole = count_colorings_containing(cover, assignment)
        pieces = math.prod(
            count_colorings_containing(c, dict(zip(clique, idx)))
            for c, clique in zip(parts, gmap.chosen_cliques)
        )
        _certify("separated covers", whole, whole == pieces, pieces)
        return


# -- wheels and joins -------------------------------------------------------------------


def _shift(m, d=1):
    return tuple((j + d) % m for j in range(m))


def shifted_wheel_cover(k: int, m: int) -> ConeCover:
    """Cover of K_1 v C_{2k+2}: identity everywhere except the rim-closing
    edge, which carries ``j -> j + 1 (mod m)``."""
    if k < 1 or m < 3:
        raise ValueError("need k >= 1 and m >= 3")
    n = 2 * k + 2
    g = graphs.wheel(n)
    cover = Cover.from_edges(g, m, {(1, n): _shift(m)})
    value = count_colorings(cover)
    if m == 3:
        _certify("shifted wheel", value, value == 3, "3")
        hub = fiber_counts(cover, 0)
        _certify("shifted wheel hub", hub, hub == (1, 1, 1), "(1, 1, 1)")
    else:
        chrom = graphs.chromatic_polynomial(g)(m)
        _certify("shifted wheel", value, value >= chrom, f">= {chrom}")
    return ConeCover(cover, 0)


def kp_join_cycle_cover(p: int, k: int) -> Cover:
    """(2+p)-fold cover of K_p v C_{2k+2} with the full cyclic shift on the
    rim-closing edge and the identity elsewhere."""
    if p < 2 or k < 1:
        raise ValueError("need p >= 2 and k >= 1")
    n = 2 * k + 2
    m = 2 + p
    g = graphs.complete_join_cycle(p, n)
    cover = Cover.from_edges(g, m, {(p, p + n - 1): _shift(m)})
    value = count_colorings(cover)
    bound = math.factorial(m)
    _certify("K_p join cycle", value, value < bound, f"< {bound}")
    return cover


# -- cones of disjoint cycles ------------------------------------------------------------

# Rim-closing matchings, 0-based, for the first three parts of the
# three-or-more-cycles construction at m = 3.
_THREE_PLUS_CLOSERS = ((0, 2, 1), (2, 1, 0), (1, 0, 2))


def _wheel_part(length, m, closer=None):
    g = graphs.wheel(length)
    table = {(1, length): closer} if closer is not None else {}
    return Cover.from_edges(g, m, table)


def cone_of_cycles_cover(kind: str, cycle_lengths: Sequence[int]) -> Cover:
    """Covers of K_1 v (disjoint cycles) assembled from one cover per wheel
    with identity bijections at the hub.

    ``two_even``: two even cycles, m = 3, both wheels shifted; 3 colorings.
    ``three_plus``: at least three cycles, the first three even, m = 3; each
    of the first three wheels kills a different hub index; 0 colorings.  The
    wheels past the third get the canonical cover.
    ``double_c4``: cycle lengths start 4, 4, m = 4; the two C_4 wheels swap
    a complementary pair of indices on the closing edge, any further wheels
    are canonical; 1280 times the product of P(C_k, 3) over the further cycles.
    """
    lengths = list(cycle_lengths)
    if any(k < 3 for k in lengths):
        raise ValueError("cycle lengths must be at least 3")
    if kind == "two_even":
        if len(lengths) != 2 or any(k % 2 for k in lengths):
            raise ValueError("two_even needs exactly two even cycles")
        m = 3
        parts = [_wheel_part(k, m, _shift(m)) for k in lengths]
        expected = 3
    elif kind == "three_plus":
        if len(lengths) < 3 or any(k % 2 for k in lengths[:3]):
            raise ValueError("three_plus needs at least three cycles, the first three even")
        m = 3
        parts = [_wheel_part(k, m, c) for k, c in zip(lengths, _THREE_PLUS_CLOSERS)]
        parts += [_wheel_part(k, m) for k in lengths[3:]]
        expected = 0
    elif kind == "double_c4":
        if len(lengths) < 2 or lengths[:2] != [4, 4]:
            raise ValueError("double_c4 needs cycle lengths starting 4, 4")
        m = 4
        parts = [_wheel_part(4, m, (0, 1, 3, 2)), _wheel_part(4, m, (1, 0, 2, 3))]
        parts += [_wheel_part(k, m) for k in lengths[2:]]
        expected = 1280 * math.prod(graphs.chromatic_closed_form("cycle", 3, n=k) for k in lengths[2:])
    else:
        raise ValueError(f"unknown construction kind {kind!r}")
    identity = tuple(range(m))
    spec = AmalgamSpec(parts, (0,) * len(parts), (identity,) * (len(parts) - 1))
    cover = amalgamated_cover(spec)
    value = count_colorings(cover)
    _certify(f"cone of cycles ({kind})", value, value == expected, expected)
    return cover


# -- registry used by the CLI --------------------------------------------------------------


def build(name: str, **params):
    """Build a named construction; returns ``(cover, count, expectation)``.

    The expectation is an exact value such as ``"3"`` or a bound such as
    ``"<24"`` or ``">=72"``.
    """
    if name == "shifted-wheel":
        k, m = params.get("k", 1), params.get("m", 3)
        cover = shifted_wheel_cover(k, m).cover
        expect = "3" if m == 3 else f">={graphs.chromatic_polynomial(cover.base)(m)}"
    elif name == "kp-join-cycle":
        p, k = params.get("p", 2), params.get("k", 1)
        cover = kp_join_cycle_cover(p, k)
        expect = f"<{math.factorial(p + 2)}"
    elif name in ("two-even", "three-plus", "double-c4"):
        defaults = {"two-even": [4, 4], "three-plus": [4, 4, 4], "double-c4": [4, 4]}
        lengths = params.get("lengths") or defaults[name]
        cover = cone_of_cycles_cover(name.replace("-", "_"), lengths)
        expect = {"two-even": "3", "three-plus": "0"}.get(name)
        if expect is None:
            tail = math.prod(graphs.chromatic_closed_form("cycle", 3, n=k) for k in lengths[2:])
            expect = str(1280 * tail)
    else:
        raise ValueError(f"unknown construction {name!r}")
    return cover, count_colorings(cover), expect


CONSTRUCTIONS = ("shifted-wheel", "kp-join-cycle", "two-even", "three-plus", "double-c4")
