"""The DP color function: exhaustive minimization, closed forms, and the bound
evaluators used to check them."""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import graphs
from .covers import (
    ConeCover,
    Cover,
    TreeLabelingSpace,
    canonical_cover,
    check_budget,
    count_colorings,
    iter_prefix_blocks,
    normalize_by_spanning_tree,
    random_full_cover,
    shard_bounds,
)
from .errors import BudgetExceeded, FormulaDomainError
from .graphs import Graph, PeoData, chromatic_polynomial, falling_factorial

DEFAULT_BUDGET = 10**9
DEFAULT_WITNESS_CAP = 4


@dataclass
class DpResult:
    graph: Graph
    m: int
    value: int
    witnesses: list = field(default_factory=list)
    search_size: int = 0


# -- exhaustive minimization ------------------------------------------------------


def _scan_shard(g, m, shard, shards, cap):
    """Minimum and the lexicographically smallest minimizing digit tuples of
    one contiguous shard."""
    space = TreeLabelingSpace(g, m)
    start, stop = shard_bounds(space.search_size(), shard, shards)
    best = None
    found = []
    if space.cotree:
        last = space.edge_masks(len(space.cotree) - 1)
    for prefix, lo, hi, pmask in iter_prefix_blocks(space, start, stop):
        if space.cotree:
            counts = [(pmask & mk).bit_count() for mk in last[lo:hi]]
        else:
            counts = [pmask.bit_count()]
        low = min(counts)
        if best is None or low < best:
            best = low
            found = []
        if low == best and len(found) < cap:
            for offset, value in enumerate(counts):
                if value == best:
                    found.append(prefix + (lo + offset,) if space.cotree else ())
                    if len(found) == cap:
                        break
    return best, found, stop - start


def _merge(parts, cap):
    best = min(p[0] for p in parts if p[0] is not None)
    found = sorted(d for value, ds, _ in parts if value == best for d in ds)[:cap]
    return best, found, sum(p[2] for p in parts)


def dp_exact(
    g: Graph,
    m: int,
    budget: Optional[int] = DEFAULT_BUDGET,
    workers: int = 1,
    shards: Optional[int] = None,
    witness_cap: int = DEFAULT_WITNESS_CAP,
) -> DpResult:
    """P_DP(g, m) as the minimum coloring count over all full covers with BFS
    tree matchings fixed to the identity.

    The search space is cut into ``shards`` contiguous slices; with
    ``workers > 1`` they run in a process pool.  The result does not depend on
    either knob.
    """
    if not g.is_connected():
        raise ValueError("dp_exact needs a connected graph; use dp_disconnected")
    if m < 1:
        raise ValueError("m must be positive")
    check_budget(g, m, budget)
    shards = shards or max(workers, 1)
    if workers > 1 and shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_shard, g, m, i, shards, witness_cap) for i in range(shards)]
            parts = [f.result() for f in futures]
    else:
        parts = [_scan_shard(g, m, i, shards, witness_cap) for i in range(shards)]
    parts = [p for p in parts if p[2] > 0]
    best, found, size = _merge(parts, witness_cap)
    space = TreeLabelingSpace(g, m)
    witnesses = [space.cover(d) for d in found]
    return DpResult(g, m, best, witnesses, size)


def dp_value(g: Graph, m: int, **kwargs) -> int:
    """P_DP for any graph: components are searched separately and multiplied."""
    comps = g.components()
    if len(comps) == 1:
        return dp_exact(g, m, **kwargs).value
    return dp_disconnected([dp_exact(g.induced_subgraph(c), m, **kwargs) for c in comps])


def dp_disconnected(components: Sequence) -> int:
    """Product rule over components; entries are DpResults or plain values."""
    ms = {c.m for c in components if isinstance(c, DpResult)}
    if len(ms) > 1:
        raise ValueError("components were computed for different m")
    return math.prod(c.value if isinstance(c, DpResult) else int(c) for c in components)


# -- closed forms -------------------------------------------------------------------


def _exact_div(num, den, what):
    if den == 0 or num % den:
        raise FormulaDomainError(f"{what}: {num} is not divisible by {den}")
    return num // den


def _unicyclic(n, cycle_len, m):
    if cycle_len == 2:
        # C_2 is read as P_2, so the graph is a tree.
        return m * (m - 1) ** (n - 1)
    if cycle_len < 2 or n < cycle_len:
        raise FormulaDomainError("need 2 <= cycle_len <= n")
    if cycle_len % 2:
        k = (cycle_len - 1) // 2
        return (m - 1) ** n - (m - 1) ** (n - 2 * k)
    if m < 2:
        raise FormulaDomainError("even-cycle formula needs m >= 2")
    k = (cycle_len - 2) // 2
    return (m - 1) ** n - (m - 1) ** (n - 2 * k - 2)


def _wheel(cycle_len, m):
    rim = graphs.chromatic_closed_form("cycle", m - 1, n=cycle_len)
    if cycle_len % 2:
        return m * rim
    if m <= 2:
        return 0
    if m == 3:
        return 3
    return m * rim


def dp_closed_form(family, m, **params) -> int:
    """Known values of P_DP.

    ``cycle(n)``, ``unicyclic(n, cycle_len)``, ``wheel(cycle_len)``,
    ``chordal(peo)`` and ``gluing_cycle_chordal(values)`` (vertex-gluing of
    cycles and chordal graphs with the given P_DP values).
    """
    if m < 1:
        raise FormulaDomainError("m must be positive")
    if family == "cycle":
        n = params["n"]
        return _unicyclic(n, n, m)
    if family == "unicyclic":
        return _unicyclic(params["n"], params["cycle_len"], m)
    if family == "wheel":
        return _wheel(params["cycle_len"], m)
    if family == "chordal":
        peo: PeoData = params["peo"]
        return max(0, math.prod(m - a for a in peo.alphas))
    if family == "gluing_cycle_chordal":
        values = list(params["values"])
        if len(values) < 2:
            raise FormulaDomainError("gluing needs at least two parts")
        return _exact_div(math.prod(values), m ** (len(values) - 1), "gluing quotient")
    raise ValueError(f"unknown family {family!r}")


# -- bounds -----------------------------------------------------------------------------


def valid_level_counts(m):
    return [s for s in range(m + 1) if s != m - 1]


@dataclass(frozen=True)
class SethBoundBundle:
    k: int
    m: int
    s: int
    p: int
    p1: int
    p2: int
    level_bound: int
    nonlevel_bound: int
    min_total: int


def seth_bound(k, m, s) -> SethBoundBundle:
    """Per-hub lower bounds for a cover of the wheel K_1 v C_{2k+2} with ``s``
    level vertices."""
    if k < 1 or m < 2:
        raise FormulaDomainError("need k >= 1 and m >= 2")
    if s not in valid_level_counts(m):
        raise FormulaDomainError(f"level count {s} impossible for m={m}")
    q = (m - 2) ** (2 * k + 1)
    p = (m - 1) * q
    p1 = _exact_div(q - (m - 2), m - 1, "p1")
    p2 = _exact_div(q + 1, m - 1, "p2")
    level = p - (s - 1) * p1 - (m - s) * p2
    nonlevel = p - s * p1 - (m - 2 - s) * p2
    return SethBoundBundle(k, m, s, p, p1, p2, level, nonlevel, s * level + (m - s) * nonlevel)


def seth_min_total(k, m) -> int:
    return min(seth_bound(k, m, s).min_total for s in valid_level_counts(m))


def amalgam_upper_bound(dp_values: Sequence[int], m: int, n: Optional[int] = None) -> Fraction:
    n = len(dp_values) if n is None else n
    if n < 2 or n != len(dp_values):
        raise ValueError("need n >= 2 values")
    return Fraction(math.prod(dp_values), m ** (n - 1))


def gluing_lower_bound(per_part_k: Sequence[int], p: int, m: int) -> int:
    if len(per_part_k) < 2:
        raise ValueError("need at least two parts")
    if p > m:
        raise FormulaDomainError("p must not exceed m")
    return falling_factorial(m, p) * math.prod(per_part_k)


def cycle_vertex_bound(n, m) -> int:
    """P_DP(C_n, m) / m, the guaranteed number of colorings through any
    fiber element of any m-fold cover of C_n."""
    if n < 3 or m < 2:
        raise FormulaDomainError("need n >= 3 and m >= 2")
    if n == 3:
        return (m - 1) * (m - 2)
    if n % 2 == 0:
        return _exact_div((m - 1) ** n - 1, m, "even cycle")
    return _exact_div((m - 1) ** n - (m - 1), m, "odd cycle")


@dataclass(frozen=True)
class TechnicalCheckRecord:
    m: int
    s: int
    value: Fraction
    verdict: str  # ">1" or "<=1"


def technical_inequality_check(m, s) -> TechnicalCheckRecord:
    if m < 5 or not 0 <= s <= m - 2:
        raise FormulaDomainError("need m >= 5 and 0 <= s <= m-2")
    shrink = 1 - Fraction(m, (m - 2) ** 4)
    grow = 1 + Fraction(1, (m - 1) * (m - 2)) - Fraction(m, (m - 2) ** 4)
    value = shrink**s * grow ** (m - s)
    return TechnicalCheckRecord(m, s, value, ">1" if value > 1 else "<=1")


def technical_table(m_range=range(5, 31)):
    return [technical_inequality_check(m, s) for m in m_range for s in range(m - 1)]


# -- threshold reports ------------------------------------------------------------------


@dataclass
class MStatus:
    m: int
    status: str  # equal | strictly-less | unverified
    method: str  # exhaustive | construction | sampled
    value: Optional[int]
    chromatic: int
    witness: Optional[Cover] = None
    note: str = ""


@dataclass
class ThresholdReport:
    graph: Graph
    m_range: tuple
    rows: list
    claimed_tau: Optional[int]
    family: Optional[str]
    flags: list = field(default_factory=list)


def recognize_family(g: Graph):
    """(name, claimed threshold) for graphs whose threshold is known in closed
    form, else (None, None)."""
    if not g.is_connected():
        return None, None
    if graphs.is_chordal(g):
        return "chordal", graphs.chromatic_number(g)
    if g.is_cycle():
        if g.num_vertices % 2:
            return f"cycle:{g.num_vertices}", 3
        return f"cycle:{g.num_vertices}", None
    n = g.num_vertices
    hubs = [v for v in range(n) if g.degree(v) == n - 1]
    if not hubs:
        return None, None
    keep = [v for v in range(n) if v not in hubs]
    rest = g.induced_subgraph(keep)
    comps = rest.components()
    cycles = [rest.induced_subgraph(c) for c in comps]
    if not all(c.is_cycle() for c in cycles):
        return None, None
    lengths = sorted(c.num_vertices for c in cycles)
    p = len(hubs)
    if len(cycles) == 1:
        return f"join:{p}:cycle:{lengths[0]}", 3 + p
    if p == 1:
        tau = 5 if lengths.count(4) >= 2 else 4
        return "cone-cycles:" + ",".join(map(str, lengths)), tau
    return None, None


def construction_witness(g: Graph, m: int):
    """A named construction whose graph equals ``g`` (same vertex layout) at ``m``,
    or None."""
    from . import constructions

    n = g.num_vertices
    for p in range(1, n):
        rest = n - p
        if rest >= 4 and rest % 2 == 0 and m == 2 + p:
            if g == graphs.complete_join_cycle(p, rest):
                k = (rest - 2) // 2
                if p == 1:
                    return constructions.shifted_wheel_cover(k, 3).cover
                return constructions.kp_join_cycle_cover(p, k)
    family, _ = recognize_family(g)
    if family and family.startswith("cone-cycles:"):
        lengths = [int(x) for x in family.split(":")[1].split(",")]
        if g != graphs.cone_of_cycles(lengths):
            return None
        even = [k for k in lengths if k % 2 == 0]
        if m == 3 and len(lengths) == 2 and len(even) == 2:
            return constructions.cone_of_cycles_cover("two_even", lengths)
        if m == 3 and len(lengths) >= 3 and all(k % 2 == 0 for k in lengths[:3]):
            return constructions.cone_of_cycles_cover("three_plus", lengths)
        if m == 4 and lengths[:2] == [4, 4]:
            return constructions.cone_of_cycles_cover("double_c4", lengths)
    return None


def sample_min(g: Graph, m: int, samples: int, rng: random.Random):
    """Smallest coloring count over the canonical cover and ``samples`` random
    full covers."""
    space = TreeLabelingSpace(g, m)
    best_cover = canonical_cover(g, m)
    best = space.count(space.digits_of(best_cover))
    for _ in range(samples):
        cover = normalize_by_spanning_tree(random_full_cover(g, m, rng), space.tree)
        value = space.count(space.digits_of(cover))
        if value < best:
            best, best_cover = value, cover
    return best, best_cover


def threshold_report(
    g: Graph,
    m_max: int,
    budget: Optional[int] = DEFAULT_BUDGET,
    samples: int = 2000,
    seed: int = 0,
    workers: int = 1,
) -> ThresholdReport:
    poly = chromatic_polynomial(g)
    chi = graphs.chromatic_number(g)
    if m_max < chi:
        raise ValueError(f"m_max must be at least the chromatic number {chi}")
    family, tau = recognize_family(g)
    rows = []
    for m in range(chi, m_max + 1):
        chrom = poly(m)
        note = ""
        try:
            res = dp_exact(g, m, budget=budget, workers=workers, witness_cap=1)
        except BudgetExceeded as exc:
            note = f"exhaustive refused: {exc.required_covers} covers"
        else:
            status = "equal" if res.value == chrom else "strictly-less"
            witness = res.witnesses[0] if status == "strictly-less" else None
            rows.append(MStatus(m, status, "exhaustive", res.value, chrom, witness))
            continue
        cover = construction_witness(g, m)
        if cover is not None:
            value = count_colorings(cover)
            if value < chrom:
                rows.append(MStatus(m, "strictly-less", "construction", value, chrom, cover, note))
                continue
        rng = random.Random(f"{seed}:{m}")
        value, cover = sample_min(g, m, samples, rng)
        if value < chrom:
            rows.append(MStatus(m, "strictly-less", "sampled", value, chrom, cover, note))
        else:
            note = (note + "; " if note else "") + f"{samples} samples, min {value}"
            rows.append(MStatus(m, "unverified", "sampled", value, chrom, None, note))
    report = ThresholdReport(g, (chi, m_max), rows, tau, family)
    for a in rows:
        for b in rows:
            if a.status == "equal" and b.status == "strictly-less" and b.m > a.m:
                report.flags.append(
                    f"equality at m={a.m} but strict inequality at m={b.m} (monotonicity question)"
                )
    return report


@dataclass
class ImplicationInstance:
    graph: Graph
    m: int
    premise: str  # holds | fails | unknown
    conclusion: str  # holds | fails | not-applicable | unverified
    dp_g: Optional[int]
    p_g: int
    dp_cone: Optional[int]
    p_cone: Optional[int]
    method: str


def monotonicity_check(
    g: Graph,
    p_max: int = 0,
    m_values: Sequence[int] = (),
    budget: Optional[int] = DEFAULT_BUDGET,
    samples: int = 2000,
    seed: int = 0,
    workers: int = 1,
):
    """For K_p v g with p in 0..p_max and each m: whenever P_DP equals P at m,
    check that P_DP(K_1 v (K_p v g), m+1) equals P there too."""
    out = []
    for p in range(p_max + 1):
        base = g if p == 0 else graphs.join(graphs.complete(p), g)
        coned = graphs.cone(base)
        for m in m_values:
            chrom = chromatic_polynomial(base)(m)
            try:
                dp_g = dp_value(base, m, budget=budget, workers=workers)
            except BudgetExceeded:
                out.append(ImplicationInstance(base, m, "unknown", "unverified", None, chrom, None, None, "refused"))
                continue
            if dp_g != chrom:
                out.append(ImplicationInstance(base, m, "fails", "not-applicable", dp_g, chrom, None, None, "exhaustive"))
                continue
            cone_p = chromatic_polynomial(coned)(m + 1)
            try:
                dp_c = dp_exact(coned, m + 1, budget=budget, workers=workers).value
                method = "exhaustive"
                verdict = "holds" if dp_c == cone_p else "fails"
            except BudgetExceeded:
                rng = random.Random(f"{seed}:{p}:{m}")
                dp_c, _ = sample_min(coned, m + 1, samples, rng)
                method = "sampled"
                verdict = "fails" if dp_c < cone_p else "unverified"
            out.append(ImplicationInstance(base, m, "holds", verdict, dp_g, chrom, dp_c, cone_p, method))
    return out


def default_workers():
    return int(os.environ.get("DPCOLOR_SHARDS", os.cpu_count() or 1))
