"""Switch set cover: exhaustive solver, set-cover generator, or-composition
and the reduction to two-dimensional Eulerian extension."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from eulerext._kernels import INF
from eulerext.graph_core import Arc, DirectedMultigraph
from eulerext.preprocess import EEInstance

Position = tuple[int, ...]
Switch = tuple[Position, ...]


@dataclass(frozen=True)
class SSCInstance:
    """``switches[i][j]`` is the multiset of colors lit by switch ``i`` in position ``j``."""

    color_count: int
    switches: tuple[Switch, ...]

    def __post_init__(self) -> None:
        if self.color_count < 0:
            raise ValueError("color count must be non-negative")
        sw = tuple(tuple(tuple(sorted(int(x) for x in pos)) for pos in s) for s in self.switches)
        for i, s in enumerate(sw):
            if not s:
                raise ValueError(f"switch {i} has no position")
            for pos in s:
                if any(not 0 <= x < self.color_count for x in pos):
                    raise ValueError(f"switch {i} uses a color outside 0..{self.color_count - 1}")
        object.__setattr__(self, "switches", sw)

    @property
    def k(self) -> int:
        return len(self.switches)

    def covers(self, choice: Sequence[int]) -> bool:
        if len(choice) != self.k:
            return False
        if any(not 0 <= j < len(s) for j, s in zip(choice, self.switches)):
            return False
        lit = set()
        for j, s in zip(choice, self.switches):
            lit.update(s[j])
        return len(lit) == self.color_count


def canonical_yes_ssc() -> SSCInstance:
    return SSCInstance(1, (((0,),),))


def canonical_no_ssc() -> SSCInstance:
    return SSCInstance(1, (((),),))


def solve_ssc(inst: SSCInstance) -> tuple[int, ...] | None:
    """One position index per switch covering every color, or ``None``.

    Positions are reduced to color sets and duplicates dropped per switch,
    which leaves at most ``2**c`` per switch; the product is then searched
    with the colors still missing as pruning.
    """
    full = (1 << inst.color_count) - 1
    options: list[list[tuple[int, int]]] = []
    for s in inst.switches:
        seen: dict[int, int] = {}
        for j, pos in enumerate(s):
            mask = 0
            for x in pos:
                mask |= 1 << x
            seen.setdefault(mask, j)
        options.append(sorted(seen.items(), key=lambda t: (-bin(t[0]).count("1"), t[1])))
    # suffix unions bound what the remaining switches can still add
    reach = [0] * (len(options) + 1)
    for i in range(len(options) - 1, -1, -1):
        acc = 0
        for mask, _ in options[i]:
            acc |= mask
        reach[i] = reach[i + 1] | acc
    chosen: list[int] = []

    def rec(i: int, lit: int) -> bool:
        if lit | reach[i] != full:
            return False
        if i == len(options):
            return True
        for mask, j in options[i]:
            chosen.append(j)
            if rec(i + 1, lit | mask):
                return True
            chosen.pop()
        return False

    return tuple(chosen) if rec(0, 0) else None


def setcover_to_ssc(universe_size: int, family: Sequence[Sequence[int]], k: int) -> SSCInstance:
    """``k`` copies of one switch that has a position per family member."""
    if k > len(family):
        raise ValueError("k may not exceed the family size")
    if k < 0:
        raise ValueError("k must be non-negative")
    switch = tuple(tuple(sorted(set(f))) for f in family)
    return SSCInstance(universe_size, (switch,) * k)


def set_cover_brute_force(universe_size: int, family: Sequence[Sequence[int]], k: int) -> bool:
    """Whether at most ``k`` members of ``family`` cover ``0..universe_size-1``."""
    full = (1 << universe_size) - 1
    masks = [sum(1 << x for x in set(f)) for f in family]
    for choice in range(1 << len(masks)):
        if bin(choice).count("1") > k:
            continue
        acc = 0
        for i, mk in enumerate(masks):
            if choice >> i & 1:
                acc |= mk
        if acc == full:
            return True
    return False


# ---------------------------------------------------------------------------
# composition


def selector_bits(m: int) -> int:
    return max(m - 1, 0).bit_length()


def compose_ssc(instances: Sequence[SSCInstance]) -> SSCInstance:
    """One instance that is yes iff some input is.

    With ``m`` at least ``2**(c*k)`` every input is solved directly and a
    canonical instance returned. Otherwise each switch position of input
    ``i`` gets, per selector bit ``b``, the color ``o[alpha][b]`` matching
    bit ``b`` of ``i``; the ``alpha``-th switches of all inputs are merged,
    and selector switch ``b`` offers all zero-colors or all one-colors of
    bit ``b``.
    """
    if not instances:
        raise ValueError("need at least one instance")
    c, k = instances[0].color_count, instances[0].k
    if any(x.color_count != c or x.k != k for x in instances):
        raise ValueError("all instances must share color and switch counts")
    m = len(instances)
    if m == 1:
        return instances[0]
    if m >= 1 << (c * k):
        yes = any(solve_ssc(x) is not None for x in instances)
        return canonical_yes_ssc() if yes else canonical_no_ssc()
    bits = selector_bits(m)

    def color(alpha: int, beta: int, bit: int) -> int:
        return c + 2 * (alpha * bits + beta) + bit

    merged: list[Switch] = []
    for alpha in range(k):
        positions = []
        for i, inst in enumerate(instances):
            tag = tuple(color(alpha, beta, i >> beta & 1) for beta in range(bits))
            positions += [pos + tag for pos in inst.switches[alpha]]
        merged.append(tuple(positions))
    selectors = [
        tuple(tuple(color(alpha, beta, bit) for alpha in range(k)) for bit in (0, 1))
        for beta in range(bits)
    ]
    return SSCInstance(c + 2 * k * bits, tuple(merged + selectors))


# ---------------------------------------------------------------------------
# two-dimensional Eulerian extension


Point = tuple[int, int]


def dominates(p: Point, q: Point) -> bool:
    """``p >= q`` in both coordinates."""
    return p[0] >= q[0] and p[1] >= q[1]


@dataclass(frozen=True)
class PlanarEEInstance:
    """Vertices at distinct integer points; an added arc ``(u, v)`` must go
    from a point to one it dominates; at most ``extension_budget`` arcs."""

    points: tuple[Point, ...]
    graph: DirectedMultigraph
    extension_budget: int

    def __post_init__(self) -> None:
        pts = tuple((int(x), int(y)) for x, y in self.points)
        if len(pts) != self.graph.n:
            raise ValueError("need one point per vertex")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        if self.extension_budget < 0:
            raise ValueError("budget must be non-negative")
        object.__setattr__(self, "points", pts)

    def allowed(self, u: int, v: int) -> bool:
        return u != v and dominates(self.points[u], self.points[v])

    def allowed_arcs(self) -> set[Arc]:
        n = len(self.points)
        return {(u, v) for u in range(n) for v in range(n) if self.allowed(u, v)}


def twodee_to_ee(inst: PlanarEEInstance) -> EEInstance:
    """Unit weight on allowed arcs, budget equal to the arc budget."""
    n = len(inst.points)
    table = tuple(tuple(1 if inst.allowed(u, v) else INF for v in range(n)) for u in range(n))
    return EEInstance(inst.graph, table, inst.extension_budget)


def _canonical_yes_2dee() -> PlanarEEInstance:
    return PlanarEEInstance(((0, 0),), DirectedMultigraph(1), 0)


def _canonical_no_2dee() -> PlanarEEInstance:
    # vertex 0 at (0,0) must send an arc to (1,1), which it does not dominate
    return PlanarEEInstance(((0, 0), (1, 1)), DirectedMultigraph(2, ((1, 0),)), 0)


def normalize_for_2dee(inst: SSCInstance) -> SSCInstance | bool:
    """Positions with exactly ``c`` colors, all switches with the same count.

    Empty positions are dropped (the image always allows a switch to pick
    nothing, and covering is monotone), and so are switches left without a
    position. Short positions repeat their smallest color, short switches
    their first position. Returns a bool when the answer is already decided.
    """
    c = inst.color_count
    if c == 0:
        return True
    switches = []
    for s in inst.switches:
        kept = [tuple(sorted(set(pos))) for pos in s if pos]
        if kept:
            switches.append([pos + (pos[0],) * (c - len(pos)) for pos in kept])
    used = {x for s in switches for pos in s for x in pos}
    if len(used) < c:
        return False
    l = max(len(s) for s in switches)
    padded = tuple(tuple(s + [s[0]] * (l - len(s))) for s in switches)
    return SSCInstance(c, padded)


@dataclass(frozen=True)
class PlanarLayout:
    """Vertex ids of the named points of the construction."""

    v1: tuple[int, ...]  # v1[0 .. k]
    v2: tuple[int, ...]  # v2[1 .. k+1], index 0 unused (-1)
    w: dict[tuple[int, int, int], int]  # (i, j, m), all 1-based


def ssc_to_2dee_with_layout(inst: SSCInstance) -> tuple[PlanarEEInstance, PlanarLayout | None]:
    """Switch regions along an anti-diagonal, position regions inside them,
    one cycle through the vertices of each color.

    Per switch ``i`` the pair ``v1_i``, ``v2_i = v1_i - (4cl, 4cl)`` is made
    unbalanced by the arc ``v2_i -> v1_i``; all pairs are chained into one
    component with two helpers ``v1_0`` and ``v2_(k+1)``. Color ``m`` of
    position ``j`` of switch ``i`` sits at
    ``v2_i + (0, 4cl) + (2c(2j-1) - 2(m-1), -2c(2j-2) - 2(m-1))``.
    The budget is ``(c+1)k`` arcs.
    """
    norm = normalize_for_2dee(inst)
    if norm is True:
        return _canonical_yes_2dee(), None
    if norm is False:
        return _canonical_no_2dee(), None
    c, k = norm.color_count, norm.k
    l = len(norm.switches[0])
    pts: list[Point] = []

    def add(p: Point) -> int:
        pts.append(p)
        return len(pts) - 1

    def v1_at(i: int) -> Point:
        return (8 * c * i * l, 8 * c * (k - i + 1) * l)

    def v2_at(i: int) -> Point:
        x, y = v1_at(i)
        return (x - 4 * c * l, y - 4 * c * l)

    v1 = [add(v1_at(i)) for i in range(k + 1)]
    v2 = [-1] + [add(v2_at(i)) for i in range(1, k + 2)]
    arcs: list[Arc] = []
    for i in range(1, k + 1):
        arcs += [(v1[i - 1], v1[i]), (v2[i + 1], v2[i]), (v2[i], v1[i])]
    arcs += [(v1[k], v2[k + 1]), (v2[1], v1[0])]
    w: dict[tuple[int, int, int], int] = {}
    by_color: dict[int, list[int]] = {}
    for i in range(1, k + 1):
        bx, by = v2_at(i)
        for j in range(1, l + 1):
            pos = norm.switches[i - 1][j - 1]
            for m in range(1, c + 1):
                p = (bx + 2 * c * (2 * j - 1) - 2 * (m - 1), by + 4 * c * l - 2 * c * (2 * j - 2) - 2 * (m - 1))
                w[(i, j, m)] = add(p)
                by_color.setdefault(pos[m - 1], []).append(w[(i, j, m)])
    for ring in by_color.values():
        if len(ring) > 1:  # a single vertex needs no cycle
            arcs += list(zip(ring, ring[1:] + ring[:1]))
    out = PlanarEEInstance(tuple(pts), DirectedMultigraph(len(pts), tuple(arcs)), (c + 1) * k)
    return out, PlanarLayout(tuple(v1), tuple(v2), w)


def ssc_to_2dee(inst: SSCInstance) -> PlanarEEInstance:
    return ssc_to_2dee_with_layout(inst)[0]


def characterized_arcs(layout: PlanarLayout, k: int, l: int, c: int) -> set[Arc]:
    """Arcs from ``v1_i`` or ``w(i,j,m)`` to ``v2_i`` or ``w(i,j,m')``,
    ``m < m'``, the former reaching every ``w`` of its own switch."""
    out: set[Arc] = set()
    for i in range(1, k + 1):
        ws = [(j, m, layout.w[(i, j, m)]) for j in range(1, l + 1) for m in range(1, c + 1)]
        out.add((layout.v1[i], layout.v2[i]))
        for j, m, x in ws:
            out.add((layout.v1[i], x))
            out.add((x, layout.v2[i]))
            for j2, m2, y in ws:
                if j2 == j and m2 > m:
                    out.add((x, y))
    return out
