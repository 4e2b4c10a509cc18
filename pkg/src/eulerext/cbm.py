"""Conjoining bipartite matching: instances, data reduction rules, the
degree-two solver, the join-guessing solver, legalization and an oracle.

Vertices are numbered globally: left vertex ``i`` is ``i`` and right vertex
``j`` is ``left_count + j``. Edges are stored as ``(i, j, w)`` with local
indices on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from eulerext._kernels import INF, assignment
from eulerext.graph_core import UnionFind
from eulerext.preprocess import add_weights

Edge = tuple[int, int]
Join = tuple[int, int]


@dataclass(frozen=True)
class CBMInstance:
    left_count: int
    right_count: int
    edges: tuple[tuple[int, int, int], ...]
    cell_of: tuple[int, ...]
    num_cells: int
    joins: tuple[Join, ...] = ()
    omega_max: int = 0

    def __post_init__(self) -> None:
        n = self.left_count + self.right_count
        if self.left_count < 0 or self.right_count < 0:
            raise ValueError("side sizes must be non-negative")
        edges = tuple(sorted((int(i), int(j), INF if int(w) >= INF else int(w)) for i, j, w in self.edges))
        seen = set()
        for i, j, w in edges:
            if not (0 <= i < self.left_count and 0 <= j < self.right_count):
                raise ValueError(f"edge ({i},{j}) out of range")
            if w < 0:
                raise ValueError("edge weights must be non-negative")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
        cells = tuple(int(x) for x in self.cell_of)
        if len(cells) != n:
            raise ValueError(f"cell assignment must cover all {n} vertices")
        if any(not 0 <= x < self.num_cells for x in cells):
            raise ValueError("cell index out of range")
        joins = tuple(sorted({(min(a, b), max(a, b)) for a, b in self.joins}))
        for a, b in joins:
            if a == b or not (0 <= a < self.num_cells and 0 <= b < self.num_cells):
                raise ValueError(f"join ({a},{b}) must name two distinct cells")
        if self.omega_max < 0:
            raise ValueError("omega-max must be non-negative")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "cell_of", cells)
        object.__setattr__(self, "joins", joins)

    @property
    def n(self) -> int:
        return self.left_count + self.right_count

    def weight_map(self) -> dict[Edge, int]:
        return {(i, j): w for i, j, w in self.edges}

    def satisfies(self, edge: Edge, join: Join) -> bool:
        a = self.cell_of[edge[0]]
        b = self.cell_of[self.left_count + edge[1]]
        return (min(a, b), max(a, b)) == join


def canonical_no_cbm() -> CBMInstance:
    """Two vertices, no edges: no perfect matching exists."""
    return CBMInstance(1, 1, (), (0, 0), 1, (), 0)


class Matching(NamedTuple):
    edges: tuple[Edge, ...]
    weight: int


def make_matching(inst: CBMInstance, edges: Iterable[Edge]) -> Matching:
    wmap = inst.weight_map()
    es = tuple(sorted(edges))
    total = 0
    for e in es:
        total = add_weights(total, wmap.get(e, INF))
    return Matching(es, total)


def _conjoined(inst: CBMInstance, edges: Iterable[Edge], joins: Iterable[Join]) -> bool:
    crossed = set()
    for i, j in edges:
        a, b = inst.cell_of[i], inst.cell_of[inst.left_count + j]
        crossed.add((min(a, b), max(a, b)))
    return all(jn in crossed for jn in joins)


def verify_matching(inst: CBMInstance, m: Matching | Sequence[Edge]) -> bool:
    edges = m.edges if isinstance(m, Matching) else tuple(m)
    wmap = inst.weight_map()
    if any(e not in wmap or wmap[e] >= INF for e in edges):
        return False
    lefts = [i for i, _ in edges]
    rights = [j for _, j in edges]
    if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
        return False
    if len(lefts) != inst.left_count or len(rights) != inst.right_count:
        return False
    if sum(wmap[e] for e in edges) > inst.omega_max:
        return False
    return _conjoined(inst, edges, inst.joins)


def min_weight_perfect_matching(
    left_count: int, right_count: int, edges: Iterable[tuple[int, int, int]]
) -> Matching | None:
    """Cheapest perfect matching over finite edges, via the assignment kernel."""
    if left_count != right_count:
        return None
    cost = np.full((left_count, right_count), INF, dtype=np.int64)
    for i, j, w in edges:
        if w < INF:
            cost[i, j] = min(int(cost[i, j]), w)
    found = assignment(cost)
    if found is None:
        return None
    total, cols = found
    return Matching(tuple((i, c) for i, c in enumerate(cols)), total)


# ---------------------------------------------------------------------------
# working state for the reduction rules


@dataclass
class _State:
    """Mutable view of an instance that keeps original vertex numbers."""

    inst: CBMInstance
    alive: set[int]
    adj: dict[int, dict[int, int]]
    joins: set[Join]
    budget: int
    forced: list[Edge] = field(default_factory=list)
    failed: bool = False

    @classmethod
    def of(cls, inst: CBMInstance) -> _State:
        adj: dict[int, dict[int, int]] = {v: {} for v in range(inst.n)}
        L = inst.left_count
        for i, j, w in inst.edges:
            if w < INF:
                adj[i][L + j] = w
                adj[L + j][i] = w
        return cls(inst, set(range(inst.n)), adj, set(inst.joins), inst.omega_max)

    def cell(self, v: int) -> int:
        return self.inst.cell_of[v]

    def edge_join(self, u: int, v: int) -> Join:
        a, b = self.cell(u), self.cell(v)
        return (min(a, b), max(a, b))

    def as_edge(self, u: int, v: int) -> Edge:
        L = self.inst.left_count
        return (u, v - L) if u < L else (v, u - L)

    def take(self, u: int, v: int) -> None:
        """Match ``u`` with ``v`` and delete both."""
        w = self.adj[u][v]
        self.forced.append(self.as_edge(u, v))
        self.joins.discard(self.edge_join(u, v))
        self.budget -= w
        for x in (u, v):
            for y in list(self.adj[x]):
                del self.adj[y][x]
            self.adj[x] = {}
            self.alive.discard(x)

    def component_list(self) -> list[list[int]]:
        uf = UnionFind(self.inst.n)
        for u in self.alive:
            for v in self.adj[u]:
                uf.union(u, v)
        groups: dict[int, list[int]] = {}
        for v in sorted(self.alive):
            groups.setdefault(uf.find(v), []).append(v)
        return sorted(groups.values())

    def compact(self) -> CBMInstance:
        if self.failed or self.budget < 0:
            return canonical_no_cbm()
        L = self.inst.left_count
        lefts = sorted(v for v in self.alive if v < L)
        rights = sorted(v for v in self.alive if v >= L)
        lid = {v: k for k, v in enumerate(lefts)}
        rid = {v: k for k, v in enumerate(rights)}
        used_cells = sorted({self.cell(v) for v in self.alive})
        cid = {c: k for k, c in enumerate(used_cells)}
        joins = []
        for a, b in sorted(self.joins):
            if a not in cid or b not in cid:
                return canonical_no_cbm()
            joins.append((cid[a], cid[b]))
        edges = [(lid[u], rid[v], w) for u in lefts for v, w in self.adj[u].items()]
        cells = [cid[self.cell(v)] for v in lefts + rights]
        return CBMInstance(len(lefts), len(rights), tuple(edges), tuple(cells), len(used_cells), tuple(joins), self.budget)


def _apply_degree_one(st: _State) -> None:
    while not st.failed:
        pick = None
        for v in sorted(st.alive):
            d = len(st.adj[v])
            if d == 0:
                st.failed = True
                return
            if d == 1:
                pick = v
                break
        if pick is None:
            return
        st.take(pick, next(iter(st.adj[pick])))


def _component_edges(st: _State, comp: Sequence[int]) -> list[tuple[int, int, int]]:
    L = st.inst.left_count
    return [(u, v, w) for u in comp if u < L for v, w in st.adj[u].items()]


def _apply_component_in_cell(st: _State) -> None:
    for comp in st.component_list():
        if st.failed:
            return
        if len({st.cell(v) for v in comp}) != 1:
            continue
        L = st.inst.left_count
        lefts = [v for v in comp if v < L]
        rights = [v for v in comp if v >= L]
        lix = {v: k for k, v in enumerate(lefts)}
        rix = {v: k for k, v in enumerate(rights)}
        local = [(lix[u], rix[v], w) for u, v, w in _component_edges(st, comp)]
        m = min_weight_perfect_matching(len(lefts), len(rights), local)
        if m is None:
            st.failed = True
            return
        for i, j in m.edges:
            st.take(lefts[i], rights[j])


def rr_degree_one(inst: CBMInstance) -> CBMInstance:
    st = _State.of(inst)
    _apply_degree_one(st)
    return st.compact()


def rr_component_in_cell(inst: CBMInstance) -> CBMInstance:
    st = _State.of(inst)
    _apply_component_in_cell(st)
    return st.compact()


# ---------------------------------------------------------------------------
# signatures


class Signature(NamedTuple):
    sigma1: frozenset[Join]
    sigma2: frozenset[Join]
    delta: int

    def key(self) -> frozenset[frozenset[Join]]:
        return frozenset({self.sigma1, self.sigma2})

    def equivalent(self, other: Signature) -> bool:
        return (self.sigma1, self.sigma2) in ((other.sigma1, other.sigma2), (other.sigma2, other.sigma1))


def _cycle_matchings(st: _State, comp: Sequence[int]) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """The two perfect matchings of an even cycle, as global vertex pairs."""
    if any(len(st.adj[v]) != 2 for v in comp) or len(comp) < 4:
        raise ValueError("component is not an even cycle")
    start = min(comp)
    order = [start]
    prev = None
    while True:
        nxt = min(y for y in st.adj[order[-1]] if y != prev)
        if nxt == start:
            break
        prev = order[-1]
        order.append(nxt)
    if len(order) != len(comp):
        raise ValueError("component is not a single cycle")
    pairs = [(order[k], order[(k + 1) % len(order)]) for k in range(len(order))]
    return pairs[0::2], pairs[1::2]


def _signature_parts(st: _State, comp: Sequence[int]):
    a, b = _cycle_matchings(st, comp)
    wa = sum(st.adj[u][v] for u, v in a)
    wb = sum(st.adj[u][v] for u, v in b)
    ea = sorted(st.as_edge(u, v) for u, v in a)
    eb = sorted(st.as_edge(u, v) for u, v in b)
    if (wb, eb[0]) < (wa, ea[0]):
        a, b, wa, wb = b, a, wb, wa
    s1 = frozenset(st.edge_join(u, v) for u, v in a) & st.joins
    s2 = frozenset(st.edge_join(u, v) for u, v in b) & st.joins
    return Signature(frozenset(s1), frozenset(s2), wb - wa), a, b


def signature_of(inst: CBMInstance, component: Iterable[int]) -> Signature:
    """Signature of an even-cycle component given by global vertex ids."""
    st = _State.of(inst)
    return _signature_parts(st, sorted(component))[0]


def _apply_signature(st: _State) -> None:
    while not st.failed:
        groups: dict = {}
        for comp in st.component_list():
            sig, m1, _ = _signature_parts(st, comp)
            groups.setdefault(sig.key(), []).append((comp, sig, m1))
        target = next((g for _, g in sorted(groups.items(), key=lambda kv: kv[1][0][0]) if len(g) >= 2), None)
        if target is None:
            return
        union = target[0][1].sigma1 | target[0][1].sigma2
        all_m1 = [p for _, _, m1 in target for p in m1]
        crossed = {st.edge_join(u, v) for u, v in all_m1}
        if union <= crossed:
            for _, _, m1 in target:
                for u, v in m1:
                    st.take(u, v)
            st.joins -= union
        else:
            keep = min(target, key=lambda t: (t[1].delta, t[0][0]))
            for comp, _, m1 in target:
                if comp is keep[0]:
                    continue
                for u, v in m1:
                    st.take(u, v)


def rr_signature(inst: CBMInstance) -> CBMInstance:
    st = _State.of(inst)
    _apply_signature(st)
    return st.compact()


# ---------------------------------------------------------------------------
# solvers


def _left_degrees(inst: CBMInstance) -> list[int]:
    deg = [0] * inst.left_count
    for i, _, w in inst.edges:
        if w < INF:
            deg[i] += 1
    return deg


@dataclass
class CBMStats:
    components_after_rules: int = 0
    branches: int = 0


def solve_cbm_degree2(inst: CBMInstance, stats: CBMStats | None = None) -> Matching | None:
    """Cheapest perfect conjoining matching when every left vertex has degree <= 2."""
    if any(d > 2 for d in _left_degrees(inst)):
        raise ValueError("a left vertex has degree above two")
    st = _State.of(inst)
    _apply_degree_one(st)
    if st.failed:
        return None
    if any(len(st.adj[v]) != 2 for v in st.alive):
        return None  # more than one cycle in some component: Hall's condition fails
    _apply_component_in_cell(st)
    if st.failed:
        return None
    _apply_signature(st)
    comps = st.component_list()
    if stats is not None:
        stats.components_after_rules = len(comps)
    options = []
    for comp in comps:
        sig, m1, m2 = _signature_parts(st, comp)
        w1 = sum(st.adj[u][v] for u, v in m1)
        options.append(((m1, w1, sig.sigma1), (m2, w1 + sig.delta, sig.sigma2)))

    best: tuple[int, list[int]] | None = None

    def rec(fixed: dict[int, int], open_joins: frozenset[Join]) -> None:
        nonlocal best
        if stats is not None:
            stats.branches += 1
        if not open_joins:
            choice = [fixed.get(k, 0) for k in range(len(options))]
            total = sum(options[k][c][1] for k, c in enumerate(choice))
            if best is None or total < best[0]:
                best = (total, choice)
            return
        jn = min(open_joins)
        for k, opt in enumerate(options):
            if k in fixed:
                continue
            for c in (0, 1):
                if jn in opt[c][2]:
                    rec({**fixed, k: c}, open_joins - opt[c][2])

    rec({}, frozenset(st.joins))
    if best is None:
        return None
    edges = list(st.forced)
    for k, c in enumerate(best[1]):
        edges += [st.as_edge(u, v) for u, v in options[k][c][0]]
    m = make_matching(inst, edges)
    return m if m.weight <= inst.omega_max else None


def solve_cbm_general(inst: CBMInstance, stats: CBMStats | None = None) -> Matching | None:
    """Guess one satisfying edge per open join, complete by a cheapest perfect matching."""
    if inst.left_count != inst.right_count:
        return None
    finite = [(i, j, w) for i, j, w in inst.edges if w < INF]
    by_join: dict[Join, list[tuple[int, int, int]]] = {jn: [] for jn in inst.joins}
    for i, j, w in finite:
        a, b = inst.cell_of[i], inst.cell_of[inst.left_count + j]
        key = (min(a, b), max(a, b))
        if key in by_join:
            by_join[key].append((i, j, w))
    best: Matching | None = None
    seen: set[frozenset[Edge]] = set()

    def complete(chosen: list[tuple[int, int, int]]) -> Matching | None:
        ul = {i for i, _, _ in chosen}
        ur = {j for _, j, _ in chosen}
        lefts = [i for i in range(inst.left_count) if i not in ul]
        rights = [j for j in range(inst.right_count) if j not in ur]
        lix = {v: k for k, v in enumerate(lefts)}
        rix = {v: k for k, v in enumerate(rights)}
        rest = [(lix[i], rix[j], w) for i, j, w in finite if i in lix and j in rix]
        m = min_weight_perfect_matching(len(lefts), len(rights), rest)
        if m is None:
            return None
        edges = [(i, j) for i, j, _ in chosen] + [(lefts[a], rights[b]) for a, b in m.edges]
        return make_matching(inst, edges)

    def rec(chosen: list[tuple[int, int, int]]) -> None:
        nonlocal best
        key = frozenset((i, j) for i, j, _ in chosen)
        if key in seen:
            return
        seen.add(key)
        if stats is not None:
            stats.branches += 1
        open_joins = [jn for jn in inst.joins if not _conjoined(inst, key, [jn])]
        if not open_joins:
            m = complete(chosen)
            if m is not None and (best is None or (m.weight, m.edges) < (best.weight, best.edges)):
                best = m
            return
        ul = {i for i, _, _ in chosen}
        ur = {j for _, j, _ in chosen}
        for e in by_join[open_joins[0]]:
            if e[0] not in ul and e[1] not in ur:
                rec(chosen + [e])

    rec([])
    if best is None or best.weight > inst.omega_max:
        return None
    return best


def oracle_cbm(inst: CBMInstance, max_vertices: int = 16) -> Matching | None:
    """Enumerate every perfect matching; independent of the other solvers."""
    if inst.n > max_vertices:
        raise ValueError(f"oracle limited to {max_vertices} vertices, got {inst.n}")
    if inst.left_count != inst.right_count:
        return None
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(inst.left_count)]
    for i, j, w in inst.edges:
        if w < INF:
            nbrs[i].append((j, w))
    best: Matching | None = None
    used = [False] * inst.right_count
    picked: list[Edge] = []

    def rec(i: int, total: int) -> None:
        nonlocal best
        if i == inst.left_count:
            if _conjoined(inst, picked, inst.joins):
                cand = Matching(tuple(sorted(picked)), total)
                if best is None or (cand.weight, cand.edges) < (best.weight, best.edges):
                    best = cand
            return
        for j, w in nbrs[i]:
            if not used[j]:
                used[j] = True
                picked.append((i, j))
                rec(i + 1, total + w)
                picked.pop()
                used[j] = False

    rec(0, 0)
    if best is None or best.weight > inst.omega_max:
        return None
    return best


# ---------------------------------------------------------------------------
# legalization


@dataclass(frozen=True)
class LegalMap:
    """``left_of[k]`` / ``right_of[k]`` give the input index of a legalized
    vertex, or -1 for padding."""

    left_of: tuple[int, ...]
    right_of: tuple[int, ...]


def legalize_with_map(inst: CBMInstance) -> tuple[CBMInstance, LegalMap | None]:
    """Balance every cell and make the cell-join graph connected.

    Surplus in a cell is absorbed by new opposite-side vertices whose only
    edge (weight 0) leads into one extra hub cell. Every join component is
    then joined to the hub through a representative cell: one with surplus
    if there is one, since its forced edges already cross to the hub;
    otherwise the smallest cell, which gets one forced weight-0 edge to the
    hub and one back. Every added vertex has degree one, so matchings
    correspond one to one and at most one cell is added. Cells without
    vertices are dropped; a join touching one yields the canonical
    no-instance, as does ``left_count != right_count``.
    """
    L, R = inst.left_count, inst.right_count
    if L != R:
        return canonical_no_cbm(), None
    present = sorted(set(inst.cell_of))
    if any(a not in present or b not in present for a, b in inst.joins):
        return canonical_no_cbm(), None
    surplus = {c: 0 for c in present}
    for v in range(inst.n):
        surplus[inst.cell_of[v]] += 1 if v < L else -1
    uf = UnionFind(inst.num_cells)
    for a, b in inst.joins:
        uf.union(a, b)
    groups = sorted({uf.find(c) for c in present})
    need_hub = any(surplus.values()) or len(groups) > 1
    hub = inst.num_cells
    reps = []
    if need_hub:
        for g in groups:
            cells = [c for c in present if uf.find(c) == g]
            loaded = [c for c in cells if surplus[c]]
            reps.append((loaded or cells)[0])

    left_of = list(range(L))
    right_of = list(range(R))
    left_cells = [inst.cell_of[i] for i in range(L)]
    right_cells = [inst.cell_of[L + j] for j in range(R)]
    edges = list(inst.edges)
    joins = list(inst.joins)

    def pendant(cell: int, side_left: bool) -> None:
        # new vertex in ``cell`` joined to a new partner in the hub
        lft, rgt = len(left_of), len(right_of)
        left_of.append(-1)
        right_of.append(-1)
        if side_left:
            left_cells.append(cell)
            right_cells.append(hub)
        else:
            left_cells.append(hub)
            right_cells.append(cell)
        edges.append((lft, rgt, 0))

    for c in present:
        for _ in range(abs(surplus[c])):
            pendant(c, side_left=surplus[c] < 0)
    for c in reps:
        if not surplus[c]:
            # no forced edge reaches the hub yet
            pendant(c, side_left=True)
            pendant(c, side_left=False)
        joins.append((c, hub))
    used = sorted(set(left_cells + right_cells))
    cid = {c: k for k, c in enumerate(used)}
    out = CBMInstance(
        len(left_of),
        len(right_of),
        tuple(edges),
        tuple(cid[c] for c in left_cells + right_cells),
        len(used),
        tuple((cid[a], cid[b]) for a, b in joins),
        inst.omega_max,
    )
    return out, LegalMap(tuple(left_of), tuple(right_of))


def legalize(inst: CBMInstance) -> CBMInstance:
    return legalize_with_map(inst)[0]
