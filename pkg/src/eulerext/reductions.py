"""Reductions between Eulerian extension with advice, conjoining bipartite
matching, plain Eulerian extension, Hamiltonian cycle, rural postman and
3-SAT, each with the data needed to translate certificates back."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from eulerext._kernels import INF
from eulerext.advice import (
    CYCLE,
    PATH,
    Advice,
    Hint,
    eliminate_cycle_hints,
    hint_is_well_formed,
    minpath,
    trail_weight,
)
from eulerext.cbm import (
    CBMInstance,
    LegalMap,
    Matching,
    canonical_no_cbm,
    legalize_with_map,
    solve_cbm_general,
)
from eulerext.graph_core import (
    Arc,
    ComponentStructure,
    DirectedMultigraph,
    Trail,
    balance_profile,
    components,
)
from eulerext.preprocess import (
    EEInstance,
    Extension,
    add_weights,
    lift_extension,
    make_extension,
    preprocess,
)


def canonical_no_ee() -> EEInstance:
    """One arc between two vertices and no usable weight: never extendable."""
    return EEInstance.build(DirectedMultigraph(2, ((0, 1),)), {}, 0)


@dataclass(frozen=True)
class EEAInstance:
    """An EE instance plus an advice over the components ``comps``.

    ``comps`` defaults to the components of ``base.graph``; it is stored
    explicitly because realizing cycle hints merges components while the
    remaining hints keep their original ids.
    """

    base: EEInstance
    advice: Advice
    comps: ComponentStructure | None = None

    def __post_init__(self) -> None:
        comps = self.comps or components(self.base.graph)
        if len(comps.component_of) != self.base.n:
            raise ValueError("component map does not match the vertex count")
        for h in self.advice:
            if not hint_is_well_formed(h, comps.c):
                raise ValueError(f"hint {h.seq} is not a valid hint over {comps.c} components")
        object.__setattr__(self, "comps", comps)
        object.__setattr__(self, "advice", tuple(self.advice))


def _endpoint_pairs(inst: EEInstance, comps: ComponentStructure, seq: Sequence[int]):
    """Cheapest realization for every (positive, negative) pair the hint can join.

    Keys are ``(x, y)`` with ``x`` of positive and ``y`` of negative balance;
    both orientations of ``seq`` are tried.
    """
    prof = balance_profile(inst.graph)
    out: dict[tuple[int, int], tuple[int, Trail]] = {}
    for p in (tuple(seq), tuple(seq[::-1])):
        for x in sorted(prof.i_plus):
            if comps.component_of[x] != p[0]:
                continue
            for y in sorted(prof.i_minus):
                if comps.component_of[y] != p[-1]:
                    continue
                t = minpath(inst, comps, p, x, y)
                w = trail_weight(inst, t)
                if w < INF and ((x, y) not in out or w < out[(x, y)][0]):
                    out[(x, y)] = (w, t)
    return out


def solve_eea(inst: EEAInstance) -> Extension | None:
    """Cheapest extension heeding the advice, ignoring the budget."""
    from eulerext.ee_solver import solve_ee_cfa

    unbounded = inst.base.with_budget(INF - 1)
    reduced = eliminate_cycle_hints(unbounded, inst.advice, inst.comps)
    if reduced is None:
        return None
    sub, rest, partial = reduced
    found = solve_ee_cfa(sub, rest, inst.comps)
    if found is None:
        return None
    return make_extension(inst.base, partial + found.arcs)


# ---------------------------------------------------------------------------
# EECA -> CBM


@dataclass(frozen=True)
class CBMBackMap:
    """Left vertices are ``plus`` then gadget ``o`` vertices, right vertices
    ``minus`` then gadget ``x`` vertices; ``gadget[k]`` describes the k-th
    gadget pair as (hint index, positive end, negative end, realization)."""

    plus: tuple[int, ...]
    minus: tuple[int, ...]
    gadget: tuple[tuple[int, int, int, Trail], ...]
    base: EEInstance


def eeca_to_cbm(inst: EEAInstance) -> tuple[CBMInstance, CBMBackMap]:
    """Matching instance whose conjoining matchings are the extensions
    heeding the advice.

    Positive vertices go left, negative ones right, each in the cell of its
    component; direct edges carry the arc weight. A hint of length one is a
    join. A longer hint gets its own cell holding, per pair ``(x, y)`` it
    can connect, a left vertex ``o`` and a right vertex ``r`` with edges
    ``x-r`` (realization weight), ``o-r`` and ``o-y`` (both 0), plus joins
    from the cell to both end components. Matching ``x-r`` forces ``o-y``,
    which is the hint realized from ``x`` to ``y``.
    """
    base, comps = inst.base, inst.comps
    if any(h.kind == CYCLE for h in inst.advice):
        raise ValueError("eliminate cycle hints before building the matching instance")
    prof = balance_profile(base.graph)
    if any(abs(x) > 1 for x in prof.balance):
        raise ValueError("the base instance needs balances in {-1, 0, 1}")
    plus = tuple(sorted(prof.i_plus))
    minus = tuple(sorted(prof.i_minus))
    left_cells = [comps.component_of[v] for v in plus]
    right_cells = [comps.component_of[v] for v in minus]
    lpos = {v: i for i, v in enumerate(plus)}
    rpos = {v: j for j, v in enumerate(minus)}
    edges = [
        (lpos[x], rpos[y], base.w(x, y)) for x in plus for y in minus if base.w(x, y) < INF
    ]
    joins: list[tuple[int, int]] = []
    gadget: list[tuple[int, int, int, Trail]] = []
    cell = comps.c
    for idx, h in enumerate(inst.advice):
        if len(h) == 1:
            joins.append((h.seq[0], h.seq[1]))
            continue
        for (x, y), (w, t) in sorted(_endpoint_pairs(base, comps, h.seq).items()):
            o = len(left_cells)
            r = len(right_cells)
            left_cells.append(cell)
            right_cells.append(cell)
            edges += [(lpos[x], r, w), (o, r, 0), (o, rpos[y], 0)]
            gadget.append((idx, x, y, t))
        joins += [(h.seq[0], cell), (h.seq[-1], cell)]
        cell += 1
    out = CBMInstance(
        len(left_cells),
        len(right_cells),
        tuple(edges),
        tuple(left_cells + right_cells),
        cell,
        tuple(joins),
        base.omega_max,
    )
    return out, CBMBackMap(plus, minus, tuple(gadget), base)


def matching_to_extension(back: CBMBackMap, m: Matching | Sequence[tuple[int, int]]) -> Extension:
    """Arcs for direct edges, the stored realization for every used gadget pair."""
    edges = m.edges if isinstance(m, Matching) else tuple(m)
    np_, nm = len(back.plus), len(back.minus)
    total_left = np_ + len(back.gadget)
    lefts = sorted(i for i, _ in edges)
    rights = sorted(j for _, j in edges)
    if lefts != list(range(total_left)) or rights != list(range(nm + len(back.gadget))):
        raise ValueError("matching is not perfect")
    arcs: list[Arc] = []
    for i, j in edges:
        if i >= np_:
            continue  # o-vertex: the paired x-r edge carries the cost
        if j < nm:
            arcs.append((back.plus[i], back.minus[j]))
        else:
            _, x, _, t = back.gadget[j - nm]
            if x != back.plus[i]:
                raise ValueError(f"edge ({i},{j}) is not an edge of the instance")
            arcs.extend(t.arcs)
    return make_extension(back.base, arcs)


def solve_ee_via_cbm(inst: EEInstance) -> Extension | None:
    """Cheapest extension found by turning every candidate advice into a
    matching problem; budget ignored."""
    from eulerext.ee_solver import advices_for

    if inst.n == 0:
        raise ValueError("instance has no vertices")
    norm, maps = preprocess(inst)
    comps = components(norm.graph)
    unbounded = norm.with_budget(INF - 1)
    pool = advices_for(comps.c) if comps.c > 1 else ((),)
    best: Extension | None = None
    for adv in pool:
        reduced = eliminate_cycle_hints(unbounded, adv, comps)
        if reduced is None:
            continue
        sub, rest, partial = reduced
        image, back = eeca_to_cbm(EEAInstance(sub, rest, comps))
        m = solve_cbm_general(image)
        if m is None:
            continue
        found = matching_to_extension(back, m)
        total = add_weights(norm.cost(partial), found.weight)
        if best is None or total < best.weight:
            best = Extension(tuple(sorted(partial + found.arcs)), total)
    if best is None:
        return None
    return make_extension(inst, lift_extension(maps, best.arcs))


# ---------------------------------------------------------------------------
# CBM -> EEA


@dataclass(frozen=True)
class EEABackMap:
    """Right vertex ``j`` of the legalized instance is EE vertex ``left + j``."""

    left: int
    legal: LegalMap | None


def cbm_to_eea(inst: CBMInstance) -> tuple[EEAInstance, EEABackMap]:
    """One component per cell, left vertices of balance -1, right ones +1,
    joins as hints of length one.

    The instance is legalized first. Inside each cell the k-th left vertex
    gets an arc to the k-th right vertex and a directed cycle runs through
    all cell vertices; the only usable arcs go from a right vertex to a left
    vertex along an instance edge, at the edge's weight.
    """
    legal, lmap = legalize_with_map(inst)
    L = legal.left_count
    n = legal.n
    if n == 0:
        # the empty matching: a single vertex is already Eulerian
        base = EEInstance.build(DirectedMultigraph(1), {}, legal.omega_max)
        return EEAInstance(base, ()), EEABackMap(0, lmap)
    members: dict[int, list[int]] = {}
    for v in range(n):
        members.setdefault(legal.cell_of[v], []).append(v)
    arcs: list[Arc] = []
    for c in sorted(members):
        vs = members[c]
        lefts = [v for v in vs if v < L]
        rights = [v for v in vs if v >= L]
        arcs += list(zip(lefts, rights))
        arcs += [(a, b) for a, b in zip(vs, vs[1:] + vs[:1])]
    weights = {(L + j, i): w for i, j, w in legal.edges if w < INF}
    graph = DirectedMultigraph(n, tuple(arcs))
    base = EEInstance.build(graph, weights, legal.omega_max)
    comps = components(graph)
    comp_of_cell = {c: comps.component_of[vs[0]] for c, vs in members.items()}
    hints = tuple(
        Hint(PATH, tuple(sorted((comp_of_cell[a], comp_of_cell[b])))) for a, b in legal.joins
    )
    return EEAInstance(base, hints, comps), EEABackMap(L, lmap)


def extension_to_matching(back: EEABackMap, e: Extension | Iterable[Arc]) -> tuple[tuple[int, int], ...]:
    """Edges of the original matching instance used by the extension."""
    arcs = e.arcs if isinstance(e, Extension) else tuple(e)
    out = []
    for u, v in arcs:
        if not (u >= back.left > v):
            raise ValueError(f"arc ({u},{v}) does not correspond to an edge")
        i, j = v, u - back.left
        if back.legal is not None:
            i, j = back.legal.left_of[i], back.legal.right_of[j]
            if i < 0 or j < 0:
                continue
        out.append((i, j))
    return tuple(sorted(out))


def kernelize_eeca(inst: EEAInstance) -> EEAInstance:
    """Equivalent instance whose hints all have length one.

    Cycle hints are realized and paid for first; the result goes through
    the matching instance and back.
    """
    reduced = eliminate_cycle_hints(inst.base, inst.advice, inst.comps)
    if reduced is None:
        return cbm_to_eea(canonical_no_cbm())[0]
    sub, rest, _ = reduced
    prof = balance_profile(sub.graph)
    if any(abs(x) > 1 for x in prof.balance):
        raise ValueError("the base instance needs balances in {-1, 0, 1}")
    image, _ = eeca_to_cbm(EEAInstance(sub, rest, inst.comps))
    return cbm_to_eea(image)[0]


# ---------------------------------------------------------------------------
# EEA -> EE


@dataclass(frozen=True)
class EEBackMap:
    """``realization`` maps the priced end arc of every chain to the base
    trail it stands for."""

    n_base: int
    realization: Mapping[Arc, Trail] = field(default_factory=dict)
    base: EEInstance | None = None


def eea_to_ee(inst: EEAInstance) -> tuple[EEInstance, EEBackMap]:
    """Plain EE instance in which every hint is forced by a chain of gadget
    layers.

    A hint over components ``j1 .. jk`` gets layers ``W1 .. W(k-1)``. Per
    pair (``x`` positive in ``j1``, ``y`` negative in ``jk``) each layer
    holds a target ``t`` and source ``s`` joined by the arc ``t -> s``;
    pairs the other way round (``x`` positive in ``jk``, ``y`` negative in
    ``j1``) form a second family whose chain runs from the last layer to the
    first. All vertices of a layer lie on one directed cycle, layer ``W1``
    is a component of its own, and every later layer is tied to its
    component ``jl`` by a 2-cycle. Usable arcs: ``s_l -> t_l`` (idle, 0),
    ``s_l -> t_(l+1)`` along a chain (0), and the two chain ends, the one
    touching ``j1`` priced at the cheapest realization of the hint.
    """
    base, comps = inst.base, inst.comps
    if any(h.kind == CYCLE for h in inst.advice):
        raise ValueError("eliminate cycle hints before removing the advice")
    if not inst.advice:
        return base, EEBackMap(base.n, {}, base)
    prof = balance_profile(base.graph)
    n = base.n
    arcs = list(base.graph.arcs)
    weights: dict[Arc, int] = {
        (u, v): base.w(u, v) for u in range(n) for v in range(n) if base.w(u, v) < INF
    }
    realization: dict[Arc, Trail] = {}
    for h in inst.advice:
        seq = h.seq
        k = len(seq)
        fwd: list[tuple[int, int, int, Trail]] = []
        bwd: list[tuple[int, int, int, Trail]] = []
        for x in sorted(prof.i_plus):
            for y in sorted(prof.i_minus):
                cx, cy = comps.component_of[x], comps.component_of[y]
                if cx == seq[0] and cy == seq[-1]:
                    t = minpath(base, comps, seq, x, y)
                    if trail_weight(base, t) < INF:
                        fwd.append((x, y, trail_weight(base, t), t))
                if cx == seq[-1] and cy == seq[0]:
                    t = minpath(base, comps, seq[::-1], x, y)
                    if trail_weight(base, t) < INF:
                        bwd.append((x, y, trail_weight(base, t), t))
        if not fwd and not bwd:
            return canonical_no_ee(), EEBackMap(base.n, {}, None)
        # layer l: (target, source) per pair, fwd pairs first
        layers: list[list[tuple[int, int]]] = []
        for _ in range(k - 1):
            layer = []
            for _ in range(len(fwd) + len(bwd)):
                layer.append((n, n + 1))
                n += 2
            layers.append(layer)
        for l, layer in enumerate(layers):
            ring = [v for pair in layer for v in pair]
            arcs += [(t, s) for t, s in layer]
            arcs += list(zip(ring, ring[1:] + ring[:1]))
            if l >= 1:
                anchor = comps.members(seq[l])[0]
                arcs += [(ring[0], anchor), (anchor, ring[0])]
            for t, s in layer:
                weights[(s, t)] = 0
        for p, (x, y, w, trail) in enumerate(fwd):
            chain = [layer[p] for layer in layers]
            weights[(x, chain[0][0])] = w
            realization[(x, chain[0][0])] = trail
            for (_, s), (t, _) in zip(chain, chain[1:]):
                weights[(s, t)] = 0
            weights[(chain[-1][1], y)] = 0
        for q, (x, y, w, trail) in enumerate(bwd):
            chain = [layer[len(fwd) + q] for layer in layers]
            weights[(x, chain[-1][0])] = 0
            for (t, _), (_, s) in zip(chain, chain[1:]):
                weights[(s, t)] = 0
            weights[(chain[0][1], y)] = w
            realization[(chain[0][1], y)] = trail
    image = EEInstance.build(DirectedMultigraph(n, tuple(arcs)), weights, base.omega_max)
    return image, EEBackMap(base.n, realization, base)


def ee_to_eea_extension(back: EEBackMap, e: Extension | Iterable[Arc]) -> Extension:
    """Base-instance extension from an extension of the image."""
    if back.base is None:
        raise ValueError("the image is the canonical no-instance")
    arcs = e.arcs if isinstance(e, Extension) else tuple(e)
    out: list[Arc] = []
    for u, v in arcs:
        if u < back.n_base and v < back.n_base:
            out.append((u, v))
        elif (u, v) in back.realization:
            out.extend(back.realization[(u, v)].arcs)
    return make_extension(back.base, out)


# ---------------------------------------------------------------------------
# Hamiltonian cycle, rural postman


def hc_to_ee(n: int, arcs: Iterable[Arc]) -> EEInstance:
    """Each vertex ``v`` becomes the 2-cycle ``2v <-> 2v+1``; an input arc
    ``(u, v)`` allows ``2u -> 2v`` at weight 1; the budget is ``n``."""
    if n < 3:
        raise ValueError("Hamiltonian cycle instances need at least 3 vertices")
    g_arcs = []
    for v in range(n):
        g_arcs += [(2 * v + 1, 2 * v), (2 * v, 2 * v + 1)]
    weights = {}
    for u, v in arcs:
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"arc ({u},{v}) is not an arc of a simple digraph on {n} vertices")
        weights[(2 * u, 2 * v)] = 1
    return EEInstance.build(DirectedMultigraph(2 * n, tuple(g_arcs)), weights, n)


@dataclass(frozen=True)
class RPInstance:
    """Digraph with finite arc weights and a multiset of required arcs."""

    n: int
    weights: Mapping[Arc, int]
    required: tuple[Arc, ...]
    omega_max: int

    def __post_init__(self) -> None:
        w = {}
        for (u, v), x in dict(self.weights).items():
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u},{v}) out of range or a loop")
            if not 0 <= x < INF:
                raise ValueError(f"arc ({u},{v}) needs a finite non-negative weight")
            w[(int(u), int(v))] = int(x)
        req = tuple(sorted((int(u), int(v)) for u, v in self.required))
        for a in req:
            if a not in w:
                raise ValueError(f"required arc {a} is not an arc of the graph")
        if self.omega_max < 0:
            raise ValueError("omega-max must be non-negative")
        object.__setattr__(self, "weights", dict(sorted(w.items())))
        object.__setattr__(self, "required", req)

    @property
    def required_weight(self) -> int:
        return sum(self.weights[a] for a in self.required)


def rp_to_ee(inst: RPInstance) -> EEInstance:
    """Required arcs become the graph; the budget shrinks by their weight and
    arcs dearer than what is left are dropped."""
    left = inst.omega_max - inst.required_weight
    if left < 0:
        return canonical_no_ee()
    weights = {a: w for a, w in inst.weights.items() if w <= left}
    return EEInstance.build(DirectedMultigraph(inst.n, inst.required), weights, left)


def ee_to_rp(inst: EEInstance) -> RPInstance:
    """Every finite pair is an arc, the multigraph's arcs are required and
    the budget grows by their weight.

    A multigraph arc whose pair is forbidden gets weight ``omega_max + 1``:
    the walk must pay for it once but can never afford a second use.
    """
    weights = {(u, v): inst.w(u, v) for u in range(inst.n) for v in range(inst.n) if inst.w(u, v) < INF}
    for a in inst.graph.arcs:
        weights.setdefault(a, inst.omega_max + 1)
    req_weight = sum(weights[a] for a in inst.graph.arcs)
    return RPInstance(inst.n, weights, inst.graph.arcs, inst.omega_max + req_weight)


# ---------------------------------------------------------------------------
# 3-SAT -> CBM


@dataclass(frozen=True)
class CNF:
    """Clauses over variables ``1..num_vars`` as signed integers."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        clauses = tuple(tuple(int(x) for x in c) for c in self.clauses)
        for c in clauses:
            if any(x == 0 or abs(x) > self.num_vars for x in c):
                raise ValueError(f"clause {c} names an unknown variable")
        object.__setattr__(self, "clauses", clauses)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(x) - 1] == (x > 0) for x in c) for c in self.clauses)


def sat3_to_cbm(phi: CNF) -> CBMInstance:
    """One cycle of ``4m`` edges per variable, one cell per clause.

    On the cycle of variable ``i`` odd-indexed vertices are left, even ones
    right. Clause ``j`` takes vertex ``4j-1`` of each of its variables, plus
    ``4j-2`` for a positive and ``4j`` for a negative occurrence; the other
    vertices form cell 0, and each clause cell is joined to cell 0. The odd
    edges of a cycle (value true) cross the boundary of a positive
    occurrence, the even edges (false) that of a negative one.
    """
    n, m = phi.num_vars, len(phi.clauses)
    if n == 0 or m == 0:
        raise ValueError("formula must have at least one variable and one clause")
    if any(len(c) > 3 for c in phi.clauses):
        raise ValueError("clauses may have at most three literals")
    half = 2 * m

    def vid(i: int, k: int) -> tuple[bool, int]:
        # vertex k (1-based) on the cycle of variable i: (is_left, local id)
        return (k % 2 == 1, i * half + (k - 1) // 2)

    edges = []
    for i in range(n):
        for k in range(1, 4 * m + 1):
            a, b = vid(i, k), vid(i, k % (4 * m) + 1)
            lft, rgt = (a, b) if a[0] else (b, a)
            edges.append((lft[1], rgt[1], 0))
    left_cell = [0] * (n * half)
    right_cell = [0] * (n * half)

    def put(i: int, k: int, cell: int) -> None:
        is_left, x = vid(i, k)
        (left_cell if is_left else right_cell)[x] = cell

    for j, clause in enumerate(phi.clauses, start=1):
        for lit in clause:
            i = abs(lit) - 1
            put(i, 4 * j - 1, j)
            put(i, 4 * j - 2 if lit > 0 else 4 * j, j)
    return CBMInstance(
        n * half,
        n * half,
        tuple(edges),
        tuple(left_cell + right_cell),
        m + 1,
        tuple((0, j) for j in range(1, m + 1)),
        1,
    )
