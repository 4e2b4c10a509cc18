"""Exact solvers for Eulerian extension, plus a brute-force oracle."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from eulerext._kernels import INF, assignment
from eulerext.advice import (
    CYCLE,
    Advice,
    Hint,
    eliminate_cycle_hints,
    enumerate_min_connecting_advices,
    minpath,
    trail_weight,
)
from eulerext.graph_core import (
    Arc,
    ComponentStructure,
    balance_profile,
    components,
    is_eulerian,
)
from eulerext.preprocess import (
    EEInstance,
    Extension,
    add_weights,
    lift_extension,
    make_extension,
    preprocess,
)


def verify_extension(inst: EEInstance, e: Extension | Sequence[Arc]) -> bool:
    arcs = e.arcs if isinstance(e, Extension) else tuple(e)
    if any(not (0 <= u < inst.n and 0 <= v < inst.n) or u == v for u, v in arcs):
        return False
    cost = inst.cost(arcs)
    if cost >= INF or cost > inst.omega_max:
        return False
    return is_eulerian(inst.graph.plus(arcs))


def solve_connected(inst: EEInstance) -> Extension | None:
    """Cheapest balancing arc set for a connected, normalized instance.

    With metric weights and unit balances an optimal extension can be taken
    as one direct arc per pair (positive-balance vertex, negative-balance
    vertex), so it is a minimum-weight perfect assignment. The optimum is
    returned whatever the budget; ``None`` means no finite assignment.
    """
    if components(inst.graph).c != 1:
        raise ValueError("solve_connected needs a connected graph")
    prof = balance_profile(inst.graph)
    if any(abs(x) > 1 for x in prof.balance):
        raise ValueError("solve_connected needs balances in {-1, 0, 1}")
    plus = sorted(prof.i_plus)
    minus = sorted(prof.i_minus)
    if not plus:
        return Extension((), 0)
    cost = inst.matrix()[np.ix_(plus, minus)]
    found = assignment(cost)
    if found is None:
        return None
    _, cols = found
    return make_extension(inst, [(plus[i], minus[j]) for i, j in enumerate(cols)])


@dataclass
class SearchStats:
    """Counters filled in by the search; ``max_branches`` is per node."""

    nodes: int = 0
    max_branches: int = 0
    advices: int = 0
    max_hints: int = 0
    branch_counts: list[int] = field(default_factory=list)


def _oriented_pairs(inst: EEInstance, comps: ComponentStructure, h: Hint):
    """Candidate (start, end) pairs for a path hint with their cheapest realization."""
    prof = balance_profile(inst.graph)
    seq = h.seq
    out = {}
    for p in (seq, seq[::-1]):
        for u in sorted(prof.i_plus):
            if comps.component_of[u] != p[0]:
                continue
            for v in sorted(prof.i_minus):
                if comps.component_of[v] != p[-1]:
                    continue
                t = minpath(inst, comps, p, u, v)
                w = trail_weight(inst, t)
                if w < INF and ((u, v) not in out or w < out[(u, v)][0]):
                    out[(u, v)] = (w, t)
    return out


def solve_ee_cfa(
    inst: EEInstance,
    p: Sequence[Hint],
    comps: ComponentStructure | None = None,
    stats: SearchStats | None = None,
) -> Extension | None:
    """Cheapest extension that realizes every path hint of ``p``.

    The first open hint branches over every (positive, negative) vertex pair
    sitting at its two end components, in either orientation; the hint is
    realized by its cheapest path and the search recurses on the enlarged
    graph. With no hint left the connected solver finishes the job.
    """
    if any(h.kind == CYCLE for h in p):
        raise ValueError("solve_ee_cfa takes cycle-free advice")
    comps = comps or components(inst.graph)
    hints = list(p)
    memo: dict[tuple, Extension | None] = {}

    def rec(graph_inst: EEInstance, i: int) -> Extension | None:
        key = (i, balance_profile(graph_inst.graph).balance)
        if key in memo:
            return memo[key]
        if stats is not None:
            stats.nodes += 1
        if i == len(hints):
            if components(graph_inst.graph).c != 1:
                res = None
            else:
                res = solve_connected(graph_inst)
            memo[key] = res
            return res
        pairs = _oriented_pairs(graph_inst, comps, hints[i])
        if stats is not None:
            stats.max_branches = max(stats.max_branches, len(pairs))
            stats.branch_counts.append(len(pairs))
        best: Extension | None = None
        for (u, v), (w, t) in sorted(pairs.items()):
            sub = rec(graph_inst.with_graph(graph_inst.graph.plus(t.arcs)), i + 1)
            if sub is None:
                continue
            total = add_weights(w, sub.weight)
            if best is None or total < best.weight:
                best = Extension(tuple(sorted(t.arcs + sub.arcs)), total)
        memo[key] = best
        return best

    return rec(inst, 0)


@lru_cache(maxsize=None)
def advices_for(c: int) -> tuple[Advice, ...]:
    return tuple(enumerate_min_connecting_advices(c))


def solve_normalized(inst: EEInstance, stats: SearchStats | None = None) -> Extension | None:
    """Optimum for an already split and metric-closed instance, ignoring the budget."""
    comps = components(inst.graph)
    if comps.c == 1:
        return solve_connected(inst)
    best: Extension | None = None
    unbounded = inst.with_budget(INF - 1)
    for adv in advices_for(comps.c):
        if stats is not None:
            stats.advices += 1
            stats.max_hints = max(stats.max_hints, len(adv))
        reduced = eliminate_cycle_hints(unbounded, adv, comps)
        if reduced is None:
            continue
        sub_inst, rest, partial = reduced
        sub = solve_ee_cfa(sub_inst, rest, comps, stats)
        if sub is None:
            continue
        total = add_weights(inst.cost(partial), sub.weight)
        if best is None or total < best.weight:
            best = Extension(tuple(sorted(partial + sub.arcs)), total)
    return best


def solve_ee_optimum(inst: EEInstance, stats: SearchStats | None = None) -> Extension | None:
    """Cheapest extension of the input instance regardless of budget."""
    if inst.n == 0:
        raise ValueError("instance has no vertices")
    norm, maps = preprocess(inst)
    found = solve_normalized(norm, stats)
    if found is None:
        return None
    return make_extension(inst, lift_extension(maps, found.arcs))


def solve_ee(inst: EEInstance, stats: SearchStats | None = None) -> Extension | None:
    """Cheapest extension within the budget, or ``None``."""
    found = solve_ee_optimum(inst, stats)
    if found is None or found.weight > inst.omega_max:
        return None
    return found


# ---------------------------------------------------------------------------
# oracle


def _canon_partition(labels: Sequence[int]) -> tuple[int, ...]:
    ids: dict[int, int] = {}
    return tuple(ids.setdefault(x, len(ids)) for x in labels)


def oracle_ee(inst: EEInstance, max_vertices: int = 8) -> Extension | None:
    """Uniform-cost search that lays the extension down one trail at a time.

    A state is (balance vector, component partition, trail head). With no
    open trail the search may start one at any vertex; otherwise it either
    closes the trail or appends an arc leaving the head. Any Eulerian
    extension can be laid down this way with every balance staying within
    one of the range spanned by its start and target value, so that bound
    makes the state space finite without losing optima. Independent of
    every other solver in the package.
    """
    n = inst.n
    if n > max_vertices:
        raise ValueError(f"oracle limited to {max_vertices} vertices, got {n}")
    prof = balance_profile(inst.graph)
    lo = [min(x, 0) - 1 for x in prof.balance]
    hi = [max(x, 0) + 1 for x in prof.balance]
    out = [[(v, inst.w(u, v)) for v in range(n) if inst.w(u, v) < INF] for u in range(n)]
    start = (prof.balance, _canon_partition(components(inst.graph).component_of), -1)
    goal_bal = (0,) * n
    best = {start: 0}
    parent: dict = {start: None}
    heap = [(0, start)]
    while heap:
        cost, state = heapq.heappop(heap)
        if best.get(state) != cost:
            continue
        if cost > inst.omega_max:
            return None
        bal, part, head = state
        if head < 0 and bal == goal_bal and max(part) == 0:
            arcs = []
            while parent[state] is not None:
                state, arc = parent[state]
                if arc is not None:
                    arcs.append(arc)
            return make_extension(inst, arcs)
        moves: list[tuple[tuple, int, Arc | None]] = []
        if head < 0:
            moves += [((bal, part, v), 0, None) for v in range(n) if out[v]]
        else:
            moves.append(((bal, part, -1), 0, None))
            for v, w in out[head]:
                nb = list(bal)
                nb[head] -= 1
                nb[v] += 1
                if nb[head] < lo[head] or nb[v] > hi[v]:
                    continue
                pu, pv = part[head], part[v]
                npart = part if pu == pv else _canon_partition([pu if x == pv else x for x in part])
                moves.append(((tuple(nb), npart, v), w, (head, v)))
        for nxt, w, arc in moves:
            key = cost + w
            old = best.get(nxt)
            if old is None or key < old:
                best[nxt] = key
                parent[nxt] = (state, arc)
                heapq.heappush(heap, (key, nxt))
    return None
