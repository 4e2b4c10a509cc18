"""Hints over the component graph, their cheapest realizations, and the
enumeration of minimal connecting advices."""

from __future__ import annotations

from itertools import product
from typing import Iterator, NamedTuple, Sequence

from eulerext._kernels import INF
from eulerext.graph_core import (
    Arc,
    ComponentStructure,
    DirectedMultigraph,
    Trail,
    UnionFind,
    components,
)
from eulerext.preprocess import EEInstance, add_weights

PATH = "path"
CYCLE = "cycle"


class Hint(NamedTuple):
    """An undirected trail in the complete component graph.

    ``seq`` lists component ids; a cycle hint repeats its first id at the end.
    A path hint may also be closed, which is why the kind is stored. A closed
    hint of length two, ``(a, b, a)``, walks the edge ``{a, b}`` twice: it
    stands for a trail that leaves ``a`` for ``b`` and comes back.
    """

    kind: str
    seq: tuple[int, ...]

    @property
    def edges(self) -> list[frozenset[int]]:
        return [frozenset(e) for e in zip(self.seq, self.seq[1:])]

    def __len__(self) -> int:
        return len(self.seq) - 1


Advice = tuple[Hint, ...]


def canonical_hint(kind: str, seq: Sequence[int]) -> Hint:
    seq = tuple(seq)
    if kind == CYCLE:
        ring = seq[:-1]
        k = len(ring)
        options = []
        for r in (ring, ring[::-1]):
            for i in range(k):
                rot = r[i:] + r[:i]
                options.append(rot + rot[:1])
        return Hint(CYCLE, min(options))
    return Hint(PATH, min(seq, seq[::-1]))


def canonical_advice(hints: Sequence[Hint]) -> Advice:
    return tuple(sorted(canonical_hint(h.kind, h.seq) for h in hints))


def hint_is_well_formed(h: Hint, c: int) -> bool:
    seq = h.seq
    if len(seq) < 2 or any(not 0 <= x < c for x in seq):
        return False
    if any(a == b for a, b in zip(seq, seq[1:])):
        return False
    closed = seq[0] == seq[-1]
    inner = seq[:-1] if closed else seq
    if len(set(inner)) != len(inner):
        return False
    if h.kind == CYCLE:
        return closed
    return h.kind == PATH


def connects(hints: Sequence[Hint], c: int) -> bool:
    uf = UnionFind(c)
    parts = c
    for h in hints:
        for a, b in zip(h.seq, h.seq[1:]):
            if uf.union(a, b):
                parts -= 1
    return parts == 1


def is_valid_advice(hints: Sequence[Hint], c: int, *, connecting: bool = False, minimal: bool = False) -> bool:
    if not all(hint_is_well_formed(h, c) for h in hints):
        return False
    seen: set[frozenset[int]] = set()
    for h in hints:
        mine = set(h.edges)
        if mine & seen:
            return False
        seen |= mine
    if connecting and not connects(hints, c):
        return False
    if minimal:
        if len(hints) > c:
            return False
        for i in range(len(hints)):
            if connects(hints[:i] + hints[i + 1 :], c):
                return False
    return True


# ---------------------------------------------------------------------------
# realizations


def _layered_path(inst: EEInstance, layers: Sequence[Sequence[int]]) -> tuple[int, list[int]] | None:
    best = {x: 0 for x in layers[0]}
    back: list[dict[int, int]] = []
    for layer in layers[1:]:
        nxt: dict[int, int] = {}
        arg: dict[int, int] = {}
        for y in layer:
            for x in sorted(best):
                cost = add_weights(best[x], inst.w(x, y))
                if cost >= INF:
                    continue
                if y not in nxt or cost < nxt[y]:
                    nxt[y] = cost
                    arg[y] = x
        if not nxt:
            return None
        best = nxt
        back.append(arg)
    end = min(best, key=lambda x: (best[x], x))
    seq = [end]
    for arg in reversed(back):
        seq.append(arg[seq[-1]])
    return best[end], seq[::-1]


def minpath(
    inst: EEInstance, comps: ComponentStructure, p: Sequence[int], u: int, v: int
) -> Trail | None:
    """Cheapest path from ``u`` to ``v`` whose component trail is exactly ``p``.

    Only arcs from the i-th to the (i+1)-th component of ``p`` are usable;
    the search runs over one layer per entry of ``p`` so that components
    repeated in ``p`` are visited in the right order.
    """
    if comps.component_of[u] != p[0] or comps.component_of[v] != p[-1]:
        raise ValueError("u and v must lie in the first and last component of p")
    if len(p) < 2:
        raise ValueError("component path needs at least one edge")
    layers = [[u]] + [comps.members(k) for k in p[1:-1]] + [[v]]
    found = _layered_path(inst, layers)
    return None if found is None else Trail(tuple(found[1]))


def trail_weight(inst: EEInstance, t: Trail | None) -> int:
    return INF if t is None else inst.cost(t.arcs)


def determine_cycle(inst: EEInstance, comps: ComponentStructure, c_hint: Hint) -> Trail | None:
    """Cheapest closed path realizing a cycle hint.

    The first component of the hint is duplicated: the cycle becomes a path
    from each anchor ``v`` back to its copy, tried in both directions.
    """
    if c_hint.kind != CYCLE:
        raise ValueError("determine_cycle needs a cycle hint")
    ring = c_hint.seq
    best: tuple[int, Trail] | None = None
    for seq in (ring, ring[::-1]):
        for v in comps.members(seq[0]):
            layers = [[v]] + [comps.members(k) for k in seq[1:-1]] + [[v]]
            found = _layered_path(inst, layers)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], Trail(tuple(found[1])))
    return None if best is None else best[1]


def eliminate_cycle_hints(
    inst: EEInstance, p: Sequence[Hint], comps: ComponentStructure | None = None
) -> tuple[EEInstance, Advice, tuple[Arc, ...]] | None:
    """Realize every cycle hint, add it to the graph and pay for it.

    Path hints keep referring to ``comps`` (the components before any cycle
    was added). Returns ``None`` when a cycle hint has no finite realization
    or the cycles alone exceed the budget.
    """
    comps = comps or components(inst.graph)
    partial: list[Arc] = []
    spent = 0
    rest: list[Hint] = []
    for h in p:
        if h.kind != CYCLE:
            rest.append(h)
            continue
        t = determine_cycle(inst, comps, h)
        if t is None:
            return None
        partial.extend(t.arcs)
        spent = add_weights(spent, trail_weight(inst, t))
    if spent > inst.omega_max:
        return None
    graph = DirectedMultigraph(inst.n, inst.graph.arcs + tuple(partial))
    out = inst.with_graph(graph).with_budget(inst.omega_max - spent)
    return out, tuple(rest), tuple(sorted(partial))


# ---------------------------------------------------------------------------
# enumeration


def _set_partitions(items: Sequence) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _prufer_trees(cell: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    k = len(cell)
    if k == 1:
        yield []
        return
    if k == 2:
        yield [(cell[0], cell[1])]
        return
    for code in product(range(k), repeat=k - 2):
        degree = [1] * k
        for x in code:
            degree[x] += 1
        edges = []
        for x in code:
            leaf = min(i for i in range(k) if degree[i] == 1)
            edges.append((cell[leaf], cell[x]))
            degree[leaf] -= 1
            degree[x] -= 1
        a, b = (i for i in range(k) if degree[i] == 1)
        edges.append((cell[a], cell[b]))
        yield edges


def _forests(c: int) -> Iterator[list[tuple[int, int]]]:
    for part in _set_partitions(list(range(c))):
        for trees in product(*(list(_prufer_trees(sorted(cell))) for cell in part)):
            yield [tuple(sorted(e)) for t in trees for e in t]


def _as_path(edges: Sequence[tuple[int, int]]) -> tuple[int, ...] | None:
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(x) > 2 for x in adj.values()):
        return None
    ends = sorted(x for x, nb in adj.items() if len(nb) == 1)
    if len(ends) != 2:
        return None
    seq = [ends[0]]
    prev = None
    while len(seq) <= len(edges):
        nxt = [y for y in adj[seq[-1]] if y != prev]
        if not nxt:
            break
        prev = seq[-1]
        seq.append(nxt[0])
    return tuple(seq) if len(seq) == len(edges) + 1 else None


def _extensions(path: tuple[int, ...], c: int, complete: bool) -> list[Hint]:
    out = [Hint(PATH, path)]
    for seq in (path, path[::-1]):
        start, far = seq[0], seq[-1]
        for y in range(c):
            if y == start:
                continue
            if y == far:
                closed = (y,) + seq
                if complete:
                    out.append(Hint(PATH, closed))
                if complete or len(seq) >= 3:
                    out.append(Hint(CYCLE, closed))
            elif y not in seq:
                out.append(Hint(PATH, (y,) + seq))
    return out


def enumerate_min_connecting_advices(c: int, complete: bool = True) -> Iterator[Advice]:
    """Every minimal connecting advice over ``c`` components whose hints,
    each without its initial vertex, form a forest.

    Forests come from a partition of the components plus a spanning tree of
    each cell; the tree edges are grouped into paths, each path may gain an
    initial vertex, and the result is validated and deduplicated.

    With ``complete=False`` only simple paths and cycles of length at least
    three are produced. That smaller family misses optima whose trails leave
    a component and return to it (closed path hints, two-edge cycles), so
    the solvers use the complete family.
    """
    if c < 2:
        return
    seen: set[Advice] = set()
    for forest in _forests(c):
        if not forest:
            continue
        for groups in _set_partitions(forest):
            if len(groups) > c:
                continue
            paths = [_as_path(g) for g in groups]
            if any(p is None for p in paths):
                continue
            for choice in product(*(_extensions(p, c, complete) for p in paths)):
                if not complete and any(h.kind == PATH and h.seq[0] == h.seq[-1] for h in choice):
                    continue
                if not is_valid_advice(choice, c, connecting=True, minimal=True):
                    continue
                key = canonical_advice(choice)
                if key not in seen:
                    seen.add(key)
                    yield key
