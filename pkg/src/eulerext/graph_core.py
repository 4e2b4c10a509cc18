"""Directed multigraphs, balances, components and trails."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

Arc = tuple[int, int]


def canonical_arcs(arcs: Iterable[Arc]) -> tuple[Arc, ...]:
    return tuple(sorted((int(u), int(v)) for u, v in arcs))


@dataclass(frozen=True)
class DirectedMultigraph:
    """Vertices ``0..n-1`` and a sorted arc multiset without self-loops."""

    n: int
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        arcs = canonical_arcs(self.arcs)
        for u, v in arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u},{v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
        object.__setattr__(self, "arcs", arcs)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def plus(self, extra: Iterable[Arc]) -> DirectedMultigraph:
        """The multigraph with ``extra`` arcs added."""
        return DirectedMultigraph(self.n, self.arcs + tuple(extra))


class BalanceProfile(NamedTuple):
    balance: tuple[int, ...]
    i_plus: frozenset[int]
    i_minus: frozenset[int]
    b: int


class ComponentStructure(NamedTuple):
    component_of: tuple[int, ...]
    c: int

    def members(self, comp: int) -> list[int]:
        return [v for v, k in enumerate(self.component_of) if k == comp]


def balance_profile(g: DirectedMultigraph) -> BalanceProfile:
    bal = [0] * g.n
    for u, v in g.arcs:
        bal[u] -= 1
        bal[v] += 1
    plus = frozenset(v for v in range(g.n) if bal[v] > 0)
    minus = frozenset(v for v in range(g.n) if bal[v] < 0)
    return BalanceProfile(tuple(bal), plus, minus, sum(bal[v] for v in plus))


class UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def components(g: DirectedMultigraph) -> ComponentStructure:
    """Weakly connected components, numbered by their smallest vertex."""
    uf = UnionFind(g.n)
    for u, v in g.arcs:
        uf.union(u, v)
    ids: dict[int, int] = {}
    comp = []
    for v in range(g.n):
        comp.append(ids.setdefault(uf.find(v), len(ids)))
    return ComponentStructure(tuple(comp), len(ids))


def is_eulerian(g: DirectedMultigraph) -> bool:
    if g.n < 1:
        raise ValueError("a graph needs at least one vertex")
    return balance_profile(g).b == 0 and components(g).c == 1


@dataclass(frozen=True)
class Trail:
    vertices: tuple[int, ...]
    arcs: tuple[Arc, ...] = field(init=False)

    def __post_init__(self) -> None:
        vs = tuple(int(v) for v in self.vertices)
        if not vs:
            raise ValueError("a trail has at least one vertex")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "arcs", tuple(zip(vs, vs[1:])))

    @property
    def closed(self) -> bool:
        return len(self.vertices) > 1 and self.vertices[0] == self.vertices[-1]

    @property
    def initial(self) -> int:
        return self.vertices[0]

    @property
    def terminal(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.arcs)


def meta_trail(g: DirectedMultigraph | ComponentStructure, t: Trail) -> tuple[int, ...]:
    """Collapse every maximal run of ``t`` inside one component to its id."""
    comps = g if isinstance(g, ComponentStructure) else components(g)
    out: list[int] = []
    for v in t.vertices:
        k = comps.component_of[v]
        if not out or out[-1] != k:
            out.append(k)
    return tuple(out)


def _find_subtrail(t: Trail, s: Trail) -> int:
    k = len(s.vertices)
    for i in range(len(t.vertices) - k + 1):
        if t.vertices[i : i + k] == s.vertices:
            return i
    raise ValueError("s is not a subtrail of t")


def shortcut(e: Sequence[Arc], t: Trail, s: Trail) -> tuple[tuple[Arc, ...], Trail]:
    """Replace the subtrail ``s`` of ``t`` by the single arc from its start to its end."""
    i = _find_subtrail(t, s)
    pool = Counter(canonical_arcs(e))
    need = Counter(t.arcs)
    if any(pool[a] < k for a, k in need.items()):
        raise ValueError("arcs of t are not contained in e")
    if len(s) == 0:
        return canonical_arcs(e), t
    if s.initial == s.terminal:
        raise ValueError("shortcutting a closed subtrail would create a self-loop")
    pool.subtract(Counter(s.arcs))
    pool[(s.initial, s.terminal)] += 1
    new_vertices = t.vertices[: i + 1] + t.vertices[i + len(s.vertices) - 1 :]
    return canonical_arcs(pool.elements()), Trail(new_vertices)


def decompose_extension(g: DirectedMultigraph, e: Sequence[Arc]) -> list[Trail]:
    """Split ``e`` into arc-disjoint simple paths and simple cycles.

    Paths are peeled first: from each vertex of positive balance in ``g``
    (lowest index first, once per unit of balance) follow the smallest
    remaining head until the walk gets stuck, which happens at a vertex of
    negative balance. Whenever the walk revisits a vertex the closed part is
    cut off as a cycle. What is left is balanced and is peeled into cycles
    the same way, starting from the lowest-index vertex with arcs left.
    """
    if not is_eulerian(g.plus(e)):
        raise ValueError("g + e is not Eulerian")
    out_arcs: dict[int, list[int]] = {}
    for u, v in sorted(canonical_arcs(e), reverse=True):
        out_arcs.setdefault(u, []).append(v)  # pop() yields the smallest head first
    bal = list(balance_profile(g).balance)
    cycles: list[Trail] = []

    def walk(start: int, stop_at_start: bool) -> list[int]:
        path = [start]
        pos = {start: 0}
        x = start
        while out_arcs.get(x):
            x = out_arcs[x].pop()
            if x in pos:
                cut = pos[x]
                cycle = path[cut:] + [x]
                if stop_at_start and cut == 0:
                    return cycle
                cycles.append(Trail(tuple(cycle)))
                for y in path[cut + 1 :]:
                    del pos[y]
                del path[cut + 1 :]
            else:
                pos[x] = len(path)
                path.append(x)
        return path

    paths: list[Trail] = []
    for v in range(g.n):
        while bal[v] > 0 and out_arcs.get(v):
            path = walk(v, stop_at_start=False)
            bal[v] -= 1
            bal[path[-1]] += 1
            paths.append(Trail(tuple(path)))
    for v in range(g.n):
        while out_arcs.get(v):
            cycles.append(Trail(tuple(walk(v, stop_at_start=True))))
    return paths + cycles


def structure_violations(g: DirectedMultigraph, e: Sequence[Arc]) -> list[str]:
    """Check the greedy decomposition of ``e`` against the shape an optimal
    extension can be assumed to have.

    Reported: trails with more than ``c + 1`` vertices, more paths than
    positive-balance vertices, and a cycle in the union of component trails
    taken without their initial vertex. An empty list means no violation.
    """
    comps = components(g)
    prof = balance_profile(g)
    trails = decompose_extension(g, e)
    bad: list[str] = []
    for t in trails:
        if len(t.vertices) - (1 if t.closed else 0) > comps.c + 1:
            bad.append(f"trail {t.vertices} visits more than c+1 vertices")
    paths = sum(1 for t in trails if not t.closed)
    if paths > len(prof.i_plus):
        bad.append(f"{paths} paths but only {len(prof.i_plus)} positive vertices")
    uf = UnionFind(comps.c)
    edges: set[frozenset[int]] = set()
    for t in trails:
        mt = meta_trail(comps, t)[1:]
        edges.update(frozenset(x) for x in zip(mt, mt[1:]))
    for edge in edges:
        a, b = tuple(edge)
        if not uf.union(a, b):
            bad.append("component trails without initial vertices contain a cycle")
            break
    return bad
