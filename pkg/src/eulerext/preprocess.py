"""Instance normalization: vertex splitting, metric closure, and lifting
solutions of the normalized instance back to the input."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from eulerext._kernels import INF, all_pairs_shortest
from eulerext.graph_core import (
    Arc,
    DirectedMultigraph,
    balance_profile,
    canonical_arcs,
)


def add_weights(a: int, b: int) -> int:
    s = a + b
    return INF if a >= INF or b >= INF or s >= INF else s


@dataclass(frozen=True)
class EEInstance:
    """Multigraph, complete weight table (INF forbids an arc) and budget."""

    graph: DirectedMultigraph
    weights: tuple[tuple[int, ...], ...]
    omega_max: int

    def __post_init__(self) -> None:
        n = self.graph.n
        rows = tuple(tuple(INF if int(x) >= INF else int(x) for x in row) for row in self.weights)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"weight table must be {n}x{n}")
        for u in range(n):
            if rows[u][u] != INF:
                raise ValueError(f"diagonal weight ({u},{u}) must be inf")
            if any(x < 0 for x in rows[u]):
                raise ValueError("weights must be non-negative")
        if self.omega_max < 0:
            raise ValueError("omega-max must be non-negative")
        object.__setattr__(self, "weights", rows)

    @classmethod
    def build(
        cls,
        graph: DirectedMultigraph,
        weights: Mapping[Arc, int] | None = None,
        omega_max: int = 0,
        default: int = INF,
    ) -> EEInstance:
        """Weight table from a sparse map; unlisted pairs get ``default``."""
        n = graph.n
        table = [[default if u != v else INF for v in range(n)] for u in range(n)]
        for (u, v), w in (weights or {}).items():
            if u == v:
                raise ValueError(f"weight on diagonal pair ({u},{v})")
            table[u][v] = w
        return cls(graph, tuple(map(tuple, table)), omega_max)

    @property
    def n(self) -> int:
        return self.graph.n

    def w(self, u: int, v: int) -> int:
        return self.weights[u][v]

    def matrix(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.int64).reshape(self.n, self.n)

    def cost(self, arcs: Iterable[Arc]) -> int:
        total = 0
        for u, v in arcs:
            total = add_weights(total, self.weights[u][v])
        return total

    def _copy(self, graph: DirectedMultigraph, omega_max: int) -> EEInstance:
        # the table is already validated; only the new parts need checking
        if graph.n != self.graph.n:
            raise ValueError(f"graph must keep {self.graph.n} vertices")
        if omega_max < 0:
            raise ValueError("omega-max must be non-negative")
        out = object.__new__(EEInstance)
        object.__setattr__(out, "graph", graph)
        object.__setattr__(out, "weights", self.weights)
        object.__setattr__(out, "omega_max", omega_max)
        return out

    def with_graph(self, graph: DirectedMultigraph) -> EEInstance:
        return self._copy(graph, self.omega_max)

    def with_budget(self, omega_max: int) -> EEInstance:
        return self._copy(self.graph, omega_max)


class Extension(NamedTuple):
    arcs: tuple[Arc, ...]
    weight: int


def make_extension(inst: EEInstance, arcs: Iterable[Arc]) -> Extension:
    arcs = canonical_arcs(arcs)
    return Extension(arcs, inst.cost(arcs))


@dataclass(frozen=True)
class PreprocessMap:
    """How a normalized instance relates to the one it came from.

    ``origin_of[x]`` is the vertex of the previous instance that ``x`` was
    split off from (identity for surviving vertices). ``path_expansion`` maps
    an arc of the normalized instance to a vertex sequence of a cheapest
    path in the previous instance.
    """

    origin_of: tuple[int, ...]
    path_expansion: Mapping[Arc, tuple[int, ...]] = field(default_factory=dict)


def split_vertices(inst: EEInstance) -> tuple[EEInstance, PreprocessMap]:
    """Split vertices until every balance lies in ``{-1, 0, 1}``.

    A vertex ``v`` of balance above one gets a twin ``u``: one surplus arc
    ``(w, v)`` becomes ``(w, u)`` and the 2-cycle ``u <-> v`` is added. The
    twin inherits the weight row and column of ``v``; ``u <-> v`` itself is
    forbidden. Negative balances are handled symmetrically. The redirected
    arc is the last one in sorted order.
    """
    n = inst.n
    arcs = list(inst.graph.arcs)
    table = [list(r) for r in inst.weights]
    origin = list(range(n))
    while True:
        bal = balance_profile(DirectedMultigraph(n, arcs)).balance
        heavy = [v for v in range(n) if abs(bal[v]) > 1]
        if not heavy:
            break
        v = heavy[0]
        u = n
        if bal[v] > 0:
            pick = max(a for a in arcs if a[1] == v)
            arcs.remove(pick)
            arcs.append((pick[0], u))
        else:
            pick = max(a for a in arcs if a[0] == v)
            arcs.remove(pick)
            arcs.append((u, pick[1]))
        arcs += [(u, v), (v, u)]
        for row in table:
            row.append(row[v])
        table.append(list(table[v]))
        table[u][u] = INF
        table[u][v] = INF
        table[v][u] = INF
        origin.append(origin[v])
        n += 1
    out = EEInstance(DirectedMultigraph(n, arcs), tuple(map(tuple, table)), inst.omega_max)
    return out, PreprocessMap(tuple(origin), {})


def metric_closure(inst: EEInstance) -> tuple[EEInstance, PreprocessMap]:
    """Replace every weight by the cheapest path weight in the complete digraph."""
    n = inst.n
    dist, pred = all_pairs_shortest(inst.matrix())
    table = [[INF] * n for _ in range(n)]
    expansion: dict[Arc, tuple[int, ...]] = {}
    for s in range(n):
        for t in range(n):
            if s == t or dist[s, t] >= INF:
                continue
            table[s][t] = int(dist[s, t])
            path = [t]
            while path[-1] != s:
                path.append(int(pred[s, path[-1]]))
            expansion[(s, t)] = tuple(reversed(path))
    out = EEInstance(inst.graph, tuple(map(tuple, table)), inst.omega_max)
    return out, PreprocessMap(tuple(range(n)), expansion)


def preprocess(inst: EEInstance) -> tuple[EEInstance, list[PreprocessMap]]:
    """Split, then close. Returns the normalized instance and both maps."""
    split, m1 = split_vertices(inst)
    closed, m2 = metric_closure(split)
    return closed, [m1, m2]


def _lift_once(m: PreprocessMap, arcs: Iterable[Arc]) -> list[Arc]:
    out: list[Arc] = []
    size = len(m.origin_of)
    for u, v in arcs:
        if not (0 <= u < size and 0 <= v < size):
            raise ValueError(f"arc ({u},{v}) references an unknown vertex")
        seq = m.path_expansion.get((u, v), (u, v))
        for x, y in zip(seq, seq[1:]):
            out.append((m.origin_of[x], m.origin_of[y]))
    return out


def lift_extension(maps: PreprocessMap | Sequence[PreprocessMap], e: Iterable[Arc]) -> tuple[Arc, ...]:
    """Translate extension arcs through the maps, newest map first."""
    chain = [maps] if isinstance(maps, PreprocessMap) else list(maps)
    arcs = list(e)
    for m in reversed(chain):
        arcs = _lift_once(m, arcs)
    return canonical_arcs(arcs)
