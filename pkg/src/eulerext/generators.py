"""Seeded random instances for sweeps, tests and the bench."""

from __future__ import annotations

import random

from eulerext.cbm import CBMInstance
from eulerext.graph_core import DirectedMultigraph, balance_profile
from eulerext.preprocess import EEInstance
from eulerext.ssc import SSCInstance


def random_ee(
    rng: random.Random,
    n: int,
    c: int,
    b: int,
    w_range: tuple[int, int] = (0, 10),
    density: float = 0.7,
    extra_cycles: int = 1,
    omega_max: int = 10**9,
) -> EEInstance:
    """Instance with exactly ``n`` vertices, ``c`` components and positive
    balance sum ``b``.

    Vertices are dealt into ``c`` groups; each group of two or more gets a
    random directed cycle (plus a few more balanced cycles), then arcs that
    each raise ``b`` by one are added inside groups. Every off-diagonal pair
    gets a finite weight with probability ``density``.
    """
    if not 1 <= c <= n:
        raise ValueError("need 1 <= c <= n")
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), c - 1))
    groups = [order[i:j] for i, j in zip([0] + cuts, cuts + [n])]
    big = [g for g in groups if len(g) >= 2]
    if b > 0 and not big:
        raise ValueError("every component is a single vertex, so b must be 0")
    arcs: list[tuple[int, int]] = []
    for g in big:
        ring = g[:]
        rng.shuffle(ring)
        arcs += list(zip(ring, ring[1:] + ring[:1]))
        for _ in range(rng.randint(0, extra_cycles)):
            sub = rng.sample(g, rng.randint(2, len(g)))
            arcs += list(zip(sub, sub[1:] + sub[:1]))
    bal = [0] * n
    for _ in range(b):
        g = rng.choice(big)
        pairs = [(u, v) for u in g for v in g if u != v and bal[u] <= 0 and bal[v] >= 0]
        u, v = rng.choice(pairs)
        arcs.append((u, v))
        bal[u] -= 1
        bal[v] += 1
    graph = DirectedMultigraph(n, tuple(arcs))
    assert balance_profile(graph).b == b
    lo, hi = w_range
    weights = {
        (u, v): rng.randint(lo, hi) for u in range(n) for v in range(n) if u != v and rng.random() < density
    }
    return EEInstance.build(graph, weights, omega_max)


def random_small_ee(rng: random.Random, max_n: int = 7, max_c: int = 3, max_b: int = 4) -> EEInstance:
    """Uniformly drawn size parameters within the given caps."""
    n = rng.randint(2, max_n)
    c = rng.randint(1, min(max_c, n))
    # groups of size >= 2 exist unless every group is a singleton
    b = 0 if n == c else rng.randint(0, max_b)
    density = rng.choice([0.4, 0.7, 1.0])
    return random_ee(rng, n, c, b, (0, 10), density)


def random_degree2_cbm(
    rng: random.Random,
    k: int,
    num_cells: int,
    num_joins: int,
    w_max: int = 5,
    planted: bool = True,
) -> CBMInstance:
    """``k`` left and ``k`` right vertices, every left vertex of degree at most two.

    With ``planted`` the edges are the union of two random perfect
    matchings, so the graph is a disjoint union of even cycles and single
    edges; otherwise every left vertex picks one or two random neighbours.
    """
    edges: set[tuple[int, int]] = set()
    if planted:
        for _ in range(2):
            perm = list(range(k))
            rng.shuffle(perm)
            edges |= {(i, perm[i]) for i in range(k)}
    else:
        for i in range(k):
            for j in rng.sample(range(k), min(k, rng.randint(1, 2))):
                edges.add((i, j))
    cells = [rng.randrange(num_cells) for _ in range(2 * k)]
    joins: set[tuple[int, int]] = set()
    if num_cells > 1:
        for _ in range(num_joins):
            a, b = rng.sample(range(num_cells), 2)
            joins.add((min(a, b), max(a, b)))
    weighted = tuple((i, j, rng.randint(0, w_max)) for i, j in sorted(edges))
    budget = rng.randint(0, w_max * k)
    return CBMInstance(k, k, weighted, tuple(cells), num_cells, tuple(sorted(joins)), budget)


def random_ssc(rng: random.Random, c: int, k: int, max_positions: int = 3, p: float = 0.4) -> SSCInstance:
    switches = tuple(
        tuple(tuple(x for x in range(c) if rng.random() < p) for _ in range(rng.randint(1, max_positions)))
        for _ in range(k)
    )
    return SSCInstance(c, switches)


def random_ssc_batch(rng: random.Random, m: int, c: int, k: int, max_positions: int = 3) -> list[SSCInstance]:
    p = rng.choice([0.3, 0.5, 0.7])
    return [random_ssc(rng, c, k, max_positions, p) for _ in range(m)]
