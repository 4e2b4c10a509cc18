"""Dense numeric kernels: all-pairs label-setting shortest paths and the
assignment problem on exact int64 weights.

Each kernel exists twice. The loop version is compiled with numba when it is
importable; the vectorized numpy version is used when numba is missing or
when ``EULEREXT_NO_NUMBA=1`` is set. Both produce identical results,
including tie-breaking.
"""

from __future__ import annotations

import os

import numpy as np

INF = 1 << 60
"""Sentinel for a forbidden arc. Sums are saturated explicitly, never wrapped."""

try:  # pragma: no cover - exercised indirectly
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("EULEREXT_NO_NUMBA", "") not in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# shortest paths


def _apsp_loops(w):
    n = w.shape[0]
    dist = np.full((n, n), INF, dtype=np.int64)
    pred = np.full((n, n), -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    for s in range(n):
        for i in range(n):
            done[i] = False
        dist[s, s] = 0
        for _ in range(n):
            u = -1
            best = INF
            for i in range(n):
                if not done[i] and dist[s, i] < best:
                    best = dist[s, i]
                    u = i
            if u < 0:
                break
            done[u] = True
            du = dist[s, u]
            for v in range(n):
                if done[v]:
                    continue
                wv = w[u, v]
                if wv >= INF:
                    continue
                cand = du + wv
                if cand < dist[s, v] or (cand == dist[s, v] and u < pred[s, v]):
                    dist[s, v] = cand
                    pred[s, v] = u
    return dist, pred


def _apsp_numpy(w):
    n = w.shape[0]
    dist = np.full((n, n), INF, dtype=np.int64)
    pred = np.full((n, n), -1, dtype=np.int64)
    finite = w < INF
    for s in range(n):
        d = dist[s]
        p = pred[s]
        d[s] = 0
        done = np.zeros(n, dtype=bool)
        for _ in range(n):
            masked = np.where(done, INF, d)
            u = int(np.argmin(masked))
            if masked[u] >= INF:
                break
            done[u] = True
            ok = finite[u] & ~done
            cand = np.where(ok, d[u] + np.where(ok, w[u], 0), INF)
            better = ok & ((cand < d) | ((cand == d) & (u < p)))
            d[better] = cand[better]
            p[better] = u
    return dist, pred


# ---------------------------------------------------------------------------
# assignment (square, minimum cost, shortest augmenting paths with potentials)


def _assign_loops(cost):
    n = cost.shape[0]
    big = INF
    u = np.zeros(n + 1, dtype=np.int64)
    v = np.zeros(n + 1, dtype=np.int64)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    minv = np.zeros(n + 1, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.bool_)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = big
            used[j] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = big
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col


def _assign_numpy(cost):
    n = cost.shape[0]
    big = INF
    u = np.zeros(n + 1, dtype=np.int64)
    v = np.zeros(n + 1, dtype=np.int64)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, big, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = np.full(n + 1, big, dtype=np.int64)
            cur[1:] = cost[i0 - 1] - u[i0] - v[1:]
            upd = free & (cur < minv)
            minv[upd] = cur[upd]
            way[upd] = j0
            cand = np.where(free, minv, big)
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.zeros(n, dtype=np.int64)
    row_to_col[p[1:] - 1] = np.arange(n)
    return row_to_col


if HAS_NUMBA:
    _apsp_jit = numba.njit(cache=True)(_apsp_loops)
    _assign_jit = numba.njit(cache=True)(_assign_loops)
else:  # pragma: no cover
    _apsp_jit = _apsp_loops
    _assign_jit = _assign_loops


def all_pairs_shortest(w: np.ndarray, *, use_numba: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(dist, pred)`` for a dense weight matrix with INF entries.

    ``pred[s, v]`` is the last vertex before ``v`` on the chosen ``s -> v``
    path. Among equal-length labels the smaller predecessor index wins.
    """
    w = np.ascontiguousarray(w, dtype=np.int64)
    if use_numba is None:
        use_numba = numba_enabled()
    if w.shape[0] == 0:
        return w.copy(), w.copy()
    return _apsp_jit(w) if use_numba else _apsp_numpy(w)


def assignment(cost: np.ndarray, *, use_numba: bool | None = None) -> tuple[int, list[int]] | None:
    """Minimum-cost perfect assignment of a square matrix.

    Entries equal to INF are forbidden. Returns ``(total, row_to_col)`` or
    ``None`` when every perfect assignment uses a forbidden entry.
    """
    cost = np.asarray(cost, dtype=np.int64)
    n = cost.shape[0]
    if n == 0:
        return 0, []
    if use_numba is None:
        use_numba = numba_enabled()
    finite = cost < INF
    top = int(cost[finite].max()) if finite.any() else 0
    big = (top + 1) * (n + 1)
    work = np.where(finite, cost, big).astype(np.int64)
    rows = _assign_jit(work) if use_numba else _assign_numpy(work)
    cols = [int(c) for c in rows]
    if any(not finite[i, cols[i]] for i in range(n)):
        return None
    return int(sum(int(cost[i, cols[i]]) for i in range(n))), cols
