"""Kernel backend comparison and solver branch statistics."""

from __future__ import annotations

import os
import random
import time
from contextlib import contextmanager
from typing import Iterator

import numpy as np

from eulerext._kernels import INF, HAS_NUMBA, all_pairs_shortest, assignment
from eulerext.ee_solver import SearchStats, solve_ee_optimum
from eulerext.generators import random_small_ee
from eulerext.graph_core import balance_profile, components
from eulerext.preprocess import preprocess


@contextmanager
def backend(use_numba: bool) -> Iterator[None]:
    old = os.environ.get("EULEREXT_NO_NUMBA")
    os.environ["EULEREXT_NO_NUMBA"] = "0" if use_numba else "1"
    try:
        yield
    finally:
        if old is None:
            del os.environ["EULEREXT_NO_NUMBA"]
        else:
            os.environ["EULEREXT_NO_NUMBA"] = old


def _matrix(rng: np.random.Generator, n: int, density: float) -> np.ndarray:
    w = rng.integers(0, 100, size=(n, n), dtype=np.int64)
    w[rng.random((n, n)) > density] = INF
    np.fill_diagonal(w, INF)
    return w


def kernel_bench(seed: int = 0, sizes: tuple[int, ...] = (8, 16, 32, 64), repeats: int = 5) -> list[dict]:
    """Time both kernels per backend and check the outputs agree."""
    rng = np.random.default_rng(seed)
    rows = []
    modes = [False, True] if HAS_NUMBA else [False]
    for n in sizes:
        mats = [_matrix(rng, n, 0.6) for _ in range(repeats)]
        results: dict[bool, list] = {}
        times: dict[bool, dict[str, float]] = {}
        for mode in modes:
            with backend(mode):
                all_pairs_shortest(mats[0])  # compile outside the timing
                assignment(mats[0])
                t = time.perf_counter()
                apsp = [all_pairs_shortest(m) for m in mats]
                t_apsp = time.perf_counter() - t
                t = time.perf_counter()
                asg = [assignment(m) for m in mats]
                t_asg = time.perf_counter() - t
            results[mode] = [(d.tolist(), p.tolist()) for d, p in apsp] + [a for a in asg]
            times[mode] = {"apsp_s": t_apsp, "assignment_s": t_asg}
        agree = all(results[m] == results[modes[0]] for m in modes)
        rows.append(
            {
                "n": n,
                "agree": agree,
                "numpy": times[False],
                "numba": times.get(True),
                "checksum": sum(r[0] for r in results[modes[0]][repeats:] if r is not None),
            }
        )
    return rows


def solver_bench(seed: int = 0, count: int = 50) -> list[dict]:
    """Per-instance optimum and search counters; timings in ``time_s``."""
    rng = random.Random(seed)
    rows = []
    for idx in range(count):
        inst = random_small_ee(rng)
        norm, _ = preprocess(inst)
        prof = balance_profile(norm.graph)
        stats = SearchStats()
        t = time.perf_counter()
        found = solve_ee_optimum(inst, stats)
        elapsed = time.perf_counter() - t
        rows.append(
            {
                "index": idx,
                "n": inst.n,
                "m": inst.graph.m,
                "b": prof.b,
                "c": components(norm.graph).c,
                "weight": None if found is None else found.weight,
                "nodes": stats.nodes,
                "max_branches": stats.max_branches,
                "advices": stats.advices,
                "max_hints": stats.max_hints,
                "time_s": elapsed,
            }
        )
    return rows


def run_bench(seed: int = 0, count: int = 50) -> dict:
    kernels = kernel_bench(seed)
    solver = {}
    for mode in ([False, True] if HAS_NUMBA else [False]):
        with backend(mode):
            solver["numba" if mode else "numpy"] = solver_bench(seed, count)
    deterministic = [{k: v for k, v in r.items() if k != "time_s"} for r in solver["numpy"]]
    same = all(
        [{k: v for k, v in r.items() if k != "time_s"} for r in rows] == deterministic for rows in solver.values()
    )
    return {"seed": seed, "count": count, "numba_available": HAS_NUMBA, "kernels": kernels,
            "solver": deterministic, "backends_agree": same,
            "solver_time_s": {k: sum(r["time_s"] for r in v) for k, v in solver.items()}}
