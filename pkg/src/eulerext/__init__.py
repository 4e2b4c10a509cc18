"""Exact solvers, reductions and oracles for weighted directed Eulerian extension."""

from eulerext._kernels import INF

__all__ = ["INF"]
