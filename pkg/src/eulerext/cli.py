"""Command-line front end.

Exit codes: 0 yes / valid, 1 no / invalid, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Any, Callable, Sequence

from eulerext import formats
from eulerext.bench import run_bench
from eulerext.cbm import CBMInstance, oracle_cbm, solve_cbm_degree2, solve_cbm_general, verify_matching
from eulerext.ee_solver import oracle_ee, solve_ee, verify_extension
from eulerext.generators import random_degree2_cbm, random_ee, random_ssc, random_ssc_batch
from eulerext.graph_core import balance_profile, components
from eulerext.preprocess import EEInstance, preprocess
from eulerext.reductions import (
    CNF,
    EEAInstance,
    RPInstance,
    cbm_to_eea,
    eea_to_ee,
    eeca_to_cbm,
    ee_to_rp,
    hc_to_ee,
    kernelize_eeca,
    rp_to_ee,
    sat3_to_cbm,
)
from eulerext.ssc import PlanarEEInstance, SSCInstance, compose_ssc, solve_ssc, ssc_to_2dee, twodee_to_ee

JSON_SCHEMA = 1


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, *want: type) -> Any:
    tag, obj = formats.parse_any(_read(path))
    if want and not isinstance(obj, want):
        names = " or ".join(t.__name__ for t in want)
        raise UsageError(f"{path}: expected {names}, got a {tag} file")
    return obj


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ee_stats(inst: EEInstance) -> dict:
    prof = balance_profile(inst.graph)
    return {"n": inst.n, "m": inst.graph.m, "b": prof.b, "c": components(inst.graph).c}


def _cbm_stats(inst: CBMInstance) -> dict:
    return {"n": inst.n, "m": len(inst.edges), "cells": inst.num_cells, "joins": len(inst.joins)}


def _answer(args: argparse.Namespace, weight: int | None, cert: list, cert_text: str, stats: dict, t: float) -> int:
    if args.json:
        doc = {
            "schema": JSON_SCHEMA,
            "answer": "no" if weight is None else "yes",
            "weight": weight,
            "certificate": cert,
            "time_s": round(t, 6),
            "stats": stats,
        }
        _emit(args, json.dumps(doc, sort_keys=True) + "\n")
    elif weight is None:
        _emit(args, "# no\n")
    else:
        _emit(args, f"# weight {weight}\n" + cert_text)
    return 1 if weight is None else 0


# ---------------------------------------------------------------------------
# commands


def cmd_solve_ee(args: argparse.Namespace, oracle: bool = False) -> int:
    inst = _load(args.instance, EEInstance)
    t = time.perf_counter()
    found = oracle_ee(inst, args.max_vertices) if oracle else solve_ee(inst)
    t = time.perf_counter() - t
    if found is not None and found.weight > inst.omega_max:
        found = None
    arcs = [] if found is None else [list(a) for a in found.arcs]
    text = "" if found is None else formats.render_pairs(found.arcs)
    return _answer(args, None if found is None else found.weight, arcs, text, _ee_stats(inst), t)


def cmd_solve_cbm(args: argparse.Namespace, oracle: bool = False) -> int:
    inst = _load(args.instance, CBMInstance)
    t = time.perf_counter()
    if oracle:
        found = oracle_cbm(inst, args.max_vertices)
    elif args.algorithm == "degree2":
        found = solve_cbm_degree2(inst)
    else:
        found = solve_cbm_general(inst)
    t = time.perf_counter() - t
    edges = [] if found is None else [list(e) for e in found.edges]
    text = "" if found is None else formats.render_pairs(found.edges)
    return _answer(args, None if found is None else found.weight, edges, text, _cbm_stats(inst), t)


def cmd_solve_ssc(args: argparse.Namespace) -> int:
    inst = _load(args.instance, SSCInstance)
    t = time.perf_counter()
    choice = solve_ssc(inst)
    t = time.perf_counter() - t
    stats = {"colors": inst.color_count, "switches": inst.k}
    if choice is None:
        return _answer(args, None, [], "", stats, t)
    return _answer(args, 0, list(choice), formats.render_choice(choice), stats, t)


def cmd_preprocess(args: argparse.Namespace) -> int:
    inst = _load(args.instance, EEInstance)
    norm, _ = preprocess(inst)
    _emit(args, formats.render_ee(norm))
    return 0


def _reduce_hc(obj: Any) -> Any:
    n, arcs = obj
    return hc_to_ee(n, arcs)


REDUCTIONS: dict[str, tuple[tuple[type, ...], Callable[[Any], Any]]] = {
    "hc-to-ee": ((tuple,), _reduce_hc),
    "rp-to-ee": ((RPInstance,), rp_to_ee),
    "ee-to-rp": ((EEInstance,), ee_to_rp),
    "sat-to-cbm": ((CNF,), sat3_to_cbm),
    "cbm-to-eea": ((CBMInstance,), lambda x: cbm_to_eea(x)[0]),
    "eeca-to-cbm": ((EEAInstance,), lambda x: eeca_to_cbm(x)[0]),
    "eea-to-ee": ((EEAInstance,), lambda x: eea_to_ee(x)[0]),
    "ssc-to-2dee": ((SSCInstance,), ssc_to_2dee),
    "2dee-to-ee": ((PlanarEEInstance,), twodee_to_ee),
}


def cmd_reduce(args: argparse.Namespace) -> int:
    want, fn = REDUCTIONS[args.kind]
    obj = _load(args.instance, *want)
    _emit(args, formats.render_any(fn(obj)))
    return 0


def cmd_compose_ssc(args: argparse.Namespace) -> int:
    batch: list[SSCInstance] = []
    for path in args.instances:
        for block in formats.iter_blocks(_read(path)):
            batch.append(formats.parse_ssc(block))
    if not batch:
        raise UsageError("no SSC instances given")
    _emit(args, formats.render_ssc(compose_ssc(batch)))
    return 0


def cmd_kernelize(args: argparse.Namespace) -> int:
    inst = _load(args.instance, EEAInstance)
    norm, _ = preprocess(inst.base)
    kernel = kernelize_eeca(EEAInstance(norm, inst.advice))
    _emit(args, formats.render_eea(kernel))
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    if args.kind == "ee":
        inst = random_ee(rng, args.n, args.c, args.b, (args.wmin, args.wmax), args.density,
                         omega_max=args.omega_max)
        text = formats.render_ee(inst)
    elif args.kind == "cbm":
        text = formats.render_cbm(random_degree2_cbm(rng, args.k, args.cells, args.joins, args.wmax))
    elif args.kind == "ssc":
        text = formats.render_ssc(random_ssc(rng, args.c, args.k, args.positions))
    else:
        batch = random_ssc_batch(rng, args.m, args.c, args.k, args.positions)
        text = "".join(formats.render_ssc(x) for x in batch)
    _emit(args, text)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cert_text = _read(args.certificate)
    if args.kind == "ee":
        inst = _load(args.instance, EEInstance)
        arcs = formats.parse_pairs(cert_text)
        ok = verify_extension(inst, arcs)
        weight = inst.cost(arcs) if ok else None
    elif args.kind == "cbm":
        inst = _load(args.instance, CBMInstance)
        edges = formats.parse_pairs(cert_text)
        ok = verify_matching(inst, edges)
        weight = sum(inst.weight_map()[e] for e in edges) if ok else None
    else:
        inst = _load(args.instance, SSCInstance)
        ok = inst.covers(formats.parse_choice(cert_text))
        weight = 0 if ok else None
    if args.json:
        _emit(args, json.dumps({"schema": JSON_SCHEMA, "valid": ok, "weight": weight}, sort_keys=True) + "\n")
    else:
        _emit(args, f"valid weight {weight}\n" if ok else "invalid\n")
    return 0 if ok else 1


def cmd_bench(args: argparse.Namespace) -> int:
    report = run_bench(args.seed, args.count)
    if args.json:
        _emit(args, json.dumps(report, sort_keys=True, indent=1) + "\n")
        return 0
    lines = [f"numba available: {report['numba_available']}"]
    for row in report["kernels"]:
        nb = row["numba"]
        lines.append(
            f"n={row['n']:3d} agree={row['agree']} numpy apsp {row['numpy']['apsp_s']:.4f}s "
            f"assign {row['numpy']['assignment_s']:.4f}s"
            + (f" | numba apsp {nb['apsp_s']:.4f}s assign {nb['assignment_s']:.4f}s" if nb else "")
        )
    lines.append(f"solver results identical across backends: {report['backends_agree']}")
    lines.append("idx  n  b  c  weight  nodes  max_branches  advices  max_hints")
    for r in report["solver"]:
        lines.append(
            f"{r['index']:3d} {r['n']:2d} {r['b']:2d} {r['c']:2d} {str(r['weight']):>7} {r['nodes']:6d} "
            f"{r['max_branches']:13d} {r['advices']:8d} {r['max_hints']:10d}"
        )
    for k, v in report["solver_time_s"].items():
        lines.append(f"solver time {k}: {v:.3f}s")
    _emit(args, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eulerext", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, instance: bool = True) -> None:
        if instance:
            p.add_argument("instance", help="instance file, '-' for standard input")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--out", help="write the result here instead of standard output")

    p = sub.add_parser("solve-ee", help="minimum-weight Eulerian extension within the budget")
    common(p)
    p.set_defaults(func=cmd_solve_ee)
    p = sub.add_parser("oracle-ee", help="brute-force Eulerian extension")
    common(p)
    p.add_argument("--max-vertices", type=int, default=8)
    p.set_defaults(func=lambda a: cmd_solve_ee(a, oracle=True))
    p = sub.add_parser("solve-cbm", help="minimum-weight perfect conjoining matching")
    common(p)
    p.add_argument("--algorithm", choices=["general", "degree2"], default="general")
    p.set_defaults(func=cmd_solve_cbm)
    p = sub.add_parser("oracle-cbm", help="brute-force conjoining matching")
    common(p)
    p.add_argument("--max-vertices", type=int, default=16)
    p.set_defaults(func=lambda a: cmd_solve_cbm(a, oracle=True))
    p = sub.add_parser("solve-ssc", help="switch set cover")
    common(p)
    p.set_defaults(func=cmd_solve_ssc)
    p = sub.add_parser("preprocess", help="split vertices and close weights metrically")
    common(p)
    p.set_defaults(func=cmd_preprocess)
    p = sub.add_parser("reduce", help="apply a reduction")
    p.add_argument("kind", choices=sorted(REDUCTIONS))
    common(p)
    p.set_defaults(func=cmd_reduce)
    p = sub.add_parser("compose-ssc", help="or-compose SSC instances")
    p.add_argument("instances", nargs="+")
    common(p, instance=False)
    p.set_defaults(func=cmd_compose_ssc)
    p = sub.add_parser("kernelize-eeca", help="kernel with hints of length one")
    common(p)
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("gen", help="random instance")
    p.add_argument("kind", choices=["ee", "cbm", "ssc", "ssc-batch"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--cells", type=int, default=3)
    p.add_argument("--joins", type=int, default=2)
    p.add_argument("--positions", type=int, default=3)
    p.add_argument("--wmin", type=int, default=0)
    p.add_argument("--wmax", type=int, default=10)
    p.add_argument("--density", type=float, default=0.7)
    p.add_argument("--omega-max", type=int, default=10**6)
    common(p, instance=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check a certificate")
    p.add_argument("kind", choices=["ee", "cbm", "ssc"])
    p.add_argument("instance")
    p.add_argument("certificate")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="kernel backends and solver branch counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=30)
    common(p, instance=False)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, 0 after --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"eulerext: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
