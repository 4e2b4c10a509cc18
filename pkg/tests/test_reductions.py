import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eulerext._kernels import INF
from eulerext.advice import PATH, Hint, eliminate_cycle_hints
from eulerext.cbm import CBMInstance, oracle_cbm, solve_cbm_general, verify_matching
from eulerext.ee_solver import advices_for, oracle_ee, solve_ee, solve_ee_optimum, verify_extension
from eulerext.generators import random_ee
from eulerext.graph_core import DirectedMultigraph, balance_profile, components
from eulerext.preprocess import EEInstance, preprocess
from eulerext.reductions import (
    CNF,
    EEAInstance,
    RPInstance,
    canonical_no_ee,
    cbm_to_eea,
    ee_to_eea_extension,
    ee_to_rp,
    eea_to_ee,
    eeca_to_cbm,
    extension_to_matching,
    hc_to_ee,
    kernelize_eeca,
    matching_to_extension,
    rp_to_ee,
    sat3_to_cbm,
    solve_ee_via_cbm,
    solve_eea,
)

SAMPLE_FORMULA = CNF(2, ((-1, 2), (-1, -2)))


def chain_instance():
    # components A = {0,1}, B = {2}, C = {3,4}; +1 at 1, -1 at 3
    g = DirectedMultigraph(5, ((0, 1), (1, 0), (0, 1), (3, 4), (4, 3), (3, 4), (4, 3), (4, 3)))
    w = {(u, v): 1 + (u + v) % 3 for u in range(5) for v in range(5) if u != v}
    return EEInstance.build(g, w, 100)


def normalized_instances(seed, count, n_range=(3, 6), c_range=(2, 3)):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(*n_range)
        c = rng.randint(c_range[0], min(c_range[1], n - 1))
        inst = random_ee(rng, n, c, rng.randint(1, 3), density=rng.choice([0.6, 1.0]))
        norm, _ = preprocess(inst)
        out.append(norm)
    return out


class TestEECAToCBM:
    def test_length_one_hints_shape(self):
        norm, _ = preprocess(chain_instance())
        comps = components(norm.graph)
        adv = (Hint(PATH, (0, 1)), Hint(PATH, (1, 2)))
        image, back = eeca_to_cbm(EEAInstance(norm, adv, comps))
        assert image.num_cells == comps.c
        assert len(image.joins) == len(adv)
        assert back.gadget == ()
        prof = balance_profile(norm.graph)
        assert image.left_count == len(prof.i_plus) and image.right_count == len(prof.i_minus)

    def test_long_hint_gadget(self):
        norm, _ = preprocess(chain_instance())
        comps = components(norm.graph)
        a, b, c = comps.component_of[1], comps.component_of[2], comps.component_of[3]
        image, back = eeca_to_cbm(EEAInstance(norm, (Hint(PATH, (a, b, c)),), comps))
        assert image.num_cells == comps.c + 1
        gadget_cell = comps.c
        pairs = len(back.gadget)
        # (1, 3) runs a -> c and (3, 0) runs c -> a; same-component pairs do not count
        assert pairs == 2
        in_cell = [v for v in range(image.n) if image.cell_of[v] == gadget_cell]
        assert len(in_cell) == 2 * pairs
        assert sorted(image.joins) == sorted({(min(a, gadget_cell), gadget_cell), (min(c, gadget_cell), gadget_cell)})

    def test_rejects_cycle_hints(self):
        inst = EEInstance.build(DirectedMultigraph(3), {}, 0, default=1)
        from eulerext.advice import CYCLE

        with pytest.raises(ValueError):
            eeca_to_cbm(EEAInstance(inst, (Hint(CYCLE, (0, 1, 2, 0)),)))

    def test_direct_matching_gives_arcs(self):
        norm, _ = preprocess(chain_instance())
        comps = components(norm.graph)
        image, back = eeca_to_cbm(EEAInstance(norm, (Hint(PATH, (0, 2)),), comps))
        m = solve_cbm_general(image)
        e = matching_to_extension(back, m)
        assert len(e.arcs) == len(m.edges)

    @given(st.integers(0, 10**6))
    def test_matches_cfa(self, seed):
        for norm in normalized_instances(seed, 1):
            comps = components(norm.graph)
            for adv in advices_for(comps.c):
                reduced = eliminate_cycle_hints(norm.with_budget(INF - 1), adv, comps)
                if reduced is None:
                    continue
                sub, rest, _ = reduced
                ea = EEAInstance(sub, rest, comps)
                direct = solve_eea(ea)
                image, back = eeca_to_cbm(ea)
                m = solve_cbm_general(image)
                assert (direct is None) == (m is None)
                if m is not None:
                    e = matching_to_extension(back, m)
                    assert e.weight == m.weight == direct.weight
                    assert verify_extension(sub.with_budget(e.weight), e)

    @given(st.integers(0, 10**6))
    def test_pipeline_matches_solver(self, seed):
        inst = random_ee(random.Random(seed), 5, 2, 2)
        s = solve_ee_optimum(inst)
        v = solve_ee_via_cbm(inst)
        assert (s is None) == (v is None)
        if s is not None:
            assert s.weight == v.weight
            assert verify_extension(inst.with_budget(v.weight), v)


class TestCBMToEEA:
    def test_single_edge(self):
        inst = CBMInstance(1, 1, ((0, 0, 3),), (0, 0), 1, (), 3)
        ea, back = cbm_to_eea(inst)
        assert ea.base.n == 2
        assert ea.comps.c == 1
        found = solve_ee(ea.base)
        assert found.arcs == ((1, 0),)
        assert extension_to_matching(back, found) == ((0, 0),)

    def test_empty(self):
        ea, _ = cbm_to_eea(CBMInstance(0, 0, (), (), 0))
        assert solve_eea(ea).weight == 0

    def test_components_match_cells(self):
        inst = CBMInstance(2, 2, ((0, 0, 1), (1, 1, 1), (0, 1, 2)), (0, 1, 0, 1), 2, ((0, 1),), 5)
        ea, _ = cbm_to_eea(inst)
        assert ea.comps.c == 2
        assert all(len(h) == 1 for h in ea.advice)

    @given(st.integers(0, 10**6))
    def test_answers_match(self, seed):
        rng = random.Random(seed)
        k = rng.randint(1, 3)
        cells = rng.randint(1, 3)
        edges = {(i, j) for i in range(k) for j in range(k) if rng.random() < 0.6}
        joins = {tuple(sorted(rng.sample(range(cells), 2))) for _ in range(rng.randint(0, 2))} if cells > 1 else set()
        inst = CBMInstance(
            k, k, tuple((i, j, rng.randint(0, 4)) for i, j in edges), tuple(rng.randrange(cells) for _ in range(2 * k)),
            cells, tuple(joins), rng.randint(0, 8),
        )
        ea, back = cbm_to_eea(inst)
        o = oracle_cbm(inst)
        found = solve_eea(ea)
        yes = found is not None and found.weight <= inst.omega_max
        assert yes == (o is not None)
        if yes:
            assert verify_matching(inst, extension_to_matching(back, found))


class TestKernel:
    @given(st.integers(0, 10**6))
    def test_short_hints_and_equivalence(self, seed):
        for norm in normalized_instances(seed, 1):
            comps = components(norm.graph)
            b = balance_profile(norm.graph).b
            for adv in advices_for(comps.c)[:: max(1, len(advices_for(comps.c)) // 12)]:
                opt = solve_eea(EEAInstance(norm, adv, comps))
                for budget in ([opt.weight, opt.weight - 1] if opt else [50]):
                    if budget < 0:
                        continue
                    kern = kernelize_eeca(EEAInstance(norm.with_budget(budget), adv, comps))
                    assert all(len(h) == 1 for h in kern.advice)
                    assert kern.base.n <= 12 * max(b, 1) ** 2 * comps.c
                    kopt = solve_eea(kern)
                    assert (kopt is not None and kopt.weight <= kern.base.omega_max) == (
                        opt is not None and opt.weight <= budget
                    )


class TestEEAToEE:
    def test_empty_advice(self):
        norm, _ = preprocess(chain_instance())
        image, _ = eea_to_ee(EEAInstance(norm, ()))
        assert image == norm

    def test_long_hint_layers(self):
        norm, _ = preprocess(chain_instance())
        comps = components(norm.graph)
        a, b, c = comps.component_of[1], comps.component_of[2], comps.component_of[3]
        ea = EEAInstance(norm, (Hint(PATH, (a, b, c)),), comps)
        image, back = eea_to_ee(ea)
        prof = balance_profile(norm.graph)
        pairs = 2
        # two layers of (target, source) pairs
        assert image.n == norm.n + 2 * 2 * pairs
        # layer one is a new component, layer two joins component b
        assert components(image.graph).c == comps.c + 1
        # every layer arc t -> s is one unit of imbalance to repair
        assert balance_profile(image.graph).b == prof.b + 2 * pairs

    def test_unrealizable_hint(self):
        g = DirectedMultigraph(4, ((0, 1), (2, 3)))
        inst = EEInstance.build(g, {}, 10)
        image, _ = eea_to_ee(EEAInstance(inst, (Hint(PATH, (0, 1)),)))
        assert image == canonical_no_ee()

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_eea(self, seed):
        # two components, each carrying one +1 and one -1 vertex
        rng = random.Random(seed)
        g = DirectedMultigraph(4, ((0, 1), (2, 3)))
        w = {(u, v): rng.randint(0, 6) for u in range(4) for v in range(4) if u != v and rng.random() < 0.8}
        norm, _ = preprocess(EEInstance.build(g, w, 100))
        comps = components(norm.graph)
        checked = 0
        for adv in advices_for(comps.c):
            reduced = eliminate_cycle_hints(norm.with_budget(INF - 1), adv, comps)
            if reduced is None:
                continue
            sub, rest, _ = reduced
            ea = EEAInstance(sub, rest, comps)
            image, back = eea_to_ee(ea)
            io = solve_ee_optimum(image)
            so = solve_eea(ea)
            assert (io is None) == (so is None)
            if io is not None:
                assert io.weight == so.weight
                lifted = ee_to_eea_extension(back, io)
                assert lifted.weight == io.weight
                assert verify_extension(sub.with_budget(lifted.weight), lifted)
            checked += image.n > norm.n
        assert checked >= 1


class TestHamiltonian:
    def test_triangle(self):
        inst = hc_to_ee(3, [(0, 1), (1, 2), (2, 0)])
        assert inst.n == 6 and inst.graph.m == 6
        assert balance_profile(inst.graph).b == 0
        assert oracle_ee(inst).weight == 3

    def test_star(self):
        inst = hc_to_ee(4, [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)])
        assert oracle_ee(inst) is None

    def test_rejects_loops(self):
        with pytest.raises(ValueError):
            hc_to_ee(3, [(0, 0)])

    @pytest.mark.parametrize("seed", range(5))
    def test_random_digraph(self, seed):
        rng = random.Random(seed)
        n = 4
        arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.45]
        has_hc = any(
            all((p[i], p[(i + 1) % n]) in arcs for i in range(n)) for p in itertools.permutations(range(n)) if p[0] == 0
        )
        assert (oracle_ee(hc_to_ee(n, arcs)) is not None) == has_hc


class TestRuralPostman:
    def test_eulerian_required(self):
        rp = RPInstance(3, {(0, 1): 2, (1, 2): 3, (2, 0): 4}, ((0, 1), (1, 2), (2, 0)), 9)
        inst = rp_to_ee(rp)
        assert solve_ee(inst) == ((), 0)
        assert components(inst.graph).c == 1

    def test_budget_below_required(self):
        rp = RPInstance(2, {(0, 1): 5, (1, 0): 1}, ((0, 1),), 4)
        assert rp_to_ee(rp) == canonical_no_ee()

    def test_required_must_exist(self):
        with pytest.raises(ValueError):
            RPInstance(2, {(0, 1): 1}, ((1, 0),), 3)

    def test_forbidden_graph_arc(self):
        inst = EEInstance.build(DirectedMultigraph(2, ((0, 1),)), {(1, 0): 2}, 3)
        rp = ee_to_rp(inst)
        assert rp.weights[(0, 1)] == 4
        assert rp.omega_max == 3 + 4

    @given(st.integers(0, 10**6))
    def test_round_trip(self, seed):
        rng = random.Random(seed)
        n = rng.randint(2, 5)
        c = rng.randint(1, min(2, n))
        inst = random_ee(rng, n, c, 0 if n == c else rng.randint(0, 2), density=0.6)
        opt = solve_ee_optimum(inst)
        budgets = [opt.weight, opt.weight - 1] if opt else [10]
        for budget in budgets:
            if budget < 0:
                continue
            src = inst.with_budget(budget)
            back = rp_to_ee(ee_to_rp(src))
            assert (oracle_ee(src) is None) == (oracle_ee(back) is None)
            assert components(back.graph).c == components(src.graph).c


class TestThreeSat:
    def test_sample_formula_yes(self):
        inst = sat3_to_cbm(SAMPLE_FORMULA)
        m = solve_cbm_general(inst)
        assert m is not None
        assert verify_matching(inst, m)

    def test_contradiction_no(self):
        inst = sat3_to_cbm(CNF(1, ((1,), (-1,))))
        assert oracle_cbm(inst) is None
        assert solve_cbm_general(inst) is None

    def test_shape(self):
        inst = sat3_to_cbm(SAMPLE_FORMULA)
        n, m = 2, 2
        assert len(inst.edges) == n * 4 * m
        assert inst.num_cells == m + 1
        assert len(inst.joins) == m
        assert inst.left_count == inst.right_count == n * 2 * m

    def test_rejects_long_clause(self):
        with pytest.raises(ValueError):
            sat3_to_cbm(CNF(4, ((1, 2, 3, 4),)))

    @given(st.integers(0, 10**6))
    def test_matches_truth_table(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 3)
        clauses = tuple(
            tuple(rng.choice([-1, 1]) * v for v in rng.sample(range(1, n + 1), rng.randint(1, min(3, n))))
            for _ in range(rng.randint(1, 3))
        )
        phi = CNF(n, clauses)
        sat = any(phi.satisfied_by(a) for a in itertools.product([False, True], repeat=n))
        assert (solve_cbm_general(sat3_to_cbm(phi)) is not None) == sat
