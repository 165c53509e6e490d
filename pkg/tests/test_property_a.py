import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from amenability.certificates import hr_certificate, optimal_hr_vector
from amenability.errors import AllZero, DisjointSets, EmptyFamilyMember, PreconditionViolated, SupportViolation
from amenability.group_core import (
    FamilySpec,
    FiniteMetricSpace,
    cyclic_group,
    dihedral_group,
    sl2_mod_p,
    symmetric_group,
    word_metric,
)
from amenability.group_functions import GroupVector, delta, displacement, indicator, involute, uniform
from amenability.property_a import (
    CounterexampleRow,
    HigsonRoeMap,
    SetFamilyCertificate,
    check_property_a_certificate,
    check_setfamily_certificate,
    constant_map,
    counterexample_demo,
    hr_to_higson_roe,
    l1_to_setfamily,
    l1_variation_ratio,
    l2_to_l1_map,
    pairs_within,
    spectral_gap,
    variation,
)

Z6 = cyclic_group(6)
Z12 = cyclic_group(12)
Z20 = cyclic_group(20)


def delta_map(GS):
    G, S = GS
    return HigsonRoeMap(S, np.eye(G.order), D_bound=0)


class TestVariation:
    def test_constant(self):
        G, S = Z12
        assert variation(constant_map(S, 3), 1) == 0.0
        assert variation(constant_map(S, 3), 4) == 0.0

    def test_delta_map(self):
        assert variation(delta_map(Z6), 1) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_metric_space_and_cayley_agree(self, rng):
        G, S = dihedral_group(5)
        X = word_metric(G, S)
        rows = rng.random((G.order, G.order))
        for R in (1, 2, 3):
            a = variation(HigsonRoeMap(S, rows, 0), R)
            b = variation(HigsonRoeMap(X, rows, 0), R)
            assert a == b

    def test_pairs_within_backends(self):
        G, S = symmetric_group(4)
        X = word_metric(G, S)
        for R in (1, 2):
            assert np.array_equal(pairs_within(S, R), pairs_within(X, R))


class TestBridge:
    def test_delta(self):
        G, S = Z6
        xi = hr_to_higson_roe(delta(G), S)
        assert xi.D_bound == 0
        for x in range(6):
            assert np.array_equal(xi(x), delta(G, x).values)

    def test_ball_indicator_z12(self):
        G, S = Z12
        f = indicator(G, S.ball(2))
        xi = hr_to_higson_roe(f, S)
        for x in range(12):
            assert np.array_equal(np.flatnonzero(xi(x)), S.ball(2, center=x))
            assert np.allclose(xi(x)[xi(x) > 0], 1 / math.sqrt(5), atol=1e-15)
        v = variation(xi, 1)
        assert v**2 == pytest.approx(2 / 5, abs=1e-12)
        assert v == pytest.approx(displacement(involute(f), S), abs=1e-12)

    def test_nonabelian_supports(self, rng):
        G, S = symmetric_group(4)
        f, _ = optimal_hr_vector(G, S, S.ball(2))
        xi = hr_to_higson_roe(f, S)
        supp_check = np.sort(G.inverse[f.support])
        for x in range(G.order):
            expected = np.sort([G.mul(x, h) for h in supp_check])
            assert np.array_equal(np.flatnonzero(xi(x) > f.support_epsilon), expected)
        assert variation(xi, 1) == pytest.approx(displacement(f, S, symmetric=True), abs=1e-12)

    def test_too_small_D(self):
        G, S = Z12
        with pytest.raises(SupportViolation):
            hr_to_higson_roe(indicator(G, S.ball(2)), S, D=1)

    def test_not_unit(self):
        G, S = Z12
        with pytest.raises(PreconditionViolated):
            hr_to_higson_roe(GroupVector(G, np.ones(12)), S)


class TestPropertyACheck:
    def test_constant_full_support(self):
        G, S = Z12
        xi = HigsonRoeMap(S, np.tile(uniform(G).values, (12, 1)), D_bound=S.diameter)
        for eps in (0.0, 0.5):
            assert check_property_a_certificate(xi, eps, 1)["pass"]

    def test_delta_map_fails(self):
        rep = check_property_a_certificate(delta_map(Z6), 1.0, 1)
        assert not rep["pass"]
        assert rep["variation"] == pytest.approx(math.sqrt(2))

    def test_from_hr_certificate(self):
        G, S = cyclic_group(30)
        f, _ = optimal_hr_vector(G, S, S.ball(4))
        c = hr_certificate(f, S)
        rep = check_property_a_certificate(hr_to_higson_roe(f, S, c.D_bound), c.epsilon, 1, c.D_bound)
        assert rep["pass"]

    def test_support_failure_reported(self):
        G, S = Z12
        xi = HigsonRoeMap(S, np.tile(uniform(G).values, (12, 1)), D_bound=1)
        rep = check_property_a_certificate(xi, 1.0, 1)
        assert not rep["pass"]
        assert any("support" in m for m in rep["failures"])


def brute_ratio(counts, x, y):
    a = Counter({z: int(c) for z, c in enumerate(counts[x]) if c})
    b = Counter({z: int(c) for z, c in enumerate(counts[y]) if c})
    sym = (a - b) + (b - a)
    return Fraction(sum(sym.values()), sum((a & b).values()))


class TestSetFamilies:
    def test_one_point(self):
        X = FiniteMetricSpace(np.zeros((1, 1), dtype=int))
        rep = check_setfamily_certificate(SetFamilyCertificate(X, np.array([[1]]), 0), 0.0)
        assert rep["worst_ratio"] == 0.0 and rep["pass"]

    def test_balls_z20(self):
        G, S = Z20
        counts = np.zeros((20, 20), dtype=np.int64)
        for x in range(20):
            counts[x, S.ball(3, center=x)] = 1
        rep = check_setfamily_certificate(SetFamilyCertificate(S, counts, 3), 1 / 3)
        assert rep["worst_ratio_exact"] == "1/3"
        assert rep["pass"]
        assert brute_ratio(counts, 0, 1) == Fraction(1, 3)

    def test_disjoint(self):
        G, S = Z6
        with pytest.raises(DisjointSets):
            check_setfamily_certificate(SetFamilyCertificate(S, np.eye(6, dtype=np.int64), 0), 1.0)

    def test_empty_member(self):
        G, S = Z6
        counts = np.ones((6, 6), dtype=np.int64)
        counts[2] = 0
        with pytest.raises(EmptyFamilyMember):
            check_setfamily_certificate(SetFamilyCertificate(S, counts, 3), 1.0)

    def test_random_multisets_match_counter(self, rng):
        G, S = dihedral_group(4)
        counts = rng.integers(1, 4, size=(8, 8))
        rep = check_setfamily_certificate(SetFamilyCertificate(S, counts, 4), 100.0, R=2)
        worst = max(brute_ratio(counts, x, y) for x, y in pairs_within(S, 2))
        assert rep["worst_ratio_exact"] == f"{worst.numerator}/{worst.denominator}"


class TestQuantize:
    def test_delta_rows(self):
        G, S = Z6
        sf = l1_to_setfamily(delta_map(Z6), 7)
        assert np.array_equal(sf.counts, 7 * np.eye(6, dtype=np.int64))

    def test_uniform_five_points(self):
        X = FiniteMetricSpace(np.ones((5, 5), dtype=int) - np.eye(5, dtype=int))
        xi = HigsonRoeMap(X, np.full((5, 5), 0.2), D_bound=1)
        assert l1_to_setfamily(xi, 10).counts.tolist() == [[2] * 5] * 5
        with pytest.raises(AllZero):
            l1_to_setfamily(xi, 2)

    def test_ratio_tends_to_l1_limit(self):
        G, S = cyclic_group(16)
        f, _ = optimal_hr_vector(G, S, S.ball(3))
        xi1 = l2_to_l1_map(hr_to_higson_roe(f, S))
        limit = l1_variation_ratio(xi1, 1)
        gaps = []
        for Q in (10, 100, 1000, 10000):
            rep = check_setfamily_certificate(l1_to_setfamily(xi1, Q), math.inf)
            gaps.append(abs(rep["worst_ratio"] - limit))
        assert gaps[-1] < 1e-3
        assert gaps[-1] <= gaps[0]

    def test_mazur_rows_are_l1_unit(self):
        G, S = Z12
        f, _ = optimal_hr_vector(G, S, S.ball(2))
        xi1 = l2_to_l1_map(hr_to_higson_roe(f, S))
        for x, row in xi1.rows():
            assert row.sum() == pytest.approx(1.0, abs=1e-12)


class TestCounterexample:
    def test_trivial_group(self):
        rep = counterexample_demo(FamilySpec((cyclic_group(1),)), 2)
        row = rep["rows"][0]
        assert row.epsilon_star == 0.0
        assert rep["trivial_maps_exact"]

    def test_cyclic_family_closed_form(self):
        fam = FamilySpec(tuple(cyclic_group(n) for n in (10, 20, 40, 80)))
        rep = counterexample_demo(fam, 3)
        target = math.sqrt(2 - 2 * math.cos(math.pi / 8))
        for row in rep["rows"]:
            assert row.epsilon_star == pytest.approx(target, abs=1e-12)
            assert row.trivial_variation == 0.0 and row.trivial_l1 == 1.0
        assert rep["spectral_bound_holds"]

    def test_spectral_gap_cycle(self):
        # eigenvalues of the cycle Laplacian: 2 - 2 cos(2πk/n)
        for n in (5, 12, 30):
            assert spectral_gap(cyclic_group(n)[1]) == pytest.approx(2 - 2 * math.cos(2 * math.pi / n), abs=1e-10)

    def test_sl2_small(self):
        fam = FamilySpec((sl2_mod_p(3), sl2_mod_p(5)))
        rep = counterexample_demo(fam, 3)
        assert rep["trivial_maps_exact"] and rep["spectral_bound_holds"]
        for row in rep["rows"]:
            assert row.epsilon_star**2 >= row.spectral_lower_bound - 1e-9

    def test_workers_merge_in_order(self):
        fam = FamilySpec(tuple(cyclic_group(n) for n in (12, 9, 15)))
        serial = counterexample_demo(fam, 2)
        par = counterexample_demo(fam, 2, workers=2)
        assert [r.csv_row() for r in serial["rows"]] == [r.csv_row() for r in par["rows"]]

    def test_mixed_generator_counts(self):
        with pytest.raises(PreconditionViolated):
            counterexample_demo(FamilySpec((cyclic_group(5), symmetric_group(3))), 2)

    def test_columns(self):
        assert CounterexampleRow.CSV_COLUMNS == (
            "member_index", "group_order", "trivial_variation", "trivial_l1",
            "epsilon_star", "spectral_lower_bound", "ball_fraction",
        )
