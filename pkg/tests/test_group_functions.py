import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from amenability.errors import GroupMismatch, NegativeEntry, NotUnitNorm, ParseError, UnsupportedExponent
from amenability.group_core import cyclic_group, dihedral_group, symmetric_group
from amenability.group_functions import (
    GroupVector,
    ball_displacement,
    convolve,
    delta,
    displacement,
    indicator,
    involute,
    left_translate,
    lp_norm,
    mazur_1_to_2,
    mazur_2_to_1,
    read_vector,
    right_translate,
    uniform,
    write_vector,
)

Z4 = cyclic_group(4)
Z6 = cyclic_group(6)
Z12 = cyclic_group(12)
S3 = symmetric_group(3)
D5 = dihedral_group(5)


def random_unit(rng, G, support=None):
    v = np.zeros(G.order)
    idx = np.arange(G.order) if support is None else np.asarray(support)
    v[idx] = rng.random(len(idx)) + 0.01
    return GroupVector(G, v / np.linalg.norm(v), nonneg=True, unit_l2=True)


def conv_oracle(G, a, f):
    out = np.zeros(G.order)
    for x in range(G.order):
        for y in range(G.order):
            out[G.mul(x, y)] += a[x] * f[y]
    return out


class TestNorms:
    @pytest.mark.parametrize("p", [1, 2])
    def test_delta(self, p):
        assert lp_norm(delta(Z6[0]), p) == 1.0

    @pytest.mark.parametrize("n", [1, 4, 9, 30])
    def test_uniform(self, n):
        G, _ = cyclic_group(n)
        u = uniform(G)
        assert lp_norm(u, 2) == pytest.approx(1.0, abs=1e-15)
        assert lp_norm(u, 1) == pytest.approx(math.sqrt(n), rel=1e-15)

    def test_zero_and_bad_p(self):
        z = GroupVector(Z6[0], np.zeros(6))
        assert lp_norm(z, 1) == lp_norm(z, 2) == 0.0
        with pytest.raises(UnsupportedExponent):
            lp_norm(z, 3)

    def test_flag_checks(self):
        with pytest.raises(NegativeEntry):
            GroupVector(Z4[0], [1.0, -0.1, 0, 0], nonneg=True)
        with pytest.raises(NotUnitNorm):
            GroupVector(Z4[0], [0.5, 0.5, 0, 0], unit_l2=True)
        with pytest.raises(ValueError):
            GroupVector(Z4[0], [1.0, 0.0])

    def test_values_read_only(self):
        f = delta(Z4[0])
        with pytest.raises(ValueError):
            f.values[0] = 2.0


class TestTranslations:
    def test_right_identity(self, rng):
        f = random_unit(rng, S3[0])
        assert np.array_equal(right_translate(f, S3[0].identity).values, f.values)

    def test_right_z4(self):
        G, _ = Z4
        assert right_translate(delta(G, 0), 1).values.tolist() == [0, 0, 0, 1]

    def test_left_z4(self):
        G, _ = Z4
        assert left_translate(delta(G, 0), 1).values.tolist() == [0, 1, 0, 0]
        f = GroupVector(G, [0.1, 0.2, 0.3, 0.4])
        assert np.array_equal(left_translate(f, 0).values, f.values)

    def test_norm_preserved(self, rng):
        G, _ = D5
        for _ in range(100):
            f = GroupVector(G, rng.standard_normal(G.order))
            s = int(rng.integers(G.order))
            assert abs(lp_norm(right_translate(f, s)) - lp_norm(f)) <= 1e-15

    def test_left_right_commute_bitwise(self, rng):
        G, _ = S3
        for _ in range(100):
            f = GroupVector(G, rng.standard_normal(G.order))
            g, s = (int(x) for x in rng.integers(G.order, size=2))
            a = left_translate(right_translate(f, s), g).values
            b = right_translate(left_translate(f, g), s).values
            assert np.array_equal(a, b)

    def test_right_translation_is_an_action(self, rng):
        # (s.(t.f))(h) = (t.f)(hs) = f(hst), so s.(t.f) = (st).f
        G, _ = S3
        f = GroupVector(G, rng.standard_normal(G.order))
        for s in range(6):
            for t in range(6):
                lhs = right_translate(right_translate(f, t), s).values
                rhs = right_translate(f, G.mul(s, t)).values
                assert np.array_equal(lhs, rhs)

    def test_involute(self, rng):
        G, _ = Z6
        assert involute(delta(G, 2)).values.tolist() == delta(G, 4).values.tolist()
        f = GroupVector(G, rng.standard_normal(6))
        assert np.array_equal(involute(involute(f)).values, f.values)
        sym = GroupVector(G, [1, 2, 3, 4, 3, 2])
        assert np.array_equal(involute(sym).values, sym.values)


class TestMazur:
    def test_delta(self):
        d = delta(Z6[0])
        assert np.array_equal(mazur_2_to_1(d).values, d.values)
        assert np.array_equal(mazur_1_to_2(d).values, d.values)

    def test_uniform_four_points(self):
        G, _ = Z4
        out = mazur_2_to_1(GroupVector(G, [0.5] * 4))
        assert out.values.tolist() == [0.25] * 4

    def test_round_trip(self, rng):
        G, _ = Z12
        for _ in range(100):
            supp = rng.choice(12, size=int(rng.integers(1, 13)), replace=False)
            f = random_unit(rng, G, supp)
            back = mazur_1_to_2(mazur_2_to_1(f))
            assert np.max(np.abs(back.values - f.values)) <= 1e-12
            assert np.array_equal(back.support, f.support)

    def test_rejects(self):
        G, _ = Z4
        with pytest.raises(NegativeEntry):
            mazur_2_to_1(GroupVector(G, [1.0, -0.0001, 0, 0]))
        with pytest.raises(NotUnitNorm):
            mazur_1_to_2(GroupVector(G, [0.5, 0.4, 0, 0]))


class TestConvolution:
    def test_delta_identity(self, rng):
        G, _ = S3
        a = GroupVector(G, rng.standard_normal(6))
        assert np.array_equal(convolve(a, delta(G)).values, a.values)

    def test_z4_deltas(self):
        G, _ = Z4
        assert convolve(delta(G, 1), delta(G, 2)).values.tolist() == [0, 0, 0, 1]

    @pytest.mark.parametrize("GS", [S3, D5, Z6], ids=["S3", "D5", "Z6"])
    def test_matches_double_sum(self, rng, GS):
        G, _ = GS
        a, f = rng.standard_normal((2, G.order))
        out = convolve(GroupVector(G, a), GroupVector(G, f)).values
        assert np.allclose(out, conv_oracle(G, a, f), atol=1e-13)

    def test_young(self, rng):
        G, _ = D5
        for _ in range(200):
            a = GroupVector(G, rng.standard_normal(G.order))
            f = GroupVector(G, rng.standard_normal(G.order))
            c = convolve(a, f)
            assert lp_norm(a, 1) * lp_norm(f, 2) - lp_norm(c, 2) >= -1e-12
            assert lp_norm(a, 1) * lp_norm(f, 1) - lp_norm(c, 1) >= -1e-12

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            convolve(delta(Z4[0]), delta(Z6[0]))


class TestDisplacement:
    def test_constant(self):
        G, S = S3
        assert displacement(uniform(G), S) == 0.0

    def test_half_interval_z12(self):
        G, S = Z12
        f = indicator(G, range(6))
        assert displacement(f, S) == pytest.approx(math.sqrt(2 / 6), abs=1e-15)

    def test_delta_z6(self):
        G, S = Z6
        assert displacement(delta(G), S) == pytest.approx(math.sqrt(2), abs=1e-15)
        assert displacement(delta(G), S, p=1) == 2.0

    def test_symmetric_flag_is_redundant(self, rng):
        # ‖f - s⁻¹.f‖ = ‖s.f - f‖ after substituting h -> hs, so the flag changes nothing
        G, S = S3
        f = random_unit(rng, G)
        assert displacement(f, S, symmetric=True) == pytest.approx(displacement(f, S), abs=1e-15)

    def test_ball_displacement_dominates(self, rng):
        G, S = D5
        f = random_unit(rng, G)
        assert ball_displacement(f, S, 1) == pytest.approx(displacement(f, S, symmetric=True), abs=1e-15)
        assert ball_displacement(f, S, 2) >= ball_displacement(f, S, 1)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, 12, elements=st.floats(-5, 5)))
    def test_triangle_bound(self, v):
        # ‖f - s.f‖ <= 2 ‖f‖
        G, S = Z12
        f = GroupVector(G, v)
        assert displacement(f, S) <= 2 * lp_norm(f) + 1e-12


def test_vector_csv_round_trip(tmp_path, rng):
    G, _ = D5
    f = random_unit(rng, G)
    path = tmp_path / "f.csv"
    write_vector(path, f, group_file="d5.perm")
    g = read_vector(path, G)
    assert np.array_equal(g.values, f.values)
    assert g.nonneg and g.unit_l2


def test_vector_csv_errors(tmp_path):
    G, _ = Z4
    path = tmp_path / "bad.csv"
    path.write_text("index,value\n0,abc\n")
    with pytest.raises(ParseError):
        read_vector(path, G)
    path.write_text("index,value\n-1,1.0\n")
    with pytest.raises(ParseError):
        read_vector(path, G)
