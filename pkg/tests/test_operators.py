import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from amenability.errors import EntryOutOfRange, GroupMismatch, NoConvergence, PreconditionViolated
from amenability.group_core import cyclic_group, dihedral_group, direct_product, symmetric_group
from amenability.group_functions import GroupVector, convolve, delta, lp_norm
from amenability.operators import (
    OperatorHandle,
    apply_T,
    export_kernel_csv,
    kernel,
    operator_norm,
    power_iteration,
    translate_matrix,
    verify_norm_identity,
)

Z2 = cyclic_group(2)[0]
Z4 = cyclic_group(4)[0]
Z6 = cyclic_group(6)[0]
Z10 = cyclic_group(10)[0]
S3xZ5 = direct_product(symmetric_group(3), cyclic_group(5))[0]


def kernel_oracle(G, f):
    """``K(x, y) = Σ_z f(x⁻¹z) f(y⁻¹z)`` by triple loop."""
    n = G.order
    K = np.zeros((n, n))
    for x in range(n):
        for y in range(n):
            K[x, y] = sum(f[G.mul(G.inv(x), z)] * f[G.mul(G.inv(y), z)] for z in range(n))
    return K


class TestKernel:
    def test_delta(self):
        assert np.array_equal(kernel(delta(Z6)).entries, np.eye(6))

    def test_uniform_z2(self):
        K = kernel(GroupVector(Z2, [2**-0.5, 2**-0.5])).entries
        assert np.allclose(K, 1.0, atol=1e-15)

    def test_z4_two_point(self):
        K = kernel(GroupVector(Z4, [0.5, 0.5, 0, 0])).entries
        expected = np.array([[0.5, 0.25, 0, 0.25], [0.25, 0.5, 0.25, 0], [0, 0.25, 0.5, 0.25], [0.25, 0, 0.25, 0.5]])
        assert np.allclose(K, expected, atol=1e-15)

    @pytest.mark.parametrize("G", [symmetric_group(3)[0], dihedral_group(4)[0]], ids=["S3", "D4"])
    def test_matches_oracle(self, G, rng):
        f = rng.random(G.order)
        assert np.allclose(kernel(GroupVector(G, f)).entries, kernel_oracle(G, f), atol=1e-13)

    def test_psd(self, rng):
        K = kernel(GroupVector(S3xZ5, rng.random(30)))
        assert K.min_eigenvalue() >= -1e-12

    def test_range_check(self):
        with pytest.raises(EntryOutOfRange):
            kernel(GroupVector(Z4, [1.5, 0, 0, 0]))
        with pytest.raises(EntryOutOfRange):
            OperatorHandle(GroupVector(Z4, [-0.1, 0, 0, 0]))

    def test_translate_matrix_rows(self, rng):
        G = dihedral_group(5)[0]
        f = rng.random(G.order)
        P = translate_matrix(GroupVector(G, f))
        for x in range(G.order):
            assert np.array_equal(P[x], [f[G.mul(G.inv(x), z)] for z in range(G.order)])

    def test_export(self, tmp_path):
        path = tmp_path / "k.csv"
        export_kernel_csv(kernel(GroupVector(Z4, [0.5, 0.5, 0, 0])), path)
        rows = [list(map(float, r.split(","))) for r in path.read_text().splitlines()]
        assert rows[0] == [0.5, 0.25, 0.0, 0.25]


class TestApply:
    def test_delta_identity(self, rng):
        a = GroupVector(Z6, rng.standard_normal(6))
        for mode in ("dense_kernel", "convolution"):
            out = apply_T(OperatorHandle(delta(Z6), mode), a)
            assert np.allclose(out.values, a.values, atol=1e-15)

    def test_z4_row(self):
        f = GroupVector(Z4, [0.5, 0.5, 0, 0])
        for mode in ("dense_kernel", "convolution"):
            out = apply_T(OperatorHandle(f, mode), delta(Z4))
            assert np.allclose(out.values, [0.5, 0.25, 0, 0.25], atol=1e-15)

    def test_quadratic_form(self, rng):
        G = symmetric_group(4)[0]
        for _ in range(30):
            f = GroupVector(G, rng.random(G.order))
            a = GroupVector(G, rng.standard_normal(G.order))
            lhs = apply_T(OperatorHandle(f), a).values @ a.values
            rhs = lp_norm(convolve(a, f)) ** 2
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_mismatch(self):
        with pytest.raises(GroupMismatch):
            apply_T(OperatorHandle(delta(Z4)), delta(Z6))


class TestNorm:
    @pytest.mark.parametrize("method", ["dense_eig", "power_iteration"])
    def test_delta(self, method):
        assert operator_norm(OperatorHandle(delta(Z6)), method) == pytest.approx(1.0, abs=1e-15)

    def test_z4_circulant(self):
        f = GroupVector(Z4, [0.5, 0.5, 0, 0])
        K = kernel(f).entries
        # circulant eigenvalues are |DFT(f)|²
        expected = np.sort(np.abs(np.fft.fft(f.values)) ** 2)
        assert np.allclose(np.sort(np.linalg.eigvalsh(K)), expected, atol=1e-15)
        assert np.allclose(expected, [0, 0.5, 0.5, 1.0], atol=1e-15)
        assert operator_norm(OperatorHandle(f)) == pytest.approx(1.0, abs=1e-14)

    def test_circulant_oracle_random(self, rng):
        n = 60
        G = cyclic_group(n)[0]
        for _ in range(10):
            f = rng.random(n) * (rng.random(n) < 0.2)
            top = float(np.max(np.abs(np.fft.fft(f)) ** 2))
            assert operator_norm(OperatorHandle(GroupVector(G, f))) == pytest.approx(top, rel=1e-12)

    def test_dense_cap(self):
        G = cyclic_group(5001)[0]
        with pytest.raises(PreconditionViolated, match="power_iteration"):
            operator_norm(OperatorHandle(delta(G)), "dense_eig")

    def test_power_on_large_group(self, rng):
        G = cyclic_group(6000)[0]
        v = np.zeros(6000)
        v[:5] = rng.random(5)
        f = GroupVector(G, v)
        val = operator_norm(OperatorHandle(f), "power_iteration")
        assert val == pytest.approx(lp_norm(f, 1) ** 2, rel=1e-8)

    def test_power_iteration_stalls(self):
        A = np.diag([1.0, -1.0])  # equal-magnitude eigenvalues plus a skew term: no dominant direction
        with pytest.raises(NoConvergence):
            power_iteration(lambda x: A @ x + np.array([0.0, 1e-3]) * x[::-1], 2, max_iter=50)

    def test_power_iteration_zero(self):
        r = power_iteration(lambda x: 0 * x, 3)
        assert r.value == 0.0


class TestIdentity:
    def test_delta_gap_zero(self):
        rep = verify_norm_identity(delta(Z6))
        assert rep["dense_eig"]["abs_gap"] == 0.0
        assert rep["pass"]

    def test_constant_z10(self):
        rep = verify_norm_identity(GroupVector(Z10, np.full(10, 0.1)))
        assert rep["dense_eig"]["norm"] == pytest.approx(1.0, abs=1e-14)
        assert rep["l1_norm_squared"] == pytest.approx(1.0, abs=1e-15)

    def test_asymmetric_two_point(self):
        rep = verify_norm_identity(GroupVector(Z6, [0.7, 0.3, 0, 0, 0, 0]))
        assert rep["dense_eig"]["norm"] == pytest.approx(1.0, abs=1e-14)
        assert rep["pass"]

    @settings(max_examples=25, deadline=None)
    @given(arrays(np.float64, 12, elements=st.floats(0, 1)))
    def test_random_nonneg(self, v):
        if not v.any():
            v = v.copy()
            v[0] = 1.0
        G = dihedral_group(6)[0]
        assert verify_norm_identity(GroupVector(G, v), ("dense_eig",))["pass"]
