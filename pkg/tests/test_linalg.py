import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qidcodes import linalg
from qidcodes.linalg import (
    DensityOperator,
    HermitianOperator,
    eig_herm,
    kron,
    mat_sqrt_psd,
    operator_interval_check,
    partial_trace,
    partial_trace_mat,
    shannon_entropy,
    support_projector,
    trace_distance,
    von_neumann_entropy,
)
from qidcodes.sampling import Seed, complex_gaussians, haar_unitary

from conftest import random_density


class TestKron:
    def test_identity_case(self):
        assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_basis_bookkeeping(self):
        out = kron(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        assert np.allclose(out, np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_index_formula_oracle(self, rng):
        a = complex_gaussians(rng, (2, 2))
        b = complex_gaussians(rng, (2, 2))
        out = kron(a, b)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for l in range(2):
                        assert out[i * 2 + k, j * 2 + l] == pytest.approx(a[i, j] * b[k, l])


class TestPartialTrace:
    def test_maximally_entangled_reduction(self):
        phi = DensityOperator.maximally_entangled(2)
        red = partial_trace(phi, keep=[0])
        assert np.allclose(red.mat, np.eye(2) / 2)
        assert red.dims == (2,)

    def test_product_state(self, rng):
        rho = random_density(rng, 2)
        sigma = random_density(rng, 3)
        joint = DensityOperator(kron(rho, sigma), dims=(2, 3))
        red = partial_trace(joint, keep=[0])
        assert np.abs(red.mat - rho).max() < 1e-12

    def test_trace_preservation(self, rng):
        rho = DensityOperator(random_density(rng, 4), dims=(2, 2))
        red = partial_trace(rho, keep=[1])
        assert abs(float(np.trace(red.mat).real) - 1.0) < 1e-12

    def test_keep_is_a_set(self, rng):
        rho = DensityOperator(random_density(rng, 8), dims=(2, 2, 2))
        a = partial_trace_mat(rho.mat, rho.dims, keep=[0, 2])
        b = partial_trace_mat(rho.mat, rho.dims, keep=[2, 0])
        assert np.allclose(a, b)

    def test_out_of_range(self, rng):
        rho = DensityOperator(random_density(rng, 4), dims=(2, 2))
        with pytest.raises(IndexError):
            partial_trace(rho, keep=[2])

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_positivity_property(self, root):
        rng = Seed(root, 5).generator()
        rho = random_density(rng, 6)
        red = partial_trace_mat(rho, (2, 3), keep=[1])
        assert np.linalg.eigvalsh((red + red.conj().T) / 2).min() >= -1e-10

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_kron_compatibility_property(self, root):
        rng = Seed(root, 6).generator()
        rho = random_density(rng, 3)
        sigma = random_density(rng, 2)
        red = partial_trace_mat(kron(rho, sigma), (3, 2), keep=[0])
        assert np.abs(red - rho).max() < 1e-12


class TestEigHerm:
    def test_sorted_descending(self):
        spec = eig_herm(np.diag([3.0, 1.0, 2.0]).astype(complex))
        assert np.allclose(spec.eigenvalues, [3.0, 2.0, 1.0])

    def test_identity(self):
        spec = eig_herm(np.eye(5, dtype=complex))
        assert np.allclose(spec.eigenvalues, 1.0)

    def test_reconstruction_oracle(self, rng):
        g = complex_gaussians(rng, (8, 8))
        a = (g + g.conj().T) / 2
        spec = eig_herm(a)
        rebuilt = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
        assert np.abs(rebuilt - a).max() < 1e-8 * np.abs(a).max()
        v = spec.eigenvectors
        assert np.abs(v.conj().T @ v - np.eye(8)).max() < 1e-10

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(ValueError):
            eig_herm(complex_gaussians(rng, (3, 3)))


class TestSupportProjector:
    def test_pure_state(self):
        rho = DensityOperator.pure([1.0, 0.0])
        p = support_projector(rho)
        assert np.allclose(p.mat, np.diag([1.0, 0.0]))

    def test_maximally_mixed(self):
        p = support_projector(DensityOperator.maximally_mixed(4))
        assert np.allclose(p.mat, np.eye(4))

    def test_rank_two_state(self, rng):
        # state built from 2 random orthonormal vectors in d=6
        g = complex_gaussians(rng, (6, 2))
        q, _ = np.linalg.qr(g)
        rho = DensityOperator(0.3 * np.outer(q[:, 0], q[:, 0].conj()) + 0.7 * np.outer(q[:, 1], q[:, 1].conj()))
        p = support_projector(rho)
        assert round(float(np.trace(p.mat).real)) == 2
        assert float(np.einsum("ij,ji->", rho.mat, p.mat).real) == pytest.approx(1.0, abs=1e-9)
        assert np.abs(p.mat @ p.mat - p.mat).max() < 1e-9


class TestEntropies:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(DensityOperator.pure([0.6, 0.8])) == 0.0

    def test_maximally_mixed(self):
        assert von_neumann_entropy(DensityOperator.maximally_mixed(8)) == pytest.approx(3.0, abs=1e-12)

    def test_hand_evaluated(self):
        rho = DensityOperator(np.diag([0.5, 0.25, 0.25]).astype(complex))
        assert von_neumann_entropy(rho) == pytest.approx(1.5, abs=1e-12)

    def test_unitary_invariance(self, rng):
        rho = DensityOperator(random_density(rng, 5))
        u = haar_unitary(5, Seed(77, 0))
        rotated = DensityOperator(u @ rho.mat @ u.conj().T)
        assert von_neumann_entropy(rotated) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)

    def test_shannon_examples(self):
        assert shannon_entropy([1.0, 0.0]) == 0.0
        assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0, abs=0)
        # frozen from -0.9 log2 0.9 - 0.1 log2 0.1
        assert shannon_entropy([0.9, 0.1]) == pytest.approx(0.46899559358928117, abs=1e-12)

    def test_shannon_rejects_bad_input(self):
        with pytest.raises(ValueError):
            shannon_entropy([0.7, 0.7])
        with pytest.raises(ValueError):
            shannon_entropy([1.5, -0.5])


class TestTraceDistance:
    def test_self_distance(self, rng):
        rho = DensityOperator(random_density(rng, 3))
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure(self):
        a = DensityOperator.pure([1.0, 0.0])
        b = DensityOperator.pure([0.0, 1.0])
        assert trace_distance(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_eigenvalue_formula(self):
        a = DensityOperator(np.diag([0.7, 0.3]).astype(complex))
        b = DensityOperator.maximally_mixed(2)
        assert trace_distance(a, b) == pytest.approx(0.2, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            trace_distance(DensityOperator.maximally_mixed(2), DensityOperator.maximally_mixed(3))


class TestOperatorInterval:
    def test_trivial_cases(self):
        assert operator_interval_check(DensityOperator.maximally_mixed(2), 0.4, 0.6)
        assert not operator_interval_check(DensityOperator.pure([1.0, 0.0]), 0.4, 0.6)

    def test_against_eigenvalue_oracle(self):
        # random reduced states, verdicts must match a direct eigenvalue check
        rng = Seed(314, 0).generator()
        lo, hi = (1 - 0.4) / 2, (1 + 0.4) / 2
        for _ in range(1000):
            g = complex_gaussians(rng, (2, 200))
            w = g @ g.conj().T
            rho = w / float(np.trace(w).real)
            vals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
            expected = bool(vals[0] >= lo and vals[-1] <= hi)
            assert operator_interval_check(rho, lo, hi) == expected

    def test_subspace_restriction(self, rng):
        g = complex_gaussians(rng, (6, 2))
        q, _ = np.linalg.qr(g)
        rho = DensityOperator((q * [0.45, 0.55]) @ q.conj().T)
        proj = HermitianOperator(q @ q.conj().T)
        assert operator_interval_check(rho, 0.4, 0.6, within=proj, atol=1e-12)
        assert not operator_interval_check(rho, 0.4, 0.6)  # zero eigenvalues off support


class TestMatSqrtPsd:
    def test_identity(self):
        assert np.allclose(mat_sqrt_psd(np.eye(3, dtype=complex)), np.eye(3))

    def test_diagonal(self):
        assert np.allclose(mat_sqrt_psd(np.diag([4.0, 9.0]).astype(complex)), np.diag([2.0, 3.0]))

    def test_square_back_oracle(self, rng):
        g = complex_gaussians(rng, (6, 6))
        a = g @ g.conj().T
        root = mat_sqrt_psd(a)
        assert np.abs(root @ root - a).max() < 1e-8 * np.abs(a).max()

    def test_strongly_negative_rejected(self):
        with pytest.raises(ValueError):
            mat_sqrt_psd(np.diag([1.0, -0.1]).astype(complex))


class TestValidation:
    def test_density_operator_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            DensityOperator(np.eye(2, dtype=complex))

    def test_density_operator_rejects_negative(self):
        with pytest.raises(ValueError):
            DensityOperator(np.diag([1.2, -0.2]).astype(complex))

    def test_density_operator_rejects_non_hermitian(self, rng):
        mat = random_density(rng, 2)
        mat[0, 1] += 0.1
        with pytest.raises(ValueError):
            DensityOperator(mat)

    def test_dims_must_multiply(self, rng):
        with pytest.raises(ValueError):
            DensityOperator(random_density(rng, 4), dims=(2, 3))

    def test_finite_entries(self):
        mat = np.full((2, 2), np.nan, dtype=complex)
        with pytest.raises(ValueError):
            HermitianOperator(mat)
