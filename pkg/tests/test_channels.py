import numpy as np
import pytest

from qidcodes import channels, linalg
from qidcodes.channels import (
    CqChannel,
    QcChannel,
    QuantumChannel,
    balance_operator,
    channel_from_choi,
    channels_equal,
    choi_state,
    cq_ff_capacity,
    dephase,
    is_constant_channel,
    max_output_entropy,
    qc_apply,
    qc_is_constant,
    stinespring,
)
from qidcodes.linalg import DensityOperator, HermitianOperator
from qidcodes.sampling import (
    RandomChannelSpec,
    Seed,
    complex_gaussians,
    sample_random_channel,
    sample_random_state,
)

from conftest import random_density


def rand_chan(s, t, u, k=0):
    return sample_random_channel(RandomChannelSpec(s, t, u), Seed(0xC4A7, k))


class TestApply:
    def test_identity_channel(self, rng):
        rho = DensityOperator(random_density(rng, 3))
        out = QuantumChannel.identity(3).apply(rho)
        assert np.abs(out.mat - rho.mat).max() < 1e-12

    def test_fully_depolarizing(self, rng):
        d = 3
        basis = np.eye(d, dtype=complex)
        kraus = np.stack([np.outer(basis[:, i], basis[:, j]) / np.sqrt(d) for i in range(d) for j in range(d)])
        chan = QuantumChannel(kraus)
        out = chan.apply_mat(random_density(rng, d))
        assert np.abs(out - np.eye(d) / d).max() < 1e-12

    def test_dilation_oracle(self, rng):
        chan = rand_chan(3, 2, 3)
        dil = stinespring(chan)
        for _ in range(5):
            rho = random_density(rng, 3)
            assert np.abs(chan.apply_mat(rho) - dil.apply_mat(rho)).max() < 1e-9

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            QuantumChannel.identity(2).apply(DensityOperator.maximally_mixed(3))

    def test_cptp_validation(self):
        with pytest.raises(ValueError):
            QuantumChannel(np.stack([np.eye(2, dtype=complex) * 0.9]))


class TestChoi:
    def test_identity_gives_maximally_entangled(self):
        j = choi_state(QuantumChannel.identity(2))
        phi = DensityOperator.maximally_entangled(2)
        assert np.abs(j.mat - phi.mat).max() < 1e-12

    def test_fully_depolarizing_gives_uniform(self):
        j = choi_state(QuantumChannel.depolarizing(2, 1.0))
        assert np.abs(j.mat - np.eye(4) / 4).max() < 1e-12

    def test_first_reduction_maximally_mixed(self):
        chan = rand_chan(3, 4, 2, k=1)
        j = choi_state(chan)
        red = linalg.partial_trace_mat(j.mat, j.dims, keep=[0])
        assert np.abs(red - np.eye(3) / 3).max() < 1e-9

    def test_roundtrip_both_directions(self):
        for k, (d_in, d_out, u) in enumerate([(2, 2, 2), (2, 3, 2), (3, 2, 2), (4, 4, 3)]):
            chan = rand_chan(d_in, d_out, u, k=10 + k)
            back = channel_from_choi(choi_state(chan), d_in, d_out)
            assert channels_equal(chan, back, tol=1e-8)
            j2 = choi_state(back)
            assert linalg.trace_distance(j2, choi_state(chan)) < 1e-8

    def test_choi_constructors_trivial(self):
        ident = channel_from_choi(DensityOperator.maximally_entangled(2), 2, 2)
        assert channels_equal(ident, QuantumChannel.identity(2))
        depol = channel_from_choi(DensityOperator.maximally_mixed(4, dims=(2, 2)), 2, 2)
        assert channels_equal(depol, QuantumChannel.depolarizing(2, 1.0))

    def test_unbalanced_reduction_rejected(self):
        rho = DensityOperator(np.diag([0.5, 0.25, 0.15, 0.1]).astype(complex), dims=(2, 2))
        with pytest.raises(ValueError, match="balance"):
            channel_from_choi(rho, 2, 2)


class TestStinespring:
    def test_identity_dilation(self):
        dil = stinespring(QuantumChannel.identity(3))
        assert dil.d_env == 1
        assert np.allclose(dil.isometry, np.eye(3))

    def test_measurement_channel_env_dim(self):
        d = 3
        basis = np.eye(d, dtype=complex)
        kraus = np.stack([np.outer(basis[:, i], basis[:, i]) for i in range(d)])
        dil = stinespring(QuantumChannel(kraus))
        assert dil.d_env == d

    def test_roundtrip(self, rng):
        chan = rand_chan(2, 3, 2, k=2)
        dil = stinespring(chan)
        rho = random_density(rng, 2)
        assert np.abs(dil.apply_mat(rho) - chan.apply_mat(rho)).max() < 1e-9


class TestQcChannel:
    def test_projective_on_basis_state(self):
        qc = QcChannel.computational(3)
        p = qc_apply(qc, DensityOperator.pure([1.0, 0.0, 0.0]))
        assert np.allclose(p, [1.0, 0.0, 0.0])

    def test_uniform_on_maximally_mixed(self):
        qc = QcChannel.computational(4)
        p = qc_apply(qc, DensityOperator.maximally_mixed(4))
        assert np.allclose(p, 0.25)

    def test_direct_formula_oracle(self, rng):
        qc = QcChannel.from_channel(rand_chan(2, 3, 2, k=3))
        rho = random_density(rng, 2)
        p = qc_apply(qc, rho)
        expect = [float(np.trace(rho @ qc.povm[y]).real) for y in range(qc.n_outcomes)]
        assert np.abs(p - np.array(expect)).max() < 1e-12

    def test_povm_must_sum_to_identity(self):
        with pytest.raises(ValueError):
            QcChannel(np.stack([np.eye(2, dtype=complex) * 0.4, np.eye(2, dtype=complex) * 0.4]))


class TestDephase:
    def test_diagonal_channel_unchanged(self, rng):
        qc_meas = np.stack([np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)])
        chan = QuantumChannel(qc_meas)  # measure-and-keep in computational basis
        deph = dephase(chan, np.eye(2, dtype=complex))
        for _ in range(5):
            rho = random_density(rng, 2)
            assert np.abs(chan.apply_mat(rho) - deph.apply_mat(rho)).max() < 1e-12

    def test_plus_state_decoheres(self):
        deph = dephase(QuantumChannel.identity(2), np.eye(2, dtype=complex))
        plus = DensityOperator.pure([1.0, 1.0])
        assert np.abs(deph.apply_mat(plus.mat) - np.eye(2) / 2).max() < 1e-12

    def test_max_entropy_preserved(self):
        # dephasing in the eigenbasis of the optimal output keeps the maximum
        for k in range(3):
            chan = rand_chan(2, 2, 2, k=20 + k)
            res = max_output_entropy(chan, tol=1e-7)
            omega = chan.apply_mat(res.argmax)
            _, basis = np.linalg.eigh(linalg.hermitize(omega))
            res2 = max_output_entropy(dephase(chan, basis), tol=1e-7)
            assert abs(res.value - res2.value) < 1e-4

    def test_max_entropy_preserved_degenerate_output(self):
        # optimal output rank-deficient: isometric embedding of a qubit into C^3
        v = np.zeros((3, 2), dtype=complex)
        v[0, 0] = v[1, 1] = 1.0
        chan = QuantumChannel(v[None, :, :])
        res = max_output_entropy(chan, tol=1e-7)
        assert res.value == pytest.approx(1.0, abs=1e-6)
        omega = chan.apply_mat(res.argmax)
        _, basis = np.linalg.eigh(linalg.hermitize(omega))
        res2 = max_output_entropy(dephase(chan, basis), tol=1e-7)
        assert abs(res.value - res2.value) < 1e-4


class TestMaxOutputEntropy:
    def test_identity_qubit_exact(self):
        res = max_output_entropy(QuantumChannel.identity(2))
        assert res.value == 1.0
        assert res.converged
        assert np.abs(res.argmax - np.eye(2) / 2).max() < 1e-9

    def test_constant_channel(self, rng):
        sigma = random_density(rng, 2)
        vals, vecs = np.linalg.eigh(sigma)
        kraus = np.stack([np.sqrt(vals[k]) * np.outer(vecs[:, k], np.eye(2)[:, j]) for k in range(2) for j in range(2)])
        chan = QuantumChannel(kraus)
        res = max_output_entropy(chan)
        assert res.value == pytest.approx(linalg.von_neumann_entropy(sigma), abs=1e-9)

    def test_grid_oracle_qubit(self):
        from qidcodes.cli import _bloch_grid_max

        for k in range(3):
            chan = rand_chan(2, 2, 2, k=30 + k)
            res = max_output_entropy(chan, tol=1e-6)
            grid = _bloch_grid_max(chan, points_per_axis=40)
            assert res.value >= grid - 1e-6
            assert abs(res.value - grid) < 2e-3

    def test_concavity_spot_check(self, rng):
        chan = rand_chan(3, 3, 2, k=40)
        for _ in range(5):
            a, b = random_density(rng, 3), random_density(rng, 3)
            mid = linalg.von_neumann_entropy(linalg.clamp_to_density(chan.apply_mat((a + b) / 2)))
            ends = 0.5 * (
                linalg.von_neumann_entropy(linalg.clamp_to_density(chan.apply_mat(a)))
                + linalg.von_neumann_entropy(linalg.clamp_to_density(chan.apply_mat(b)))
            )
            assert mid >= ends - 1e-9

    def test_qc_variant(self):
        qc = QcChannel.computational(2)
        res = max_output_entropy(qc)
        assert res.value == pytest.approx(1.0, abs=1e-9)


class TestCqFfCapacity:
    def test_orthogonal_pure_letters(self):
        cq = CqChannel((DensityOperator.pure([1.0, 0.0]), DensityOperator.pure([0.0, 1.0])))
        res = cq_ff_capacity(cq)
        assert res.value == pytest.approx(1.0, abs=1e-8)
        assert np.abs(res.argmax - 0.5).max() < 1e-4

    def test_identical_letters(self):
        sigma = sample_random_state(2, 2, Seed(0xF00D, 0))
        cq = CqChannel((sigma, sigma, sigma))
        res = cq_ff_capacity(cq)
        assert res.value == pytest.approx(2 * linalg.von_neumann_entropy(sigma), abs=1e-8)

    def test_two_letter_grid_oracle(self):
        a = sample_random_state(2, 2, Seed(0xF00D, 1))
        b = sample_random_state(2, 2, Seed(0xF00D, 2))
        cq = CqChannel((a, b))
        res = cq_ff_capacity(cq, tol=1e-7)
        sa, sb = linalg.von_neumann_entropy(a), linalg.von_neumann_entropy(b)
        grid = max(
            linalg.von_neumann_entropy(linalg.clamp_to_density(p * a.mat + (1 - p) * b.mat))
            + p * sa + (1 - p) * sb
            for p in np.linspace(0.0, 1.0, 10_001)
        )
        assert abs(res.value - grid) < 1e-4


class TestBalanceOperator:
    def test_already_balanced(self):
        phi = DensityOperator.maximally_entangled(2)
        x, r0 = balance_operator(phi)
        assert np.abs(x.mat - np.eye(2)).max() < 1e-9
        assert np.abs(r0.mat - phi.mat).max() < 1e-9

    def test_product_closed_form(self, rng):
        a = 0.5 * random_density(rng, 2) + 0.5 * np.eye(2) / 2
        b = random_density(rng, 4)
        r = DensityOperator(np.kron(a, b), dims=(2, 4))
        x, r0 = balance_operator(r)
        assert np.abs(x.mat - np.linalg.inv(2 * a)).max() < 1e-8
        red = linalg.partial_trace_mat(r0.mat, (2, 4), keep=[0])
        assert np.abs(red - np.eye(2) / 2).max() < 1e-9

    def test_random_even_draws_balance_exactly(self):
        # conditioned on the spectral evenness events the balancing succeeds
        # and pins the reduction to I/d within 1e-9
        rng = Seed(0xBA1A, 0).generator()
        eta = 1 / 6
        lo, hi = (1 - eta) / 2, (1 + eta) / 2
        successes = 0
        for _ in range(400):
            g = complex_gaussians(rng, (32, 2))
            w = g.conj().T @ g
            tr = float(np.trace(w).real)
            if not (lo <= np.linalg.eigvalsh(w)[0] / tr and np.linalg.eigvalsh(w)[-1] / tr <= hi):
                continue
            r = DensityOperator((g @ g.conj().T) / tr, dims=(2, 16))
            redv = np.linalg.eigvalsh(linalg.partial_trace_mat(r.mat, (2, 16), keep=[0]))
            if redv[0] < lo or redv[-1] > hi:
                continue
            try:
                _, r0 = balance_operator(r)
            except ValueError:
                continue  # no PSD solution on the支持 at desk scale
            red = linalg.partial_trace_mat(r0.mat, (2, 16), keep=[0])
            assert np.abs(red - np.eye(2) / 2).max() < 1e-9
            assert r0.purity() <= 1.0 + 1e-9
            successes += 1
        assert successes >= 3

    def test_singular_reduction_rejected(self):
        rho = DensityOperator.pure([1.0, 0.0, 0.0, 0.0], dims=(2, 2))
        with pytest.raises(ValueError, match="singular"):
            balance_operator(rho)


class TestConstancy:
    def test_constant_quantum_channel(self):
        assert is_constant_channel(QuantumChannel.depolarizing(2, 1.0))
        assert not is_constant_channel(QuantumChannel.identity(2))
        assert not is_constant_channel(QuantumChannel.depolarizing(2, 0.7))

    def test_constant_qc_channel(self):
        assert qc_is_constant(QcChannel(np.stack([np.eye(2, dtype=complex) / 2] * 2)))
        assert not qc_is_constant(QcChannel.computational(2))


class TestFactoryChannels:
    def test_compose(self, rng):
        a = rand_chan(2, 3, 2, k=50)
        b = rand_chan(3, 2, 2, k=51)
        rho = random_density(rng, 2)
        out = channels.compose(b, a).apply_mat(rho)
        assert np.abs(out - b.apply_mat(a.apply_mat(rho))).max() < 1e-10

    def test_permutation_channel(self, rng):
        rho = random_density(rng, 2)
        sig = random_density(rng, 3)
        perm = channels.permutation_channel((2, 3), (1, 0))
        swapped = perm.apply_mat(np.kron(rho, sig))
        assert np.abs(swapped - np.kron(sig, rho)).max() < 1e-12

    def test_discard_channel(self, rng):
        rho = random_density(rng, 2)
        sig = random_density(rng, 3)
        disc = channels.discard_channel((2, 3), keep=[0])
        assert np.abs(disc.apply_mat(np.kron(rho, sig)) - rho).max() < 1e-12

    def test_preparation_channel(self, rng):
        rho = random_density(rng, 2)
        fresh = DensityOperator(random_density(rng, 3))
        prep = channels.preparation_channel(2, fresh)
        assert np.abs(prep.apply_mat(rho) - np.kron(rho, fresh.mat)).max() < 1e-12
