import numpy as np
import pytest

from qidcodes import channels
from qidcodes.sampling import (
    RandomChannelSpec,
    Seed,
    complex_gaussians,
    ginibre,
    haar_unitaries,
    haar_unitary,
    random_isometry,
    sample_random_channel,
    sample_random_state,
    schmidt_check,
)

DRAWS = 100_000


class TestSeed:
    def test_determinism(self):
        a = ginibre(3, 4, Seed(42, 7))
        b = ginibre(3, 4, Seed(42, 7))
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = ginibre(3, 3, Seed(42, 0))
        b = ginibre(3, 3, Seed(42, 1))
        assert not np.allclose(a, b)

    def test_spawn_is_stable(self):
        s = Seed(1, 2)
        assert s.spawn(5) == s.spawn(5)
        assert s.spawn(5) != s.spawn(6)


class TestGinibre:
    def test_mean_zero(self):
        z = complex_gaussians(Seed(10, 0).generator(), (DRAWS, 2, 2))
        se = np.sqrt(0.5 / z.size)
        assert abs(z.real.mean()) < 4 * se
        assert abs(z.imag.mean()) < 4 * se

    def test_unit_second_moment(self):
        z = complex_gaussians(Seed(11, 0).generator(), (DRAWS, 2, 2))
        mags = np.abs(z.reshape(-1)) ** 2
        se = mags.std(ddof=1) / np.sqrt(mags.size)
        assert abs(mags.mean() - 1.0) < 4 * se

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            ginibre(0, 2, Seed(1, 0))


class TestHaarUnitary:
    def test_unitarity_every_draw(self):
        for batch in haar_unitaries(5, 200, Seed(12, 0)):
            res = np.abs(batch @ batch.conj().transpose(0, 2, 1) - np.eye(5)).max()
            assert res < 1e-10

    def test_first_entry_moment(self):
        # E|U_00|^2 = 1/d at d=4
        vals = np.empty(DRAWS)
        i = 0
        for batch in haar_unitaries(4, DRAWS, Seed(13, 0)):
            vals[i : i + len(batch)] = np.abs(batch[:, 0, 0]) ** 2
            i += len(batch)
        se = vals.std(ddof=1) / np.sqrt(DRAWS)
        assert abs(vals.mean() - 0.25) < 4 * se

    def test_projector_mass_moment(self):
        # E[Tr(U psi U* P)] = r/d at d=8, r=2
        d, r = 8, 2
        psi = np.zeros(d, dtype=complex)
        psi[0] = 1.0
        proj = np.diag([1.0] * r + [0.0] * (d - r)).astype(complex)
        vals = np.empty(20_000)
        i = 0
        for batch in haar_unitaries(d, len(vals), Seed(14, 0)):
            rotated = batch @ psi
            vals[i : i + len(batch)] = np.einsum("ka,ab,kb->k", rotated.conj(), proj, rotated).real
            i += len(batch)
        se = vals.std(ddof=1) / np.sqrt(len(vals))
        assert abs(vals.mean() - r / d) < 4 * se

    def test_left_invariance_of_trace_moments(self):
        # fixed W: moments of Tr(WU) match those of Tr(U)
        d = 3
        w = haar_unitary(d, Seed(99, 9))
        tr_u = np.empty(DRAWS, dtype=complex)
        tr_wu = np.empty(DRAWS, dtype=complex)
        i = 0
        for batch in haar_unitaries(d, DRAWS, Seed(15, 0)):
            tr_u[i : i + len(batch)] = np.einsum("kii->k", batch)
            tr_wu[i : i + len(batch)] = np.einsum("ij,kji->k", w, batch)
            i += len(batch)
        for stat in (lambda z: z.real, lambda z: np.abs(z) ** 2):
            a, b = stat(tr_u), stat(tr_wu)
            se = np.sqrt(a.var(ddof=1) / DRAWS + b.var(ddof=1) / DRAWS)
            assert abs(a.mean() - b.mean()) < 4 * se


class TestRandomIsometry:
    def test_full_square_is_unitary(self):
        v = random_isometry(4, 4, Seed(16, 0))
        assert np.abs(v.conj().T @ v - np.eye(4)).max() < 1e-10

    def test_isometry_residual(self):
        for k in range(50):
            v = random_isometry(2, 6, Seed(17, k))
            assert np.abs(v.conj().T @ v - np.eye(2)).max() < 1e-10

    def test_rejects_s_larger_than_d(self):
        with pytest.raises(ValueError):
            random_isometry(5, 4, Seed(1, 0))

    def test_pure_state_fidelity_moment(self):
        # s=1: E |<phi|v>|^2 = 1/D at D=4
        d = 4
        phi = np.zeros(d, dtype=complex)
        phi[0] = 1.0
        vals = np.empty(DRAWS)
        i = 0
        for batch in haar_unitaries(d, DRAWS, Seed(18, 0)):
            vals[i : i + len(batch)] = np.abs(batch[:, 0, 0]) ** 2
            i += len(batch)
        se = vals.std(ddof=1) / np.sqrt(DRAWS)
        assert abs(vals.mean() - 1 / d) < 4 * se


class TestRandomChannel:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            RandomChannelSpec(5, 2, 2)

    def test_isometric_when_u_is_one(self):
        chan = sample_random_channel(RandomChannelSpec(2, 4, 1), Seed(19, 0))
        rho = sample_random_state(2, 1, Seed(19, 1))  # pure
        out = chan.apply(rho)
        assert out.purity() == pytest.approx(1.0, abs=1e-10)

    def test_output_rank_bounded_by_u(self):
        chan = sample_random_channel(RandomChannelSpec(1, 3, 3), Seed(20, 0))
        out = chan.apply_mat(np.ones((1, 1), dtype=complex))
        vals = np.linalg.eigvalsh((out + out.conj().T) / 2)
        assert (vals > 1e-12).sum() <= 3

    def test_trace_preservation(self, rng):
        from conftest import random_density

        chan = sample_random_channel(RandomChannelSpec(3, 2, 4), Seed(21, 0))
        assert channels.QuantumChannel.completeness_residual(chan.kraus) < 1e-10
        for _ in range(10):
            rho = random_density(rng, 3)
            assert float(np.trace(chan.apply_mat(rho)).real) == pytest.approx(1.0, abs=1e-10)

    def test_stinespring_matches_sampled_isometry(self):
        spec = RandomChannelSpec(2, 3, 2)
        seed = Seed(22, 0)
        chan = sample_random_channel(spec, seed)
        v = random_isometry(spec.s, spec.t * spec.u, seed)
        dil = channels.stinespring(chan)
        assert np.abs(dil.isometry - v).max() < 1e-12


class TestRandomState:
    def test_pure_when_u_is_one(self):
        rho = sample_random_state(5, 1, Seed(23, 0))
        assert rho.purity() == pytest.approx(1.0, abs=1e-10)

    def test_concentration_near_maximally_mixed(self):
        # qualitative concentration: both eigenvalues inside [0.4, 0.6]
        # for at least 99% of draws at t=2, u=200
        inside = 0
        trials = 1000
        for k in range(trials):
            rho = sample_random_state(2, 200, Seed(24, k))
            vals = np.linalg.eigvalsh(rho.mat)
            inside += bool(vals[0] >= 0.4 and vals[-1] <= 0.6)
        assert inside >= 0.99 * trials

    def test_mean_is_maximally_mixed(self):
        t = u = 3
        rng = Seed(25, 0).generator()
        total = np.zeros((t, t), dtype=complex)
        draws = DRAWS
        sq = np.zeros((t, t))
        for _ in range(draws // 1000):
            g = complex_gaussians(rng, (1000, t, u))
            w = np.einsum("kiu,kju->kij", g, g.conj())
            w /= np.einsum("kii->k", w).real[:, None, None]
            total += w.sum(axis=0)
            sq += (np.abs(w) ** 2).sum(axis=0)
        mean = total / draws
        var = sq / draws - np.abs(mean) ** 2
        se = np.sqrt(np.clip(var, 0, None) / draws)
        assert (np.abs(mean - np.eye(t) / t) <= 4 * se + 1e-12).all()

    def test_schmidt_symmetry_every_draw(self):
        rng = Seed(26, 0).generator()
        for _ in range(200):
            v = complex_gaussians(rng, (12,))
            v /= np.linalg.norm(v)
            assert schmidt_check(v, 3, 4, atol=1e-9)

    def test_rank_bound(self):
        rho = sample_random_state(6, 2, Seed(27, 0))
        vals = np.linalg.eigvalsh(rho.mat)
        assert (vals > 1e-12).sum() <= 2
