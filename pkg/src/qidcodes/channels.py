"""Quantum, measurement (qc) and preparation (cq) channels.

Covers channel application, Choi-state conversion in both directions,
Stinespring dilation, output dephasing, the balancing step that fixes a
bipartite state's reduction to maximally mixed, and maximisation of the
concave output-entropy functionals used by the feedback capacities.

Conventions: Kraus operators are stacked as a (k, d_out, d_in) array; the
Choi state of T lives on C^{d_in} (x) C^{d_out} (input factor first) and is
(id (x) T) applied to the maximally entangled state, so its first-factor
reduction is I/d_in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, sampling
from .linalg import DensityOperator, HermitianOperator, hermitize

#: Kraus completeness residual accepted at construction
TOL_CPTP = 1e-9


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map in Kraus form."""

    kraus: np.ndarray  # (k, d_out, d_in)
    atol: float = TOL_CPTP

    def __post_init__(self):
        k = np.ascontiguousarray(self.kraus, dtype=np.complex128)
        if k.ndim != 3:
            raise ValueError("kraus must be a (k, d_out, d_in) array")
        res = self.completeness_residual(k)
        if res > self.atol:
            raise ValueError(f"Kraus completeness residual {res:.3e} exceeds {self.atol:.1e}")
        object.__setattr__(self, "kraus", k)

    @staticmethod
    def completeness_residual(kraus: np.ndarray) -> float:
        d_in = kraus.shape[2]
        s = np.einsum("kai,kaj->ij", kraus.conj(), kraus)
        return float(np.abs(s - np.eye(d_in)).max())

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    def apply_mat(self, rho: np.ndarray) -> np.ndarray:
        return np.einsum("kai,ij,kbj->ab", self.kraus, rho, self.kraus.conj())

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if rho.d != self.d_in:
            raise ValueError(f"channel expects dimension {self.d_in}, state has {rho.d}")
        return linalg.clamp_to_density(self.apply_mat(rho.mat))

    def adjoint_apply_mat(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("kai,ab,kbj->ij", self.kraus.conj(), a, self.kraus)

    def superoperator(self) -> np.ndarray:
        """(d_out^2, d_in^2) matrix acting on row-major vectorised states."""
        return np.einsum("kab,kcd->acbd", self.kraus, self.kraus.conj()).reshape(
            self.d_out**2, self.d_in**2
        )

    @classmethod
    def identity(cls, d: int) -> "QuantumChannel":
        return cls(np.eye(d, dtype=np.complex128)[None, :, :])

    @classmethod
    def depolarizing(cls, d: int, p: float) -> "QuantumChannel":
        """(1-p) id + p * (replace by I/d); p=1 is the fully depolarizing map."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        ops = [np.sqrt(1.0 - p) * np.eye(d, dtype=np.complex128)]
        basis = np.eye(d, dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                ops.append(np.sqrt(p / d) * np.outer(basis[:, i], basis[:, j]))
        return cls(np.stack(ops))


def apply(channel: QuantumChannel, rho: DensityOperator) -> DensityOperator:
    return channel.apply(rho)


@dataclass(frozen=True)
class QcChannel:
    """Destructive measurement: POVM (M_y) mapping states to letter probabilities."""

    povm: np.ndarray  # (Y, d, d)

    def __post_init__(self):
        m = np.ascontiguousarray(self.povm, dtype=np.complex128)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValueError("povm must be a (Y, d, d) array")
        for y in range(m.shape[0]):
            if linalg.herm_residual(m[y]) > linalg.TOL_HERM:
                raise ValueError(f"POVM element {y} is not Hermitian")
            if float(np.linalg.eigvalsh(hermitize(m[y]))[0]) < -linalg.EIG_FLOOR:
                raise ValueError(f"POVM element {y} is not PSD")
        total = m.sum(axis=0)
        if float(np.abs(total - np.eye(m.shape[1])).max()) > TOL_CPTP:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "povm", m)

    @property
    def d(self) -> int:
        return self.povm.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.povm.shape[0]

    @classmethod
    def projective(cls, basis: np.ndarray) -> "QcChannel":
        """Rank-one projective measurement of the columns of a unitary."""
        b = np.asarray(basis, dtype=np.complex128)
        return cls(np.stack([np.outer(b[:, j], b[:, j].conj()) for j in range(b.shape[1])]))

    @classmethod
    def computational(cls, d: int) -> "QcChannel":
        return cls.projective(np.eye(d, dtype=np.complex128))

    @classmethod
    def from_channel(cls, channel: QuantumChannel) -> "QcChannel":
        """Measure the channel output in the computational basis: the POVM
        M_y = sum_k K_k^dagger |y><y| K_k."""
        k = channel.kraus
        m = np.einsum("kyi,kyj->yij", k.conj(), k)
        return cls(np.ascontiguousarray(m))


def qc_apply(channel: QcChannel, rho: DensityOperator | np.ndarray) -> np.ndarray:
    """Outcome distribution p_y = Tr(rho M_y); tiny negatives are clamped."""
    mat = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)
    if mat.shape[0] != channel.d:
        raise ValueError(f"measurement expects dimension {channel.d}, state has {mat.shape[0]}")
    p = np.einsum("ij,yji->y", mat, channel.povm).real
    if p.min() < -1e-12:
        raise ValueError(f"negative outcome probability {p.min()}")
    p = np.clip(p, 0.0, None)
    if abs(float(p.sum()) - 1.0) > 1e-10:
        raise ValueError("outcome probabilities do not sum to 1")
    return p


@dataclass(frozen=True)
class CqChannel:
    """Preparation map: classical letter x -> fixed output state rho_x."""

    letter_states: tuple[DensityOperator, ...]

    def __post_init__(self):
        states = tuple(self.letter_states)
        if not states:
            raise ValueError("cq channel needs at least one letter")
        d = states[0].d
        if any(s.d != d for s in states):
            raise ValueError("all letter states must share one output dimension")
        object.__setattr__(self, "letter_states", states)

    @property
    def d_out(self) -> int:
        return self.letter_states[0].d

    @property
    def n_letters(self) -> int:
        return len(self.letter_states)

    def purification(self, x: int) -> np.ndarray:
        """Canonical purification vector sum_k sqrt(l_k) |k>|v_k> on H (x) H."""
        vals, vecs = np.linalg.eigh(self.letter_states[x].mat)
        vals = np.clip(vals, 0.0, None)
        d = self.d_out
        out = np.zeros(d * d, dtype=np.complex128)
        for k in range(d):
            out += np.sqrt(vals[k]) * np.kron(np.eye(d)[:, k], vecs[:, k])
        return out


@dataclass(frozen=True)
class StinespringDilation:
    """Isometry V: H_in -> H_out (x) H_env with T(rho) = Tr_env(V rho V^dagger)."""

    isometry: np.ndarray  # (d_out * d_env, d_in)
    d_in: int
    d_out: int
    d_env: int

    def __post_init__(self):
        v = np.ascontiguousarray(self.isometry, dtype=np.complex128)
        if v.shape != (self.d_out * self.d_env, self.d_in):
            raise ValueError("isometry shape inconsistent with declared dimensions")
        res = float(np.abs(v.conj().T @ v - np.eye(self.d_in)).max())
        if res > TOL_CPTP:
            raise ValueError(f"isometry residual {res:.3e} exceeds {TOL_CPTP:.1e}")
        object.__setattr__(self, "isometry", v)

    def apply_mat(self, rho: np.ndarray) -> np.ndarray:
        big = self.isometry @ rho @ self.isometry.conj().T
        return linalg.partial_trace_mat(big, (self.d_out, self.d_env), keep=[0])


def stinespring(channel: QuantumChannel) -> StinespringDilation:
    """Dilation V = sum_k K_k (x) |k>_env with environment dimension = #Kraus."""
    k, d_out, d_in = channel.kraus.shape
    v = np.zeros((d_out * k, d_in), dtype=np.complex128)
    for idx in range(k):
        v[idx::k, :] = channel.kraus[idx]
    return StinespringDilation(v, d_in=d_in, d_out=d_out, d_env=k)


def choi_state(channel: QuantumChannel) -> DensityOperator:
    """(id (x) T) applied to the maximally entangled state on C^{d_in} (x) C^{d_in}."""
    d_in, d_out = channel.d_in, channel.d_out
    vecs = channel.kraus.transpose(0, 2, 1).reshape(channel.kraus.shape[0], d_in * d_out)
    j = np.einsum("ka,kb->ab", vecs, vecs.conj()) / d_in
    return DensityOperator(hermitize(j), dims=(d_in, d_out))


def channel_from_choi(
    choi: DensityOperator, d_in: int, d_out: int, red_tol: float = 1e-6
) -> QuantumChannel:
    """Invert the Choi map: requires the input-side reduction to be I/d_in.

    A reduction off by more than ``red_tol`` signals that the balancing step
    was skipped, and raises.  The returned channel acts as
    T(sigma) = d_in * Tr_in[(sigma^T (x) I) choi].
    """
    if choi.d != d_in * d_out:
        raise ValueError("choi state dimension does not match d_in * d_out")
    red = linalg.partial_trace_mat(choi.mat, (d_in, d_out), keep=[0])
    if float(np.abs(red - np.eye(d_in) / d_in).max()) > red_tol:
        raise ValueError(
            "choi reduction is not maximally mixed (balance the state before inverting)"
        )
    vals, vecs = np.linalg.eigh(choi.mat)
    ops = []
    for k in range(len(vals)):
        lam = float(vals[k])
        if lam <= 1e-14:
            continue
        w = vecs[:, k].reshape(d_in, d_out)
        ops.append(np.sqrt(d_in * lam) * w.T)
    return QuantumChannel(np.stack(ops), atol=1e-8)


def channels_equal(a: QuantumChannel, b: QuantumChannel, tol: float = 1e-8) -> bool:
    """Extensional equality: Choi states within ``tol`` in trace distance."""
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        return False
    return linalg.trace_distance(choi_state(a), choi_state(b)) <= tol


def dephase(channel: QuantumChannel, basis: np.ndarray) -> QuantumChannel:
    """Compose with dephasing in the given orthonormal basis (columns)."""
    b = np.asarray(basis, dtype=np.complex128)
    if b.shape != (channel.d_out, channel.d_out):
        raise ValueError("dephasing basis must be unitary on the output space")
    if float(np.abs(b.conj().T @ b - np.eye(b.shape[1])).max()) > 1e-9:
        raise ValueError("dephasing basis is not unitary")
    # Kraus of the composition: |e_j><e_j| K_k for every (j, k)
    proj = np.einsum("aj,kai->kji", b.conj(), channel.kraus)
    new = np.einsum("aj,kji->kjai", b, proj).reshape(-1, channel.d_out, channel.d_in)
    return QuantumChannel(np.ascontiguousarray(new))


def is_constant_channel(channel: QuantumChannel, tol: float = 1e-9) -> bool:
    """A channel is constant iff its Choi state factors as (I/d_in) (x) sigma."""
    j = choi_state(channel)
    sigma = linalg.partial_trace_mat(j.mat, j.dims, keep=[1])
    product = np.kron(np.eye(channel.d_in) / channel.d_in, sigma)
    return float(np.abs(j.mat - product).max()) <= tol


def qc_is_constant(channel: QcChannel, tol: float = 1e-9) -> bool:
    """A qc channel is constant iff every POVM element is proportional to I."""
    d = channel.d
    for y in range(channel.n_outcomes):
        m = channel.povm[y]
        scale = float(np.trace(m).real) / d
        if float(np.abs(m - scale * np.eye(d)).max()) > tol:
            return False
    return True


@dataclass(frozen=True)
class MaxEntropyResult:
    value: float  # bits
    argmax: np.ndarray  # optimising input (density matrix or distribution)
    converged: bool
    iterations: int
    dims: tuple[int, ...] = field(default=())

    def argmax_state(self) -> DensityOperator:
        return linalg.clamp_to_density(self.argmax, self.dims or None)


_OPT_SEED = sampling.Seed(0x0C0FFEE, 0x1D)


def _ascend_concave(value_grad, d: int, tol: float, max_iter: int, seed: sampling.Seed):
    """Damped ascent of a concave functional over density matrices.

    ``value_grad(rho) -> (F, G)`` must evaluate the objective and a Hermitian
    gradient.  Moves are multiplicative (exponentiated-gradient) fixed-point
    steps with the step size halved until the value does not decrease; when
    they stall, a mixing step toward the gradient's top eigenvector is tried.
    Convergence is certified by the duality gap lambda_max(G) - Tr(rho G),
    which upper-bounds the remaining suboptimality by concavity.  Restarts
    from the maximally mixed state and 5 random interior states guard
    against boundary stalls; any local optimum is global here.
    """
    rng = seed.generator()
    starts = [np.eye(d, dtype=np.complex128) / d]
    starts += [sampling.random_interior_state(rng, d) for _ in range(5)]
    best = None
    for rho0 in starts:
        rho = rho0
        val, grad = value_grad(rho)
        step = 1.0
        converged = False
        it = 0
        for it in range(1, max_iter + 1):
            gvals, gvecs = np.linalg.eigh(grad)
            gap = float(gvals[-1] - np.einsum("ij,ji->", rho, grad).real)
            if gap <= tol:
                converged = True
                break
            moved = None
            log_rho = linalg.mat_log2_psd(rho)
            while step >= 1e-9:
                cand = _normalized_exp2(log_rho + step * grad)
                cand_val, cand_grad = value_grad(cand)
                if cand_val >= val + 1e-15:
                    moved = (cand, cand_val, cand_grad)
                    break
                step *= 0.5
            if moved is None:
                # mixing step toward the best extreme point (top eigenvector)
                top = gvecs[:, -1:]
                direction = top @ top.conj().T
                gamma = 1.0
                while gamma >= 1e-9 and moved is None:
                    cand = (1.0 - gamma) * rho + gamma * direction
                    cand = hermitize(cand)
                    cand_val, cand_grad = value_grad(cand)
                    if cand_val >= val + 1e-15:
                        moved = (cand, cand_val, cand_grad)
                    gamma *= 0.5
                step = 1e-3
            if moved is None:
                break
            rho, val, grad = moved
            step = min(step * 1.3, 8.0)
        if best is None or val > best[0]:
            best = (val, rho, converged, it)
    return best


def _normalized_exp2(h: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(hermitize(h))
    w = np.exp2(vals - vals.max())
    mat = (vecs * w) @ vecs.conj().T
    mat = hermitize(mat)
    return mat / float(np.trace(mat).real)


def max_output_entropy(
    channel: QuantumChannel | QcChannel,
    tol: float = 1e-6,
    max_iter: int = 10_000,
    seed: sampling.Seed | None = None,
) -> MaxEntropyResult:
    """Maximise the output entropy over input states.

    The functional rho -> S(T(rho)) (or H(T(rho)) for a measurement) is
    concave, so the returned value is within ``tol`` of the global maximum
    when the ascent converged; a non-converged run returns the best value
    found with ``converged=False``.  The argmax is *an* optimiser (the
    optimal output state is unique, the optimal input need not be).
    """
    seed = seed or _OPT_SEED
    if isinstance(channel, QcChannel):
        d = channel.d

        def value_grad(rho):
            p = np.clip(np.einsum("ij,yji->y", rho, channel.povm).real, 0.0, None)
            p = p / p.sum()
            val = linalg.entropy_from_eigs(p, len(p))
            logp = np.log2(np.maximum(p, 1e-30))
            grad = -np.einsum("y,yij->ij", logp, channel.povm)
            return val, hermitize(grad)

    else:
        d = channel.d_in

        def value_grad(rho):
            sigma = channel.apply_mat(rho)
            val = linalg.entropy_from_eigs(np.linalg.eigvalsh(hermitize(sigma)), channel.d_out)
            grad = -channel.adjoint_apply_mat(linalg.mat_log2_psd(sigma))
            return val, hermitize(grad)

    val, rho, converged, iters = _ascend_concave(value_grad, d, tol, max_iter, seed)
    return MaxEntropyResult(val, rho, converged, iters, dims=(d,))


def cq_ff_capacity(
    channel: CqChannel,
    tol: float = 1e-6,
    max_iter: int = 10_000,
    seed: sampling.Seed | None = None,
) -> MaxEntropyResult:
    """Maximise S(sum_x P(x) rho_x) + sum_x P(x) S(rho_x) over distributions P.

    This is the lower-bound functional for preparation channels whose
    purifications are shared with the sender; the value is reported as a
    lower bound, not as "the" capacity.
    """
    seed = seed or _OPT_SEED
    states = np.stack([s.mat for s in channel.letter_states])
    letter_entropies = np.array([linalg.von_neumann_entropy(s) for s in channel.letter_states])
    nx = channel.n_letters

    def value(p):
        avg = np.einsum("x,xij->ij", p, states)
        return linalg.von_neumann_entropy(avg) + float(p @ letter_entropies), avg

    rng = seed.generator()
    starts = [np.full(nx, 1.0 / nx)]
    for _ in range(5):
        raw = -np.log1p(-rng.random(nx))
        starts.append(raw / raw.sum())
    best = None
    for p0 in starts:
        p = p0
        val, avg = value(p)
        step = 1.0
        converged = False
        it = 0
        for it in range(1, max_iter + 1):
            log_avg = linalg.mat_log2_psd(avg)
            grad = np.array(
                [-float(np.trace(states[x] @ log_avg).real) for x in range(nx)]
            ) + letter_entropies
            gap = float(grad.max() - p @ grad)
            if gap <= tol:
                converged = True
                break
            moved = None
            while step >= 1e-9:
                logits = np.log2(np.maximum(p, 1e-30)) + step * grad
                cand = np.exp2(logits - logits.max())
                cand /= cand.sum()
                cand_val, cand_avg = value(cand)
                if cand_val >= val + 1e-15:
                    moved = (cand, cand_val, cand_avg)
                    break
                step *= 0.5
            if moved is None:
                direction = np.zeros(nx)
                direction[int(grad.argmax())] = 1.0
                gamma = 1.0
                while gamma >= 1e-9 and moved is None:
                    cand = (1.0 - gamma) * p + gamma * direction
                    cand_val, cand_avg = value(cand)
                    if cand_val >= val + 1e-15:
                        moved = (cand, cand_val, cand_avg)
                    gamma *= 0.5
                step = 1e-3
            if moved is None:
                break
            p, val, avg = moved
            step = min(step * 1.3, 8.0)
        if best is None or val > best[0]:
            best = (val, p, converged, it)
    val, p, converged, iters = best
    return MaxEntropyResult(val, p, converged, iters)


def compose(after: QuantumChannel, before: QuantumChannel) -> QuantumChannel:
    """Channel composition: (after . before)(rho) = after(before(rho))."""
    if before.d_out != after.d_in:
        raise ValueError("composition dimensions do not match")
    new = np.einsum("kab,lbc->klac", after.kraus, before.kraus)
    return QuantumChannel(new.reshape(-1, after.d_out, before.d_in))


def permutation_channel(dims, perm) -> QuantumChannel:
    """Unitary channel reordering tensor factors: new factor i is old factor perm[i]."""
    dims = tuple(int(x) for x in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError("perm must be a permutation of the factor indices")
    d = int(np.prod(dims))
    old = np.arange(d)
    digits = np.unravel_index(old, dims)
    new = np.ravel_multi_index([digits[p] for p in perm], [dims[p] for p in perm])
    mat = np.zeros((d, d), dtype=np.complex128)
    mat[new, old] = 1.0
    return QuantumChannel(mat[None, :, :])


def discard_channel(dims, keep) -> QuantumChannel:
    """Partial trace as a channel; kept factors stay in their original order."""
    dims = tuple(int(x) for x in dims)
    keep = sorted(set(int(i) for i in keep))
    drop = [i for i in range(len(dims)) if i not in keep]
    front = permutation_channel(dims, keep + drop)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    d_drop = int(np.prod([dims[i] for i in drop])) if drop else 1
    eye = np.eye(d_keep, dtype=np.complex128)
    ops = np.zeros((d_drop, d_keep, d_keep * d_drop), dtype=np.complex128)
    for m in range(d_drop):
        ops[m] = np.kron(eye, np.eye(d_drop)[m : m + 1, :])
    return compose(QuantumChannel(ops), front)


def preparation_channel(d_keep: int, rho: DensityOperator | np.ndarray) -> QuantumChannel:
    """Append a fresh system in state rho as the last tensor factor."""
    mat = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)
    vals, vecs = np.linalg.eigh(hermitize(mat))
    vals = np.clip(vals, 0.0, None)
    eye = np.eye(d_keep, dtype=np.complex128)
    ops = []
    for k in range(mat.shape[0]):
        if vals[k] <= 1e-16:
            continue
        col = np.sqrt(vals[k]) * vecs[:, k : k + 1]
        ops.append(np.kron(eye, col))
    return QuantumChannel(np.stack(ops))


def balance_operator(
    r: DensityOperator, tol: float = 1e-9
) -> tuple[HermitianOperator, DensityOperator]:
    """Find Hermitian X on the first factor with Tr_2(sqrt(R)(X (x) I)sqrt(R)) = I/d.

    Solves the linear system by least squares over the d^2-dimensional
    operator space and verifies the residual; an ill-conditioned or singular
    reduction raises instead of returning garbage.  Returns (X, R0) where
    R0 = sqrt(R)(X (x) I)sqrt(R) is a density operator with maximally mixed
    first-factor reduction and support contained in the support of R.
    """
    if len(r.dims) != 2:
        raise ValueError("balance_operator expects a bipartite density operator")
    d, delta = r.dims
    red = linalg.partial_trace_mat(r.mat, r.dims, keep=[0])
    lo = float(np.linalg.eigvalsh(hermitize(red))[0])
    if lo <= tol:
        raise ValueError(f"first-factor reduction is singular (min eigenvalue {lo:.3e})")
    root = linalg.mat_sqrt_psd(r.mat)
    eye_delta = np.eye(delta, dtype=np.complex128)
    cols = np.empty((d * d, d * d), dtype=np.complex128)
    basis = np.eye(d, dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            unit = np.outer(basis[:, i], basis[:, j])
            image = linalg.partial_trace_mat(
                root @ np.kron(unit, eye_delta) @ root, r.dims, keep=[0]
            )
            cols[:, i * d + j] = image.reshape(-1)
    target = (np.eye(d, dtype=np.complex128) / d).reshape(-1)
    x_vec, *_ = np.linalg.lstsq(cols, target, rcond=None)
    x = hermitize(x_vec.reshape(d, d))
    r0 = hermitize(root @ np.kron(x, eye_delta) @ root)
    residual = float(
        np.abs(linalg.partial_trace_mat(r0, r.dims, keep=[0]) - np.eye(d) / d).max()
    )
    if residual > 1e-9:
        raise ValueError(f"balancing residual {residual:.3e} exceeds 1e-9")
    return HermitianOperator(x, dims=(d,)), DensityOperator(r0, dims=r.dims)
