"""Construction and evaluation of identification codes.

An identification code is a family of (state, decoder) pairs; the receiver
only ever asks "was message i sent?" and accepts or rejects with the single
operator D_i.  The error of first kind is the worst rejection probability of
the true message, the error of second kind the worst acceptance probability
of a wrong one.

Constructors here realise probabilistic existence arguments as explicit
randomized greedy builders with post-hoc verification: a candidate that
violates the acceptance predicate is rejected and re-sampled, never patched.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import channels, linalg, sampling
from .channels import QuantumChannel
from .linalg import DensityOperator, HermitianOperator
from .report import ExperimentReport
from .sampling import Seed, as_seed


@dataclass(frozen=True)
class IdCode:
    """Identification code: states with matching decoder operators."""

    states: tuple[DensityOperator, ...]
    decoders: tuple[HermitianOperator, ...]

    def __post_init__(self):
        states = tuple(self.states)
        decoders = tuple(self.decoders)
        if len(states) != len(decoders):
            raise ValueError("states and decoders must pair up")
        for dec in decoders:
            vals = np.linalg.eigvalsh(dec.mat)
            if vals[0] < -1e-9 or vals[-1] > 1 + 1e-9:
                raise ValueError("decoder eigenvalues must lie in [0, 1]")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "decoders", decoders)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.states[0].dims if self.states else ()


@dataclass(frozen=True)
class IdErrorReport:
    """Exact error probabilities of first and second kind with argmax pairs."""

    lambda1: float
    lambda2: float
    worst_first: int | None = None
    worst_second: tuple[int, int] | None = None


def eval_id_errors(code: IdCode, channel: QuantumChannel | None = None) -> IdErrorReport:
    """Exact maxima of 1 - Tr(T(rho_i) D_i) and Tr(T(rho_i) D_j), i != j."""
    n = len(code)
    if n == 0:
        raise ValueError("empty code")
    outs = []
    for rho in code.states:
        mat = rho.mat if channel is None else channel.apply_mat(rho.mat)
        outs.append(mat)
    d2 = outs[0].shape[0]
    if code.decoders[0].d != d2:
        raise ValueError("decoder dimension does not match the (channel) output")
    # Tr(A D) = vec(A) . vec(D^T)
    a = np.stack(outs).reshape(n, -1)
    b = np.stack([dec.mat.T.reshape(-1) for dec in code.decoders])
    gram = (a @ b.T).real
    diag = np.clip(gram.diagonal(), 0.0, 1.0)
    lambda1 = float(np.clip(1.0 - diag.min(), 0.0, 1.0))
    worst_first = int(diag.argmin())
    if n == 1:
        return IdErrorReport(lambda1, 0.0, worst_first, None)
    off = gram.copy()
    np.fill_diagonal(off, -np.inf)
    idx = int(off.argmax())
    i, j = divmod(idx, n)
    lambda2 = float(np.clip(off[i, j], 0.0, 1.0))
    return IdErrorReport(lambda1, lambda2, worst_first, (i, j))


@dataclass(frozen=True)
class GreedyParams:
    """Parameters of the greedy random-extension code builder.

    ``max_trials`` is the number of *consecutive* rejections after which the
    code is declared maximal.  ``max_size`` optionally caps growth: at desk
    scale acceptance stays so likely that the consecutive-rejection stop is
    effectively unreachable, so a run without a cap would grow for a very
    long time.
    """

    d: int
    delta: int
    lam: float
    eta: float = 1.0 / 3.0
    max_trials: int = 10_000
    max_size: int | None = None

    def __post_init__(self):
        if self.delta < 1 or self.d < 1 or self.delta > self.d:
            raise ValueError("need 1 <= delta <= d")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if self.max_trials < 1:
            raise ValueError("max_trials must be positive")


def reference_constants(lam: float, d: int) -> dict:
    """Asymptotic parameter choices for the randomized constructions.

    These are reference values only: at desk scale they give a rank target
    below 1 and an ancilla dimension in the tens of thousands, which is why
    the builders take ``delta`` and ``Delta`` directly.
    """
    alpha = lam / 3000.0
    log_d = np.log2(d)
    return {
        "alpha": alpha,
        "delta": alpha * d / log_d if log_d > 0 else 0.0,
        "Delta_min": (900.0 / lam**2) * np.log2(30.0 * d / lam) * log_d,
        "target_size": 0.5 * 2.0 ** float((alpha * d / log_d) ** 2) if log_d > 0 else 1.0,
    }


def _greedy_loop(params: GreedyParams, seed: Seed):
    """Shared greedy machinery: sample rank-delta states, keep those that are
    spectrally even on their support and nearly orthogonal to the code."""
    rng = as_seed(seed).generator()
    d, delta, lam, eta = params.d, params.delta, params.lam, params.eta
    lo, hi = (1.0 - eta) / delta, (1.0 + eta) / delta
    factors: list[np.ndarray] = []  # scaled factors F with rho = F F^dagger
    supports: list[np.ndarray] = []  # orthonormal bases Q with D = Q Q^dagger
    stats = {"trials": 0, "accepted": 0, "rejected_interval": 0, "rejected_overlap": 0}
    consecutive = 0
    while consecutive < params.max_trials:
        if params.max_size is not None and len(factors) >= params.max_size:
            break
        stats["trials"] += 1
        g = sampling.random_state_factor(rng, d, delta)
        w = g.conj().T @ g  # delta x delta; shares its spectrum with rho on supp
        tr = float(np.trace(w).real)
        evals = np.linalg.eigvalsh(w) / tr
        if evals[0] < lo or evals[-1] > hi:
            stats["rejected_interval"] += 1
            consecutive += 1
            continue
        scaled = g / np.sqrt(tr)
        q, _ = np.linalg.qr(g)
        ok = True
        for fj, qj in zip(factors, supports):
            if np.linalg.norm(qj.conj().T @ scaled) ** 2 > lam:  # Tr(rho D_j)
                ok = False
                break
            if np.linalg.norm(q.conj().T @ fj) ** 2 > lam:  # Tr(rho_j D)
                ok = False
                break
        if not ok:
            stats["rejected_overlap"] += 1
            consecutive += 1
            continue
        factors.append(scaled)
        supports.append(q)
        stats["accepted"] += 1
        consecutive = 0
    return factors, supports, stats


def greedy_random_code(params: GreedyParams, seed) -> tuple[IdCode, ExperimentReport]:
    """Greedy maximal-code construction with random rank-delta extensions.

    Every accepted entry has decoder equal to the support of its own state
    (so the error of first kind vanishes), rank exactly delta, eigenvalues on
    the support inside [(1-eta)/delta, (1+eta)/delta], and pairwise
    cross-overlaps Tr(rho_i D_j) at most lam in both orders.
    """
    t0 = time.perf_counter()
    seed = as_seed(seed)
    factors, supports, stats = _greedy_loop(params, seed)
    states = []
    decoders = []
    for f, q in zip(factors, supports):
        rho = DensityOperator(f @ f.conj().T, dims=(params.d,))
        proj = HermitianOperator(linalg.hermitize(q @ q.conj().T), dims=(params.d,))
        states.append(rho)
        decoders.append(proj)
    code = IdCode(tuple(states), tuple(decoders))
    report = ExperimentReport(
        command="build-code.greedy",
        config={
            "d": params.d,
            "delta": params.delta,
            "lam": params.lam,
            "eta": params.eta,
            "max_trials": params.max_trials,
            "max_size": params.max_size,
            "seed": [seed.root, seed.stream],
        },
        results=[{"code_size": len(code), **stats}],
        duration_s=time.perf_counter() - t0,
    )
    if len(code) > 0:
        errors = eval_id_errors(code)
        report.results[0]["lambda1"] = errors.lambda1
        report.results[0]["lambda2"] = errors.lambda2
        report.add_verdict("lambda1_zero", errors.lambda1 <= 1e-9, f"lambda1={errors.lambda1:.2e}")
        report.add_verdict(
            "lambda2_within_target", errors.lambda2 <= params.lam, f"lambda2={errors.lambda2:.6f}"
        )
    return code, report


@dataclass(frozen=True)
class ClassicalIdCode:
    """Hashing code: distinct functions [M] -> [N] with uniform first marginal.

    Functions are stored 0-based as rows of an integer array.  The implied
    state of message i is uniform on the graph of f_i and the decoder is the
    indicator of that graph.
    """

    m: int
    n_symbols: int
    functions: np.ndarray  # (count, m) integers in [0, n_symbols)

    def __post_init__(self):
        f = np.ascontiguousarray(self.functions, dtype=np.int64)
        if f.ndim != 2 or f.shape[1] != self.m:
            raise ValueError("functions must be a (count, M) array")
        if f.min(initial=0) < 0 or f.max(initial=0) >= self.n_symbols:
            raise ValueError("function values out of range")
        if len(np.unique(f, axis=0)) != f.shape[0]:
            raise ValueError("functions must be pairwise distinct")
        object.__setattr__(self, "functions", f)

    def __len__(self) -> int:
        return self.functions.shape[0]

    def to_quantum(self) -> IdCode:
        """Dense embedding on C^M (x) C^N (for small M*N cross-checks)."""
        mn = self.m * self.n_symbols
        states = []
        decoders = []
        for row in self.functions:
            diag = np.zeros(mn)
            diag[np.arange(self.m) * self.n_symbols + row] = 1.0 / self.m
            states.append(DensityOperator(np.diag(diag.astype(np.complex128)), dims=(self.m, self.n_symbols)))
            decoders.append(
                HermitianOperator(np.diag((diag > 0).astype(np.complex128)), dims=(self.m, self.n_symbols))
            )
        return IdCode(tuple(states), tuple(decoders))


def hashing_code(m: int, n_symbols: int, count: int, seed) -> ClassicalIdCode:
    """Uniformly random distinct functions [M] -> [N]; duplicates re-sampled."""
    if m < 1:
        raise ValueError("need M >= 1")
    if n_symbols < 2 or count < 2:
        raise ValueError("need N >= 2 and count >= 2")
    if m * np.log2(n_symbols) <= 62 and count > n_symbols**m:
        raise ValueError("cannot draw that many distinct functions")
    rng = as_seed(seed).generator()
    seen = set()
    rows = []
    while len(rows) < count:
        f = rng.integers(0, n_symbols, size=m)
        key = f.tobytes()
        if key in seen:
            continue
        seen.add(key)
        rows.append(f)
    return ClassicalIdCode(m, n_symbols, np.stack(rows))


def collision_counts(functions: np.ndarray) -> np.ndarray:
    """Pairwise agreement counts P[i, j] = #{mu : f_i(mu) = f_j(mu)} (exact)."""
    count, m = functions.shape
    p = np.zeros((count, count), dtype=np.int64)
    for mu in range(m):
        col = functions[:, mu]
        order = np.argsort(col, kind="stable")
        vals = col[order]
        boundaries = np.concatenate(([0], np.nonzero(np.diff(vals))[0] + 1, [count]))
        for a, b in zip(boundaries[:-1], boundaries[1:]):
            members = order[a:b]
            if len(members) > 1:
                p[np.ix_(members, members)] += 1
            else:
                p[members[0], members[0]] += 1
    return p


def eval_classical_id(code: ClassicalIdCode) -> IdErrorReport:
    """lambda1 is 0 by construction; lambda2 is the exact worst pairwise
    collision fraction max_{i != j} #{mu : f_i(mu) = f_j(mu)} / M."""
    count = len(code)
    p = collision_counts(code.functions)
    np.fill_diagonal(p, -1)
    idx = int(p.argmax())
    i, j = divmod(idx, count)
    return IdErrorReport(0.0, float(p[i, j]) / code.m, None, (i, j))


def blowup_code(base: IdCode, m: int, count: int, seed) -> IdCode:
    """Enlarge a code with shared randomness: message f (a function [M] -> [N])
    is encoded as the uniform classical mixture over mu of |mu><mu| (x) rho_f(mu),
    decoded by the block-diagonal operator sum_mu |mu><mu| (x) D_f(mu).

    The block-diagonal decoder keeps the error of first kind from growing;
    the second kind gains at most the worst pairwise collision fraction.
    """
    n_base = len(base)
    if n_base == 0:
        raise ValueError("base code is empty")
    if m * np.log2(n_base) <= 62 and count > n_base**m:
        raise ValueError("cannot draw that many distinct functions")
    rng = as_seed(seed).generator()
    seen = set()
    rows = []
    while len(rows) < count:
        f = rng.integers(0, n_base, size=m)
        key = f.tobytes()
        if key in seen:
            continue
        seen.add(key)
        rows.append(f)
    d = base.states[0].d
    dims = (m,) + base.states[0].dims
    states = []
    decoders = []
    for f in rows:
        smat = np.zeros((m * d, m * d), dtype=np.complex128)
        dmat = np.zeros_like(smat)
        for mu in range(m):
            sl = slice(mu * d, (mu + 1) * d)
            smat[sl, sl] = base.states[f[mu]].mat / m
            dmat[sl, sl] = base.decoders[f[mu]].mat
        states.append(DensityOperator(smat, dims=dims))
        decoders.append(HermitianOperator(dmat, dims=dims))
    return IdCode(tuple(states), tuple(decoders))


def entangled_hashing_code(
    d: int,
    delta_dim: int,
    lam: float,
    max_trials: int = 10_000,
    seed=0,
    max_size: int | None = None,
) -> tuple[IdCode, list[QuantumChannel], ExperimentReport]:
    """Greedy construction of an entanglement-assisted hashing code.

    Candidates are random rank-d states R on C^d (x) C^Delta.  A candidate is
    kept only if (i) its spectrum on its support is even within eta = lam/3,
    (ii) its C^d reduction is within the same interval of I/d, (iii) the
    balancing step (which exactly fixes the reduction to I/d, making the
    state a Choi state of a channel C^d -> C^Delta) succeeds, and (iv) its
    cross-overlaps with the existing entries stay at most lam.  Decoders are
    the support projectors, so the error of first kind vanishes.
    """
    if delta_dim < 2:
        raise ValueError("need Delta >= 2")
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie in (0, 1)")
    t0 = time.perf_counter()
    seed = as_seed(seed)
    rng = seed.generator()
    eta = lam / 3.0
    lo, hi = (1.0 - eta) / d, (1.0 + eta) / d
    dims = (d, delta_dim)
    stats = {
        "trials": 0,
        "accepted": 0,
        "rejected_interval": 0,
        "rejected_reduction": 0,
        "rejected_balance": 0,
        "rejected_properties": 0,
        "rejected_overlap": 0,
    }
    states: list[DensityOperator] = []
    supports: list[np.ndarray] = []  # orthonormal bases of the decoders
    chans: list[QuantumChannel] = []
    consecutive = 0
    while consecutive < max_trials:
        if max_size is not None and len(states) >= max_size:
            break
        stats["trials"] += 1
        consecutive += 1
        g = sampling.random_state_factor(rng, d * delta_dim, d)
        w = g.conj().T @ g
        tr = float(np.trace(w).real)
        evals = np.linalg.eigvalsh(w) / tr
        if evals[0] < lo or evals[-1] > hi:
            stats["rejected_interval"] += 1
            continue
        r = DensityOperator((g @ g.conj().T) / tr, dims=dims)
        red = linalg.partial_trace_mat(r.mat, dims, keep=[0])
        red_evals = np.linalg.eigvalsh(linalg.hermitize(red))
        if red_evals[0] < lo or red_evals[-1] > hi:
            stats["rejected_reduction"] += 1
            continue
        try:
            _, r0 = channels.balance_operator(r)
            chan = channels.channel_from_choi(r0, d_in=d, d_out=delta_dim)
        except ValueError:
            stats["rejected_balance"] += 1
            continue
        # balancing preserves exact solvability but not the evenness of the
        # spectrum: re-check rank d and the (1+lam)/d ceiling on the result
        r0_evals = np.linalg.eigvalsh(r0.mat)
        rank = int((r0_evals > 1e-9 * float(r0_evals[-1])).sum())
        if rank != d or float(r0_evals[-1]) > (1.0 + lam) / d + 1e-9:
            stats["rejected_properties"] += 1
            continue
        q, _ = np.linalg.qr(g)  # support of R = support of R0
        scaled0 = _psd_factor(r0.mat, d)
        ok = True
        for prev_state, prev_q in zip(states, supports):
            if float(np.linalg.norm(prev_q.conj().T @ scaled0) ** 2) > lam:
                ok = False
                break
            if float(np.einsum("ij,ik,jk->", prev_state.mat, q.conj(), q).real) > lam:
                ok = False
                break
        if not ok:
            stats["rejected_overlap"] += 1
            continue
        states.append(r0)
        supports.append(q)
        chans.append(chan)
        stats["accepted"] += 1
        consecutive = 0
    decoders = tuple(
        HermitianOperator(linalg.hermitize(q @ q.conj().T), dims=dims) for q in supports
    )
    code = IdCode(tuple(states), decoders)
    report = ExperimentReport(
        command="build-code.entangled-hashing",
        config={
            "d": d,
            "Delta": delta_dim,
            "lam": lam,
            "eta": eta,
            "max_trials": max_trials,
            "max_size": max_size,
            "seed": [seed.root, seed.stream],
        },
        results=[{"code_size": len(code), **stats}],
        duration_s=time.perf_counter() - t0,
    )
    if len(code) > 0:
        errors = eval_id_errors(code)
        report.results[0]["lambda1"] = errors.lambda1
        report.results[0]["lambda2"] = errors.lambda2
        report.add_verdict("lambda1_zero", errors.lambda1 <= 1e-9, f"lambda1={errors.lambda1:.2e}")
        report.add_verdict(
            "lambda2_within_target", errors.lambda2 <= lam, f"lambda2={errors.lambda2:.6f}"
        )
    return code, chans, report


def _psd_factor(mat: np.ndarray, rank: int) -> np.ndarray:
    """F with F F^dagger = mat (PSD of the given rank, up to floor)."""
    vals, vecs = np.linalg.eigh(linalg.hermitize(mat))
    vals = np.clip(vals, 0.0, None)
    top = vals[-rank:]
    return vecs[:, -rank:] * np.sqrt(top)


@dataclass(frozen=True)
class DiagonalIdCode:
    """Identification code whose states and decoders are diagonal in the
    classical product basis of n letters over an alphabet of size y_size.

    ``dists`` rows are the output distributions, ``decoders`` rows the
    acceptance densities in [0, 1]."""

    y_size: int
    n: int
    dists: np.ndarray
    decoders: np.ndarray

    def __post_init__(self):
        q = np.ascontiguousarray(self.dists, dtype=np.float64)
        dec = np.ascontiguousarray(self.decoders, dtype=np.float64)
        size = self.y_size**self.n
        if q.ndim != 2 or q.shape[1] != size or dec.shape != q.shape:
            raise ValueError("distribution/decoder arrays must be (N, y_size**n)")
        if np.abs(q.sum(axis=1) - 1.0).max() > 1e-9:
            raise ValueError("rows of dists must be probability distributions")
        if dec.min(initial=0.0) < -1e-12 or dec.max(initial=0.0) > 1 + 1e-12:
            raise ValueError("decoder densities must lie in [0, 1]")
        object.__setattr__(self, "dists", q)
        object.__setattr__(self, "decoders", dec)

    def __len__(self) -> int:
        return self.dists.shape[0]

    def to_dense(self) -> IdCode:
        dims = (self.y_size,) * self.n
        states = tuple(
            DensityOperator(np.diag(row.astype(np.complex128)), dims=dims) for row in self.dists
        )
        decoders = tuple(
            HermitianOperator(np.diag(row.astype(np.complex128)), dims=dims)
            for row in self.decoders
        )
        return IdCode(states, decoders)


def diagonal_from_dense(code: IdCode, y_size: int, n: int, atol: float = 1e-10) -> DiagonalIdCode:
    """Extract the diagonal representation; raises if any operator has
    off-diagonal weight above ``atol``."""
    dists = []
    decs = []
    for rho, dec in zip(code.states, code.decoders):
        for mat in (rho.mat, dec.mat):
            off = mat - np.diag(np.diag(mat))
            if np.abs(off).max() > atol:
                raise ValueError("code is not diagonal in the classical basis")
        dists.append(np.diag(rho.mat).real)
        decs.append(np.diag(dec.mat).real)
    return DiagonalIdCode(y_size, n, np.stack(dists), np.stack(decs))


def eval_diagonal_id(code: DiagonalIdCode) -> IdErrorReport:
    gram = code.dists @ code.decoders.T
    diag = gram.diagonal()
    lambda1 = float(np.clip(1.0 - diag.min(), 0.0, 1.0))
    worst_first = int(diag.argmin())
    n = len(code)
    if n == 1:
        return IdErrorReport(lambda1, 0.0, worst_first, None)
    off = gram.copy()
    np.fill_diagonal(off, -np.inf)
    idx = int(off.argmax())
    i, j = divmod(idx, n)
    return IdErrorReport(lambda1, float(np.clip(off[i, j], 0.0, 1.0)), worst_first, (i, j))


def round_decoders(code: DiagonalIdCode, typical_sets, c: int) -> DiagonalIdCode:
    """Round each decoder density down to the nearest multiple of 1/c inside
    its typical set and to 0 outside.

    The error of first kind grows by at most 1/c plus the distribution mass
    outside the typical set; the error of second kind cannot increase.  The
    rounded decoder takes at most c+1 distinct values on its support.
    """
    if c < 1:
        raise ValueError("c must be a positive integer")
    masks = []
    size = code.y_size**code.n
    for ts in typical_sets:
        indices = getattr(ts, "indices", ts)
        mask = np.zeros(size, dtype=bool)
        mask[np.asarray(indices, dtype=np.int64)] = True
        masks.append(mask)
    if len(masks) != len(code):
        raise ValueError("one typical set per message is required")
    rounded = np.floor(code.decoders * c) / c
    rounded = np.where(np.stack(masks), rounded, 0.0)
    return DiagonalIdCode(code.y_size, code.n, code.dists, rounded)
