"""Feedback channel simulation and the associated capacity functionals.

Covers measurement (qc) channels with passive classical feedback, the
reduction of memory-assisted sender protocols to plain per-history input
states, greedy typical sets of output distributions, dense simulation of
coherent feedback (the channel's Stinespring output is split between
receiver and sender), and the product-basis output projector whose rank is
controlled by the maximum output entropy.

History indexing: a string y_1 ... y_t over an alphabet of size Y is stored
at index y_1 * Y^{t-1} + ... + y_t (big-endian), consistently across
distributions, strategies and serialization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels, linalg
from .channels import QcChannel, QuantumChannel, StinespringDilation
from .linalg import DensityOperator, HermitianOperator

#: dense distributions over Y^n are capped at this many bits
DIST_CAP_BITS = 24
#: dense coherent-feedback simulation cap on the total Hilbert space dimension
COHERENT_CAP = 2**14


@dataclass(frozen=True)
class FeedbackStrategy:
    """Complete tree of channel inputs indexed by classical feedback history.

    ``levels[t]`` is an array of shape (Y^t, d, d): the state fed into the
    channel in round t+1 after observing the history with that index.
    """

    n: int
    y_size: int
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.n < 1 or self.y_size < 2:
            raise ValueError("need n >= 1 and alphabet size >= 2")
        if len(self.levels) != self.n:
            raise ValueError("one level per round is required")
        lv = []
        d = None
        for t, raw in enumerate(self.levels):
            arr = np.ascontiguousarray(raw, dtype=np.complex128)
            if arr.ndim != 3 or arr.shape[0] != self.y_size**t:
                raise ValueError(f"level {t} must hold {self.y_size**t} states")
            if d is None:
                d = arr.shape[1]
            if arr.shape[1:] != (d, d):
                raise ValueError("all strategy states must share one dimension")
            if float(np.abs(arr - arr.conj().transpose(0, 2, 1)).max()) > linalg.TOL_HERM:
                raise ValueError(f"level {t} contains a non-Hermitian state")
            traces = np.einsum("hii->h", arr).real
            if float(np.abs(traces - 1.0).max()) > linalg.TOL_TRACE:
                raise ValueError(f"level {t} contains a state with trace != 1")
            if float(np.linalg.eigvalsh(arr).min()) < -linalg.EIG_FLOOR:
                raise ValueError(f"level {t} contains a non-PSD state")
            lv.append(arr)
        object.__setattr__(self, "levels", tuple(lv))

    @property
    def d(self) -> int:
        return self.levels[0].shape[1]

    @classmethod
    def constant(cls, rho: DensityOperator, n: int, y_size: int) -> "FeedbackStrategy":
        levels = tuple(
            np.broadcast_to(rho.mat, (y_size**t, rho.d, rho.d)).copy() for t in range(n)
        )
        return cls(n, y_size, levels)

    def state_at(self, history: tuple[int, ...]) -> np.ndarray:
        t = len(history)
        idx = 0
        for y in history:
            idx = idx * self.y_size + int(y)
        return self.levels[t][idx]


def feedback_output_dist(strategy: FeedbackStrategy, channel: QcChannel) -> np.ndarray:
    """Exact output distribution Q(y^n) = prod_t Tr(rho_{t:y^{t-1}} M_{y_t})."""
    y = channel.n_outcomes
    if y != strategy.y_size:
        raise ValueError("strategy alphabet does not match the channel")
    if strategy.d != channel.d:
        raise ValueError("strategy states do not match the channel input dimension")
    if strategy.n * np.log2(y) > DIST_CAP_BITS:
        raise ValueError(f"distribution over Y^n exceeds the 2^{DIST_CAP_BITS} cap")
    probs = np.ones(1)
    for level in strategy.levels:
        step = np.einsum("hij,yji->hy", level, channel.povm).real
        step = np.clip(step, 0.0, None)
        probs = (probs[:, None] * step).reshape(-1)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"output distribution sums to {total}, not 1")
    return probs


@dataclass(frozen=True)
class GeneralFeedbackStrategy:
    """Sender protocol with an ancilla memory.

    ``maps[t-1]`` turns (feedback register of the first t-1 letters) (x)
    (ancilla) into (ancilla) (x) (channel input)."""

    ancilla_dim: int
    sigma0: DensityOperator
    maps: tuple[QuantumChannel, ...]
    y_size: int

    def __post_init__(self):
        if self.sigma0.d != self.ancilla_dim:
            raise ValueError("initial ancilla state has the wrong dimension")
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("at least one round is required")
        d = maps[0].d_out // self.ancilla_dim
        for t, phi in enumerate(maps, start=1):
            want_in = self.y_size ** (t - 1) * self.ancilla_dim
            want_out = self.ancilla_dim * d
            if phi.d_in != want_in or phi.d_out != want_out:
                raise ValueError(
                    f"round {t} map must be {want_in} -> {want_out}, got {phi.d_in} -> {phi.d_out}"
                )
        object.__setattr__(self, "maps", maps)

    @property
    def n(self) -> int:
        return len(self.maps)

    @property
    def d(self) -> int:
        return self.maps[0].d_out // self.ancilla_dim


def reduce_general_strategy(
    strategy: GeneralFeedbackStrategy, channel: QcChannel, prob_floor: float = 1e-12
) -> tuple[FeedbackStrategy, list[tuple[int, ...]]]:
    """Collapse an ancilla-memory protocol to per-history input states.

    The conditional ancilla update divides by the outcome probability, so
    histories whose probability falls below ``prob_floor`` get the maximally
    mixed placeholder state and are reported back; they carry no output
    probability, hence the reduced strategy reproduces the protocol's output
    distribution exactly (within roundoff).
    """
    if strategy.y_size != channel.n_outcomes:
        raise ValueError("strategy alphabet does not match the channel")
    if strategy.d != channel.d:
        raise ValueError("protocol channel-input dimension does not match the channel")
    a = strategy.ancilla_dim
    d = strategy.d
    y = strategy.y_size
    levels = []
    flagged: list[tuple[int, ...]] = []
    sigmas = [strategy.sigma0.mat]
    histories: list[tuple[int, ...]] = [()]
    dead = [False]
    for t, phi in enumerate(strategy.maps, start=1):
        level = np.empty((len(sigmas), d, d), dtype=np.complex128)
        next_sigmas = []
        next_histories = []
        next_dead = []
        for h, sigma in enumerate(sigmas):
            if dead[h]:
                level[h] = np.eye(d) / d
                flagged.append(histories[h])
                out = None
            else:
                reg = np.zeros((y ** (t - 1), y ** (t - 1)), dtype=np.complex128)
                reg[_history_index(histories[h], y), _history_index(histories[h], y)] = 1.0
                joint = np.kron(reg, sigma) if t > 1 else sigma
                out = phi.apply_mat(joint)
                level[h] = linalg.partial_trace_mat(out, (a, d), keep=[1])
            for letter in range(y):
                hist = histories[h] + (letter,)
                if out is None:
                    next_sigmas.append(np.eye(a) / a)
                    next_histories.append(hist)
                    next_dead.append(True)
                    continue
                p = float(np.einsum("ij,ji->", level[h], channel.povm[letter]).real)
                if p <= prob_floor:
                    next_sigmas.append(np.eye(a) / a)
                    next_dead.append(True)
                else:
                    post = out @ np.kron(np.eye(a), channel.povm[letter])
                    next_sigmas.append(linalg.partial_trace_mat(post, (a, d), keep=[0]) / p)
                    next_dead.append(False)
                next_histories.append(hist)
        levels.append(level)
        sigmas = next_sigmas
        histories = next_histories
        dead = next_dead
    reduced = FeedbackStrategy(strategy.n, y, tuple(levels))
    return reduced, flagged


def _history_index(history: tuple[int, ...], y: int) -> int:
    idx = 0
    for letter in history:
        idx = idx * y + int(letter)
    return idx


@dataclass(frozen=True)
class TypicalSet:
    """Smallest-cardinality high-probability set of output strings."""

    indices: np.ndarray  # sorted by descending probability
    mass: float
    n: int
    y_size: int
    bound: float | None = None
    bound_log2: float | None = None

    @property
    def size(self) -> int:
        return len(self.indices)

    def strings(self) -> list[str]:
        return [index_to_string(int(i), self.n, self.y_size) for i in self.indices]


_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def index_to_string(idx: int, n: int, y_size: int) -> str:
    if y_size > len(_DIGITS):
        raise ValueError("alphabet too large for digit strings")
    out = []
    for _ in range(n):
        out.append(_DIGITS[idx % y_size])
        idx //= y_size
    return "".join(reversed(out))


def string_to_index(s: str, y_size: int) -> int:
    idx = 0
    for ch in s:
        idx = idx * y_size + _DIGITS.index(ch)
    return idx


def product_output_bound_log2(n: int, y_size: int, max_entropy: float, eps: float) -> float:
    """log2 of the cardinality bound 2^(n * maxH + alpha * sqrt(n)), alpha = |Y| / sqrt(eps)."""
    return n * max_entropy + (y_size / np.sqrt(eps)) * np.sqrt(n)


def typical_set(
    probs: np.ndarray,
    eps: float,
    n: int | None = None,
    y_size: int | None = None,
    max_entropy: float | None = None,
) -> TypicalSet:
    """Greedy minimal set of mass >= 1 - eps: sort descending, accumulate.

    Ties are broken by string index, so the construction is deterministic.
    When ``max_entropy`` (bits) is supplied along with the block structure,
    the cardinality bound is attached (it may be vacuous for small blocks).
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    q = np.asarray(probs, dtype=np.float64).reshape(-1)
    if q.min(initial=0.0) < -1e-12 or abs(float(q.sum()) - 1.0) > 1e-9:
        raise ValueError("not a probability distribution")
    if y_size is not None:
        n = n if n is not None else int(round(np.log(len(q)) / np.log(y_size)))
        if y_size**n != len(q):
            raise ValueError("declared block structure does not match the array length")
    order = np.argsort(-q, kind="stable")
    cum = np.cumsum(q[order])
    target = 1.0 - eps
    k = int(np.searchsorted(cum, target, side="left"))
    k = min(k, len(q) - 1)
    bound = bound_log2 = None
    if max_entropy is not None:
        if n is None or y_size is None:
            raise ValueError("bound needs n and y_size")
        if eps <= 0.0:
            raise ValueError("bound needs eps > 0")
        bound_log2 = float(product_output_bound_log2(n, y_size, max_entropy, eps))
        with np.errstate(over="ignore"):
            bound = float(np.exp2(min(bound_log2, 1024.0)))
    return TypicalSet(
        indices=order[: k + 1].copy(),
        mass=float(cum[k]),
        n=n if n is not None else len(q),
        y_size=y_size if y_size is not None else len(q),
        bound=bound,
        bound_log2=bound_log2,
    )


@dataclass(frozen=True)
class CoherentFeedbackStrategy:
    """Sender protocol for coherent feedback: round t turns the ancilla plus
    the t-1 previously kept environment factors into (ancilla, environments,
    fresh channel input)."""

    ancilla_dim: int
    sigma0: DensityOperator
    maps: tuple[QuantumChannel, ...]

    def __post_init__(self):
        if self.sigma0.d != self.ancilla_dim:
            raise ValueError("initial ancilla state has the wrong dimension")
        if not self.maps:
            raise ValueError("at least one round is required")
        object.__setattr__(self, "maps", tuple(self.maps))

    @property
    def n(self) -> int:
        return len(self.maps)

    def validate_against(self, dilation: StinespringDilation) -> None:
        d1, d3 = dilation.d_in, dilation.d_env
        for t, phi in enumerate(self.maps, start=1):
            want_in = self.ancilla_dim * d3 ** (t - 1)
            want_out = want_in * d1
            if phi.d_in != want_in or phi.d_out != want_out:
                raise ValueError(
                    f"round {t} map must be {want_in} -> {want_out}, got {phi.d_in} -> {phi.d_out}"
                )


def _apply_kraus_to_factors(mat, dims, sel, kraus, out_dims):
    """Apply a Kraus family on the listed factors (in the listed order).

    Remaining factors keep their order and move to the front; the channel's
    output factors are appended at the end.  Returns (matrix, dims tuple).
    """
    dims = tuple(dims)
    k = len(dims)
    rest = [i for i in range(k) if i not in sel]
    tensor = mat.reshape(dims + dims)
    perm = rest + list(sel)
    tensor = tensor.transpose([*perm, *[k + p for p in perm]])
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    d_sel = int(np.prod([dims[i] for i in sel])) if sel else 1
    block = tensor.reshape(d_rest, d_sel, d_rest, d_sel)
    out = np.einsum("kai,risj,kbj->rasb", kraus, block, kraus.conj(), optimize=True)
    d_out = kraus.shape[1]
    new_dims = tuple(dims[i] for i in rest) + tuple(out_dims)
    side = d_rest * d_out
    return out.reshape(side, side), new_dims


def coherent_feedback_output(
    strategy: CoherentFeedbackStrategy, dilation: StinespringDilation, n: int | None = None
) -> DensityOperator:
    """Receiver-side output state after n rounds of coherent feedback.

    Each round applies the sender map to (ancilla, kept environment factors),
    then the channel isometry to the fresh input, splitting it into a
    receiver factor and a new environment factor kept by the sender; the
    ancilla and all environment factors are traced out at the end.  The
    isometry and the sender maps are padded by identities exactly on the
    factors they do not touch.
    """
    n = n if n is not None else strategy.n
    if n > strategy.n:
        raise ValueError("strategy does not cover that many rounds")
    strategy.validate_against(dilation)
    a = strategy.ancilla_dim
    d1, d2, d3 = dilation.d_in, dilation.d_out, dilation.d_env
    total = a * (d2 * d3) ** n
    if total > COHERENT_CAP:
        raise ValueError(f"total dimension {total} exceeds the dense cap {COHERENT_CAP}")
    mat = strategy.sigma0.mat
    dims: tuple[int, ...] = (a,)
    labels: list[str] = ["A"]
    theta = dilation.isometry[None, :, :]
    for t in range(1, n + 1):
        sel = [labels.index("A")] + [labels.index(f"E{s}") for s in range(1, t)]
        out_dims = (a,) + (d3,) * (t - 1) + (d1,)
        mat, dims = _apply_kraus_to_factors(mat, dims, sel, strategy.maps[t - 1].kraus, out_dims)
        labels = [lab for i, lab in enumerate(labels) if i not in sel]
        labels += ["A"] + [f"E{s}" for s in range(1, t)] + ["IN"]
        sel = [labels.index("IN")]
        mat, dims = _apply_kraus_to_factors(mat, dims, sel, theta, (d2, d3))
        labels = [lab for i, lab in enumerate(labels) if i not in sel] + [f"O{t}", f"E{t}"]
    keep = [labels.index(f"O{t}") for t in range(1, n + 1)]
    keep_sorted = sorted(keep)
    mat = linalg.partial_trace_mat(mat, dims, keep=keep_sorted)
    kept_labels = [labels[i] for i in keep_sorted]
    order = [kept_labels.index(f"O{t}") for t in range(1, n + 1)]
    mat, _ = _reorder_factors(mat, (d2,) * n, order)
    return linalg.clamp_to_density(mat, dims=(d2,) * n)


def _reorder_factors(mat, dims, order):
    dims = tuple(dims)
    k = len(dims)
    tensor = mat.reshape(dims + dims)
    tensor = tensor.transpose([*order, *[k + p for p in order]])
    new_dims = tuple(dims[p] for p in order)
    side = int(np.prod(new_dims))
    return tensor.reshape(side, side), new_dims


@dataclass(frozen=True)
class ProjectorReport:
    rank: int
    mass: float
    eps: float
    bound: float
    bound_log2: float
    max_output_entropy: float


def output_projector(
    omega: DensityOperator,
    channel: QuantumChannel,
    eps: float,
    tol: float = 1e-6,
) -> tuple[HermitianOperator, ProjectorReport]:
    """High-probability projector built from products of eigenvectors of the
    channel's entropy-maximising output state.

    The diagonal of omega in that product basis is the outcome distribution
    of measuring every factor; its greedy typical set at level eps gives a
    projector with Tr(omega Pi) >= 1 - eps and rank at most
    2^(n * maxS + alpha sqrt(n)), alpha = d2 / sqrt(eps), whenever omega was
    produced by a feedback strategy for the channel.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    d2 = channel.d_out
    if any(d != d2 for d in omega.dims):
        raise ValueError("omega must live on copies of the channel output space")
    n = len(omega.dims)
    opt = channels.max_output_entropy(channel, tol=tol)
    omega_tilde = channel.apply_mat(opt.argmax)
    _, basis = np.linalg.eigh(linalg.hermitize(omega_tilde))
    rotated = _rotate_all_factors(omega.mat, (d2,) * n, basis.conj().T)
    q = np.clip(np.diag(rotated).real, 0.0, None)
    q = q / q.sum()
    ts = typical_set(q, eps, n=n, y_size=d2, max_entropy=opt.value)
    indicator = np.zeros(d2**n)
    indicator[ts.indices] = 1.0
    proj = _rotate_all_factors(np.diag(indicator.astype(np.complex128)), (d2,) * n, basis)
    mass = float(np.einsum("ij,ji->", omega.mat, proj).real)
    report = ProjectorReport(
        rank=ts.size,
        mass=mass,
        eps=eps,
        bound=ts.bound,
        bound_log2=ts.bound_log2,
        max_output_entropy=opt.value,
    )
    return HermitianOperator(linalg.hermitize(proj), dims=(d2,) * n), report


def _rotate_all_factors(mat: np.ndarray, dims, u: np.ndarray) -> np.ndarray:
    """Conjugate by u (x) u (x) ... (x) u without forming the big unitary."""
    k = len(dims)
    tensor = mat.reshape(tuple(dims) + tuple(dims))
    for axis in range(k):
        tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [axis])), 0, axis)
    for axis in range(k, 2 * k):
        tensor = np.moveaxis(np.tensordot(u.conj(), tensor, axes=([1], [axis])), 0, axis)
    side = int(np.prod(dims))
    return tensor.reshape(side, side)


def qc_feedback_capacity(channel: QcChannel, tol: float = 1e-6) -> float:
    """Identification capacity of a measurement channel with passive feedback:
    zero for a constant channel, else the maximum output entropy."""
    if channels.qc_is_constant(channel):
        return 0.0
    return channels.max_output_entropy(channel, tol=tol).value


def coherent_feedback_capacity(channel: QuantumChannel, tol: float = 1e-6) -> float:
    """Identification capacity with coherent feedback: zero for a constant
    channel, else twice the maximum output entropy."""
    if channels.is_constant_channel(channel):
        return 0.0
    return 2.0 * channels.max_output_entropy(channel, tol=tol).value


def correlated_capacity(p: np.ndarray, entangled_states) -> float:
    """Identification capacity of a shared classical label plus pure
    entanglement: H(p) + 2 * sum_mu p_mu E(Psi_mu), with E the entropy of
    entanglement of the bipartite pure state."""
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    states = list(entangled_states)
    if len(states) != len(p):
        raise ValueError("one entangled state per label is required")
    total = linalg.shannon_entropy(p)
    for weight, psi in zip(p, states):
        if len(psi.dims) != 2:
            raise ValueError("entangled states must be bipartite (two factor dims)")
        if psi.purity() < 1.0 - 1e-8:
            raise ValueError("entangled component is not pure")
        reduced = linalg.partial_trace(psi, keep=[0])
        total += 2.0 * weight * linalg.von_neumann_entropy(reduced)
    return float(total)
