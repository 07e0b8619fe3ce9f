"""Seeded random generation of Haar unitaries, isometries, channels and states.

Randomness conventions
----------------------
* All draws come from counter-based Philox streams keyed by a ``Seed``
  (root, stream) pair: the same pair reproduces the same sequence on the
  same platform/build.  Bit-stability across different floating-point
  hardware or backends is not promised, only statistical equivalence.
* Complex standard Gaussians (E|z|^2 = 1) are produced by the polar
  Box-Muller transform z = sqrt(-ln(1-u1)) * exp(2*pi*i*u2) from two
  uniforms.
* Haar unitaries are QR decompositions of Ginibre matrices with the column
  phases fixed so the R factor has a real positive diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from . import linalg
from .linalg import DensityOperator

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 step; a bijection on 64-bit words used to derive substreams."""
    x = (x + _GOLDEN) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


@dataclass(frozen=True)
class Seed:
    """Reproducible randomness identity: Philox key (root, stream)."""

    root: int = 0
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "root", int(self.root) & _M64)
        object.__setattr__(self, "stream", int(self.stream) & _M64)

    def spawn(self, index: int) -> "Seed":
        """Derive an independent child stream; deterministic in (stream, index)."""
        return Seed(self.root, splitmix64(splitmix64(self.stream) + (int(index) & _M64)))

    def generator(self) -> Generator:
        return Generator(Philox(key=[self.root, self.stream]))


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed), 0)


def complex_gaussians(rng: Generator, shape) -> np.ndarray:
    """I.i.d. standard complex Gaussians via polar Box-Muller (E|z|^2 = 1)."""
    u = rng.random(tuple(shape) + (2,))
    amp = np.sqrt(-np.log1p(-u[..., 0]))
    ang = (2.0 * np.pi) * u[..., 1]
    return amp * (np.cos(ang) + 1j * np.sin(ang))


def ginibre(m: int, n: int, seed) -> np.ndarray:
    """m x n matrix of i.i.d. standard complex Gaussian entries."""
    if m < 1 or n < 1:
        raise ValueError("ginibre dimensions must be positive")
    return complex_gaussians(as_seed(seed).generator(), (m, n))


def _haar_batch(rng: Generator, d: int, count: int) -> np.ndarray:
    """(count, d, d) Haar unitaries: QR of Ginibre, R diagonal made real positive."""
    g = complex_gaussians(rng, (count, d, d))
    q, r = np.linalg.qr(g)
    diag = np.einsum("kii->ki", r)
    phase = diag / np.abs(diag)
    return q * phase[:, None, :]


def haar_unitary(d: int, seed) -> np.ndarray:
    """One Haar-distributed d x d unitary."""
    if d < 1:
        raise ValueError("dimension must be positive")
    return _haar_batch(as_seed(seed).generator(), d, 1)[0]


def haar_unitaries(d: int, count: int, seed, chunk: int = 4096):
    """Yield ``count`` Haar unitaries in batches (single stream, in order)."""
    rng = as_seed(seed).generator()
    done = 0
    while done < count:
        take = min(chunk, count - done)
        yield _haar_batch(rng, d, take)
        done += take


def random_isometry(s: int, big_d: int, seed) -> np.ndarray:
    """First s columns of a Haar unitary on C^big_d (a big_d x s isometry)."""
    if s > big_d:
        raise ValueError(f"isometry needs s <= D, got s={s}, D={big_d}")
    return haar_unitary(big_d, seed)[:, :s].copy()


@dataclass(frozen=True)
class RandomChannelSpec:
    """Dimensions (input s, output t, environment u) of a random channel draw."""

    s: int
    t: int
    u: int

    def __post_init__(self):
        if min(self.s, self.t, self.u) < 1:
            raise ValueError("dimensions must be positive")
        if self.s > self.t * self.u:
            raise ValueError(f"need s <= t*u, got s={self.s}, t*u={self.t * self.u}")


def sample_random_channel(spec: RandomChannelSpec, seed):
    """Channel rho -> Tr_env(V rho V*) for a Haar-random isometry V into
    C^t (x) C^u; Kraus operators K_j = (I_t (x) <j|_u) V."""
    from . import channels  # deferred: channels builds on sampling for optimizer restarts

    v = random_isometry(spec.s, spec.t * spec.u, seed)
    kraus = v.reshape(spec.t, spec.u, spec.s).transpose(1, 0, 2)
    return channels.QuantumChannel(np.ascontiguousarray(kraus))


def random_state_factor(rng: Generator, t: int, u: int) -> np.ndarray:
    """Ginibre factor G (t x u) of a random state: rho = G G^dagger / tr."""
    return complex_gaussians(rng, (t, u))


def state_from_factor(g: np.ndarray, dims=None) -> DensityOperator:
    w = g @ g.conj().T
    return DensityOperator(w / float(np.trace(w).real), dims)


def sample_random_state(t: int, u: int, seed) -> DensityOperator:
    """Reduction over C^u of a Haar-random pure state on C^t (x) C^u.

    Realised directly as G G^dagger / Tr(G G^dagger) for a Ginibre t x u
    matrix G, which is the same distribution (the unit vector vec(G)/||G||
    is Haar on the product space and G G^dagger is its u-side reduction).
    Rank is at most min(t, u).
    """
    if t < 1 or u < 1:
        raise ValueError("dimensions must be positive")
    return state_from_factor(random_state_factor(as_seed(seed).generator(), t, u))


def random_interior_state(rng: Generator, d: int, mix: float = 0.5) -> np.ndarray:
    """Full-rank random density matrix used for optimizer restarts (raw matrix)."""
    g = complex_gaussians(rng, (d, d))
    w = g @ g.conj().T
    w = w / float(np.trace(w).real)
    return (1.0 - mix) * w + mix * np.eye(d) / d


def schmidt_check(v: np.ndarray, t: int, u: int, atol: float = 1e-9) -> bool:
    """Nonzero spectra of the two reductions of a pure bipartite vector agree."""
    g = np.asarray(v, dtype=np.complex128).reshape(t, u)
    left = np.linalg.eigvalsh(g @ g.conj().T)
    right = np.linalg.eigvalsh(g.conj().T @ g)
    k = min(t, u)
    return bool(np.max(np.abs(left[-k:] - right[-k:])) <= atol)


def haar_state_vector(d: int, seed) -> np.ndarray:
    """Haar-random unit vector on C^d (normalised Gaussian vector)."""
    v = complex_gaussians(as_seed(seed).generator(), (d,))
    return v / np.linalg.norm(v)


__all__ = [
    "Seed",
    "as_seed",
    "splitmix64",
    "complex_gaussians",
    "ginibre",
    "haar_unitary",
    "haar_unitaries",
    "random_isometry",
    "RandomChannelSpec",
    "sample_random_channel",
    "sample_random_state",
    "random_state_factor",
    "state_from_factor",
    "random_interior_state",
    "schmidt_check",
    "haar_state_vector",
]
