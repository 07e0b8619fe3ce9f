"""Pure-numpy kernel backend.

Draw order within a chunk is trial-major, then entry-major, then the
(u1, u2) uniform pair, matching the compiled backend stream for stream.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox


def _rng(root: int, stream: int, chunk: int) -> Generator:
    return Generator(Philox(counter=[0, chunk, 0, 0], key=[root, stream]))


def projector_mass_chunk(d, r, count, root, stream, chunk):
    u = _rng(root, stream, chunk).random((count, d))
    e = -np.log1p(-u)  # squared moduli of standard complex Gaussians
    return e[:, :r].sum(axis=1) / e.sum(axis=1)


def reduced_eigrange_chunk(t, u_dim, count, root, stream, chunk):
    un = _rng(root, stream, chunk).random((count, t, u_dim, 2))
    amp = np.sqrt(-np.log1p(-un[..., 0]))
    ang = (2.0 * np.pi) * un[..., 1]
    g = amp * (np.cos(ang) + 1j * np.sin(ang))
    w = np.einsum("kiu,kju->kij", g, g.conj())
    tr = np.einsum("kii->k", w).real
    vals = np.linalg.eigvalsh(w)
    return vals[:, 0].real / tr, vals[:, -1].real / tr
