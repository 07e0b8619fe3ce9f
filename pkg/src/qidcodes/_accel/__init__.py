"""Monte Carlo kernels with a compiled fast path.

The two statistics driving the concentration checks are sampled here:

* ``projector_mass_samples``: Tr(U psi U* P) for Haar U, a fixed pure state
  and a fixed rank-r projector.  By unitary invariance this is the mass of
  the first r coordinates of a Haar unit vector, so each trial needs only d
  exponential draws (squared moduli of complex Gaussians).
* ``reduced_eigrange_samples``: extreme eigenvalues of the normalised
  reduction G G^dagger / tr for a t x u complex Gaussian G, i.e. of a random
  state on C^t with a u-dimensional environment.

Both backends consume identical Philox substreams (key = (root, stream),
counter block = chunk index), drawn in the same order, so they are
statistically interchangeable; bit-identical results across backends are
not promised (libm vs vectorised transcendentals), each backend alone is
deterministic.  Trials are split into fixed-size chunks so results do not
depend on the worker count.

Set QIDCODES_BACKEND=python or =compiled to force a backend; the default
uses the compiled extension when it was built.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _mc_py

try:
    from . import _mc as _mc_c  # compiled extension, optional
except ImportError:  # pragma: no cover - depends on the build
    _mc_c = None

#: trials per Philox counter block; fixed so results are schedule-independent
CHUNK = 4096


def _select():
    forced = os.environ.get("QIDCODES_BACKEND")
    if forced == "python":
        return None, "python"
    if forced == "compiled":
        if _mc_c is None:
            raise ImportError("compiled kernel requested but the extension is not built")
        return _mc_c, "compiled"
    if forced not in (None, ""):
        raise ValueError(f"unknown QIDCODES_BACKEND value {forced!r}")
    return (_mc_c, "compiled") if _mc_c is not None else (None, "python")


_impl, BACKEND = _select()


def backend_name() -> str:
    return BACKEND


def _chunk_sizes(trials: int) -> list[int]:
    full, rem = divmod(trials, CHUNK)
    return [CHUNK] * full + ([rem] if rem else [])


def _run_chunks(chunk_fn, trials: int, threads: int):
    sizes = _chunk_sizes(trials)
    if threads <= 1 or len(sizes) <= 1:
        return [chunk_fn(c, size) for c, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(chunk_fn, c, size) for c, size in enumerate(sizes)]
        return [f.result() for f in futures]


def projector_mass_samples(d: int, r: int, trials: int, root: int, stream: int, threads: int = 1) -> np.ndarray:
    if not 1 <= r <= d:
        raise ValueError("need 1 <= r <= d")
    impl = _impl if _impl is not None else _mc_py

    def chunk(c, size):
        return impl.projector_mass_chunk(d, r, size, root, stream, c)

    return np.concatenate(_run_chunks(chunk, trials, threads))


def reduced_eigrange_samples(
    t: int, u: int, trials: int, root: int, stream: int, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    if t < 1 or u < 1:
        raise ValueError("dimensions must be positive")
    # the compiled path covers the measured hot case t == 2 (closed-form eigenvalues)
    impl = _impl if (_impl is not None and t == 2) else _mc_py

    def chunk(c, size):
        return impl.reduced_eigrange_chunk(t, u, size, root, stream, c)

    parts = _run_chunks(chunk, trials, threads)
    mins = np.concatenate([p[0] for p in parts])
    maxs = np.concatenate([p[1] for p in parts])
    return mins, maxs
