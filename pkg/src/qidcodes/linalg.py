"""Dense complex linear algebra for finite-dimensional quantum operators.

Matrices are numpy ``complex128`` arrays in row-major order.  Operators that
carry tensor-factor structure (density operators, decoders) are wrapped in
small frozen dataclasses holding the matrix together with the ordered factor
dimensions; everything else works on raw arrays.

All entropies in this package are base 2.  Dimensions stay at desk scale
(side length <= ~10^3), so there is no sparse path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: max entry-wise |A - A^dagger| accepted as Hermitian
TOL_HERM = 1e-10
#: eigenvalues of density operators may undershoot zero by at most this
EIG_FLOOR = 1e-10
#: |trace - 1| accepted for density operators
TOL_TRACE = 1e-10

LN2 = float(np.log(2.0))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^dagger)/2; absorbs roundoff before eigensolves."""
    return (a + a.conj().T) / 2


def herm_residual(a: np.ndarray) -> float:
    return float(np.abs(a - a.conj().T).max()) if a.size else 0.0


def _as_square(mat: np.ndarray) -> np.ndarray:
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat.view(np.float64))):
        raise ValueError("matrix contains NaN or Inf entries")
    return mat


def _resolve_dims(n: int, dims: Sequence[int] | None) -> tuple[int, ...]:
    if dims is None:
        return (n,)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != n:
        raise ValueError(f"factor dims {dims} do not multiply to side length {n}")
    return dims


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian matrix with tensor-factor bookkeeping (decoders, POVM elements)."""

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        mat = _as_square(self.mat)
        if herm_residual(mat) > TOL_HERM:
            raise ValueError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "mat", hermitize(mat))
        object.__setattr__(self, "dims", _resolve_dims(mat.shape[0], self.dims))

    @property
    def d(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, d: int, dims: Sequence[int] | None = None) -> "HermitianOperator":
        return cls(np.eye(d, dtype=np.complex128), dims)


@dataclass(frozen=True)
class DensityOperator:
    """Positive semidefinite unit-trace operator with explicit factor structure.

    Construction validates Hermiticity, the eigenvalue floor and the unit
    trace; failures raise ``ValueError`` rather than producing a silently
    invalid state.
    """

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        mat = _as_square(self.mat)
        if herm_residual(mat) > TOL_HERM:
            raise ValueError("density operator is not Hermitian within tolerance")
        mat = hermitize(mat)
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValueError(f"density operator trace {tr} deviates from 1")
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < -EIG_FLOOR:
            raise ValueError(f"density operator has eigenvalue {lo} below floor")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", _resolve_dims(mat.shape[0], self.dims))

    @property
    def d(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def pure(cls, vec: np.ndarray, dims: Sequence[int] | None = None) -> "DensityOperator":
        v = np.asarray(vec, dtype=np.complex128).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("zero vector has no associated pure state")
        v = v / nrm
        return cls(np.outer(v, v.conj()), dims)

    @classmethod
    def maximally_mixed(cls, d: int, dims: Sequence[int] | None = None) -> "DensityOperator":
        return cls(np.eye(d, dtype=np.complex128) / d, dims)

    @classmethod
    def maximally_entangled(cls, d: int) -> "DensityOperator":
        """State with vector sum_j |j>|j> / sqrt(d) on C^d (x) C^d.

        Entries are written as exact 1/d (not products of square roots), so
        dyadic dimensions stay exact in floating point.
        """
        mat = np.zeros((d * d, d * d), dtype=np.complex128)
        idx = np.arange(d) * (d + 1)
        mat[np.ix_(idx, idx)] = 1.0 / d
        return cls(mat, dims=(d, d))

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(np.kron(self.mat, other.mat), self.dims + other.dims)

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition with eigenvalues sorted in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # unitary; column k pairs with eigenvalues[k]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; factor dims concatenate (a's factors first)."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def partial_trace_mat(mat: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Raw partial trace over the factors not listed in ``keep``.

    ``keep`` is treated as an index set: kept factors stay in their original
    order regardless of the iteration order of ``keep``.
    """
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    keep_sorted = sorted(set(int(i) for i in keep))
    if keep_sorted and (keep_sorted[0] < 0 or keep_sorted[-1] >= k):
        raise IndexError(f"keep indices {keep_sorted} out of range for {k} factors")
    tensor = np.asarray(mat, dtype=np.complex128).reshape(dims + dims)
    # shared letters on traced row/col axes implement the trace
    row = list(range(k))
    col = [i if i not in keep_sorted else k + i for i in range(k)]
    out = [i for i in keep_sorted] + [k + i for i in keep_sorted]
    res = np.einsum(tensor, row + col, out)
    side = int(np.prod([dims[i] for i in keep_sorted])) if keep_sorted else 1
    return res.reshape(side, side)


def partial_trace(op, keep: Iterable[int]):
    """Partial trace of a typed operator; returns the same kind of operator."""
    keep_sorted = sorted(set(int(i) for i in keep))
    new_dims = tuple(op.dims[i] for i in keep_sorted)
    mat = partial_trace_mat(op.mat, op.dims, keep_sorted)
    if isinstance(op, DensityOperator):
        return DensityOperator(mat, new_dims)
    return HermitianOperator(hermitize(mat), new_dims)


def eig_herm(a) -> Spectrum:
    """Descending eigendecomposition of a Hermitian operator or matrix."""
    mat = a.mat if isinstance(a, (HermitianOperator, DensityOperator)) else np.asarray(a, dtype=np.complex128)
    if herm_residual(mat) > TOL_HERM:
        raise ValueError("eig_herm requires a Hermitian input")
    vals, vecs = np.linalg.eigh(hermitize(mat))
    return Spectrum(vals[::-1].copy(), vecs[:, ::-1].copy())


def support_projector(rho: DensityOperator, rank_tol: float | None = None) -> HermitianOperator:
    """Projector onto the span of eigenvectors with eigenvalue above ``rank_tol``.

    Default cutoff is 1e-9 times the largest eigenvalue (scale-free).
    """
    vals, vecs = np.linalg.eigh(rho.mat)
    cutoff = rank_tol if rank_tol is not None else 1e-9 * max(float(vals[-1]), 0.0)
    sel = vecs[:, vals > cutoff]
    proj = sel @ sel.conj().T
    return HermitianOperator(hermitize(proj), rho.dims)


def entropy_from_eigs(vals: np.ndarray, dim: int | None = None) -> float:
    """-sum p log2 p with the 0 log 0 = 0 convention and a [-1e-10, 0) clamp."""
    p = np.asarray(vals, dtype=np.float64)
    p = np.where((p < 0) & (p >= -EIG_FLOOR), 0.0, p)
    if p.min(initial=0.0) < 0:
        raise ValueError(f"eigenvalue {p.min()} below the PSD floor")
    nz = p[p > 0]
    s = float(-(nz * np.log2(nz)).sum())
    hi = np.log2(dim if dim is not None else len(p))
    return float(min(max(s, 0.0), hi))


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    mat = rho.mat if isinstance(rho, DensityOperator) else hermitize(np.asarray(rho, dtype=np.complex128))
    return entropy_from_eigs(np.linalg.eigvalsh(mat), mat.shape[0])


def shannon_entropy(p: np.ndarray) -> float:
    """Shannon entropy in bits of a probability vector."""
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.min(initial=0.0) < -1e-12 or abs(float(p.sum()) - 1.0) > 1e-10:
        raise ValueError("not a probability distribution")
    return entropy_from_eigs(np.clip(p, 0.0, None), len(p))


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix (sum of |eigenvalues|)."""
    return float(np.abs(np.linalg.eigvalsh(hermitize(a))).sum())


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """(1/2)||rho - sigma||_1, in [0, 1]."""
    if rho.d != sigma.d:
        raise ValueError(f"dimension mismatch: {rho.d} vs {sigma.d}")
    return min(0.5 * trace_norm(rho.mat - sigma.mat), 1.0)


def operator_interval_check(
    rho,
    lo: float,
    hi: float,
    within: HermitianOperator | None = None,
    atol: float = 0.0,
) -> bool:
    """True iff all eigenvalues of ``rho`` (compressed to the support of the
    projector ``within`` when given) lie in [lo - atol, hi + atol]."""
    if lo > hi:
        raise ValueError("empty interval")
    mat = rho.mat if hasattr(rho, "mat") else np.asarray(rho, dtype=np.complex128)
    if within is not None:
        pvals, pvecs = np.linalg.eigh(within.mat)
        basis = pvecs[:, pvals > 0.5]
        if basis.shape[1] == 0:
            return True
        mat = basis.conj().T @ mat @ basis
    vals = np.linalg.eigvalsh(hermitize(mat))
    return bool(vals[0] >= lo - atol and vals[-1] <= hi + atol)


def mat_sqrt_psd(a, tol: float = 1e-10):
    """PSD square root via eigendecomposition.

    Eigenvalues in [-tol, 0) are clamped to zero; anything below -1e-6 is
    treated as genuinely non-PSD and raises.
    """
    mat = a.mat if hasattr(a, "mat") else hermitize(np.asarray(a, dtype=np.complex128))
    vals, vecs = np.linalg.eigh(mat)
    if float(vals[0]) < -1e-6:
        raise ValueError(f"matrix has strongly negative eigenvalue {vals[0]}")
    vals = np.where(vals < 0, 0.0, vals)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    root = hermitize(root)
    if isinstance(a, HermitianOperator):
        return HermitianOperator(root, a.dims)
    if isinstance(a, DensityOperator):
        return HermitianOperator(root, a.dims)
    return root


def mat_log2_psd(mat: np.ndarray, floor: float = 1e-30) -> np.ndarray:
    """log2 of a PSD matrix with eigenvalues floored away from zero."""
    vals, vecs = np.linalg.eigh(hermitize(mat))
    vals = np.maximum(vals, floor)
    return hermitize((vecs * np.log2(vals)) @ vecs.conj().T)


def clamp_to_density(mat: np.ndarray, dims: Sequence[int] | None = None) -> DensityOperator:
    """Build a DensityOperator from an almost-valid matrix.

    Only drift within the module tolerances is absorbed (hermitization plus
    renormalising a trace off by <= 1e-10); larger violations still raise.
    """
    mat = hermitize(np.asarray(mat, dtype=np.complex128))
    tr = float(np.trace(mat).real)
    if abs(tr - 1.0) <= TOL_TRACE and tr != 1.0:
        mat = mat / tr
    return DensityOperator(mat, dims)
