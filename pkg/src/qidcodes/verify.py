"""Monte Carlo and exhaustive verification of the concentration bounds.

Every estimator is deterministic given its seed; trials fan out over
fixed-size counter chunks, so the result is independent of the worker
count.  Bound formulas are evaluated in log2 space to avoid overflow (the
exponential in each bound is base 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel, linalg, sampling
from .linalg import LN2, DensityOperator, HermitianOperator
from .sampling import Seed, as_seed


@dataclass(frozen=True)
class TailEstimate:
    """Empirical tail frequency against the applicable analytic bounds.

    ``bound`` is the tightest applicable bound; ``bounds`` keeps each bound
    by name.  ``std_err`` is the binomial standard error sqrt(p(1-p)/trials).
    """

    lemma: str
    params: dict
    trials: int
    empirical_prob: float
    bound: float
    bound_log2: float
    bounds: dict = field(default_factory=dict)
    std_err: float = 0.0
    mean_stat: float = 0.0
    mean_std_err: float = 0.0
    seed: tuple[int, int] = (0, 0)

    def passes(self, sigmas: float = 4.0) -> bool:
        """Statistical acceptance: empirical <= bound + sigmas * std_err."""
        return self.empirical_prob <= self.bound + sigmas * self.std_err


def _binomial_se(p_hat: float, trials: int) -> float:
    return float(np.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials))


def ld_tail(
    d: int,
    r: int,
    eps: float,
    trials: int,
    seed,
    mode: str = "upper",
    threads: int = 1,
) -> TailEstimate:
    """Tail frequency of Tr(U psi U* P) beyond (1 +/- eps) r/d over Haar draws.

    For the upper tail two bounds apply: exp2(-r (eps - ln(1+eps)) / ln 2)
    for every eps > 0 and exp2(-r eps^2 / (6 ln 2)) for eps <= 1; the lower
    tail carries only the eps^2 bound (eps <= 1).  Each bound is evaluated
    only in its stated regime.
    """
    if not 1 <= r <= d:
        raise ValueError("need 1 <= r <= d")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if mode not in ("upper", "lower"):
        raise ValueError("mode must be 'upper' or 'lower'")
    if mode == "lower" and eps > 1.0:
        raise ValueError("the lower-tail bound requires eps <= 1")
    seed = as_seed(seed)
    stats = _accel.projector_mass_samples(d, r, trials, seed.root, seed.stream, threads=threads)
    threshold = (1.0 + eps) * r / d if mode == "upper" else (1.0 - eps) * r / d
    hits = stats >= threshold if mode == "upper" else stats <= threshold
    p_hat = float(hits.mean())
    bounds: dict[str, float] = {}
    if mode == "upper":
        bounds["ld_relative_entropy_log2"] = -r * (eps - np.log1p(eps)) / LN2
        if eps <= 1.0:
            bounds["ld_quadratic_log2"] = -r * eps * eps / (6.0 * LN2)
    else:
        bounds["ld_quadratic_log2"] = -r * eps * eps / (6.0 * LN2)
    log2_best = min(bounds.values())
    named = {k.removesuffix("_log2"): float(np.exp2(v)) for k, v in bounds.items()}
    return TailEstimate(
        lemma="ld",
        params={"d": d, "r": r, "eps": eps, "mode": mode},
        trials=trials,
        empirical_prob=p_hat,
        bound=float(np.exp2(log2_best)),
        bound_log2=float(log2_best),
        bounds=named,
        std_err=_binomial_se(p_hat, trials),
        mean_stat=float(stats.mean()),
        mean_std_err=float(stats.std(ddof=1) / np.sqrt(trials)),
        seed=(seed.root, seed.stream),
    )


def uniform_deviation(t: int, u: int, eta: float, trials: int, seed, threads: int = 1) -> TailEstimate:
    """Frequency of a random state on C^t (environment dimension u) leaving
    the operator interval [(1-eta)/t, (1+eta)/t], against the bound
    2 (10 t / eta)^{2t} exp2(-u eta^2 / (24 ln 2))."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    if t > u:
        raise ValueError("the deviation bound regime needs t <= u")
    seed = as_seed(seed)
    mins, maxs = _accel.reduced_eigrange_samples(t, u, trials, seed.root, seed.stream, threads=threads)
    lo, hi = (1.0 - eta) / t, (1.0 + eta) / t
    hits = (mins < lo) | (maxs > hi)
    p_hat = float(hits.mean())
    bound_log2 = 1.0 + 2.0 * t * np.log2(10.0 * t / eta) - u * eta * eta / (24.0 * LN2)
    with np.errstate(over="ignore"):
        bound = float(np.exp2(min(bound_log2, 1024.0)))
    return TailEstimate(
        lemma="uniform",
        params={"t": t, "u": u, "eta": eta},
        trials=trials,
        empirical_prob=p_hat,
        bound=bound,
        bound_log2=float(bound_log2),
        bounds={"uniform": bound},
        std_err=_binomial_se(p_hat, trials),
        mean_stat=float(maxs.mean()),
        mean_std_err=float(maxs.std(ddof=1) / np.sqrt(trials)),
        seed=(seed.root, seed.stream),
    )


@dataclass(frozen=True)
class NetReport:
    """Deterministic covering net of qubit pure states in trace-norm radius eps."""

    eps: float
    bloch_points: np.ndarray  # (k, 3) unit vectors
    cardinality: int
    paper_bound: float
    coverage_failures: int
    coverage_samples: int

    def state_vectors(self) -> np.ndarray:
        """(k, 2) complex unit vectors corresponding to the Bloch points."""
        x, y, z = self.bloch_points.T
        theta = np.arccos(np.clip(z, -1.0, 1.0))
        phi = np.arctan2(y, x)
        return np.stack(
            [np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)], axis=1
        )


def qubit_net(eps: float, coverage_samples: int = 10_000, seed=None) -> NetReport:
    """Latitude-longitude Bloch-sphere grid covering all qubit pure states.

    The trace-norm distance of qubit pure states equals the Euclidean
    distance of their Bloch vectors (equivalently 2 sqrt(1 - |<phi|psi>|^2)),
    so angular spacings of eps/2 give covering radius well below eps.
    Coverage is verified on Haar samples and must have zero failures;
    cardinality must not exceed (5/eps)^4.
    """
    if not 0.0 < eps <= 2.0:
        raise ValueError("eps must lie in (0, 2]")
    seed = as_seed(seed) if seed is not None else Seed(0x0B10C4, 7)
    points: list[np.ndarray] = []
    if eps >= 2.0:
        points.append(np.array([0.0, 0.0, 1.0]))
    else:
        step = eps / 2.0
        n_lat = int(np.ceil(np.pi / step)) + 1
        for k in range(n_lat):
            theta = min(k * step, np.pi)
            s = np.sin(theta)
            if s < 1e-12:
                points.append(np.array([0.0, 0.0, np.cos(theta)]))
                continue
            n_lon = int(np.ceil(2.0 * np.pi * s / step))
            for m in range(n_lon):
                phi = 2.0 * np.pi * m / n_lon
                points.append(np.array([s * np.cos(phi), s * np.sin(phi), np.cos(theta)]))
    net = np.stack(points)
    cardinality = len(net)
    paper_bound = (5.0 / eps) ** 4
    if cardinality > paper_bound:
        raise AssertionError("net construction exceeded the cardinality bound")
    rng = seed.generator()
    vecs = sampling.complex_gaussians(rng, (coverage_samples, 2))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    bloch = np.stack(
        [
            2.0 * (vecs[:, 0].conj() * vecs[:, 1]).real,
            2.0 * (vecs[:, 0].conj() * vecs[:, 1]).imag,
            (np.abs(vecs[:, 0]) ** 2 - np.abs(vecs[:, 1]) ** 2),
        ],
        axis=1,
    )
    dists = np.linalg.norm(bloch[:, None, :] - net[None, :, :], axis=2).min(axis=1)
    failures = int((dists > eps).sum())
    return NetReport(
        eps=eps,
        bloch_points=net,
        cardinality=cardinality,
        paper_bound=paper_bound,
        coverage_failures=failures,
        coverage_samples=coverage_samples,
    )


@dataclass(frozen=True)
class GentleCheck:
    lhs: float
    rhs: float
    ok: bool
    retained_mass: float


def gentle_measurement_check(rho: DensityOperator, proj: HermitianOperator) -> GentleCheck:
    """Disturbance of projecting onto a high-probability subspace.

    lhs = (1/2) || rho - P rho P / Tr(P rho P) ||_1; with delta = 1 - Tr(rho P)
    the instantiated bound is rhs = 8 sqrt(delta) (the eps/3 disturbance at
    eps = 24 sqrt(delta)).  ``ok`` must hold on every valid input.
    """
    p = proj.mat
    if float(np.abs(p @ p - p).max()) > 1e-8:
        raise ValueError("second argument must be a projector")
    mass = float(np.einsum("ij,ji->", rho.mat, p).real)
    if mass <= 0.0:
        raise ValueError("projector retains no mass of the state")
    squeezed = p @ rho.mat @ p / mass
    lhs = 0.5 * linalg.trace_norm(rho.mat - squeezed)
    delta = max(1.0 - mass, 0.0)
    rhs = 8.0 * float(np.sqrt(delta))
    return GentleCheck(lhs=float(lhs), rhs=rhs, ok=bool(lhs <= rhs + 1e-12), retained_mass=mass)
