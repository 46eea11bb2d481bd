"""Small dense bipartite density operators.

Basis convention: the ket ``|i, j>`` (``i`` on subsystem A, ``j`` on B, both
1-based) lives at flat index ``(i - 1) * d + (j - 1)``. All logarithms are
base 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ._policy import EigenSolverError, InputError, NumericPolicy, PhysicsError, get_policy

__all__ = [
    "DensityMatrix",
    "Spectrum",
    "CorrelationProfile",
    "make_mc_state",
    "make_noise_state",
    "white_noise_state",
    "mix",
    "purity",
    "eigenvalues",
    "von_neumann_entropy",
    "shannon_entropy",
    "partial_trace",
    "is_maximally_correlated",
    "correlation_profile",
    "correlated_block",
    "majorizes",
    "random_density_matrix",
    "random_mc_state",
    "random_unitary",
    "xlog2x",
]


def xlog2x(p) -> np.ndarray | float:
    """Elementwise ``p * log2(p)`` with ``0 * log2(0) = 0``."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out if out.ndim else float(out)


def shannon_entropy(p) -> float:
    """Shannon entropy in bits of a probability vector."""
    return float(-np.sum(xlog2x(np.asarray(p, dtype=float))))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _infer_d(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise InputError(f"matrix size {n} is not a perfect square d**2")
    return d


def _check_operator(m: np.ndarray, policy: NumericPolicy, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InputError(f"{what} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{what} has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > policy.herm_tol:
        raise InputError(f"{what} is not Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1.0) > policy.trace_tol:
        raise InputError(f"{what} has trace {tr!r}, expected 1")
    try:
        lo = np.linalg.eigvalsh(m)[0]
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    if lo < -policy.psd_tol:
        raise InputError(f"{what} is not positive semidefinite (min eigenvalue {lo:.3e})")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated ``d**2 x d**2`` density operator of a ``d x d`` bipartite system.

    ``entries`` is stored read-only, so instances can be shared freely.
    """

    entries: np.ndarray
    dim_subsystem: int = field(default=0)

    def __init__(self, entries, dim_subsystem: int | None = None, *, policy: NumericPolicy | None = None):
        m = np.asarray(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"density matrix must be square, got shape {m.shape}")
        d = _infer_d(m.shape[0]) if dim_subsystem is None else int(dim_subsystem)
        if d < 1 or d * d != m.shape[0]:
            raise InputError(f"shape {m.shape} does not match subsystem dimension {d}")
        _check_operator(m, get_policy(policy), "density matrix")
        object.__setattr__(self, "entries", _frozen(m))
        object.__setattr__(self, "dim_subsystem", d)

    @property
    def d(self) -> int:
        return self.dim_subsystem

    @property
    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def __repr__(self) -> str:
        return f"DensityMatrix(d={self.d})"

    def to_json(self) -> dict:
        flat = self.entries.reshape(-1)
        return {"d": self.d, "entries": [[float(z.real), float(z.imag)] for z in flat]}

    @classmethod
    def from_json(cls, obj: dict, policy: NumericPolicy | None = None) -> "DensityMatrix":
        try:
            d = int(obj["d"])
            pairs = np.asarray(obj["entries"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed density matrix JSON: {exc}") from exc
        if pairs.shape != (d**4, 2):
            raise InputError(f"expected {d**4} [re, im] pairs, got array of shape {pairs.shape}")
        m = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(d * d, d * d)
        return cls(m, d, policy=policy)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in non-increasing order."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, dtype=float)))

    def __len__(self) -> int:
        return len(self.values)

    def rank(self, tol: float = 1e-9) -> int:
        return int(np.count_nonzero(self.values > tol))


@dataclass(frozen=True)
class CorrelationProfile:
    """Correlated diagonal ``zeta``, uncorrelated diagonal ``lambda_offdiag`` and their mass ``q``."""

    zeta: np.ndarray
    lambda_offdiag: np.ndarray
    q: float

    def __post_init__(self):
        object.__setattr__(self, "zeta", _frozen(self.zeta))
        object.__setattr__(self, "lambda_offdiag", _frozen(self.lambda_offdiag))


def _correlated_indices(d: int) -> np.ndarray:
    return np.arange(d) * (d + 1)


def _uncorrelated_indices(d: int) -> np.ndarray:
    # lexicographic (i, j), i != j
    return np.array([i * d + j for i in range(d) for j in range(d) if i != j], dtype=int)


def make_mc_state(alpha, *, policy: NumericPolicy | None = None) -> DensityMatrix:
    """Embed a ``d x d`` density matrix ``alpha`` as ``sum_uv alpha_uv |uu><vv|``."""
    policy = get_policy(policy)
    a = np.atleast_2d(np.asarray(alpha, dtype=complex))
    _check_operator(a, policy, "alpha")
    d = a.shape[0]
    rho = np.zeros((d * d, d * d), dtype=complex)
    idx = _correlated_indices(d)
    rho[np.ix_(idx, idx)] = a
    return DensityMatrix(rho, d, policy=policy)


def _noise_dim(n: int) -> int:
    d = int(round((1 + np.sqrt(1 + 4 * n)) / 2))
    if d * (d - 1) != n or d < 2:
        raise InputError(f"noise vector length {n} is not d(d-1) for any d >= 2")
    return d


def make_noise_state(lambda_offdiag, *, policy: NumericPolicy | None = None) -> DensityMatrix:
    """Diagonal state with weight ``lambda_ij`` on each uncorrelated ket ``|i, j>``, ``i != j``."""
    policy = get_policy(policy)
    lam = np.asarray(lambda_offdiag, dtype=float).reshape(-1)
    d = _noise_dim(lam.size)
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise InputError("noise weights must be finite and nonnegative")
    if abs(lam.sum() - 1.0) > policy.prob_tol:
        raise InputError(f"noise weights sum to {lam.sum()!r}, expected 1")
    diag = np.zeros(d * d)
    diag[_uncorrelated_indices(d)] = lam
    return DensityMatrix(np.diag(diag).astype(complex), d, policy=policy)


def white_noise_state(d: int) -> DensityMatrix:
    n = d * (d - 1)
    return make_noise_state(np.full(n, 1.0 / n))


def mix(rho_mc: DensityMatrix, rho_noise: DensityMatrix, gamma: float,
        *, policy: NumericPolicy | None = None) -> DensityMatrix:
    """Noisy maximally correlated state ``gamma * rho_mc + (1 - gamma) * rho_noise``."""
    policy = get_policy(policy)
    if rho_mc.d != rho_noise.d:
        raise InputError(f"dimension mismatch: {rho_mc.d} vs {rho_noise.d}")
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"gamma={gamma!r} outside [0, 1]")
    if not is_maximally_correlated(rho_mc, policy.psd_tol):
        raise PhysicsError("rho_mc is not maximally correlated")
    n = rho_noise.entries
    if np.max(np.abs(n - np.diag(np.diag(n)))) > policy.herm_tol or \
            np.max(np.abs(n.diagonal()[_correlated_indices(rho_noise.d)])) > policy.psd_tol:
        raise PhysicsError("rho_noise must be diagonal with no weight on correlated kets")
    if gamma == 1.0:
        return rho_mc
    if gamma == 0.0:
        return rho_noise
    return DensityMatrix(gamma * rho_mc.entries + (1.0 - gamma) * n, rho_mc.d, policy=policy)


def purity(rho: DensityMatrix) -> float:
    """``Tr(rho^2)``; for Hermitian ``rho`` this is the squared Frobenius norm."""
    m = rho.entries
    return float(np.vdot(m, m).real)


def eigenvalues(rho: DensityMatrix, *, policy: NumericPolicy | None = None) -> Spectrum:
    policy = get_policy(policy)
    try:
        w = np.linalg.eigvalsh(rho.entries)[::-1]
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    if w[-1] < -policy.psd_tol:
        raise PhysicsError(f"negative eigenvalue {w[-1]:.3e} beyond tolerance")
    w = np.clip(w, 0.0, None)
    return Spectrum(w / w.sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits, computed from the cleaned spectrum."""
    return max(shannon_entropy(eigenvalues(rho).values), 0.0)


def partial_trace(rho: DensityMatrix, subsystem: Literal["A", "B"] = "A") -> np.ndarray:
    """Reduced state of ``subsystem``; the other party is traced out."""
    d = rho.d
    t = rho.entries.reshape(d, d, d, d)  # (iA, iB, jA, jB)
    if subsystem == "A":
        return np.einsum("ikjk->ij", t)
    if subsystem == "B":
        return np.einsum("kikj->ij", t)
    raise InputError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def is_maximally_correlated(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    if tol <= 0:
        raise InputError("tol must be positive")
    d = rho.d
    if d == 1:
        return True
    return bool(np.all(rho.diagonal[_uncorrelated_indices(d)] <= tol))


def correlation_profile(rho: DensityMatrix) -> CorrelationProfile:
    d = rho.d
    diag = np.clip(rho.diagonal, 0.0, None)
    zeta = diag[_correlated_indices(d)]
    lam = diag[_uncorrelated_indices(d)] if d > 1 else np.zeros(0)
    return CorrelationProfile(zeta, lam, float(lam.sum()))


def correlated_block(rho: DensityMatrix) -> np.ndarray:
    """The ``d x d`` block ``<jj|rho|kk>``."""
    idx = _correlated_indices(rho.d)
    return rho.entries[np.ix_(idx, idx)].copy()


def majorizes(a, b, tol: float = 1e-9) -> bool:
    """True iff ``a`` majorizes ``b`` after zero-padding to a common length."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    n = max(a.size, b.size)
    a = np.pad(np.sort(a)[::-1], (0, n - a.size))
    b = np.pad(np.sort(b)[::-1], (0, n - b.size))
    ca, cb = np.cumsum(a), np.cumsum(b)
    if abs(ca[-1] - cb[-1]) > tol:
        return False
    return bool(np.all(ca >= cb - tol))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _ginibre_state(n: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return m / np.trace(m).real


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed state ``G G^dagger / Tr`` on the full ``d**2`` space."""
    n = d * d
    return DensityMatrix(_ginibre_state(n, n if rank is None else rank, rng), d)


def random_mc_state(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Maximally correlated state whose correlated block is Ginibre-distributed."""
    return make_mc_state(_ginibre_state(d, d if rank is None else rank, rng))
