"""Lower bounds on the relative entropy of entanglement of maximally correlated states.

Everything downstream of the measurements lives here: the purity-constrained
entropy bound, its noise-free and noisy forms, the purity conversion that
strips white/incoherent noise, parameter estimation from raw counts, and the
corollaries (entangled dimension, mutual information, rank-K bound).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from ._policy import ClampWarning, InputError, NumericPolicy, PhysicsError, get_policy
from .densmat import DensityMatrix, correlation_profile, eigenvalues, is_maximally_correlated, xlog2x

__all__ = [
    "NoiseModel",
    "CountsRecord",
    "CertificationInput",
    "CertificationReport",
    "neg_entropy_lower_bound",
    "ree_lower_bound_mc",
    "ree_exact_mc",
    "ree_lower_bound_noisy",
    "purity_mc_from_total",
    "estimate_params_from_counts",
    "model_from_coincidences",
    "entanglement_dim_lower_bound",
    "mutual_info_lower_bound_mc",
    "rank_upper_bound_from_diag",
    "certify",
    "bootstrap",
]

NoiseKind = Literal["none", "white", "incoherent"]


@dataclass(frozen=True)
class NoiseModel:
    """How the uncorrelated part of the state is modelled.

    ``kind`` is ``"none"`` (noise-free), ``"white"`` (uniform weight on every
    uncorrelated ket) or ``"incoherent"`` (measured weights ``lam``).
    """

    kind: NoiseKind = "none"
    lam: tuple[float, ...] | None = None

    @classmethod
    def noise_free(cls) -> "NoiseModel":
        return cls("none")

    @classmethod
    def white(cls) -> "NoiseModel":
        return cls("white")

    @classmethod
    def incoherent(cls, lam) -> "NoiseModel":
        lam = np.asarray(lam, dtype=float).reshape(-1)
        if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-9:
            raise InputError("incoherent noise weights must be a probability vector")
        return cls("incoherent", tuple(float(x) for x in lam))

    def sum_squares(self, d: int) -> float:
        if self.kind == "none":
            return 0.0
        if self.kind == "white":
            return 1.0 / (d * (d - 1))
        lam = np.asarray(self.lam)
        if lam.size != d * (d - 1):
            raise InputError(f"incoherent noise has {lam.size} weights, expected {d * (d - 1)}")
        return float(np.sum(lam**2))


@dataclass
class CountsRecord:
    """Raw measurement record.

    ``coincidences[i, j]`` counts joint outcome (A = i, B = j) in the
    computational basis; ``even``/``odd`` are the parity tallies of the
    two-copy purity measurement.
    """

    coincidences: np.ndarray
    even: int = 0
    odd: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coincidences)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise InputError(f"coincidences must be a square d x d matrix, got shape {c.shape}")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.isfinite(c)) or np.any(c != np.round(c)):
                raise InputError("coincidence counts must be integers")
            c = c.astype(np.int64)
        if np.any(c < 0) or self.even < 0 or self.odd < 0:
            raise InputError("counts must be nonnegative")
        if int(self.even) != self.even or int(self.odd) != self.odd:
            raise InputError("parity counts must be integers")
        self.coincidences = c.astype(np.int64)
        self.even, self.odd = int(self.even), int(self.odd)

    @property
    def d(self) -> int:
        return self.coincidences.shape[0]

    @property
    def parity_shots(self) -> int:
        return self.even + self.odd

    def parity_estimate(self) -> float:
        """Purity estimator ``(even - odd) / shots``."""
        if self.parity_shots == 0:
            raise InputError("no parity counts recorded")
        return (self.even - self.odd) / self.parity_shots


@dataclass(frozen=True)
class CertificationInput:
    d: int
    zeta: tuple[float, ...]
    gamma: float
    noise_model: NoiseModel
    purity_total: float
    q: float = 0.0

    def __post_init__(self):
        z = np.asarray(self.zeta, dtype=float)
        if z.size != self.d or np.any(z < 0) or abs(z.sum() - 1.0) > 1e-9:
            raise InputError("zeta must be a length-d probability vector")
        if not 0.0 <= self.gamma <= 1.0:
            raise InputError(f"gamma={self.gamma!r} outside [0, 1]")
        if self.noise_model.kind == "none" and self.gamma != 1.0:
            raise InputError("a noise-free model requires gamma == 1")
        if not 0.0 < self.purity_total <= 1.0:
            raise PhysicsError(f"measured purity {self.purity_total!r} outside (0, 1]")


@dataclass
class CertificationReport:
    purity_mc: float
    neg_entropy_bound: float
    ree_lower_bound: float
    d_star: int
    mutual_info_lower_bound: float
    warnings: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _warn(msg: str) -> None:
    warnings.warn(msg, ClampWarning, stacklevel=3)


def _clamp_purity(P: float, lo: float, clamp_tol: float, what: str = "purity") -> float:
    if lo - clamp_tol <= P < lo:
        if lo - P > 1e-12:
            _warn(f"{what} {P:.6g} below {lo:.6g}; clamped")
        return lo
    if 1.0 < P <= 1.0 + clamp_tol:
        if P - 1.0 > 1e-12:
            _warn(f"{what} {P:.6g} above 1; clamped")
        return 1.0
    if not lo <= P <= 1.0:
        raise PhysicsError(f"{what} {P!r} outside [{lo:.6g}, 1] beyond clamp tolerance {clamp_tol}")
    return P


def _check_prob(zeta, name: str = "zeta") -> np.ndarray:
    z = np.asarray(zeta, dtype=float).reshape(-1)
    if np.any(z < 0) or not np.all(np.isfinite(z)) or abs(z.sum() - 1.0) > 1e-9:
        raise InputError(f"{name} must be a nonnegative vector summing to 1")
    return z


def neg_entropy_lower_bound(K: int, P: float, *, clamp_tol: float | None = None) -> float:
    """Smallest ``sum(phi * log2 phi)`` over ``K`` eigenvalues with ``sum(phi**2) == P``.

    The minimiser has one large eigenvalue ``phi_a`` and ``K - 1`` equal small
    ones. Purities up to ``clamp_tol`` outside ``[1/K, 1]`` are clamped with a
    :class:`ClampWarning`.
    """
    if int(K) != K or K < 1:
        raise InputError(f"K must be a positive integer, got {K!r}")
    K = int(K)
    clamp_tol = get_policy().clamp_tol if clamp_tol is None else clamp_tol
    P = _clamp_purity(float(P), 1.0 / K, clamp_tol)
    if K == 1:
        return 0.0
    spread = max(K * P - 1.0, 0.0) * (K - 1)
    phi_a = min((1.0 + math.sqrt(spread)) / K, 1.0)
    rest = 1.0 - phi_a
    tail = rest * math.log2(rest / (K - 1)) if rest > 0 else 0.0
    return float(xlog2x(phi_a)) + tail


def ree_lower_bound_mc(zeta, P_mc: float, *, clamp_tol: float | None = None) -> float:
    z = _check_prob(zeta)
    if z.size < 2:
        raise InputError("need d >= 2")
    return neg_entropy_lower_bound(z.size, P_mc, clamp_tol=clamp_tol) - float(np.sum(xlog2x(z)))


def ree_exact_mc(rho_mc: DensityMatrix, tol: float = 1e-10) -> float:
    """Exact REE of a maximally correlated state (closest separable state is ``diag(zeta)``)."""
    if not is_maximally_correlated(rho_mc, tol):
        raise PhysicsError("state is not maximally correlated")
    phi = eigenvalues(rho_mc).values
    zeta = correlation_profile(rho_mc).zeta
    return float(np.sum(xlog2x(phi)) - np.sum(xlog2x(zeta)))


def _binary_term(gamma: float) -> float:
    return float(xlog2x(gamma)) + float(xlog2x(1.0 - gamma))


def ree_lower_bound_noisy(zeta, gamma: float, P_mc: float, *, clamp_tol: float | None = None) -> float:
    """Bound for ``gamma * rho_mc + (1 - gamma) * rho_noise`` via Donald's identity."""
    if not 0.0 < gamma <= 1.0:
        raise PhysicsError(f"gamma={gamma!r} must lie in (0, 1]")
    inner = ree_lower_bound_mc(zeta, P_mc, clamp_tol=clamp_tol)
    if gamma == 1.0:
        return inner
    return gamma * inner + _binary_term(gamma)


def purity_mc_from_total(P_total: float, gamma: float, noise_model: NoiseModel, d: int,
                         *, clamp_tol: float | None = None) -> float:
    """Purity of the maximally correlated component given the purity of the mixture."""
    if not 0.0 < gamma <= 1.0:
        raise PhysicsError(f"gamma={gamma!r} must lie in (0, 1]")
    if not 0.0 < P_total <= 1.0:
        raise PhysicsError(f"total purity {P_total!r} outside (0, 1]")
    clamp_tol = get_policy().clamp_tol if clamp_tol is None else clamp_tol
    if gamma == 1.0:
        P_mc = P_total
    else:
        P_mc = (P_total - (1.0 - gamma) ** 2 * noise_model.sum_squares(d)) / gamma**2
    return _clamp_purity(P_mc, 1.0 / d, clamp_tol, "purity of the correlated component")


def model_from_coincidences(coincidences, noise_model: str = "auto",
                            *, policy: NumericPolicy | None = None):
    """Estimate ``(zeta, gamma, q, NoiseModel)`` from a ``d x d`` coincidence matrix.

    ``noise_model`` is one of ``auto``, ``none``, ``white``, ``incoherent``;
    ``auto`` declares the state noise-free when the uncorrelated fraction is
    at most ``policy.mc_threshold`` and white-noise otherwise.
    """
    policy = get_policy(policy)
    if noise_model not in ("auto", "none", "white", "incoherent"):
        raise InputError(f"unknown noise model {noise_model!r}")
    c = np.asarray(coincidences, dtype=float)
    d = c.shape[0]
    total = c.sum()
    if total <= 0:
        raise InputError("no coincidence counts recorded")
    diag = np.diag(c)
    correlated = diag.sum()
    if correlated <= 0:
        raise PhysicsError("no correlated coincidences: gamma = 0, nothing to certify")
    off = c[~np.eye(d, dtype=bool)]  # row-major == lexicographic (i, j), i != j
    q = float(off.sum() / total)
    zeta = tuple(float(x) for x in diag / correlated)

    kind = noise_model
    if kind == "auto":
        kind = "none" if q <= policy.mc_threshold else "white"
    if kind != "none" and off.sum() == 0:
        kind = "none"
    if kind == "none":
        if q > 0:
            _warn(f"uncorrelated fraction q={q:.3g} treated as zero (noise-free model)")
        return zeta, 1.0, q, NoiseModel.noise_free()
    model = NoiseModel.white() if kind == "white" else NoiseModel.incoherent(off / off.sum())
    return zeta, float(correlated / total), q, model


def estimate_params_from_counts(counts: CountsRecord, noise_model: str = "auto",
                                *, policy: NumericPolicy | None = None) -> CertificationInput:
    """Plain-normalisation estimates of every bound input from a counts record.

    ``zeta`` is the correlated diagonal normalised by the correlated total,
    ``gamma`` the correlated fraction of all coincidences and the measured
    purity the parity estimator ``(even - odd) / shots``.
    """
    zeta, gamma, q, model = model_from_coincidences(counts.coincidences, noise_model, policy=policy)
    purity_total = counts.parity_estimate()
    if not 0.0 < purity_total <= 1.0:
        raise PhysicsError(f"parity estimate {purity_total!r} is not a valid purity")
    return CertificationInput(counts.d, zeta, gamma, model, purity_total, q)


def entanglement_dim_lower_bound(D: float, *, tol: float | None = None) -> int:
    """``ceil(2**D)``, the minimum number of entangled dimensions.

    ``tol`` absorbs float noise so that ``D = log2(d)`` maps to ``d``.
    """
    tol = get_policy().ceil_tol if tol is None else tol
    if D < 0:
        _warn(f"negative REE bound {D:.3g}; dimension bound is vacuous")
        D = 0.0
    return max(1, math.ceil(2.0**D - tol))


def mutual_info_lower_bound_mc(zeta, P_mc: float, *, clamp_tol: float | None = None) -> float:
    z = _check_prob(zeta)
    return -2.0 * float(np.sum(xlog2x(z))) + neg_entropy_lower_bound(z.size, P_mc, clamp_tol=clamp_tol)


def rank_upper_bound_from_diag(diag_probs, tol: float = 1e-9) -> int:
    """Number of computational-basis outcomes above ``tol``; bounds the rank."""
    p = np.asarray(diag_probs, dtype=float).reshape(-1)
    if np.any(p < 0):
        raise InputError("diagonal probabilities must be nonnegative")
    return int(np.count_nonzero(p > tol))


def certify(inp: CertificationInput, *, policy: NumericPolicy | None = None) -> CertificationReport:
    """Run the bound chain for one set of estimated parameters.

    Clamping and threshold notices raised along the way are collected into
    ``report.warnings`` instead of being emitted.
    """
    policy = get_policy(policy)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ClampWarning)
        P_mc = purity_mc_from_total(inp.purity_total, inp.gamma, inp.noise_model, inp.d,
                                    clamp_tol=policy.clamp_tol)
        neg = neg_entropy_lower_bound(inp.d, P_mc, clamp_tol=policy.clamp_tol)
        if inp.noise_model.kind == "none":
            ree = ree_lower_bound_mc(inp.zeta, P_mc, clamp_tol=policy.clamp_tol)
        else:
            ree = ree_lower_bound_noisy(inp.zeta, inp.gamma, P_mc, clamp_tol=policy.clamp_tol)
        d_star = entanglement_dim_lower_bound(ree, tol=policy.ceil_tol)
        mi = mutual_info_lower_bound_mc(inp.zeta, P_mc, clamp_tol=policy.clamp_tol)
    notices = [{"kind": "clamp", "message": str(w.message)} for w in caught
               if issubclass(w.category, ClampWarning)]
    if inp.noise_model.kind != "none":
        notices.append({"kind": "model",
                        "message": "correlated-diagonal mass attributed entirely to the "
                                   f"maximally correlated component ({inp.noise_model.kind} noise)"})
    return CertificationReport(P_mc, neg, ree, d_star, mi, notices)


def bootstrap(counts: CountsRecord, resamples: int, seed: int = 42, noise_model: str = "auto",
              *, policy: NumericPolicy | None = None) -> dict:
    """Nonparametric bootstrap of the REE bound.

    Coincidences are resampled as one multinomial and the parity tallies as a
    binomial, both at the observed totals. Replicates that fail validation are
    counted but excluded.
    """
    if resamples <= 0:
        raise InputError("resamples must be positive")
    rng = np.random.default_rng(seed)
    c = counts.coincidences
    n = int(c.sum())
    p = c.reshape(-1) / n
    shots = counts.parity_shots
    p_even = counts.even / shots
    values, failed = [], 0
    for _ in range(resamples):
        rc = rng.multinomial(n, p).reshape(c.shape)
        even = int(rng.binomial(shots, p_even))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ClampWarning)
                inp = estimate_params_from_counts(CountsRecord(rc, even, shots - even), noise_model,
                                                  policy=policy)
                values.append(certify(inp, policy=policy).ree_lower_bound)
        except (InputError, PhysicsError):
            failed += 1
    v = np.asarray(values)
    out = {"resamples": resamples, "failed": failed}
    if v.size:
        out.update(ree_lower_bound_std=float(v.std(ddof=1)) if v.size > 1 else 0.0,
                   ree_lower_bound_p2_5=float(np.percentile(v, 2.5)),
                   ree_lower_bound_p97_5=float(np.percentile(v, 97.5)))
    return out
