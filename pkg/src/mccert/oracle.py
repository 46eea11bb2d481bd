"""Independent checks of the purity-constrained entropy minimum.

Nothing in this module calls :mod:`mccert.certify`; the closed-form bound is
checked against

* enumeration of the two-valued stationary points (``s_a`` copies of a large
  eigenvalue, ``d - s_a`` copies of a small one),
* an exhaustive sweep over the feasible set for ``d`` in {3, 4},
* random feasible points for larger ``d``,
* the unique solution for ``d = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._policy import InputError

__all__ = ["Candidate", "candidate", "candidates", "best_candidate", "grid_oracle_min",
           "sampled_oracle_min", "exact_d2"]


def _plogp(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)


@dataclass(frozen=True)
class Candidate:
    s_a: int
    phi_a: float
    phi_x: float
    objective: float
    physical: bool


def _check_dp(d: int, P: float) -> None:
    if int(d) != d or d < 3:
        raise InputError(f"candidate enumeration needs an integer d >= 3, got {d!r}")
    if not 1.0 / d < P <= 1.0:
        raise InputError(f"P={P!r} outside (1/d, 1]")


def candidate(d: int, P: float, s_a: int) -> Candidate:
    """Stationary point with ``s_a`` eigenvalues equal to ``phi_a`` and the rest to ``phi_x``.

    Candidates with ``phi_x < 0`` are non-physical; in the regularised
    objective their contribution diverges as the regulariser vanishes, so
    their objective is ``inf``.
    """
    _check_dp(d, P)
    if int(s_a) != s_a or not 1 <= s_a <= d - 1:
        raise InputError(f"s_a={s_a!r} outside 1..{d - 1}")
    r = d - s_a
    excess = d * P - 1.0
    phi_a = (1.0 + math.sqrt(r / s_a * excess)) / d
    phi_x = (1.0 - math.sqrt(s_a / r * excess)) / d
    if phi_x < 0:
        return Candidate(s_a, phi_a, phi_x, math.inf, False)
    obj = s_a * float(_plogp(np.array(phi_a))) + r * float(_plogp(np.array(phi_x)))
    return Candidate(s_a, phi_a, phi_x, obj, True)


def candidates(d: int, P: float) -> list[Candidate]:
    return [candidate(d, P, s) for s in range(1, d)]


def best_candidate(d: int, P: float) -> Candidate:
    """Physical candidate with the smallest objective (ties go to the smaller ``s_a``)."""
    phys = [c for c in candidates(d, P) if c.physical]
    return min(phys, key=lambda c: (c.objective, c.s_a))


def _feasible_interval(n: int, s: float, r: float) -> tuple[float, float] | None:
    # Range of x1 for n numbers with sum s and sum of squares r.
    # Remaining n-1 numbers must satisfy (n-1) * (r - x1**2) >= (s - x1)**2.
    disc = n * r - s * s
    if disc < -1e-15:
        return None
    half = math.sqrt(max(disc, 0.0) * (n - 1)) / n
    return s / n - half, s / n + half


def _axis(lo: float, hi: float, resolution: float) -> np.ndarray:
    lo, hi = max(lo, 0.0), hi
    if hi < lo:
        return np.empty(0)
    k = max(int(math.ceil((hi - lo) / resolution)), 1)
    return np.linspace(lo, hi, k + 1)


def _pair(s, r):
    # Two numbers with sum s and sum of squares r.
    root = np.sqrt(np.clip(2.0 * r - s * s, 0.0, None))
    return (s + root) / 2.0, (s - root) / 2.0


def _tail_min(heads: np.ndarray, s: np.ndarray, r: np.ndarray, tol: float = 1e-12) -> float:
    # heads: leading coordinates, one column per point; (s, r) the last pair's sum and sum of squares
    u, v = _pair(s, r)
    ok = (2.0 * r - s * s >= -tol) & (v >= -tol) & np.all(heads >= -tol, axis=0)
    if not np.any(ok):
        return math.inf
    obj = _plogp(heads).sum(axis=0) + _plogp(u) + _plogp(np.clip(v, 0.0, None))
    return float(np.min(obj[ok]))


def grid_oracle_min(d: int, P: float, resolution: float = 1e-3) -> float:
    """Brute-force minimum of ``sum(phi * log2 phi)`` on the feasible set.

    For ``d = 3`` the first coordinate is swept over its feasible interval and
    the remaining pair solved from the two constraints; for ``d = 4`` the
    first two coordinates are swept. Only nonnegative points are kept.
    """
    if d not in (3, 4):
        raise InputError("grid oracle supports d = 3 or 4; use sampled_oracle_min beyond")
    if not 0 < resolution <= 1e-3:
        raise InputError("resolution must lie in (0, 1e-3]")
    iv = _feasible_interval(d, 1.0, P)
    if iv is None or P > 1.0 + 1e-12:
        raise InputError(f"P={P!r} is infeasible for d={d}")
    x1 = _axis(*iv, resolution)
    if d == 3:
        best = _tail_min(x1[None, :], 1.0 - x1, P - x1 * x1)
    else:
        best = math.inf
        for a in x1:
            s1, r1 = 1.0 - a, P - a * a
            iv2 = _feasible_interval(3, s1, r1)
            if iv2 is None:
                continue
            x2 = _axis(*iv2, resolution)
            if x2.size:
                heads = np.stack([np.full_like(x2, a), x2])
                best = min(best, _tail_min(heads, s1 - x2, r1 - x2 * x2))
    if not math.isfinite(best):
        raise InputError(f"no feasible grid point for d={d}, P={P!r}")
    return best


def sampled_oracle_min(d: int, P: float, n_samples: int = 100_000,
                       rng: np.random.Generator | None = None) -> float:
    """Minimum of the objective over random nonnegative feasible points.

    The feasible set is the sphere of radius ``sqrt(P - 1/d)`` about the
    uniform vector inside the sum-one hyperplane. Half of the directions are
    isotropic; the other half point from the centre towards sparse Dirichlet
    draws, which keeps near-vertex regions populated at high purity. Points
    with negative entries are rejected. This only ever overestimates the true
    minimum.
    """
    if d < 2 or not 1.0 / d - 1e-12 <= P <= 1.0 + 1e-12:
        raise InputError(f"P={P!r} outside [1/d, 1] for d={d}")
    if P >= 1.0 - 1e-12:
        return 0.0  # feasible set is the vertices only
    rng = np.random.default_rng() if rng is None else rng
    radius = math.sqrt(max(P - 1.0 / d, 0.0))
    half = n_samples // 2
    u = rng.standard_normal((n_samples - half, d))
    conc = np.exp(rng.uniform(math.log(0.02), 0.0, size=(half, 1)))
    v = rng.gamma(np.broadcast_to(conc, (half, d)))
    v /= v.sum(axis=1, keepdims=True)
    u = np.vstack([u, v])
    u -= u.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    u = u[norms[:, 0] > 1e-12] / norms[norms[:, 0] > 1e-12]
    pts = 1.0 / d + radius * u
    ok = np.all(pts >= -1e-15, axis=1)
    if not np.any(ok):
        raise InputError(f"no feasible sample for d={d}, P={P!r}; increase n_samples")
    pts = np.clip(pts[ok], 0.0, None)
    return float(np.min(_plogp(pts).sum(axis=1)))


def exact_d2(P: float) -> tuple[float, float]:
    """The two eigenvalues of any ``d = 2`` spectrum with purity ``P``."""
    if not 0.5 <= P <= 1.0:
        raise InputError(f"P={P!r} outside [0.5, 1]")
    h = 0.5 * math.sqrt(2.0 * P - 1.0)
    return 0.5 + h, 0.5 - h
