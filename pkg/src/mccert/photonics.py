"""Two-copy parity measurement of purity, and shot-level measurement simulators.

A maximally correlated state maps onto two-photon states: the correlated ket
``|k, k>`` is one photon in mode ``+k`` and one in mode ``-k``. Two copies
meet on a 50:50 beamsplitter and the photon-number parity of one output port
is recorded (even -> +1, odd -> -1).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ._policy import InputError, PhysicsError
from .densmat import DensityMatrix, correlated_block, correlation_profile, purity

__all__ = [
    "TwoPhotonState",
    "FockVector",
    "parity_expectation_pure",
    "parity_expectation_mixed",
    "beamsplitter_output",
    "fock_brute_force_parity",
    "simulate_parity_counts",
    "simulate_coincidence_counts",
]

MAX_FOCK_DIM = 12


@dataclass(frozen=True)
class TwoPhotonState:
    """``sum_m amplitudes[m] a^dag_{+m} a^dag_{-m} |vac>``, modes ``m = 1..d``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size == 0 or abs(np.vdot(a, a).real - 1.0) > 1e-10:
            raise InputError("two-photon amplitudes must be a unit vector")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def d(self) -> int:
        return self.amplitudes.size


# A mode is (port, signed mode index); a Fock key is a sorted tuple of
# (port, mode, count) with count >= 1.
Mode = tuple[str, int]
FockKey = tuple[tuple[str, int, int], ...]


@dataclass
class FockVector:
    """Sparse state in the occupation-number basis."""

    amplitudes: dict[FockKey, complex] = field(default_factory=dict)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def photon_number(self) -> set[int]:
        return {sum(n for _, _, n in key) for key in self.amplitudes}

    def port_count(self, key: FockKey, port: str) -> int:
        return sum(n for p, _, n in key if p == port)


def _check_pair(j: TwoPhotonState, k: TwoPhotonState) -> None:
    if j.d != k.d:
        raise InputError(f"dimension mismatch: {j.d} vs {k.d}")


def parity_expectation_pure(j: TwoPhotonState, k: TwoPhotonState) -> float:
    """Closed form ``|<phi_k|phi_j>|^2``."""
    _check_pair(j, k)
    return float(abs(np.vdot(k.amplitudes, j.amplitudes)) ** 2)


def _support_block(rho, what: str) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        leak = correlation_profile(rho).q
        if leak > 1e-9:
            raise PhysicsError(f"{what} has weight {leak:.3e} outside the correlated subspace")
        return correlated_block(rho)
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{what} must be a DensityMatrix or a square correlated block")
    return m


def parity_expectation_mixed(rho1, rho2) -> float:
    """Expected parity for ``rho1`` in port a and ``rho2`` in port b.

    Either argument may be a :class:`DensityMatrix` supported on the
    correlated subspace or its ``d x d`` correlated block. Computed as
    ``sum_jk psi_j phi_k |<phi_k|psi_j>|^2`` from both eigendecompositions.
    """
    a = _support_block(rho1, "rho1")
    b = _support_block(rho2, "rho2")
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    phi, u = np.linalg.eigh(a)
    psi, v = np.linalg.eigh(b)
    overlap = np.abs(u.conj().T @ v) ** 2  # [k, j] = |<phi_k|psi_j>|^2
    return float(phi @ overlap @ psi)


def _split(port: str) -> list[tuple[str, float]]:
    # a^dag -> (c^dag + d^dag)/sqrt2, b^dag -> (c^dag - d^dag)/sqrt2
    sign = 1.0 if port == "a" else -1.0
    return [("c", 1 / math.sqrt(2)), ("d", sign / math.sqrt(2))]


def beamsplitter_output(j: TwoPhotonState, k: TwoPhotonState) -> FockVector:
    """Four-photon output state for ``j`` entering port a and ``k`` entering port b.

    Products of creation operators are expanded term by term; a monomial with
    ``n`` operators on one mode maps to ``sqrt(n!)`` times the Fock state.
    """
    _check_pair(j, k)
    if j.d > MAX_FOCK_DIM:
        raise InputError(f"brute-force expansion limited to d <= {MAX_FOCK_DIM}")
    monomials: dict[tuple[Mode, ...], complex] = defaultdict(complex)
    for m, n in product(range(1, j.d + 1), repeat=2):
        amp = j.amplitudes[m - 1] * k.amplitudes[n - 1]
        if amp == 0:
            continue
        inputs = [("a", +m), ("a", -m), ("b", +n), ("b", -n)]
        for choice in product(*(_split(p) for p, _ in inputs)):
            coeff = amp
            modes = []
            for (out_port, c), (_, mode) in zip(choice, inputs):
                coeff *= c
                modes.append((out_port, mode))
            monomials[tuple(sorted(modes))] += coeff
    fock: dict[FockKey, complex] = {}
    for modes, coeff in monomials.items():
        occ: dict[Mode, int] = defaultdict(int)
        for md in modes:
            occ[md] += 1
        norm = math.prod(math.sqrt(math.factorial(c)) for c in occ.values())
        key = tuple(sorted((p, md, c) for (p, md), c in occ.items()))
        fock[key] = fock.get(key, 0) + coeff * norm
    return FockVector({key: a for key, a in fock.items() if abs(a) > 1e-15})


def fock_brute_force_parity(j: TwoPhotonState, k: TwoPhotonState) -> float:
    """``P(even) - P(odd)`` from the explicit four-photon output state."""
    out = beamsplitter_output(j, k)
    total = 0.0
    for key, amp in out.amplitudes.items():
        sign = 1.0 if out.port_count(key, "c") % 2 == 0 else -1.0
        total += sign * abs(amp) ** 2
    return total


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def simulate_parity_counts(rho: DensityMatrix, shots: int, seed=None) -> tuple[int, int]:
    """Sample ``shots`` parity outcomes; returns ``(even, odd)``.

    States with weight outside the correlated subspace use the general
    two-copy identity ``<parity> = Tr(rho^2)``.
    """
    if int(shots) != shots or shots <= 0:
        raise InputError("shots must be a positive integer")
    if correlation_profile(rho).q > 1e-9:
        expectation = purity(rho)
    else:
        expectation = parity_expectation_mixed(rho, rho)
    p_even = min(max((1.0 + expectation) / 2.0, 0.0), 1.0)
    even = int(_rng(seed).binomial(int(shots), p_even))
    return even, int(shots) - even


def simulate_coincidence_counts(rho: DensityMatrix, shots: int, seed=None) -> np.ndarray:
    """Multinomial sample of computational-basis outcomes as a ``d x d`` count matrix."""
    if int(shots) != shots or shots <= 0:
        raise InputError("shots must be a positive integer")
    p = np.clip(rho.diagonal, 0.0, None)
    p = p / p.sum()
    return _rng(seed).multinomial(int(shots), p).reshape(rho.d, rho.d)
