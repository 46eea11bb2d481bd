"""Numeric tolerances and error types shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

ENV_PREFIX = "MCCERT_"


class MCCertError(Exception):
    """Base class for all errors raised by mccert."""


class InputError(MCCertError, ValueError):
    """Malformed or out-of-contract input (bad shapes, negative counts, ...)."""


class PhysicsError(MCCertError, ValueError):
    """Input that parses but is physically inconsistent with the model."""


class EigenSolverError(MCCertError, RuntimeError):
    """The Hermitian eigensolver failed to converge."""


class ClampWarning(UserWarning):
    """A value was pushed back inside its admissible interval."""


@dataclass(frozen=True)
class NumericPolicy:
    herm_tol: float = 1e-10
    trace_tol: float = 1e-10
    psd_tol: float = 1e-10
    prob_tol: float = 1e-9
    clamp_tol: float = 0.05
    mc_threshold: float = 1e-3
    ceil_tol: float = 1e-9

    @classmethod
    def from_env(cls, environ=None) -> "NumericPolicy":
        """Build a policy, overriding defaults with ``MCCERT_<FIELD>`` variables."""
        environ = os.environ if environ is None else environ
        kwargs = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            try:
                kwargs[f.name] = float(raw)
            except ValueError as exc:
                raise InputError(f"{ENV_PREFIX + f.name.upper()}={raw!r} is not a number") from exc
        return cls(**kwargs)


DEFAULT_POLICY = NumericPolicy()


def get_policy(policy: NumericPolicy | None = None) -> NumericPolicy:
    return DEFAULT_POLICY if policy is None else policy
