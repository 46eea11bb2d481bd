"""JSON/CSV file formats used by the command line.

Counts file (``schema_version`` 1)::

    {"schema_version": 1, "d": 2,
     "coincidences": [[n11, n12], [n21, n22]],
     "parity": {"even": 123, "odd": 4},
     "metadata": {"source": "..."}}

State spec (``schema_version`` 1)::

    {"schema_version": 1,
     "alpha": [[a11, a12], [a21, a22]],   # reals or [re, im] pairs
     "gamma": 0.9,                          # optional, default 1
     "noise": "white"}                      # or a list of d(d-1) weights, or null
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ._policy import InputError
from .certify import CountsRecord
from .densmat import DensityMatrix, make_mc_state, make_noise_state, mix, white_noise_state

SCHEMA_VERSION = 1


def _read_json(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"{path}: unsupported schema_version {version!r}")
    return obj


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def counts_to_json(rec: CountsRecord) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "d": rec.d,
        "coincidences": rec.coincidences.tolist(),
        "parity": {"even": rec.even, "odd": rec.odd},
        "metadata": dict(rec.metadata),
    }


def counts_from_json(obj: dict) -> CountsRecord:
    try:
        d = int(obj["d"])
        raw = obj["coincidences"]
        parity = obj.get("parity", {})
        even, odd = parity.get("even", 0), parity.get("odd", 0)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed counts record: {exc}") from exc
    for v in (even, odd):
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError("parity counts must be integers")
    try:
        c = np.array(raw)
    except ValueError as exc:
        raise InputError(f"ragged coincidence matrix: {exc}") from exc
    if c.shape != (d, d) or c.dtype.kind not in "iu":
        raise InputError(f"coincidences must be a {d} x {d} integer matrix")
    meta = obj.get("metadata", {})
    if not isinstance(meta, dict):
        raise InputError("metadata must be an object")
    return CountsRecord(c, even, odd, {str(k): str(v) for k, v in meta.items()})


def load_counts(path) -> CountsRecord:
    return counts_from_json(_read_json(path))


def save_counts(rec: CountsRecord, path) -> None:
    Path(path).write_text(dumps(counts_to_json(rec)), encoding="utf-8")


def counts_sha256(rec: CountsRecord) -> str:
    return hashlib.sha256(dumps(counts_to_json(rec)).encode()).hexdigest()


def _complex_matrix(raw) -> np.ndarray:
    a = np.asarray(raw, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    if a.ndim == 2:
        return a.astype(complex)
    raise InputError("alpha must be a square matrix of reals or [re, im] pairs")


def state_from_spec(obj: dict) -> tuple[DensityMatrix, DensityMatrix, float]:
    """Return ``(rho, rho_mc, gamma)`` described by a state spec object."""
    try:
        alpha = _complex_matrix(obj["alpha"])
        gamma = float(obj.get("gamma", 1.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed state spec: {exc}") from exc
    rho_mc = make_mc_state(alpha)
    noise = obj.get("noise")
    if gamma == 1.0 and noise is None:
        return rho_mc, rho_mc, 1.0
    d = rho_mc.d
    if noise == "white":
        rho_noise = white_noise_state(d)
    elif isinstance(noise, list):
        rho_noise = make_noise_state(noise)
    else:
        raise InputError('noise must be "white", a list of d(d-1) weights, or null')
    return mix(rho_mc, rho_noise, gamma), rho_mc, gamma


def load_state_spec(path) -> tuple[DensityMatrix, DensityMatrix, float]:
    return state_from_spec(_read_json(path))
