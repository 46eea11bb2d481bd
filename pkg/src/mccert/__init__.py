"""Entanglement certification of maximally correlated states from 2d+1 measurements."""

__version__ = "0.1.0"

from ._policy import (  # noqa: E402
    ClampWarning,
    EigenSolverError,
    InputError,
    MCCertError,
    NumericPolicy,
    PhysicsError,
)
from .certify import (  # noqa: E402
    CertificationInput,
    CertificationReport,
    CountsRecord,
    NoiseModel,
    certify,
    entanglement_dim_lower_bound,
    estimate_params_from_counts,
    mutual_info_lower_bound_mc,
    neg_entropy_lower_bound,
    purity_mc_from_total,
    rank_upper_bound_from_diag,
    ree_exact_mc,
    ree_lower_bound_mc,
    ree_lower_bound_noisy,
)
from .densmat import (  # noqa: E402
    DensityMatrix,
    Spectrum,
    eigenvalues,
    make_mc_state,
    make_noise_state,
    mix,
    purity,
    von_neumann_entropy,
)
from .estimator import MCEntanglementCertifier, PurityBoundTransformer  # noqa: E402

__all__ = [
    "__version__",
    "ClampWarning",
    "EigenSolverError",
    "InputError",
    "MCCertError",
    "NumericPolicy",
    "PhysicsError",
    "CertificationInput",
    "CertificationReport",
    "CountsRecord",
    "NoiseModel",
    "certify",
    "entanglement_dim_lower_bound",
    "estimate_params_from_counts",
    "mutual_info_lower_bound_mc",
    "neg_entropy_lower_bound",
    "purity_mc_from_total",
    "rank_upper_bound_from_diag",
    "ree_exact_mc",
    "ree_lower_bound_mc",
    "ree_lower_bound_noisy",
    "DensityMatrix",
    "Spectrum",
    "eigenvalues",
    "make_mc_state",
    "make_noise_state",
    "mix",
    "purity",
    "von_neumann_entropy",
    "MCEntanglementCertifier",
    "PurityBoundTransformer",
]
