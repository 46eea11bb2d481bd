"""scikit-learn style front end.

:class:`MCEntanglementCertifier` is fitted on a coincidence-count matrix and
then maps measured purities to certification quantities.
:class:`PurityBoundTransformer` is stateless and maps purities of the
maximally correlated component straight to bounds.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._policy import ClampWarning, NumericPolicy
from .certify import (
    CertificationInput,
    certify,
    entanglement_dim_lower_bound,
    model_from_coincidences,
    mutual_info_lower_bound_mc,
    neg_entropy_lower_bound,
    ree_lower_bound_mc,
)

__all__ = ["MCEntanglementCertifier", "PurityBoundTransformer"]

REPORT_FEATURES = ("purity_mc", "neg_entropy_bound", "ree_lower_bound", "d_star",
                   "mutual_info_lower_bound")


def _purity_column(X) -> np.ndarray:
    X = check_array(np.asarray(X, dtype=float).reshape(-1, 1) if np.ndim(X) <= 1 else X,
                    ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single purity column, got {X.shape[1]} columns")
    return X[:, 0]


class MCEntanglementCertifier(TransformerMixin, BaseEstimator):
    """Certify entanglement of a (noisy) maximally correlated source.

    Parameters
    ----------
    noise_model : {"auto", "none", "white", "incoherent"}
        How off-diagonal coincidences are interpreted.
    mc_threshold : float
        Uncorrelated fraction at or below which ``auto`` means noise-free.
    clamp_tol : float
        How far a purity may stray outside its admissible interval before it
        is rejected instead of clamped.

    Attributes
    ----------
    d_ : int
    zeta_ : ndarray of shape (d,)
    gamma_ : float
    q_ : float
    noise_model_ : NoiseModel
    """

    def __init__(self, noise_model="auto", mc_threshold=1e-3, clamp_tol=0.05):
        self.noise_model = noise_model
        self.mc_threshold = mc_threshold
        self.clamp_tol = clamp_tol

    def _policy(self) -> NumericPolicy:
        return NumericPolicy(mc_threshold=self.mc_threshold, clamp_tol=self.clamp_tol)

    def fit(self, X, y=None):
        """Estimate correlations from a ``d x d`` coincidence-count matrix ``X``."""
        X = check_array(X, dtype=float, ensure_min_samples=1)
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"coincidence matrix must be square, got {X.shape}")
        if np.any(X < 0):
            raise ValueError("counts must be nonnegative")
        zeta, gamma, q, model = model_from_coincidences(X, self.noise_model, policy=self._policy())
        self.d_ = X.shape[0]
        self.zeta_ = np.asarray(zeta)
        self.gamma_ = gamma
        self.q_ = q
        self.noise_model_ = model
        return self

    def report(self, purity_total: float):
        """Full :class:`~mccert.certify.CertificationReport` for one measured purity."""
        check_is_fitted(self, "zeta_")
        inp = CertificationInput(self.d_, tuple(self.zeta_), self.gamma_, self.noise_model_,
                                 float(purity_total), self.q_)
        return certify(inp, policy=self._policy())

    def transform(self, X):
        """Rows of (purity_mc, neg_entropy_bound, ree_lower_bound, d_star, mutual_info_lower_bound)."""
        check_is_fitted(self, "zeta_")
        rows = []
        for p in _purity_column(X):
            r = self.report(p)
            rows.append([getattr(r, f) for f in REPORT_FEATURES])
        return np.asarray(rows, dtype=float).reshape(-1, len(REPORT_FEATURES))

    def predict(self, X):
        """REE lower bound for each measured total purity."""
        return self.transform(X)[:, REPORT_FEATURES.index("ree_lower_bound")]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(REPORT_FEATURES, dtype=object)


class PurityBoundTransformer(TransformerMixin, BaseEstimator):
    """Map purities of the maximally correlated component to a bound.

    ``output`` selects ``"ree"`` (REE lower bound), ``"dstar"`` (entangled
    dimension), ``"neg_entropy"`` or ``"mutual_info"``. ``zeta=None`` means
    uniform correlations over ``d`` outcomes.
    """

    _outputs = ("ree", "dstar", "neg_entropy", "mutual_info")

    def __init__(self, d=2, zeta=None, output="ree", clamp_tol=0.05):
        self.d = d
        self.zeta = zeta
        self.output = output
        self.clamp_tol = clamp_tol

    def fit(self, X=None, y=None):
        if self.output not in self._outputs:
            raise ValueError(f"output must be one of {self._outputs}, got {self.output!r}")
        if int(self.d) != self.d or self.d < 2:
            raise ValueError("d must be an integer >= 2")
        zeta = np.full(self.d, 1.0 / self.d) if self.zeta is None else np.asarray(self.zeta, float)
        if zeta.shape != (self.d,):
            raise ValueError("zeta must have length d")
        self.zeta_ = zeta
        return self

    def _one(self, p: float) -> float:
        if self.output == "neg_entropy":
            return neg_entropy_lower_bound(self.d, p, clamp_tol=self.clamp_tol)
        if self.output == "mutual_info":
            return mutual_info_lower_bound_mc(self.zeta_, p, clamp_tol=self.clamp_tol)
        ree = ree_lower_bound_mc(self.zeta_, p, clamp_tol=self.clamp_tol)
        if self.output == "dstar":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ClampWarning)
                return float(entanglement_dim_lower_bound(ree))
        return ree

    def transform(self, X):
        check_is_fitted(self, "zeta_")
        return np.array([[self._one(p)] for p in _purity_column(X)], dtype=float).reshape(-1, 1)

    def get_feature_names_out(self, input_features=None):
        return np.asarray([self.output], dtype=object)
