"""scikit-learn style front ends.

``QCAnalyzer`` maps rows of coordinates to a fixed feature vector per point;
``ECScanner`` maps rows of ``(mu, gamma)`` to effective energy-condition
flags. Both follow the usual fit / transform / predict contract so they drop
into pipelines and ``get_params`` / ``set_params`` work unchanged.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .curvature import curvature_at, norm
from .diagnostics import diagnose
from .fluid import check_kappa, fluid_from_qc
from .frg import EC_NAMES, effective_from_qc, ec_flags_eff, get_model, qc_scalar_curvature
from .metric import MetricSpec, builtin, load_metric
from .qc import DEFAULT_TOL, detect_qc

QC_FEATURES = (
    "R", "ricci_norm", "weyl_rel", "is_qc", "gamma", "mu",
    "riemann_residual_rel", "p", "sigma",
    "codazzi_dev", "ricci_symmetric_dev", "semisymmetry_dev",
)


def resolve_metric(metric, params=None):
    """Accept a ``MetricSpec``, metric-file text, or a builtin name (optionally ``builtin:name``)."""
    if isinstance(metric, MetricSpec):
        return metric
    if not isinstance(metric, str):
        raise TypeError(f"metric must be a MetricSpec or a string, got {type(metric).__name__}")
    name = metric[len("builtin:"):] if metric.startswith("builtin:") else metric
    if "\n" in metric or ":" in name:
        return load_metric(metric)
    return builtin(name, params)


def check_points(X):
    """Validate an ``(n, 4)`` array of finite coordinates."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 4:
        raise ValueError(f"expected 4 coordinates per row, got {X.shape[1]}")
    return X


def check_scalars(X):
    """Validate an ``(n, 2)`` array of ``(mu, gamma)`` rows."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected (mu, gamma) rows, got {X.shape[1]} columns")
    return X


class QCAnalyzer(BaseEstimator, TransformerMixin):
    """Curvature, QC detection, fluid and diagnostics at each row of coordinates."""

    def __init__(self, metric="minkowski", params=None, kappa=1.0, tol=DEFAULT_TOL):
        self.metric = metric
        self.params = params
        self.kappa = kappa
        self.tol = tol

    def fit(self, X=None, y=None):
        self.spec_ = resolve_metric(self.metric, self.params)
        self.kappa_ = check_kappa(self.kappa)
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        self.feature_names_out_ = np.array(QC_FEATURES, dtype=object)
        self.n_features_in_ = 4
        return self

    def analyze_point(self, x):
        check_is_fitted(self, "spec_")
        bundle = curvature_at(self.spec_, x)
        report = detect_qc(bundle, self.tol)
        fluid = fluid_from_qc(report.gamma, report.mu, self.kappa_)
        diag = diagnose(bundle, report, self.spec_, self.tol)
        return bundle, report, fluid, diag

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = check_points(X)
        rows = []
        for x in X:
            bundle, report, fluid, diag = self.analyze_point(x)
            rows.append([
                bundle.scalar, norm(bundle.ricci), report.weyl_norm_rel, float(report.is_qc),
                report.gamma, report.mu, report.riemann_residual_rel, fluid.p, fluid.sigma,
                diag.codazzi_dev, diag.ricci_symmetric_dev, diag.semisymmetry_dev,
            ])
        return np.array(rows, dtype=float).reshape(len(X), len(QC_FEATURES))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "spec_")
        return self.feature_names_out_


class ECScanner(BaseEstimator, TransformerMixin):
    """Effective ``(sigma_eff, p_eff)`` and energy-condition flags for ``(mu, gamma)`` rows."""

    def __init__(self, model="A", terms=64, kappa=1.0):
        self.model = model
        self.terms = terms
        self.kappa = kappa

    def fit(self, X=None, y=None):
        self.model_ = get_model(self.model, self.terms)
        self.kappa_ = check_kappa(self.kappa)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        """``(n, 3)`` array of ``R, sigma_eff, p_eff``; NaN rows outside the model domain."""
        check_is_fitted(self, "model_")
        X = check_scalars(X)
        out = np.full((len(X), 3), np.nan)
        for n, (mu, gamma) in enumerate(X):
            R = qc_scalar_curvature(gamma, mu)
            out[n, 0] = R
            if self.model_.contains(R):
                out[n, 1:] = effective_from_qc(gamma, mu, self.model_, self.kappa_)
        return out

    def predict(self, X):
        """Boolean ``(n, 4)`` array of NEC, WEC, DEC, SEC; all False outside the domain."""
        values = self.transform(X)
        flags = np.zeros((len(values), len(EC_NAMES)), dtype=bool)
        for n, (_, s, p) in enumerate(values):
            if np.isfinite(s):
                f = ec_flags_eff(s, p)
                flags[n] = [f[name] for name in EC_NAMES]
        return flags
