"""scikit-learn compatible wrappers around the spline fits."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .activations import Scaler
from .exceptions import DomainError, InvalidInputError
from .hhl import BACKENDS, HHLConfig
from .pipeline import NORM_MODES, evaluate_full, solve_blocks_hhl
from .spline_model import (
    SplineConfig,
    build_block_system,
    evaluate_spline,
    solve_blocks_classical,
)

MODES = ("classical", "hybrid", "full")


def _single_feature(X):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise InvalidInputError(f"expected a single feature, got {X.shape[1]}")
    return X[:, 0]


class ActivationScaler(TransformerMixin, BaseEstimator):
    """Min-max scale one column into [0, 1]; ``inverse_transform`` undoes it."""

    def fit(self, X, y=None):
        x = _single_feature(X)
        self.scaler_ = Scaler(float(x.min()), float(x.max()))
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "scaler_")
        return self.scaler_.apply(_single_feature(X)).reshape(-1, 1)

    def inverse_transform(self, X):
        check_is_fitted(self, "scaler_")
        return self.scaler_.invert(_single_feature(X)).reshape(-1, 1)


class QSplineRegressor(RegressorMixin, BaseEstimator):
    """Piecewise-linear spline whose per-interval lines come from HHL.

    Knot ordinates are read off the training samples by linear
    interpolation, so training on samples that include the knots gives an
    interpolating spline. Targets are min-max scaled into [0, 1] for the
    quantum modes and mapped back on prediction.

    Parameters
    ----------
    n_knots : int
        Number of equally spaced knots starting at the left domain edge.
    domain : tuple of float
        Closed input range; predictions outside it raise ``DomainError``.
    mode : {"classical", "hybrid", "full"}
        ``classical`` solves each 2x2 block exactly. ``hybrid`` uses HHL
        coefficients with classical evaluation. ``full`` evaluates every
        point with a swap test.
    backend : {"circuit", "ideal"}
    clock_qubits : int
        Phase-estimation register size for the circuit backend.
    norm_mode : {"anchor", "success-probability"}
        How HHL directions get their magnitude in hybrid mode.
    sign_repair : bool
        Restore the sign lost by the swap test in full mode.
    """

    def __init__(self, n_knots=20, domain=(-1.0, 1.0), mode="hybrid", backend="circuit",
                 clock_qubits=5, norm_mode="anchor", sign_repair=False):
        self.n_knots = n_knots
        self.domain = domain
        self.mode = mode
        self.backend = backend
        self.clock_qubits = clock_qubits
        self.norm_mode = norm_mode
        self.sign_repair = sign_repair

    def _validate_params(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}")
        if self.backend not in BACKENDS:
            raise InvalidInputError(f"backend must be one of {BACKENDS}")
        if self.norm_mode not in NORM_MODES:
            raise InvalidInputError(f"norm_mode must be one of {NORM_MODES}")

    def _check_domain(self, x):
        a, b = self.domain
        if np.any(x < a) or np.any(x > b):
            raise DomainError(f"inputs outside domain [{a}, {b}]")

    def fit(self, X, y):
        self._validate_params()
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        if X.shape[1] != 1:
            raise InvalidInputError(f"expected a single feature, got {X.shape[1]}")
        x = X[:, 0]
        self._check_domain(x)
        self.config_ = SplineConfig.uniform(self.n_knots, tuple(self.domain))
        self.scaler_ = Scaler(float(y.min()), float(y.max()))
        order = np.argsort(x, kind="stable")
        xs, ys = x[order], self.scaler_.apply(y[order])
        self.system_ = build_block_system(self.config_, lambda k: np.interp(k, xs, ys))
        if self.mode == "classical":
            self.fit_ = solve_blocks_classical(self.system_)
            self.quantum_fit_ = None
        else:
            hhl = HHLConfig(clock_qubits=self.clock_qubits, backend=self.backend)
            self.quantum_fit_ = solve_blocks_hhl(self.system_, hhl, self.norm_mode)
            self.fit_ = self.quantum_fit_.fit
        self.coef_ = self.fit_.coefficients
        self.fidelity_ = self.fit_.per_interval_fidelity
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        x = _single_feature(X)
        self._check_domain(x)
        if self.mode == "full":
            scaled = evaluate_full(self.quantum_fit_, self.system_, x, self.sign_repair)
        else:
            scaled = evaluate_spline(self.fit_, self.system_, x)
        return self.scaler_.invert(scaled)

    def fit_function(self, func):
        """Fit directly to a callable sampled at the knots."""
        config = SplineConfig.uniform(self.n_knots, tuple(self.domain))
        knots = np.asarray(config.knots)
        return self.fit(knots.reshape(-1, 1), np.asarray(func(knots), dtype=float))

