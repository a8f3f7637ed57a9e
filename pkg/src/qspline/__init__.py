"""Piecewise-linear splines with HHL-estimated coefficients and swap-test evaluation."""

__version__ = "0.1.0"

from .activations import ACTIVATIONS, ActivationKind, Scaler, fit_scaler
from .complexity import CostModel, condition_number_penalized, cost, crossover, emit_curves
from .estimator import ActivationScaler, QSplineRegressor
from .exceptions import (
    DomainError,
    InvalidInputError,
    NumericalError,
    PostSelectionError,
    PrecisionError,
    QSplineError,
    SingularSystemError,
)
from .hhl import HHLConfig, HHLResult, hermitian_embed, solve_hhl
from .pipeline import PipelineReport, reproduce_table, rss, run_full, run_hybrid, run_pipeline
from .spline_model import (
    BlockSystem,
    SplineConfig,
    SplineFit,
    build_basis,
    build_block_system,
    evaluate_spline,
    fit_penalized,
    solve_blocks_classical,
)
