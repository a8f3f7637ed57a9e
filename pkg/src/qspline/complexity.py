"""Asymptotic cost models for linear-system solvers and their crossover points.

Costs use unit leading constants (configurable) and natural logarithms;
``eps`` enters the conjugate-gradient cost through ``|log eps|``.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError

ALGORITHMS = ("gauss_jordan", "strassen", "coppersmith", "conjugate_gradient", "hhl")

_EXPONENTS = {"gauss_jordan": 3.0, "strassen": 2.8, "coppersmith": 2.37}


@dataclass(frozen=True)
class CostModel:
    algorithm: str
    s: float = 3.0
    kappa: float = 2.0
    eps: float = 0.5
    constant: float = 1.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidInputError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not self.s >= 1:
            raise InvalidInputError("sparsity s must be >= 1")
        if not self.kappa >= 1:
            raise InvalidInputError("condition number kappa must be >= 1")
        if not 0 < self.eps < 1:
            raise InvalidInputError("eps must lie in (0, 1)")
        if not self.constant > 0:
            raise InvalidInputError("leading constant must be positive")

    def __call__(self, n):
        return cost(self, n)


def cost(model, n):
    """Operation count of ``model`` for an ``n x n`` system (scalar or array ``n``)."""
    scalar = np.ndim(n) == 0
    n = np.asarray(n, dtype=float)
    if np.any(n < 2):
        raise InvalidInputError("system size n must be >= 2")
    alg = model.algorithm
    if alg in _EXPONENTS:
        out = n ** _EXPONENTS[alg]
    elif alg == "conjugate_gradient":
        out = model.s * np.sqrt(model.kappa) * n / abs(np.log(model.eps))
    else:
        out = model.s**2 * model.kappa**2 * np.log(n) / model.eps
    out = model.constant * out
    return float(out) if scalar else out


def default_models(s=3.0, kappa=2.0, eps=0.5):
    return [CostModel(a, s, kappa, eps) for a in ALGORITHMS]


def condition_number_penalized(lambda_min, lambda_max, eta):
    """``|lambda_max + eta| / |lambda_min + eta|`` for a ridge-penalized matrix."""
    denom = abs(lambda_min + eta)
    if denom == 0:
        raise InvalidInputError("lambda_min + eta is zero; condition number undefined")
    return abs(lambda_max + eta) / denom


def crossover(model_a, model_b, n_max):
    """Smallest ``n`` from which ``model_a`` stays strictly cheaper than ``model_b`` up to ``n_max``.

    Returns ``None`` when ``model_a`` is not cheaper at ``n_max``.
    """
    if n_max < 2:
        raise InvalidInputError("n_max must be >= 2")
    n = np.arange(2, int(n_max) + 1)
    cheaper = cost(model_a, n) < cost(model_b, n)
    if not cheaper[-1]:
        return None
    losing = np.flatnonzero(~cheaper)
    return int(n[losing[-1] + 1]) if losing.size else 2


def sparsity_band(n, s_range=(1, 10), kappa=2.0, eps=0.5):
    """Min and max HHL cost over integer sparsities in ``s_range`` (kappa fixed)."""
    lo, hi = s_range
    if not 1 <= lo <= hi:
        raise InvalidInputError(f"invalid sparsity band {s_range}")
    costs = np.array([cost(CostModel("hhl", s, kappa, eps), n) for s in range(int(lo), int(hi) + 1)])
    return costs.min(axis=0), costs.max(axis=0)


def emit_curves(models, n_range, sparsity_band_range=None):
    """Long-format rows ``(n, algorithm, cost, band_min, band_max)``.

    Band columns hold the HHL cost envelope over the sparsity band, at the
    condition number and tolerance of the first HHL model (or the defaults);
    they are ``None`` when no band is requested.
    """
    n = np.asarray(list(n_range), dtype=int)
    if n.size == 0:
        raise InvalidInputError("n_range is empty")
    models = list(models)
    band = None
    if sparsity_band_range is not None:
        ref = next((m for m in models if m.algorithm == "hhl"), CostModel("hhl"))
        band = sparsity_band(n, sparsity_band_range, ref.kappa, ref.eps)
    rows = []
    for i, ni in enumerate(n):
        bmin, bmax = (float(band[0][i]), float(band[1][i])) if band is not None else (None, None)
        for m in models:
            rows.append((int(ni), m.algorithm, float(cost(m, ni)), bmin, bmax))
    return rows


def curves_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("n", "algorithm", "cost", "band_min", "band_max"))
    for n, alg, c, bmin, bmax in rows:
        writer.writerow((n, alg, repr(c), "" if bmin is None else repr(bmin), "" if bmax is None else repr(bmax)))
    return buf.getvalue()

