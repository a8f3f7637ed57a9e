"""Classical, hybrid and full-quantum spline fits of an activation function.

All three strategies fit the min-max scaled target ``f*`` on the same block
system and map results back to the original scale before scoring.

* classical: exact 2x2 inverses.
* hybrid: HHL directions per interval, magnitudes recovered classically,
  evaluation on a classical device.
* full: HHL directions and success-probability norms, each grid point
  evaluated by a swap test.
"""

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import spearmanr

from .activations import ACTIVATIONS, as_activation, fit_scaler
from .exceptions import InvalidInputError, NumericalError
from .function_eval import estimate_dot
from .hhl import HHLConfig, solve_hhl
from .spline_model import (
    SplineConfig,
    SplineFit,
    build_block_system,
    evaluate_spline,
    solve_blocks_classical,
)

NORM_MODES = ("anchor", "success-probability")
CURVE_COLUMNS = ("x", "interval", "f_true", "f_classic", "f_hybrid", "f_full", "fidelity")
METRIC_KEYS = ("rss_classic", "rss_hybrid", "rss_full", "average_fidelity")


def worker_count():
    """Worker pool bound from ``QSPLINE_THREADS`` (default: 1)."""
    raw = os.environ.get("QSPLINE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInputError(f"QSPLINE_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _map(func, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def rss(predictions, truths):
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(truths, dtype=float)
    if p.shape != t.shape:
        raise InvalidInputError(f"length mismatch: {p.shape} vs {t.shape}")
    return float(np.sum((p - t) ** 2))


@dataclass
class QuantumFit:
    """HHL-based fit of a block system in the scaled space.

    ``coefficients`` carry the anchored (or probability-scaled) lines used
    by the hybrid path; ``directions`` and ``norms`` are what the full path
    feeds into the swap test.
    """

    fit: SplineFit
    directions: np.ndarray
    norms: np.ndarray
    success_probabilities: np.ndarray


def anchor_scale(S, y, direction):
    """Scale ``c`` minimizing ``||S (c d) - y||`` over both interval endpoints."""
    sd = S @ direction
    denom = float(sd @ sd)
    return float(sd @ y) / denom if denom > 0 else 0.0


def solve_blocks_hhl(system, hhl=None, norm_mode="anchor"):
    hhl = hhl or HHLConfig()
    if norm_mode not in NORM_MODES:
        raise InvalidInputError(f"norm_mode must be one of {NORM_MODES}")

    def one(k):
        S, y = system.blocks[k], system.rhs[k]
        if not np.any(y):
            # zero line solves the system exactly; nothing to encode
            return np.zeros(2), np.array([1.0, 0.0]), 0.0, 1.0, 1.0
        try:
            res = solve_hhl(S, y, hhl)
        except NumericalError as exc:
            raise type(exc)(str(exc), interval=k) from exc
        d = res.solution_direction
        c = anchor_scale(S, y, d)
        if norm_mode == "anchor":
            beta = c * d
        else:
            beta = np.copysign(res.recovered_norm, c) * d
        return beta, d, res.recovered_norm, res.fidelity, res.success_probability

    parts = _map(one, range(len(system)))
    beta, dirs, norms, fids, probs = (np.array(v) for v in zip(*parts))
    source = "hhl-ideal" if hhl.backend == "ideal" else "hhl-circuit"
    return QuantumFit(SplineFit(beta, source, fids), dirs, norms, probs)


def evaluate_full(qfit, system, x, sign_repair=False, shots=None, rng=None):
    """Swap-test estimates of the scaled spline at every point of ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    idx = system.locate(x)
    out = np.empty_like(x)
    for i, (xi, k) in enumerate(zip(x, idx)):
        beta = qfit.norms[k] * qfit.directions[k]
        value = estimate_dot(beta, xi, shots=shots, rng=rng)
        if sign_repair:
            anchored = qfit.fit.coefficients[k] @ (1.0, xi)
            value = np.copysign(value, anchored)
        out[i] = value
    return out


def fidelity_error_correlation(fidelities, coef_errors):
    """Spearman rank correlation of ``1 - fidelity`` against squared coefficient error.

    Returns 0.0 when either side is constant (nothing to rank).
    """
    a = 1.0 - np.asarray(fidelities, dtype=float)
    b = np.asarray(coef_errors, dtype=float)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return 0.0
    return float(spearmanr(a, b).statistic)


@dataclass
class PipelineReport:
    activation: str
    rss_classic: float
    rss_hybrid: float
    rss_full: float
    average_fidelity: float
    curve_samples: list = field(default_factory=list, repr=False)
    interval_fidelity: np.ndarray = field(default=None, repr=False)
    coefficient_error: np.ndarray = field(default=None, repr=False)

    @property
    def fidelity_error_rank_correlation(self):
        return fidelity_error_correlation(self.interval_fidelity, self.coefficient_error)

    def metrics(self):
        return {
            "activation": self.activation,
            "rss_classic": self.rss_classic,
            "rss_hybrid": self.rss_hybrid,
            "rss_full": self.rss_full,
            "average_fidelity": self.average_fidelity,
        }


def _prepare(config, kind):
    kind = as_activation(kind)
    scaler = fit_scaler(kind, config.domain)
    system = build_block_system(config, scaler.wrap(kind))
    x = config.eval_grid()
    return kind, scaler, system, x


def run_classical(config=None, kind="sigmoid"):
    """Classical block fit; returns ``(fit, system, scaler, predictions, rss)``."""
    config = config or SplineConfig()
    kind, scaler, system, x = _prepare(config, kind)
    fit = solve_blocks_classical(system)
    pred = scaler.invert(evaluate_spline(fit, system, x))
    return fit, system, scaler, pred, rss(pred, kind(x))


def run_hybrid(config=None, kind="sigmoid", hhl=None, norm_mode="anchor"):
    """HHL coefficients, classical evaluation; returns ``(qfit, system, scaler, predictions, rss)``."""
    config = config or SplineConfig()
    kind, scaler, system, x = _prepare(config, kind)
    qfit = solve_blocks_hhl(system, hhl, norm_mode)
    pred = scaler.invert(evaluate_spline(qfit.fit, system, x))
    return qfit, system, scaler, pred, rss(pred, kind(x))


def run_full(config=None, kind="sigmoid", hhl=None, sign_repair=False, shots=None, seed=None, qfit=None):
    """HHL coefficients, swap-test evaluation; returns ``(qfit, system, scaler, predictions, rss)``."""
    config = config or SplineConfig()
    kind, scaler, system, x = _prepare(config, kind)
    if qfit is None:
        qfit = solve_blocks_hhl(system, hhl)
    rng = np.random.default_rng(seed) if shots else None
    pred = scaler.invert(evaluate_full(qfit, system, x, sign_repair, shots, rng))
    return qfit, system, scaler, pred, rss(pred, kind(x))


def run_pipeline(config=None, kind="sigmoid", hhl=None, norm_mode="anchor",
                 sign_repair=False, shots=None, seed=None):
    """All three strategies for one activation."""
    config = config or SplineConfig()
    kind = as_activation(kind)
    x = config.eval_grid()
    truth = kind(x)
    classic_fit, system, _, f_classic, rss_classic = run_classical(config, kind)
    qfit, _, _, f_hybrid, rss_hybrid = run_hybrid(config, kind, hhl, norm_mode)
    _, _, _, f_full, rss_full = run_full(
        config, kind, hhl, sign_repair=sign_repair, shots=shots, seed=seed, qfit=qfit
    )
    idx = system.locate(x)
    fid = qfit.fit.per_interval_fidelity
    samples = [
        (float(xi), int(k), float(t), float(c), float(h), float(f), float(fid[k]))
        for xi, k, t, c, h, f in zip(x, idx, truth, f_classic, f_hybrid, f_full)
    ]
    coef_err = np.sum((qfit.fit.coefficients - classic_fit.coefficients) ** 2, axis=1)
    return PipelineReport(
        activation=kind.tag,
        rss_classic=rss_classic,
        rss_hybrid=rss_hybrid,
        rss_full=rss_full,
        average_fidelity=qfit.fit.average_fidelity,
        curve_samples=samples,
        interval_fidelity=fid,
        coefficient_error=coef_err,
    )


def reproduce_table(config=None, hhl=None, kinds=ACTIVATIONS, **kwargs):
    """One :class:`PipelineReport` per activation, in the order given."""
    return [run_pipeline(config, k, hhl, **kwargs) for k in kinds]


# serialization


def curves_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for row in report.curve_samples:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def metrics_json(reports):
    rows = [r.metrics() for r in reports]
    return json.dumps(rows if len(rows) != 1 else rows[0], indent=2) + "\n"


def format_table(reports):
    header = f"{'activation':<10} {'rss_classic':>12} {'rss_hybrid':>12} {'rss_full':>12} {'avg_fidelity':>13}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.activation:<10} {r.rss_classic:>12.3e} {r.rss_hybrid:>12.4g} "
            f"{r.rss_full:>12.4g} {r.average_fidelity:>13.3f}"
        )
    return "\n".join(lines) + "\n"
