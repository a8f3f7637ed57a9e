"""Classical spline machinery.

Two representations live here:

* the truncated power basis ``1, x, ..., x^(M-1), (x - knot)_+^(M-1)`` with a
  ridge-penalized least-squares fit, and
* the block form used by the quantum path, where each interval between
  consecutive knots carries its own line ``beta_0 + beta_1 x`` obtained from
  a 2x2 system through the two endpoint values.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import DomainError, InvalidInputError, SingularSystemError

SOURCES = ("classical", "hhl-circuit", "hhl-ideal")


def uniform_knots(n_knots, domain=(-1.0, 1.0)):
    """``n_knots`` knots starting at the left domain edge with spacing ``(b - a) / n_knots``.

    The last knot sits one spacing short of ``b``; the final interval is
    extended to cover ``[knot_K, b]``. On ``(-1, 1)`` with 20 knots this puts
    a knot exactly at 0.
    """
    a, b = map(float, domain)
    h = (b - a) / n_knots
    return tuple(a + h * k for k in range(n_knots))


@dataclass(frozen=True)
class SplineConfig:
    """Knots, polynomial order, ridge weight and evaluation grid for a fit."""

    knots: tuple = field(default_factory=lambda: uniform_knots(20))
    order: int = 2
    penalty: float = 0.0
    domain: tuple = (-1.0, 1.0)
    n_eval: int = 100

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        domain = tuple(float(d) for d in self.domain)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "domain", domain)
        if len(knots) < 1:
            raise InvalidInputError("need at least one knot")
        if not np.all(np.isfinite(knots)):
            raise InvalidInputError("knots must be finite")
        if np.any(np.diff(knots) <= 0):
            raise InvalidInputError("knots must be strictly increasing")
        if len(domain) != 2 or not domain[0] < domain[1]:
            raise InvalidInputError(f"invalid domain {self.domain}")
        if knots[0] < domain[0] or knots[-1] > domain[1]:
            raise InvalidInputError("all knots must lie inside the domain")
        if int(self.order) != self.order or self.order < 1:
            raise InvalidInputError("order must be a positive integer")
        if not (np.isfinite(self.penalty) and self.penalty >= 0):
            raise InvalidInputError("penalty must be a nonnegative real")
        if int(self.n_eval) != self.n_eval or self.n_eval < 1:
            raise InvalidInputError("n_eval must be a positive integer")

    @classmethod
    def uniform(cls, n_knots=20, domain=(-1.0, 1.0), **kwargs):
        return cls(knots=uniform_knots(n_knots, domain), domain=domain, **kwargs)

    @property
    def n_knots(self):
        return len(self.knots)

    def eval_grid(self):
        """``n_eval`` equally spaced points strictly inside the domain."""
        a, b = self.domain
        return np.linspace(a, b, self.n_eval + 2)[1:-1]


class BasisExpansion:
    """Truncated power basis of order ``M``: ``M`` monomials then one term per knot."""

    def __init__(self, order, knots):
        self.order = int(order)
        self.knots = tuple(knots)
        self.functions = [self._monomial(j) for j in range(self.order)] + [
            self._truncated(k) for k in self.knots
        ]

    def _monomial(self, power):
        return lambda x: np.asarray(x, dtype=float) ** power

    def _truncated(self, knot):
        p = self.order - 1

        def h(x):
            d = np.asarray(x, dtype=float) - knot
            return np.where(d > 0, np.maximum(d, 0.0) ** p, 0.0)

        return h

    def __len__(self):
        return len(self.functions)

    def __getitem__(self, j):
        return self.functions[j]

    def __call__(self, x):
        """Design matrix with one row per point of ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.column_stack([h(x) for h in self.functions])


def build_basis(config):
    return BasisExpansion(config.order, config.knots)


@dataclass(frozen=True)
class DesignMatrix:
    entries: np.ndarray
    penalty_matrix: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.entries, dtype=float)
        omega = np.asarray(self.penalty_matrix, dtype=float)
        if n.ndim != 2:
            raise InvalidInputError("design entries must be a matrix")
        if omega.shape != (n.shape[1], n.shape[1]):
            raise InvalidInputError("penalty matrix must be square over the columns")
        if np.any(omega != np.diag(np.diag(omega))) or np.any(np.diag(omega) < 0):
            raise InvalidInputError("penalty matrix must be diagonal and nonnegative")
        object.__setattr__(self, "entries", n)
        object.__setattr__(self, "penalty_matrix", omega)


def design_matrix(basis, x, penalty_diag=None):
    """Evaluate ``basis`` at ``x``.

    By default only the knot terms are penalized; the polynomial part has
    zero curvature weight.
    """
    n = basis(x)
    if penalty_diag is None:
        penalty_diag = [0.0] * basis.order + [1.0] * len(basis.knots)
    return DesignMatrix(n, np.diag(np.asarray(penalty_diag, dtype=float)))


def fit_penalized(design, y, penalty):
    """Ridge-penalized least squares ``(N^T N + eta Omega)^-1 N^T y``."""
    n, omega = design.entries, design.penalty_matrix
    y = np.asarray(y, dtype=float).ravel()
    if y.size != n.shape[0]:
        raise InvalidInputError(f"y has {y.size} entries for {n.shape[0]} design rows")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("y has non-finite entries")
    if penalty < 0:
        raise InvalidInputError("penalty must be nonnegative")
    normal = n.T @ n + penalty * omega
    if np.linalg.matrix_rank(normal) < normal.shape[0]:
        raise SingularSystemError("normal-equations matrix is singular; add a penalty")
    return scipy.linalg.solve(normal, n.T @ y, assume_a="pos")


@dataclass(frozen=True)
class BlockSystem:
    """Per-interval 2x2 systems ``S_k beta_k = y_k``.

    ``blocks[k] = [[1, a], [1, b]]`` and ``rhs[k] = (f(a), f(b))`` for the
    interval ``intervals[k] = (a, b)``.
    """

    blocks: np.ndarray
    rhs: np.ndarray
    intervals: np.ndarray
    domain: tuple = (-1.0, 1.0)

    def __len__(self):
        return len(self.blocks)

    def assemble(self):
        """Dense block-diagonal matrix and stacked right-hand side."""
        return scipy.linalg.block_diag(*self.blocks), self.rhs.reshape(-1)

    def locate(self, x):
        """Interval index for each point of ``x``.

        Knots belong to the interval on their right; the last interval also
        owns everything up to the right domain edge, the first everything
        down to the left edge.
        """
        x = np.asarray(x, dtype=float)
        a, b = self.domain
        if np.any(~np.isfinite(x)) or np.any(x < a) or np.any(x > b):
            raise DomainError(f"evaluation point outside domain [{a}, {b}]")
        idx = np.searchsorted(self.intervals[:, 0], x, side="right") - 1
        return np.clip(idx, 0, len(self) - 1)


def build_block_system(config, f):
    if config.order != 2:
        raise InvalidInputError("block systems are only defined for linear pieces (order 2)")
    if config.n_knots < 2:
        raise InvalidInputError("need at least two knots for one interval")
    knots = np.asarray(config.knots)
    values = np.asarray([float(f(k)) for k in knots])
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise InvalidInputError(f"target is not finite at knot {knots[bad[0]]}")
    left, right = knots[:-1], knots[1:]
    blocks = np.stack([np.ones_like(left), left, np.ones_like(right), right], axis=1)
    return BlockSystem(
        blocks=blocks.reshape(-1, 2, 2),
        rhs=np.column_stack([values[:-1], values[1:]]),
        intervals=np.column_stack([left, right]),
        domain=config.domain,
    )


@dataclass
class SplineFit:
    coefficients: np.ndarray
    source: str = "classical"
    per_interval_fidelity: np.ndarray = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1, 2)
        if self.source not in SOURCES:
            raise InvalidInputError(f"unknown fit source {self.source!r}")
        if self.per_interval_fidelity is not None:
            fid = np.asarray(self.per_interval_fidelity, dtype=float)
            if fid.shape != (len(self.coefficients),):
                raise InvalidInputError("one fidelity per interval required")
            if np.any(fid < 0) or np.any(fid > 1):
                raise InvalidInputError("fidelities must lie in [0, 1]")
            self.per_interval_fidelity = fid

    @property
    def average_fidelity(self):
        if self.per_interval_fidelity is None:
            return None
        return float(np.mean(self.per_interval_fidelity))


def solve_block(S, y, interval=None):
    """Direct 2x2 inverse; the reference the quantum solves are checked against."""
    (a, b), (c, d) = S
    det = a * d - b * c
    if abs(det) <= 1e-14 * max(1.0, np.max(np.abs(S))) ** 2:
        raise SingularSystemError("block is singular", interval=interval)
    return np.array([d * y[0] - b * y[1], a * y[1] - c * y[0]]) / det


def solve_blocks_classical(system):
    coef = [solve_block(S, y, interval=k) for k, (S, y) in enumerate(zip(system.blocks, system.rhs))]
    return SplineFit(np.array(coef), source="classical")


def evaluate_spline(fit, system, x):
    """Piecewise-linear value ``beta_k . (1, x)`` on the interval owning ``x``."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    idx = system.locate(x)
    beta = fit.coefficients[idx]
    out = beta[:, 0] + beta[:, 1] * x
    return float(out[0]) if scalar else out
