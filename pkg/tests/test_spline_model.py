import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qspline.activations import evaluate
from qspline.exceptions import DomainError, InvalidInputError, SingularSystemError
from qspline.spline_model import (
    BlockSystem,
    DesignMatrix,
    SplineConfig,
    SplineFit,
    build_basis,
    build_block_system,
    design_matrix,
    evaluate_spline,
    fit_penalized,
    solve_block,
    solve_blocks_classical,
    uniform_knots,
)


def gauss_jordan_solve(a, b):
    """Independent dense oracle: Gauss-Jordan with partial pivoting in plain Python."""
    n = len(a)
    m = [list(map(float, row)) + [float(v)] for row, v in zip(a, b)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col:
                f = m[r][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return [row[-1] for row in m]


class TestConfig:
    def test_default(self):
        cfg = SplineConfig()
        assert cfg.n_knots == 20
        assert cfg.order == 2
        assert cfg.penalty == 0.0
        assert cfg.domain == (-1.0, 1.0)
        assert np.allclose(np.diff(cfg.knots), 0.1)
        assert 0.0 in cfg.knots

    def test_eval_grid_is_open(self):
        x = SplineConfig().eval_grid()
        assert x.size == 100
        assert x.min() > -1 and x.max() < 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"knots": (0.0, 0.0, 1.0)},
            {"knots": (0.5, 0.2)},
            {"knots": (-2.0, 0.0)},
            {"order": 0},
            {"penalty": -1.0},
            {"domain": (1.0, -1.0)},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(InvalidInputError):
            SplineConfig(**kwargs)

    def test_uniform_knots_spacing(self):
        k = uniform_knots(4, (0.0, 1.0))
        assert k == (0.0, 0.25, 0.5, 0.75)


class TestBasis:
    def test_linear_basis_values(self):
        basis = build_basis(SplineConfig(knots=(0.0,), order=2))
        assert len(basis) == 3
        assert basis[0](0.5) == 1.0
        assert basis[1](0.5) == 0.5
        assert basis[2](0.5) == 0.5

    def test_truncation(self):
        basis = build_basis(SplineConfig(knots=(0.0,), order=2))
        assert basis[2](-0.5) == 0.0

    def test_cubic_truncated_power(self):
        basis = build_basis(SplineConfig(knots=(0.2,), order=4))
        assert len(basis) == 5
        assert basis[4](0.5) == pytest.approx(0.027, abs=1e-15)

    def test_design_matrix_shape(self):
        cfg = SplineConfig(knots=(-0.5, 0.0, 0.5), order=3)
        dm = design_matrix(build_basis(cfg), np.linspace(-1, 1, 7))
        assert dm.entries.shape == (7, 6)
        assert np.all(np.diag(dm.penalty_matrix) >= 0)

    @given(st.floats(-1e6, 1e6), st.integers(1, 4))
    def test_entries_finite(self, x, order):
        basis = build_basis(SplineConfig(knots=(-0.3, 0.1), order=order, domain=(-1, 1)))
        assert np.all(np.isfinite(basis(x)))


class TestFitPenalized:
    def test_identity_design(self):
        dm = DesignMatrix(np.eye(2), np.zeros((2, 2)))
        assert np.allclose(fit_penalized(dm, [1, 2], 0.0), [1, 2])

    def test_identity_ridge(self):
        dm = DesignMatrix(np.eye(2), np.eye(2))
        assert np.allclose(fit_penalized(dm, [1, 2], 1.0), [0.5, 1.0])

    def test_matches_gauss_jordan_oracle(self):
        rng = np.random.default_rng(7)
        n = rng.normal(size=(10, 4))
        omega = np.diag(rng.uniform(0, 1, 4))
        y = rng.normal(size=10)
        theta = fit_penalized(DesignMatrix(n, omega), y, 0.1)
        expected = gauss_jordan_solve((n.T @ n + 0.1 * omega).tolist(), (n.T @ y).tolist())
        assert np.allclose(theta, expected, atol=1e-12)

    def test_minimizes_score(self):
        rng = np.random.default_rng(3)
        n, y, eta = rng.normal(size=(12, 3)), rng.normal(size=12), 0.4
        dm = DesignMatrix(n, np.eye(3))
        theta = fit_penalized(dm, y, eta)

        def score(t):
            r = y - n @ t
            return r @ r + eta * t @ t

        for _ in range(20):
            assert score(theta) <= score(theta + 1e-3 * rng.normal(size=3))

    def test_singular_without_penalty(self):
        n = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        with pytest.raises(SingularSystemError):
            fit_penalized(DesignMatrix(n, np.eye(2)), [1, 2, 3], 0.0)
        # a penalty restores solvability
        fit_penalized(DesignMatrix(n, np.eye(2)), [1, 2, 3], 0.5)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_shrinkage_monotone_in_penalty(self, seed):
        rng = np.random.default_rng(seed)
        dm = DesignMatrix(rng.normal(size=(8, 3)), np.eye(3))
        y = rng.normal(size=8)
        norms = [np.linalg.norm(fit_penalized(dm, y, eta)) for eta in (0.0, 0.1, 1.0, 10.0, 100.0)]
        assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


class TestBlockSystem:
    def test_identity_target(self):
        sys_ = build_block_system(SplineConfig(knots=(0.0, 1.0), domain=(0, 1)), lambda x: x)
        assert len(sys_) == 1
        assert np.array_equal(sys_.blocks[0], [[1, 0], [1, 1]])
        assert np.array_equal(sys_.rhs[0], [0, 1])

    def test_constant_target(self):
        sys_ = build_block_system(SplineConfig(knots=(-1.0, 0.0, 1.0)), lambda x: 0.5)
        assert len(sys_) == 2
        assert np.array_equal(sys_.rhs, [[0.5, 0.5], [0.5, 0.5]])

    def test_default_sigmoid_chord_slopes(self):
        cfg = SplineConfig()
        sys_ = build_block_system(cfg, lambda x: evaluate("sigmoid", x))
        assert len(sys_) == 19
        fit = solve_blocks_classical(sys_)
        k = np.asarray(cfg.knots)
        f = evaluate("sigmoid", k)
        # per-interval oracle: chord slope and intercept through both endpoints
        slopes = (f[1:] - f[:-1]) / (k[1:] - k[:-1])
        intercepts = f[:-1] - slopes * k[:-1]
        assert np.allclose(fit.coefficients[:, 1], slopes, atol=1e-12)
        assert np.allclose(fit.coefficients[:, 0], intercepts, atol=1e-12)

    def test_non_finite_target(self):
        with pytest.raises(InvalidInputError):
            build_block_system(SplineConfig(knots=(0.0, 1.0), domain=(0, 1)), lambda x: np.nan)

    def test_requires_linear_order(self):
        with pytest.raises(InvalidInputError):
            build_block_system(SplineConfig(order=3), np.tanh)

    def test_block_diagonal_equivalence(self):
        sys_ = build_block_system(SplineConfig(), np.tanh)
        big, rhs = sys_.assemble()
        assert big.shape == (38, 38)
        dense = np.linalg.solve(big, rhs).reshape(-1, 2)
        assert np.allclose(dense, solve_blocks_classical(sys_).coefficients, atol=1e-10)


class TestClassicalSolve:
    def test_diagonal_line(self):
        assert np.allclose(solve_block(np.array([[1.0, 0.0], [1.0, 1.0]]), [0.0, 1.0]), [0, 1])

    def test_constant_line(self):
        assert np.allclose(solve_block(np.array([[1.0, -1.0], [1.0, 1.0]]), [1.0, 1.0]), [1, 0])

    @given(st.floats(-5, 5), st.floats(0.01, 3), st.floats(-10, 10), st.floats(-10, 10))
    def test_residual(self, a, h, y0, y1):
        S = np.array([[1.0, a], [1.0, a + h]])
        beta = solve_block(S, [y0, y1])
        assert np.max(np.abs(S @ beta - [y0, y1])) <= 1e-12 * max(1.0, abs(y0), abs(y1)) / min(h, 1.0)

    def test_singular_block_names_interval(self):
        sys_ = BlockSystem(
            blocks=np.array([[[1.0, 0.0], [1.0, 1.0]], [[1.0, 0.5], [1.0, 0.5]]]),
            rhs=np.array([[0.0, 1.0], [1.0, 1.0]]),
            intervals=np.array([[0.0, 1.0], [0.5, 0.5]]),
        )
        with pytest.raises(SingularSystemError) as exc:
            solve_blocks_classical(sys_)
        assert exc.value.interval == 1


class TestEvaluate:
    def test_line_midpoint(self):
        sys_ = build_block_system(SplineConfig(knots=(0.0, 1.0), domain=(0, 1)), lambda x: x)
        assert evaluate_spline(solve_blocks_classical(sys_), sys_, 0.5) == pytest.approx(0.5)

    def test_knot_tie_break_uses_right_interval(self):
        cfg = SplineConfig(knots=(0.0, 1.0, 2.0), domain=(0, 2))
        sys_ = build_block_system(cfg, lambda x: x)
        assert sys_.locate(1.0) == 1
        assert sys_.locate(0.0) == 0
        # the last knot closes the last interval
        assert sys_.locate(2.0) == 1

    def test_outside_domain(self):
        sys_ = build_block_system(SplineConfig(), np.tanh)
        fit = solve_blocks_classical(sys_)
        with pytest.raises(DomainError):
            evaluate_spline(fit, sys_, 1.5)

    def test_interpolates_at_knots(self):
        cfg = SplineConfig()
        for f in (np.tanh, lambda x: evaluate("elu", x)):
            sys_ = build_block_system(cfg, f)
            fit = solve_blocks_classical(sys_)
            k = np.asarray(cfg.knots)
            assert np.allclose(evaluate_spline(fit, sys_, k), f(k), atol=1e-12)

    def test_relu_exact(self):
        cfg = SplineConfig()
        sys_ = build_block_system(cfg, lambda x: evaluate("relu", x))
        x = cfg.eval_grid()
        pred = evaluate_spline(solve_blocks_classical(sys_), sys_, x)
        assert np.sum((pred - evaluate("relu", x)) ** 2) <= 1e-20

    def test_fit_rejects_bad_fidelity(self):
        with pytest.raises(InvalidInputError):
            SplineFit(np.zeros((2, 2)), "hhl-circuit", [0.5, 1.5])
