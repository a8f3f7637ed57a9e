import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qspline.exceptions import InvalidInputError, NumericalError
from qspline.function_eval import (
    SwapTestOutcome,
    back_transform,
    encode_input,
    estimate_dot,
    swap_test,
)
from qspline.quantum_sim import StateVector, prepare_amplitude_state


def single_qubit(theta, phi=0.0):
    return StateVector([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


angles = st.floats(0, np.pi)
phases = st.floats(0, 2 * np.pi)


@pytest.mark.parametrize(
    "x, amps, norm",
    [
        (0.0, [1, 0], 1.0),
        (1.0, [2**-0.5, 2**-0.5], 2**0.5),
        (-0.5, [2 / 5**0.5, -1 / 5**0.5], 1.25**0.5),
    ],
)
def test_encode_input(x, amps, norm):
    s, n = encode_input(x)
    assert np.allclose(s.amplitudes, amps)
    assert n == pytest.approx(norm)


def test_encode_rejects_nan():
    with pytest.raises(InvalidInputError):
        encode_input(np.nan)


class TestSwapTest:
    def test_identical(self):
        a = single_qubit(0.4)
        assert swap_test(a, a).p0 == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert swap_test(StateVector([1, 0]), StateVector([0, 1])).p0 == pytest.approx(0.5, abs=1e-12)

    def test_half_overlap(self):
        out = swap_test(StateVector([1, 0]), StateVector([2**-0.5, 2**-0.5]))
        assert out.p0 == pytest.approx(0.75, abs=1e-12)
        assert out.overlap_sq == pytest.approx(0.5, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            swap_test(StateVector.zero(2), StateVector.zero(1))

    @settings(max_examples=60, deadline=None)
    @given(angles, phases, angles, phases)
    def test_matches_overlap_formula(self, t1, p1, t2, p2):
        a, b = single_qubit(t1, p1), single_qubit(t2, p2)
        out = swap_test(a, b)
        expected = 0.5 + abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / 2
        assert out.p0 == pytest.approx(expected, abs=1e-10)
        assert 0.5 - 1e-12 <= out.p0 <= 1 + 1e-12
        assert out.overlap_sq == pytest.approx(2 * out.p0 - 1, abs=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(angles, phases, angles, phases)
    def test_symmetric(self, t1, p1, t2, p2):
        a, b = single_qubit(t1, p1), single_qubit(t2, p2)
        assert swap_test(a, b).p0 == pytest.approx(swap_test(b, a).p0, abs=1e-12)

    def test_shot_sampling_close_to_exact(self):
        a, b = StateVector([1, 0]), StateVector([2**-0.5, 2**-0.5])
        out = swap_test(a, b, shots=20_000, rng=np.random.default_rng(1))
        assert out.p0 == pytest.approx(0.75, abs=0.02)


class TestBackTransform:
    def test_zero_overlap(self):
        assert back_transform(SwapTestOutcome(0.5, 0.0, 0.0), 3.0, 2.0) == 0.0

    def test_unit(self):
        assert back_transform(SwapTestOutcome(1.0, 1.0, 1.0), 1.0, 1.0) == 1.0

    def test_jitter_below_half_clamped(self):
        assert back_transform(SwapTestOutcome(0.5 - 1e-14, 0.0, 0.0), 1.0, 1.0) == 0.0

    def test_rejects_probability_above_one(self):
        with pytest.raises(NumericalError):
            back_transform(SwapTestOutcome(1.1, 1.2, 1.0), 1.0, 1.0)

    def test_chain_recovers_dot_product(self):
        beta = np.array([0.0, 1.0])
        b_state, b_norm = prepare_amplitude_state(beta)
        x_state, x_norm = encode_input(0.5)
        value = back_transform(swap_test(b_state, x_state), b_norm, x_norm)
        assert value == pytest.approx(abs(beta @ [1.0, 0.5]), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 1), st.floats(-1, 1))
def test_round_trip_dot_product(x, target, slope):
    # build beta with beta.(1, x) = target in [0, 1]
    beta = np.array([target - slope * x, slope])
    assert estimate_dot(beta, x) == pytest.approx(beta @ [1.0, x], abs=1e-8)


def test_zero_beta():
    assert estimate_dot([0.0, 0.0], 0.3) == 0.0
