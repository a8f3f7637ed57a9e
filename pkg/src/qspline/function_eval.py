"""Swap-test evaluation of a linear piece ``beta . (1, x)``.

The ancilla of the swap test reads ``|0>`` with probability
``1/2 + |<beta|x>|^2 / 2``; inverting that and multiplying the tracked norms
back gives ``|beta . (1, x)|``. Only the magnitude survives, so targets are
expected to be pre-scaled into [0, 1].
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, NumericalError
from .quantum_sim import (
    Circuit,
    Gate,
    StateVector,
    prepare_amplitude_state,
    probabilities,
    sample_counts,
)

P0_ATOL = 1e-9


@dataclass(frozen=True)
class SwapTestOutcome:
    p0: float
    overlap_sq: float
    f_estimate: float


def encode_input(x):
    """State proportional to ``(1, x)`` and its norm ``sqrt(1 + x^2)``."""
    x = float(x)
    if not np.isfinite(x):
        raise InvalidInputError("input must be finite")
    return prepare_amplitude_state([1.0, x])


def swap_test_circuit():
    """Ancilla on qubit 0, the two compared states on qubits 1 and 2."""
    return Circuit(3, [Gate.hadamard(0), Gate.swap(1, 2, controls=(0,)), Gate.hadamard(0)])


def swap_test(a, b, shots=None, rng=None):
    """Run the swap test on two single-qubit states.

    With ``shots`` set, ``p0`` is the observed frequency over that many
    ancilla measurements instead of the exact probability.
    """
    if a.num_qubits != 1 or b.num_qubits != 1:
        raise InvalidInputError("swap test compares two single-qubit states")
    start = StateVector.zero(1).tensor(a).tensor(b)
    out = swap_test_circuit().run(start)
    if shots is None:
        p0 = float(probabilities(out, [0])[0])
    else:
        rng = rng if rng is not None else np.random.default_rng()
        p0 = float(sample_counts(out, [0], shots, rng)[0] / shots)
    overlap_sq = 2.0 * p0 - 1.0
    return SwapTestOutcome(p0, overlap_sq, float(np.sqrt(max(overlap_sq, 0.0))))


def back_transform(outcome, beta_norm, x_norm):
    """``sqrt(2 p0 - 1) * ||beta|| * ||(1, x)||``, taking the positive root."""
    p0 = outcome.p0
    if p0 > 1.0 + P0_ATOL:
        raise NumericalError(f"swap-test probability {p0!r} exceeds 1")
    p0 = min(max(p0, 0.5), 1.0)
    return float(np.sqrt(2.0 * p0 - 1.0) * beta_norm * x_norm)


def estimate_dot(beta, x, shots=None, rng=None):
    """``|beta . (1, x)|`` through encode, swap test and back-transform."""
    beta = np.asarray(beta, dtype=float)
    if np.linalg.norm(beta) == 0.0:
        return 0.0
    beta_state, beta_norm = prepare_amplitude_state(beta)
    x_state, x_norm = encode_input(x)
    return back_transform(swap_test(beta_state, x_state, shots, rng), beta_norm, x_norm)
