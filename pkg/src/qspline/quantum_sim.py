"""Dense statevector simulator.

Qubit 0 is the most significant bit of a basis-state index, so the
amplitude of ``|q0 q1 ... q_{n-1}>`` sits at ``int("q0q1...", 2)``.
Everything here is exact double-precision linear algebra with no noise
model; :func:`sample_counts` is the only source of randomness.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, PostSelectionError

# Centralized tolerances.
NORM_ATOL = 1e-10
UNITARY_ATOL = 1e-10
MAX_QUBITS = 12


class StateVector:
    """Complex amplitudes over ``num_qubits`` qubits."""

    def __init__(self, amplitudes, num_qubits=None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(amps.size))) if amps.size else -1
        if n < 0 or 2**n != amps.size:
            raise InvalidInputError(f"amplitude count {amps.size} is not a power of 2")
        if num_qubits is not None and num_qubits != n:
            raise InvalidInputError(f"expected {2**num_qubits} amplitudes, got {amps.size}")
        if n > MAX_QUBITS:
            raise InvalidInputError(f"{n} qubits exceeds the simulator limit of {MAX_QUBITS}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise InvalidInputError(f"state is not normalized (norm={norm:.12g})")
        self._amps = amps
        self.num_qubits = n

    @classmethod
    def zero(cls, num_qubits):
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def basis(cls, index, num_qubits):
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def amplitudes(self):
        """Read-only view of the amplitudes.

        Reading amplitudes directly is a simulation privilege; a physical
        device would only expose :func:`probabilities`.
        """
        view = self._amps.view()
        view.flags.writeable = False
        return view

    def norm(self):
        return float(np.linalg.norm(self._amps))

    def tensor(self, other):
        """``self ⊗ other``; ``self`` keeps the leading (most significant) qubits."""
        return StateVector(np.kron(self._amps, other._amps))

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits})"


def prepare_amplitude_state(v):
    """Amplitude-encode a real vector.

    Returns the state ``v / ||v||`` together with ``||v||`` so callers can
    undo the normalization later.
    """
    v = np.asarray(v, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector has non-finite entries")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise InvalidInputError("cannot encode the zero vector")
    return StateVector(v / norm), norm


def _check_unitary(matrix):
    dim = matrix.shape[0]
    err = np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim)))
    if err > UNITARY_ATOL:
        raise InvalidInputError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")


_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def ry_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """A unitary acting on ``targets``, optionally conditioned on ``controls``.

    All controls fire on ``|1>``. ``matrix`` is the unitary on the targets
    alone, indexed with the first target as most significant bit.
    """

    kind: str
    targets: tuple
    matrix: np.ndarray = field(repr=False, compare=False)
    controls: tuple = ()

    def __post_init__(self):
        targets = tuple(int(q) for q in self.targets)
        controls = tuple(int(q) for q in self.controls)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", controls)
        matrix = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", matrix)
        if not targets:
            raise InvalidInputError("gate needs at least one target")
        qubits = controls + targets
        if len(set(qubits)) != len(qubits):
            raise InvalidInputError(f"repeated qubit index in {qubits}")
        if min(qubits) < 0:
            raise InvalidInputError("negative qubit index")
        if matrix.shape != (2 ** len(targets),) * 2:
            raise InvalidInputError(
                f"matrix shape {matrix.shape} does not match {len(targets)} target(s)"
            )
        _check_unitary(matrix)

    @property
    def qubits(self):
        return self.controls + self.targets

    def full_matrix(self):
        """Unitary on ``controls + targets`` including the control structure."""
        k = len(self.controls)
        dim_t = self.matrix.shape[0]
        full = np.eye(2**k * dim_t, dtype=complex)
        full[-dim_t:, -dim_t:] = self.matrix
        return full

    def inverse(self):
        return Gate(self.kind + "_dag", self.targets, self.matrix.conj().T, self.controls)

    # constructors

    @classmethod
    def hadamard(cls, q):
        return cls("h", (q,), _HADAMARD)

    @classmethod
    def pauli_x(cls, q):
        return cls("x", (q,), _PAULI_X)

    @classmethod
    def ry(cls, q, theta):
        return cls("ry", (q,), ry_matrix(theta))

    @classmethod
    def cphase(cls, control, target, phi):
        return cls("cphase", (target,), np.diag([1.0, np.exp(1j * phi)]), (control,))

    @classmethod
    def swap(cls, a, b, controls=()):
        return cls("swap", (a, b), _SWAP, tuple(controls))

    @classmethod
    def unitary(cls, matrix, targets, controls=()):
        return cls("unitary", tuple(targets), matrix, tuple(controls))


def apply(state, gate):
    """Return a new state with ``gate`` applied."""
    n = state.num_qubits
    qubits = gate.qubits
    if max(qubits) >= n:
        raise InvalidInputError(f"gate acts on qubit {max(qubits)} of a {n}-qubit state")
    k = len(qubits)
    u = gate.full_matrix().reshape((2,) * (2 * k))
    psi = state.amplitudes.reshape((2,) * n)
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    out = np.moveaxis(out, list(range(k)), list(qubits))
    new = StateVector.__new__(StateVector)
    new._amps = out.reshape(-1)
    new.num_qubits = n
    return new


class Circuit:
    """Ordered gate list over a fixed number of qubits."""

    def __init__(self, num_qubits, gates=()):
        self.num_qubits = int(num_qubits)
        self.gates = []
        for g in gates:
            self.append(g)

    def append(self, gate):
        if max(gate.qubits) >= self.num_qubits:
            raise InvalidInputError(
                f"gate on qubit {max(gate.qubits)} exceeds circuit width {self.num_qubits}"
            )
        self.gates.append(gate)
        return self

    def extend(self, gates):
        for g in gates:
            self.append(g)
        return self

    def inverse(self):
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)])

    def run(self, state=None):
        if state is None:
            state = StateVector.zero(self.num_qubits)
        if state.num_qubits != self.num_qubits:
            raise InvalidInputError("state width does not match circuit width")
        for g in self.gates:
            state = apply(state, g)
        return state

    def __len__(self):
        return len(self.gates)


def probabilities(state, qubits):
    """Marginal Born-rule probabilities over ``qubits``.

    Entry ``i`` of the result is the probability that the listed qubits,
    read with the first as most significant bit, equal ``i``.
    """
    qubits = [int(q) for q in qubits]
    if not qubits:
        raise InvalidInputError("need at least one qubit to measure")
    n = state.num_qubits
    if len(set(qubits)) != len(qubits) or min(qubits) < 0 or max(qubits) >= n:
        raise InvalidInputError(f"invalid qubit list {qubits} for {n} qubits")
    p = (np.abs(state.amplitudes) ** 2).reshape((2,) * n)
    rest = tuple(q for q in range(n) if q not in qubits)
    marginal = p.sum(axis=rest) if rest else p
    # sum() leaves the kept axes in ascending qubit order; permute to the request
    marginal = np.transpose(marginal, axes=np.argsort(np.argsort(qubits)))
    return marginal.reshape(-1)


def postselect(state, qubit, outcome):
    """Condition ``state`` on measuring ``qubit`` in ``outcome``.

    Returns ``(renormalized_state, probability)``. The measured qubit stays
    in the register, collapsed onto ``outcome``.
    """
    if outcome not in (0, 1):
        raise InvalidInputError("outcome must be 0 or 1")
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise InvalidInputError(f"qubit {qubit} out of range")
    psi = state.amplitudes.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    idx[qubit] = 1 - outcome
    psi[tuple(idx)] = 0.0
    prob = float(np.sum(np.abs(psi) ** 2))
    if prob <= 0.0:
        raise PostSelectionError(f"outcome {outcome} on qubit {qubit} has zero probability")
    return StateVector(psi.reshape(-1) / np.sqrt(prob)), prob


def sample_counts(state, qubits, shots, rng):
    """Draw ``shots`` measurement outcomes of ``qubits``; returns counts per outcome."""
    p = probabilities(state, qubits)
    p = np.clip(p, 0.0, None)
    return rng.multinomial(int(shots), p / p.sum())
