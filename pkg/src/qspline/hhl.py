"""HHL solver for small real linear systems on the statevector simulator.

Register layout for a circuit run (qubit 0 is the most significant bit)::

    q0             rotation ancilla
    q1 .. qm       clock register for phase estimation (q1 most significant)
    q(m+1) ..      system register holding |b> and, after post-selection, |x>

Symmetric matrices are used directly. Anything else goes through the
hermitian dilation ``[[0, S], [S^T, 0]]``, whose solution block carries
``S^-1 y``.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    InvalidInputError,
    PostSelectionError,
    PrecisionError,
    SingularSystemError,
)
from .quantum_sim import Circuit, Gate, StateVector, postselect, prepare_amplitude_state

BACKENDS = ("circuit", "ideal")
MIN_SUCCESS_PROBABILITY = 1e-12
SINGULAR_RCOND = 1e-12

# Default evolution time puts the largest |eigenvalue| at 90% of the
# representable phase range: [0, 1) turns for positive spectra, [-1/2, 1/2)
# when two's complement carries negative eigenvalues.
_PHASE_FILL_UNSIGNED = 0.9
_PHASE_FILL_SIGNED = 0.45


@dataclass(frozen=True)
class HHLConfig:
    """Precision and scaling knobs of the HHL circuit.

    ``evolution_time`` and ``rotation_constant`` default to values derived
    from classical eigenvalue bounds of the block (a shortcut acceptable
    for 2x2 and 4x4 matrices, not a quantum subroutine).
    """

    clock_qubits: int = 5
    evolution_time: float = None
    rotation_constant: float = None
    backend: str = "circuit"

    def __post_init__(self):
        if int(self.clock_qubits) != self.clock_qubits or self.clock_qubits < 1:
            raise InvalidInputError("clock_qubits must be a positive integer")
        if self.clock_qubits > 8:
            raise InvalidInputError("clock_qubits above 8 exceeds the simulator budget")
        if self.evolution_time is not None and not self.evolution_time > 0:
            raise InvalidInputError("evolution_time must be positive")
        if self.rotation_constant is not None and not self.rotation_constant > 0:
            raise InvalidInputError("rotation_constant must be positive")
        if self.backend not in BACKENDS:
            raise InvalidInputError(f"backend must be one of {BACKENDS}, got {self.backend!r}")


@dataclass(frozen=True)
class HHLResult:
    solution_direction: np.ndarray
    recovered_norm: float
    success_probability: float
    fidelity: float
    evolution_time: float = field(default=np.nan, repr=False)
    rotation_constant: float = field(default=np.nan, repr=False)

    @property
    def solution(self):
        """Direction scaled by the norm recovered from the success probability."""
        return self.recovered_norm * self.solution_direction


def hermitian_embed(S, y):
    """Dilate ``S x = y`` into a hermitian system of twice the size.

    Returns ``H = [[0, S], [S^T, 0]]`` and ``b = (y, 0)``. The solution of
    ``H z = b`` is ``z = (0, x)``.
    """
    S = np.asarray(S, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = S.shape[0]
    H = np.zeros((2 * n, 2 * n))
    H[:n, n:] = S
    H[n:, :n] = S.T
    return H, np.concatenate([y, np.zeros(n)])


def fidelity(a, b, atol=1e-8):
    """Squared overlap ``|<a|b>|^2`` of two unit vectors."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise InvalidInputError("vectors differ in length")
    for v in (a, b):
        if abs(np.linalg.norm(v) - 1.0) > atol:
            raise InvalidInputError("fidelity needs unit-norm inputs")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def canonical_direction(z):
    """Real unit vector for a complex amplitude block.

    The global phase is removed using the largest-magnitude component,
    then the sign is fixed so the first nonzero entry is positive.
    """
    z = np.asarray(z, dtype=complex).ravel()
    i = int(np.argmax(np.abs(z)))
    if abs(z[i]) == 0.0:
        raise PostSelectionError("solution block has zero amplitude")
    r = (z * np.conj(z[i]) / abs(z[i])).real
    r = r / np.linalg.norm(r)
    nz = np.flatnonzero(np.abs(r) > 1e-12)
    if r[nz[0]] < 0:
        r = -r
    return r


def _check_system(S, y):
    S = np.asarray(S, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] != y.size:
        raise InvalidInputError(f"incompatible shapes {S.shape} and {y.shape}")
    if S.shape[0] & (S.shape[0] - 1):
        raise InvalidInputError("system size must be a power of 2")
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(y))):
        raise InvalidInputError("system has non-finite entries")
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[-1] <= SINGULAR_RCOND * sv[0]:
        raise SingularSystemError(f"matrix is singular (singular values {sv})")
    if not np.any(y):
        raise InvalidInputError("right-hand side is zero; nothing to encode")
    return S, y


def _hermitian_form(S, y):
    if np.allclose(S, S.T, rtol=0, atol=1e-14):
        return S, y, False
    H, b = hermitian_embed(S, y)
    return H, b, True


def _resolve_scales(eigenvalues, config):
    """Evolution time, rotation constant and phase convention for a spectrum."""
    mags = np.abs(eigenvalues)
    signed = bool(np.min(eigenvalues) < 0)
    n_bins = 2**config.clock_qubits
    fill = _PHASE_FILL_SIGNED if signed else _PHASE_FILL_UNSIGNED
    t = config.evolution_time or 2 * np.pi * fill / mags.max()
    limit = 0.5 if signed else 1.0
    phase_max = mags.max() * t / (2 * np.pi)
    if phase_max >= limit:
        raise PrecisionError(
            f"eigenphase {phase_max:.4f} overflows the clock register (limit {limit})"
        )
    resolution = 2 * np.pi / (n_bins * t)
    c = config.rotation_constant or min(0.5 * mags.min(), resolution)
    if c > resolution * (1 + 1e-12):
        raise InvalidInputError(
            f"rotation_constant {c:.4g} exceeds the smallest representable eigenvalue {resolution:.4g}"
        )
    return t, c, signed


def decoded_eigenvalues(clock_qubits, t, signed):
    """Eigenvalue estimate attached to each clock-register integer."""
    n_bins = 2**clock_qubits
    k = np.arange(n_bins)
    if signed:
        k = np.where(k >= n_bins // 2, k - n_bins, k)
    return k * 2 * np.pi / (n_bins * t)


def _evolution(eigvals, eigvecs, t):
    return (eigvecs * np.exp(1j * eigvals * t)) @ eigvecs.conj().T


def _qft_matrix(n_bins, inverse=False):
    sign = -1 if inverse else 1
    jk = np.outer(np.arange(n_bins), np.arange(n_bins))
    return np.exp(sign * 2j * np.pi * jk / n_bins) / np.sqrt(n_bins)


def build_circuit(A, config, t, c, signed):
    """Full HHL circuit (without state preparation) for hermitian ``A``."""
    m = config.clock_qubits
    n_sys = int(np.log2(A.shape[0]))
    clock = list(range(1, m + 1))
    system = list(range(m + 1, m + 1 + n_sys))
    eigvals, eigvecs = np.linalg.eigh(A)

    qpe = Circuit(1 + m + n_sys)
    qpe.extend(Gate.hadamard(q) for q in clock)
    for i, q in enumerate(clock):
        power = 2 ** (m - 1 - i)
        qpe.append(Gate.unitary(_evolution(eigvals, eigvecs, t * power), system, controls=(q,)))
    qpe.append(Gate.unitary(_qft_matrix(2**m, inverse=True), clock))

    lam = decoded_eigenvalues(m, t, signed)
    rot = np.zeros((2 ** (m + 1),) * 2, dtype=complex)
    for k, lk in enumerate(lam):
        ratio = 0.0 if lk == 0 else np.clip(c / lk, -1.0, 1.0)
        theta = 2 * np.arcsin(ratio)
        cs, sn = np.cos(theta / 2), np.sin(theta / 2)
        rot[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = [[cs, -sn], [sn, cs]]

    circuit = Circuit(qpe.num_qubits, qpe.gates)
    circuit.append(Gate.unitary(rot, clock + [0]))
    circuit.extend(qpe.inverse().gates)
    return circuit


def solve_hhl(S, y, config=None):
    """Approximate ``S^-1 y`` with HHL.

    The circuit backend runs phase estimation, the eigenvalue-inverting
    ancilla rotation and uncomputation, then post-selects the ancilla on
    ``|1>`` and reads the solution block with the clock back in ``|0>``.
    The ideal backend applies the exact inverse through an
    eigendecomposition instead.
    """
    config = config or HHLConfig()
    S, y = _check_system(S, y)
    A, b, dilated = _hermitian_form(S, y)
    eigvals = np.linalg.eigvalsh(A)
    t, c, signed = _resolve_scales(eigvals, config)
    b_state, b_norm = prepare_amplitude_state(b)
    dim = A.shape[0]

    if config.backend == "ideal":
        w, v = np.linalg.eigh(A)
        z = (v / w) @ (v.T @ b_state.amplitudes)
        prob = float(min(1.0, c**2 * np.linalg.norm(z) ** 2))
    else:
        m = config.clock_qubits
        circuit = build_circuit(A, config, t, c, signed)
        start = StateVector.zero(1 + m).tensor(b_state)
        out = circuit.run(start)
        out, prob = _postselect_ancilla(out)
        z = out.amplitudes.reshape(2, 2**m, dim)[1, 0, :]

    block = z[dim // 2 :] if dilated else z
    if np.linalg.norm(block) < 1e-12:
        raise PostSelectionError("solution block vanished after uncomputation")
    direction = canonical_direction(block)
    truth = np.linalg.solve(S, y)
    fid = fidelity(direction, truth / np.linalg.norm(truth))
    return HHLResult(
        solution_direction=direction,
        recovered_norm=float(np.sqrt(prob) * b_norm / c),
        success_probability=prob,
        fidelity=fid,
        evolution_time=float(t),
        rotation_constant=float(c),
    )


def _postselect_ancilla(state):
    try:
        out, prob = postselect(state, 0, 1)
    except PostSelectionError:
        prob = 0.0
    if prob < MIN_SUCCESS_PROBABILITY:
        raise PostSelectionError(f"ancilla success probability {prob:.3g} below threshold")
    return out, prob
