"""Dense statevector simulator for the small gate set used by the pipeline.

Conventions, fixed once and relied on everywhere:

* ``R_G(theta) = exp(-i * theta/2 * G)`` for ``G`` in ``{X, Z, ZZ}``, the usual
  circuit-library convention.  Consequently ``exp(-i*J*ZZ*dt) == RZZ(2*J*dt)``
  and ``exp(-i*h*X*dt) == RX(2*h*dt)``.
* Qubit ``q`` is bit ``q`` (little-endian) of the basis-state index, so basis
  state ``|q1 q0>`` with ``q0 = 1`` has index 1.

States are immutable from the caller's point of view: every gate returns a new
``Statevector``.  The amplitude array is complex128 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .exceptions import CapacityError, DegenerateWindowError

MAX_QUBITS = 24  # 2**24 complex doubles ~ 256 MiB


@dataclass(frozen=True)
class Statevector:
    """Normalized complex amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitude vector of length {self.amplitudes.shape} does not match "
                f"{self.n_qubits} qubits"
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class DiagonalObservable:
    """Diagonal operator given by one real eigenvalue per basis state."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 2 or (w.size & (w.size - 1)) != 0:
            raise ValueError("weights must be a 1-D vector with power-of-two length >= 2")
        object.__setattr__(self, "weights", w)


def zero_state(n_qubits: int) -> Statevector:
    """All-qubits-|0> state."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def from_amplitudes(values) -> Statevector:
    """Load an arbitrary complex vector as a state, normalizing to unit norm."""
    amps = np.asarray(values, dtype=complex).reshape(-1)
    n = amps.size
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"amplitude vector length must be a power of two >= 2, got {n}")
    n_qubits = n.bit_length() - 1
    if n_qubits > MAX_QUBITS:
        raise CapacityError(f"{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise DegenerateWindowError("cannot encode the zero vector as a quantum state")
    return Statevector(n_qubits, amps / norm)


def _check_qubit(state: Statevector, qubit: int):
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.n_qubits}-qubit state")


def _bit_views(state: Statevector, qubit: int):
    """Reshape amplitudes so the given qubit's bit is the leading axis."""
    psi = state.amplitudes.reshape((2,) * state.n_qubits)
    # axis 0 of the reshaped tensor is the most significant bit (qubit n-1)
    return np.moveaxis(psi, state.n_qubits - 1 - qubit, 0)


def apply_rx(state: Statevector, qubit: int, theta: float) -> Statevector:
    """Rotate one qubit by exp(-i*theta/2 * X)."""
    _check_qubit(state, qubit)
    psi = _bit_views(state, qubit)
    c, s = cos(theta / 2.0), sin(theta / 2.0)
    out = np.empty_like(psi)
    out[0] = c * psi[0] - 1j * s * psi[1]
    out[1] = -1j * s * psi[0] + c * psi[1]
    out = np.moveaxis(out, 0, state.n_qubits - 1 - qubit).reshape(-1)
    return Statevector(state.n_qubits, out)


def apply_rz(state: Statevector, qubit: int, theta: float) -> Statevector:
    """Rotate one qubit by exp(-i*theta/2 * Z); basis probabilities unchanged."""
    _check_qubit(state, qubit)
    psi = _bit_views(state, qubit)
    out = np.empty_like(psi)
    out[0] = np.exp(-0.5j * theta) * psi[0]
    out[1] = np.exp(0.5j * theta) * psi[1]
    out = np.moveaxis(out, 0, state.n_qubits - 1 - qubit).reshape(-1)
    return Statevector(state.n_qubits, out)


def apply_cnot(state: Statevector, control: int, target: int) -> Statevector:
    """Flip the target bit on every basis state whose control bit is 1."""
    if control == target:
        raise ValueError("control and target must differ")
    _check_qubit(state, control)
    _check_qubit(state, target)
    n = state.n_qubits
    psi = state.amplitudes.reshape((2,) * n)
    out = psi.copy()
    idx10 = [slice(None)] * n
    idx11 = [slice(None)] * n
    idx10[n - 1 - control], idx10[n - 1 - target] = 1, 0
    idx11[n - 1 - control], idx11[n - 1 - target] = 1, 1
    out[tuple(idx10)] = psi[tuple(idx11)]
    out[tuple(idx11)] = psi[tuple(idx10)]
    return Statevector(n, out.reshape(-1))


def apply_rzz(state: Statevector, q1: int, q2: int, theta: float) -> Statevector:
    """Apply exp(-i*theta/2 * Z_q1 Z_q2) as the CNOT - RZ(target) - CNOT sandwich."""
    if q1 == q2:
        raise ValueError("q1 and q2 must differ")
    state = apply_cnot(state, q1, q2)
    state = apply_rz(state, q2, theta)
    return apply_cnot(state, q1, q2)


def expectation_diagonal(state: Statevector, obs: DiagonalObservable) -> float:
    """<psi| diag(weights) |psi> = sum_i weights_i |amplitudes_i|^2."""
    if obs.weights.size != state.dim:
        raise ValueError(
            f"observable dimension {obs.weights.size} does not match state dimension {state.dim}"
        )
    return float(obs.weights @ state.probabilities())


def marginal_one_probabilities(state: Statevector) -> np.ndarray:
    """Per-qubit probability of measuring |1>, i.e. <(I - Z_n)/2> for each n."""
    n = state.n_qubits
    probs = state.probabilities().reshape((2,) * n)
    out = np.empty(n)
    for q in range(n):
        out[q] = probs.take(1, axis=n - 1 - q).sum()
    return out
