"""Trotterized time evolution of a data-driven transverse-field Ising chain.

The chain is periodic: coupling ``J[n]`` joins spin ``n`` to spin
``(n+1) mod n_spins``.  One evolution step applies the ZZ couplings (even
pairs, then odd pairs including the wrap-around) followed by an X rotation on
every spin, realizing ``exp(-i H dt)`` to first order.  The per-step angles
follow the ``R_G(theta) = exp(-i theta/2 G)`` convention of the statevector
core, so a coupling J over time dt becomes ``RZZ(2*J*dt)`` and a field h
becomes ``RX(2*h*dt)``.

Because the couplings and field change from step to step, the product formula
here has no rigorous error bound; convergence is only asserted (and tested)
for schedules that are constant in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError
from .statevector import (
    Statevector,
    apply_rx,
    apply_rzz,
    marginal_one_probabilities,
    zero_state,
)

EXACT_MAX_SPINS = 6


@dataclass(frozen=True)
class IsingSchedule:
    """Per-step couplings (k x n_spins), per-step field (k,), and step length."""

    couplings: np.ndarray
    fields: np.ndarray
    dt: float

    def __post_init__(self):
        J = np.atleast_2d(np.asarray(self.couplings, dtype=float))
        h = np.asarray(self.fields, dtype=float).reshape(-1)
        if J.shape[0] != h.size:
            raise ValueError(f"{J.shape[0]} coupling rows but {h.size} field values")
        if J.shape[0] == 0:
            raise ValueError("schedule must contain at least one step")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)

    @property
    def n_steps(self) -> int:
        return self.couplings.shape[0]

    @property
    def n_spins(self) -> int:
        return self.couplings.shape[1]


@dataclass(frozen=True)
class EvolutionTrace:
    """Marginal |1> probabilities; row k is the state after k steps (row 0 initial)."""

    marginals: np.ndarray

    @property
    def initial_marginals(self) -> np.ndarray:
        return self.marginals[0]

    @property
    def n_steps(self) -> int:
        return self.marginals.shape[0] - 1

    @property
    def n_spins(self) -> int:
        return self.marginals.shape[1]


def _ring_pairs(n_spins: int):
    # a 1-spin chain has no couplings; otherwise pair n with (n+1) mod N,
    # even-n pairs first, then odd-n pairs (the wrap-around sits in the
    # parity layer of its left index)
    if n_spins < 2:
        return []
    pairs = [(n, (n + 1) % n_spins) for n in range(0, n_spins, 2)]
    pairs += [(n, (n + 1) % n_spins) for n in range(1, n_spins, 2)]
    return pairs


def build_trotter_step(J, h_x: float, dt: float) -> list:
    """Gate sequence for one evolution step.

    Returns ``("rzz", q1, q2, angle)`` entries for every ring pair followed by
    ``("rx", q, angle)`` on every spin.  Each rzz entry is executed as the
    CNOT - RZ - CNOT sandwich by the statevector core.
    """
    J = np.asarray(J, dtype=float).reshape(-1)
    n_spins = J.size
    if n_spins < 1:
        raise ValueError("need at least one spin")
    gates = [("rzz", n, m, 2.0 * J[n] * dt) for n, m in _ring_pairs(n_spins)]
    gates += [("rx", q, 2.0 * h_x * dt) for q in range(n_spins)]
    return gates


def apply_gates(state: Statevector, gates) -> Statevector:
    for gate in gates:
        if gate[0] == "rzz":
            _, q1, q2, theta = gate
            state = apply_rzz(state, q1, q2, theta)
        elif gate[0] == "rx":
            _, q, theta = gate
            state = apply_rx(state, q, theta)
        else:
            raise ValueError(f"unknown gate {gate[0]!r}")
    return state


def evolve(schedule: IsingSchedule, initial: Statevector | None = None) -> EvolutionTrace:
    """Run the trotterized evolution, recording marginals after every step."""
    if initial is None:
        initial = zero_state(schedule.n_spins)
    if initial.n_qubits != schedule.n_spins:
        raise ValueError(
            f"initial state has {initial.n_qubits} qubits, schedule has {schedule.n_spins} spins"
        )
    marginals = np.empty((schedule.n_steps + 1, schedule.n_spins))
    marginals[0] = marginal_one_probabilities(initial)
    state = initial
    for k in range(schedule.n_steps):
        gates = build_trotter_step(schedule.couplings[k], schedule.fields[k], schedule.dt)
        state = apply_gates(state, gates)
        marginals[k + 1] = marginal_one_probabilities(state)
    return EvolutionTrace(marginals=marginals)


def _dense_hamiltonian(J: np.ndarray, h_x: float, n_spins: int) -> np.ndarray:
    """Full 2^n x 2^n matrix of the periodic TFIM for one schedule step."""
    dim = 1 << n_spins
    H = np.zeros((dim, dim), dtype=complex)
    basis = np.arange(dim)
    # sigma^z eigenvalue of qubit q on each basis state: +1 for bit 0, -1 for bit 1
    z = 1.0 - 2.0 * ((basis[:, None] >> np.arange(n_spins)[None, :]) & 1)
    if n_spins >= 2:
        diag = np.zeros(dim)
        for n in range(n_spins):
            diag += J[n] * z[:, n] * z[:, (n + 1) % n_spins]
        H[basis, basis] = diag
    for q in range(n_spins):
        flipped = basis ^ (1 << q)
        H[basis, flipped] += h_x
    return H


def exact_evolve_small(schedule: IsingSchedule,
                       initial: Statevector | None = None) -> EvolutionTrace:
    """Oracle evolution via dense matrix exponentials; limited to small chains.

    Per step the full Hamiltonian is diagonalized and ``exp(-i H dt)`` applied
    exactly, so the only difference from :func:`evolve` is the product-formula
    splitting error.
    """
    if schedule.n_spins > EXACT_MAX_SPINS:
        raise CapacityError(
            f"exact evolution supports at most {EXACT_MAX_SPINS} spins, "
            f"got {schedule.n_spins}"
        )
    if initial is None:
        initial = zero_state(schedule.n_spins)
    if initial.n_qubits != schedule.n_spins:
        raise ValueError(
            f"initial state has {initial.n_qubits} qubits, schedule has {schedule.n_spins} spins"
        )
    marginals = np.empty((schedule.n_steps + 1, schedule.n_spins))
    marginals[0] = marginal_one_probabilities(initial)
    psi = initial.amplitudes.copy()
    for k in range(schedule.n_steps):
        H = _dense_hamiltonian(schedule.couplings[k], schedule.fields[k], schedule.n_spins)
        eigvals, eigvecs = np.linalg.eigh(H)
        U = (eigvecs * np.exp(-1j * eigvals * schedule.dt)) @ eigvecs.conj().T
        psi = U @ psi
        marginals[k + 1] = marginal_one_probabilities(Statevector(schedule.n_spins, psi))
    return EvolutionTrace(marginals=marginals)


def write_trace_csv(trace: EvolutionTrace, path):
    """CSV with header ``step,q0,...,q{n-1}`` and one row per step including step 0."""
    with open(path, "w", newline="") as fh:
        fh.write("step," + ",".join(f"q{q}" for q in range(trace.n_spins)) + "\n")
        for k, row in enumerate(trace.marginals):
            fh.write(f"{k}," + ",".join(repr(float(v)) for v in row) + "\n")
