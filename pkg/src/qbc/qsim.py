"""
Dense statevector simulation.

Qubit ``i`` is bit ``i`` of the amplitude index. States are immutable
values; every operation returns a new :class:`StateVector`. Measurements
draw from a ``numpy.random.Generator`` (PCG64 by default), so a fixed seed
reproduces the same trace on every platform.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .revcomp.circuit import U1, ReversibleCircuit, basis_permutation, controls_of
from .source_model import PureQubitState

DEFAULT_MAX_QUBITS = 24
NORM_TOL = 1e-9
UNITARY_TOL = 1e-10


def max_qubits() -> int:
    """Capacity cap, overridable through the ``QBC_MAX_QUBITS`` environment variable."""
    return int(os.environ.get("QBC_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def check_capacity(width: int) -> None:
    cap = max_qubits()
    if width > cap:
        raise CapacityError(f"{width} qubits exceeds the statevector cap of {cap}")


@dataclass(frozen=True, eq=False)
class StateVector:
    width: int
    amplitudes: np.ndarray

    def __post_init__(self):
        check_capacity(self.width)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.width,):
            raise ValidationError(f"amplitudes: expected {1 << self.width} entries, got {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"amplitudes: squared norm {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, width: int, index: int = 0) -> "StateVector":
        check_capacity(width)
        amps = np.zeros(1 << width, dtype=complex)
        amps[index] = 1.0
        return cls(width, amps)

    def __len__(self):
        return len(self.amplitudes)


@dataclass(frozen=True)
class MeasurementRecord:
    qubits: tuple[int, ...]
    outcome: tuple[int, ...]
    probability: float


def product_amplitudes(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product with vector j on qubit j (little-endian)."""
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(np.asarray(v, dtype=complex), out)
    return out


def prepare_product(states: Sequence[PureQubitState], extra_zero_qubits: int = 0) -> StateVector:
    width = len(states) + extra_zero_qubits
    check_capacity(width)
    amps = np.zeros(1 << width, dtype=complex)
    amps[: 1 << len(states)] = product_amplitudes([s.vector for s in states])
    return StateVector(width, amps)


def _check_unitary(u: np.ndarray) -> None:
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > UNITARY_TOL:
        raise ValidationError("u1: matrix is not unitary")


def apply_single_qubit(amps: np.ndarray, u: np.ndarray, qubit: int) -> np.ndarray:
    psi = amps.reshape(-1, 2, 1 << qubit)
    return np.einsum("ij,ajb->aib", u, psi).reshape(-1)


def _apply_raw(amps: np.ndarray, gate, width: int) -> np.ndarray:
    if isinstance(gate, U1):
        u = gate.array
        _check_unitary(u)
        return apply_single_qubit(amps, u, gate.qubit)
    if any(q >= width for q in gate.qubits):
        raise ValidationError(f"gate {gate} addresses a qubit outside width {width}")
    idx = np.arange(amps.size)
    fire = ((idx >> gate.target) & 1) == 0
    for q, p in controls_of(gate):
        fire &= ((idx >> q) & 1).astype(bool) == p
    lo = idx[fire]
    hi = lo | (1 << gate.target)
    out = amps.copy()
    out[lo], out[hi] = amps[hi], amps[lo]
    return out


def apply_gate(state: StateVector, gate) -> StateVector:
    return StateVector(state.width, _apply_raw(state.amplitudes, gate, state.width))


def apply_circuit(state: StateVector, circuit: ReversibleCircuit) -> StateVector:
    if circuit.width != state.width:
        raise ValidationError(f"circuit width {circuit.width} != state width {state.width}")
    amps = state.amplitudes
    for g in circuit.gates:
        amps = _apply_raw(amps, g, state.width)
    return StateVector(state.width, amps)


def apply_permutation(state: StateVector, perm: np.ndarray) -> StateVector:
    """Apply a basis permutation ``|i> -> |perm[i]>`` such as :func:`circuit_permutation` returns."""
    out = np.empty_like(state.amplitudes)
    out[perm] = state.amplitudes
    return StateVector(state.width, out)


def circuit_permutation(circuit: ReversibleCircuit) -> np.ndarray:
    check_capacity(circuit.width)
    return basis_permutation(circuit)


def _marginal(amps: np.ndarray, width: int, qubits: Sequence[int]) -> np.ndarray:
    probs = np.abs(amps) ** 2
    if width == 0:
        return probs
    t = probs.reshape([2] * width)
    axes = [width - 1 - q for q in qubits]
    rest = tuple(a for a in range(width) if a not in axes)
    marg = t.sum(axis=rest) if rest else t
    kept = sorted(axes)
    # reorder so that axis j of the result is qubits[j]
    return np.transpose(marg, [kept.index(a) for a in axes])


def outcome_distribution(state: StateVector, qubits: Sequence[int]) -> dict[tuple[int, ...], float]:
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < state.width for q in qubits):
        raise ValidationError(f"qubits: invalid subset {qubits}")
    if not qubits:
        return {(): 1.0}
    marg = _marginal(state.amplitudes, state.width, qubits)
    return {tuple(int(b) for b in k): float(marg[k]) for k in zip(*np.nonzero(marg))}


def project(state: StateVector, qubits: Sequence[int], outcome: Sequence[int]) -> tuple[StateVector, float]:
    """Renormalised projection onto ``qubits == outcome`` and its probability."""
    idx = np.arange(len(state.amplitudes))
    keep = np.ones(idx.shape, dtype=bool)
    for q, b in zip(qubits, outcome):
        keep &= ((idx >> q) & 1) == b
    amps = np.where(keep, state.amplitudes, 0)
    p = float(np.vdot(amps, amps).real)
    if p <= 0:
        raise ValidationError(f"outcome {tuple(outcome)} has probability 0")
    return StateVector(state.width, amps / np.sqrt(p)), p


def measure_subset(state: StateVector, qubits: Sequence[int], rng: np.random.Generator):
    """Sample a computational-basis outcome on ``qubits`` and collapse the state."""
    dist = outcome_distribution(state, qubits)
    outcomes = sorted(dist)
    p = np.array([dist[o] for o in outcomes])
    cum = np.cumsum(p)
    j = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    outcome = outcomes[min(j, len(outcomes) - 1)]
    collapsed, prob = project(state, qubits, outcome)
    return MeasurementRecord(tuple(qubits), outcome, prob), collapsed


def overlap(a: StateVector, b: StateVector) -> complex:
    if a.width != b.width:
        raise ValidationError(f"width mismatch {a.width} vs {b.width}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def extract_register(state: StateVector, register: Sequence[int], tol: float = NORM_TOL) -> StateVector:
    """Sub-state of ``register`` when every other qubit is in a definite basis state.

    Raises ``ValidationError`` if the register is entangled with the rest.
    """
    register = list(register)
    others = [q for q in range(state.width) if q not in register]
    dist = outcome_distribution(state, others)
    rest, p = max(dist.items(), key=lambda kv: kv[1])
    if p < 1 - tol:
        raise ValidationError("register is entangled with the remaining qubits")
    base = sum(b << q for q, b in zip(others, rest))
    r = np.arange(1 << len(register))
    idx = np.full(r.shape, base)
    for j, q in enumerate(register):
        idx |= ((r >> j) & 1) << q
    amps = state.amplitudes[idx]
    return StateVector(len(register), amps / np.linalg.norm(amps))
