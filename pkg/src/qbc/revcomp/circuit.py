"""Gate records, the ReversibleCircuit container and classical simulation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from ..errors import UnsupportedGateError, ValidationError


@dataclass(frozen=True)
class X:
    target: int

    @property
    def qubits(self):
        return (self.target,)


@dataclass(frozen=True)
class CX:
    control: int
    target: int

    @property
    def qubits(self):
        return (self.control, self.target)


@dataclass(frozen=True)
class CCX:
    control1: int
    control2: int
    target: int

    @property
    def qubits(self):
        return (self.control1, self.control2, self.target)


@dataclass(frozen=True)
class MCX:
    """Multi-controlled X; each control is ``(qubit, polarity)`` and fires when qubit == polarity."""

    controls: tuple[tuple[int, bool], ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple((int(q), bool(p)) for q, p in self.controls))

    @property
    def qubits(self):
        return tuple(q for q, _ in self.controls) + (self.target,)


@dataclass(frozen=True)
class U1:
    """Single-qubit unitary stored row-major as ``((u00, u01), (u10, u11))``."""

    qubit: int
    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError("u1: matrix must be 2x2")
        object.__setattr__(self, "matrix", tuple(tuple(complex(v) for v in row) for row in m))

    @property
    def qubits(self):
        return (self.qubit,)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=complex)

    def dagger(self) -> "U1":
        return U1(self.qubit, self.array.conj().T)


Gate = Union[X, CX, CCX, MCX, U1]
PERMUTATION_GATES = (X, CX, CCX, MCX)


def controls_of(gate) -> tuple[tuple[int, bool], ...]:
    """Uniform (qubit, polarity) view of the controls of a permutation gate."""
    if isinstance(gate, X):
        return ()
    if isinstance(gate, CX):
        return ((gate.control, True),)
    if isinstance(gate, CCX):
        return ((gate.control1, True), (gate.control2, True))
    if isinstance(gate, MCX):
        return gate.controls
    raise UnsupportedGateError(f"{type(gate).__name__} is not a permutation gate")


def mcx(controls: Iterable[tuple[int, bool]], target: int):
    """Smallest gate record equivalent to a polarity-controlled X."""
    controls = tuple((int(q), bool(p)) for q, p in controls)
    if all(p for _, p in controls):
        if len(controls) == 0:
            return X(target)
        if len(controls) == 1:
            return CX(controls[0][0], target)
        if len(controls) == 2:
            return CCX(controls[0][0], controls[1][0], target)
    return MCX(controls, target)


@dataclass(frozen=True)
class ReversibleCircuit:
    width: int
    gates: tuple = ()
    registers: dict = field(default_factory=dict)  # name -> (lo, hi), hi exclusive

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        regs = {name: (int(lo), int(hi)) for name, (lo, hi) in self.registers.items()}
        object.__setattr__(self, "registers", regs)
        spans = sorted((lo, hi, name) for name, (lo, hi) in regs.items() if hi > lo)
        for lo, hi, name in spans:
            if lo < 0 or hi > self.width:
                raise ValidationError(f"register {name}: range [{lo}, {hi}) outside width {self.width}")
        for (lo1, hi1, a), (lo2, hi2, b) in zip(spans, spans[1:]):
            if lo2 < hi1:
                raise ValidationError(f"registers {a} and {b} overlap")
        for i, g in enumerate(self.gates):
            qs = g.qubits
            if any(not 0 <= q < self.width for q in qs):
                raise ValidationError(f"gate {i}: qubit index out of range for width {self.width}")
            if len(set(qs)) != len(qs):
                raise ValidationError(f"gate {i}: repeated qubit in {qs}")

    def __hash__(self):
        return hash((self.width, self.gates, tuple(sorted(self.registers.items()))))

    def register(self, name: str) -> range:
        lo, hi = self.registers.get(name, (0, 0))
        return range(lo, hi)

    def size(self, name: str) -> int:
        return len(self.register(name))

    @property
    def is_classical(self) -> bool:
        return all(isinstance(g, PERMUTATION_GATES) for g in self.gates)


def reverse(circuit: ReversibleCircuit) -> ReversibleCircuit:
    """The inverse circuit: gate order reversed, U1 replaced by its adjoint."""
    gates = tuple(g.dagger() if isinstance(g, U1) else g for g in reversed(circuit.gates))
    return ReversibleCircuit(circuit.width, gates, circuit.registers)


def classical_simulate(circuit: ReversibleCircuit, bits: Sequence[int]) -> tuple[int, ...]:
    if len(bits) != circuit.width:
        raise ValidationError(f"bits: expected {circuit.width} values, got {len(bits)}")
    state = [int(bool(b)) for b in bits]
    for g in circuit.gates:
        if isinstance(g, U1):
            raise UnsupportedGateError("classical simulation cannot apply a u1 gate")
        if all(state[q] == p for q, p in controls_of(g)):
            state[g.target] ^= 1
    return tuple(state)


def simulate_batch(circuit: ReversibleCircuit, bits: np.ndarray) -> np.ndarray:
    """Vectorised classical simulation of many assignments, shape (batch, width)."""
    state = np.array(bits, dtype=bool, copy=True)
    if state.ndim != 2 or state.shape[1] != circuit.width:
        raise ValidationError(f"bits: expected shape (batch, {circuit.width})")
    for g in circuit.gates:
        if isinstance(g, U1):
            raise UnsupportedGateError("classical simulation cannot apply a u1 gate")
        ctl = controls_of(g)
        if not ctl:
            state[:, g.target] ^= True
            continue
        fire = state[:, ctl[0][0]] == ctl[0][1]
        for q, p in ctl[1:]:
            fire &= state[:, q] == p
        state[:, g.target] ^= fire
    return state


def int_to_bits(values, width: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    return ((values[:, None] >> np.arange(width)) & 1).astype(bool)


def bits_to_int(bits: np.ndarray, lo: int = 0, hi: int | None = None) -> np.ndarray:
    bits = np.asarray(bits)[:, lo:hi]
    return (bits.astype(np.int64) << np.arange(bits.shape[1])).sum(axis=1)


def basis_permutation(circuit: ReversibleCircuit, inputs=None) -> np.ndarray:
    """Image index of each basis index under a permutation circuit.

    ``inputs`` restricts the computation to the given basis indices; widths
    above 62 are not representable as indices.
    """
    w = circuit.width
    if w > 62:
        raise ValidationError("basis indices need width <= 62")
    if inputs is None:
        inputs = np.arange(1 << w, dtype=np.int64)
    idx = np.array(inputs, dtype=np.int64, copy=True)
    for g in circuit.gates:
        if isinstance(g, U1):
            raise UnsupportedGateError("basis permutation undefined for u1 gates")
        ctl = controls_of(g)
        fire = np.ones(idx.shape, dtype=bool)
        for q, p in ctl:
            fire &= ((idx >> q) & 1).astype(bool) == p
        idx ^= fire.astype(np.int64) << g.target
    return idx
