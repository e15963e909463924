"""
Irreversible Boolean circuits and their compute-copy-uncompute compilation.

A :class:`BoolCircuit` is a topologically ordered list of two-input
AND/OR/XOR gates in single-assignment form. NOT is a polarity flag on wire
references. The wire id :data:`CONST` denotes constant 0 and may only appear
in ``outputs`` (negated it is constant 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence, Union

import numpy as np

from ..codec import enumerative_code_length
from ..errors import ValidationError
from .circuit import CX, ReversibleCircuit, X, mcx

CONST = -1
OPS = ("AND", "OR", "XOR")


@dataclass(frozen=True)
class WireRef:
    wire: int
    negated: bool = False

    def __invert__(self):
        return WireRef(self.wire, not self.negated)


@dataclass(frozen=True)
class BoolGate:
    op: str
    lhs: WireRef
    rhs: WireRef
    out: int


@dataclass(frozen=True)
class BoolCircuit:
    n_inputs: int
    gates: tuple[BoolGate, ...]
    outputs: tuple[WireRef, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        validate_bool_circuit(self)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)


def validate_bool_circuit(circuit: BoolCircuit) -> None:
    defined = set(range(circuit.n_inputs))
    for i, g in enumerate(circuit.gates):
        if g.op not in OPS:
            raise ValidationError(f"gate {i}: unknown op {g.op!r}")
        for side in (g.lhs, g.rhs):
            if side.wire not in defined:
                raise ValidationError(f"gate {i}: reads undefined wire {side.wire}")
        if g.out in defined or g.out == CONST:
            raise ValidationError(f"gate {i}: output wire {g.out} is not fresh")
        defined.add(g.out)
    for j, ref in enumerate(circuit.outputs):
        if ref.wire != CONST and ref.wire not in defined:
            raise ValidationError(f"output {j}: unresolved wire {ref.wire}")


def evaluate(circuit: BoolCircuit, bits: Sequence[int]) -> tuple[int, ...]:
    """Direct evaluation of the irreversible circuit."""
    if len(bits) != circuit.n_inputs:
        raise ValidationError(f"bits: expected {circuit.n_inputs} inputs")
    val = {CONST: 0}
    val.update((i, int(bool(b))) for i, b in enumerate(bits))

    def read(ref):
        return val[ref.wire] ^ ref.negated

    for g in circuit.gates:
        a, b = read(g.lhs), read(g.rhs)
        val[g.out] = a & b if g.op == "AND" else a | b if g.op == "OR" else a ^ b
    return tuple(read(r) for r in circuit.outputs)


def evaluate_batch(circuit: BoolCircuit, bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=bool)
    val = {CONST: np.zeros(bits.shape[0], dtype=bool)}
    for i in range(circuit.n_inputs):
        val[i] = bits[:, i]

    def read(ref):
        return val[ref.wire] ^ ref.negated

    for g in circuit.gates:
        a, b = read(g.lhs), read(g.rhs)
        val[g.out] = a & b if g.op == "AND" else a | b if g.op == "OR" else a ^ b
    if not circuit.outputs:
        return np.zeros((bits.shape[0], 0), dtype=bool)
    return np.column_stack([read(r) for r in circuit.outputs])


Signal = Union[WireRef, bool]


class CircuitBuilder:
    """Emits gates with constant folding; signals are WireRefs or Python bools."""

    def __init__(self, n_inputs: int):
        self.n_inputs = n_inputs
        self.gates: list[BoolGate] = []
        self._next = n_inputs

    def input(self, i: int) -> WireRef:
        return WireRef(i)

    def _emit(self, op, a, b) -> WireRef:
        out = self._next
        self._next += 1
        self.gates.append(BoolGate(op, a, b, out))
        return WireRef(out)

    @staticmethod
    def not_(a: Signal) -> Signal:
        return (not a) if isinstance(a, bool) else ~a

    def and_(self, a: Signal, b: Signal) -> Signal:
        if isinstance(a, bool):
            return b if a else False
        if isinstance(b, bool):
            return a if b else False
        if a == b:
            return a
        if a == ~b:
            return False
        return self._emit("AND", a, b)

    def or_(self, a: Signal, b: Signal) -> Signal:
        if isinstance(a, bool):
            return True if a else b
        if isinstance(b, bool):
            return True if b else a
        if a == b:
            return a
        if a == ~b:
            return True
        return self._emit("OR", a, b)

    def xor_(self, a: Signal, b: Signal) -> Signal:
        if isinstance(a, bool):
            return self.not_(b) if a else b
        if isinstance(b, bool):
            return self.not_(a) if b else a
        if a == b:
            return False
        if a == ~b:
            return True
        return self._emit("XOR", a, b)

    def build(self, outputs: Sequence[Signal]) -> BoolCircuit:
        refs = [WireRef(CONST, s) if isinstance(s, bool) else s for s in outputs]
        return BoolCircuit(self.n_inputs, tuple(self.gates), tuple(refs))


def bennett_gates(circuit: BoolCircuit, in_qubits, out_qubits, work_qubits) -> list:
    """Compute into work, copy outputs, uncompute; one work qubit per gate.

    OR is rewritten by De Morgan as a negated AND of negated literals, and the
    negation is remembered as the stored polarity of the work qubit.
    """
    if len(in_qubits) != circuit.n_inputs or len(out_qubits) != circuit.n_outputs:
        raise ValidationError("bennett: qubit lists do not match circuit arity")
    if len(work_qubits) < len(circuit.gates):
        raise ValidationError("bennett: not enough work qubits")
    where = {i: (q, False) for i, q in enumerate(in_qubits)}

    def literal(ref):
        q, stored = where[ref.wire]
        return q, stored ^ ref.negated

    compute = []
    for i, g in enumerate(circuit.gates):
        w = work_qubits[i]
        (qa, na), (qb, nb) = literal(g.lhs), literal(g.rhs)
        if g.op == "XOR":
            compute += [CX(qa, w), CX(qb, w)]
            where[g.out] = (w, na ^ nb)
            continue
        flip = g.op == "OR"
        pa, pb = (not na) ^ flip, (not nb) ^ flip
        if qa == qb:
            if pa == pb:
                compute.append(mcx([(qa, pa)], w))
        else:
            compute.append(mcx([(qa, pa), (qb, pb)], w))
        where[g.out] = (w, flip)
    copy = []
    for ref, t in zip(circuit.outputs, out_qubits):
        if ref.wire == CONST:
            if ref.negated:
                copy.append(X(t))
            continue
        q, neg = literal(ref)
        copy.append(mcx([(q, not neg)], t))
    return compute + copy + compute[::-1]


def bennett_compile(circuit: BoolCircuit, m_out: int | None = None) -> ReversibleCircuit:
    """Reversible embedding (I, A, 0) -> (I, A xor f(I), 0) of a Boolean circuit.

    Layout: input [0, n), code [n, n + m_out), work after.
    """
    n = circuit.n_inputs
    m = circuit.n_outputs if m_out is None else m_out
    if m != circuit.n_outputs:
        raise ValidationError(f"m_out={m} but circuit has {circuit.n_outputs} outputs")
    g = len(circuit.gates)
    gates = bennett_gates(circuit, range(n), range(n, n + m), range(n + m, n + m + g))
    regs = {"input": (0, n), "code": (n, n + m), "work": (n + m, n + m + g)}
    return ReversibleCircuit(n + m + g, gates, regs)


def table_bool_circuit(table: Sequence[int], n_in: int, n_out: int) -> BoolCircuit:
    """Sum-of-minterms circuit for a lookup table, minterm prefixes shared.

    Minterms are mutually exclusive, so each output is an XOR of them; an
    output set on more than half the inputs is built as the complement.
    """
    table = np.asarray(table, dtype=np.int64)
    if table.shape != (1 << n_in,):
        raise ValidationError(f"table: expected {1 << n_in} entries")
    b = CircuitBuilder(n_in)
    cache: dict[tuple[int, int], Signal] = {(0, 0): True}

    def minterm(x, k):
        key = (k, x & ((1 << k) - 1))
        if key not in cache:
            lit = b.input(k - 1) if x >> (k - 1) & 1 else ~b.input(k - 1)
            cache[key] = b.and_(minterm(x, k - 1), lit)
        return cache[key]

    outs = []
    for j in range(n_out):
        on = np.flatnonzero((table >> j) & 1)
        negate = 2 * len(on) > len(table)
        if negate:
            on = np.flatnonzero(((table >> j) & 1) == 0)
        acc: Signal = False
        for x in on:
            acc = b.xor_(acc, minterm(int(x), n_in))
        outs.append(b.not_(acc) if negate else acc)
    return b.build(outs)


# Enumerative encoder. The scan runs least-significant bit first: the j-th one
# found at position p contributes C(p, j) to the rank, and C(n, j-1) to the
# weight-class offset, so the two constants are added together.

def _add_constant(b: CircuitBuilder, acc: list, const: int, ctl: Signal) -> list:
    out, carry = [], False
    for i, a in enumerate(acc):
        e = ctl if const >> i & 1 else False
        t = b.xor_(a, e)
        out.append(b.xor_(t, carry))
        carry = b.xor_(b.and_(a, e), b.and_(carry, t))
    return out


def _scan(b, x, positions, acc, count, n, wmax):
    for p in positions:
        bit = x[p]
        for k in range(wmax):
            c = b.and_(bit, count[k])
            acc = _add_constant(b, acc, comb(p, k + 1) + comb(n, k), c)
        nb = b.not_(bit)
        new = [b.and_(count[0], nb)]
        for k in range(1, wmax + 1):
            new.append(b.xor_(b.and_(count[k], nb), b.and_(count[k - 1], bit)))
        new.append(b.or_(count[wmax + 1], b.and_(count[wmax], bit)))
        count = new
    return acc, count


def _check_enumerative_args(n, wmax):
    if not 0 <= wmax <= n <= 16:
        raise ValidationError(f"enumerative circuit needs 0 <= wmax <= n <= 16, got n={n}, wmax={wmax}")


def enumerative_encoder_bool_circuit(n: int, wmax: int) -> BoolCircuit:
    _check_enumerative_args(n, wmax)
    m = enumerative_code_length(n, wmax)
    b = CircuitBuilder(n)
    x = [b.input(i) for i in range(n)]
    count = [True] + [False] * (wmax + 1)
    acc, count = _scan(b, x, range(n), [False] * m, count, n, wmax)
    ok = b.not_(count[wmax + 1])
    return b.build([b.and_(a, ok) for a in acc])


def enumerative_encoder_stages(n: int, wmax: int, num_stages: int) -> list[BoolCircuit]:
    """The same encoder cut into ``num_stages`` stages over contiguous bit ranges.

    Each stage outputs the checkpoint ``[accumulator (m bits), weight one-hot
    (wmax + 2 bits)]``. Stage 1 reads only the input block; later stages read
    the previous checkpoint followed by the input block. The code is the first
    m wires of the last checkpoint.
    """
    _check_enumerative_args(n, wmax)
    if num_stages < 1:
        raise ValidationError("num_stages must be >= 1")
    m = enumerative_code_length(n, wmax)
    live = m + wmax + 2
    chunks = np.array_split(np.arange(n), num_stages)
    stages = []
    for s, chunk in enumerate(chunks):
        if s == 0:
            b = CircuitBuilder(n)
            x = [b.input(i) for i in range(n)]
            acc = [False] * m
            count = [True] + [False] * (wmax + 1)
        else:
            b = CircuitBuilder(live + n)
            x = [b.input(live + i) for i in range(n)]
            acc = [b.input(i) for i in range(m)]
            count = [b.input(m + k) for k in range(wmax + 2)]
        acc, count = _scan(b, x, [int(p) for p in chunk], acc, count, n, wmax)
        ok = b.not_(count[wmax + 1])
        stages.append(b.build([b.and_(a, ok) for a in acc] + list(count)))
    return stages


def chain_stages(stages: Sequence[BoolCircuit], n: int, n_out: int | None = None) -> BoolCircuit:
    """Inline a stage sequence into one monolithic circuit over the n input bits."""
    b = CircuitBuilder(n)
    x = [b.input(i) for i in range(n)]
    prev: list[Signal] = []
    for s, stage in enumerate(stages):
        if s == 0:
            if stage.n_inputs != n:
                raise ValidationError("stage 1 must read exactly the input block")
            ins = list(x)
        elif stage.n_inputs == len(prev):
            ins = list(prev)
        elif stage.n_inputs == len(prev) + n:
            ins = list(prev) + x
        else:
            raise ValidationError(f"stage {s + 1}: arity {stage.n_inputs} fits neither checkpoint nor checkpoint+input")
        val = {i: v for i, v in enumerate(ins)}

        def read(ref):
            v = False if ref.wire == CONST else val[ref.wire]
            return b.not_(v) if ref.negated else v

        for g in stage.gates:
            fn = {"AND": b.and_, "OR": b.or_, "XOR": b.xor_}[g.op]
            val[g.out] = fn(read(g.lhs), read(g.rhs))
        prev = [read(r) for r in stage.outputs]
    k = len(prev) if n_out is None else n_out
    return b.build(prev[:k])
