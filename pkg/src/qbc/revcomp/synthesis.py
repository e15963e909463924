"""
Reversible embeddings of a codec's encoder and decoder, and their composition.

With the shared layout input = [0, n), code = [n, n + m):

* C_rev: (I, A) -> (I, A xor C(I))
* D_rev: (A, C) -> (A xor D(C), C)

Running D_rev after C_rev on (x, 0) leaves (x xor D(C(x)), C(x)), which is
(0, C(x)) whenever x is coded losslessly.
"""
from __future__ import annotations

from ..codec import BlockCodec
from ..errors import CapacityError, CompositionError, ValidationError
from .boolean import CircuitBuilder, bennett_gates, enumerative_encoder_bool_circuit, enumerative_encoder_stages, table_bool_circuit
from .circuit import ReversibleCircuit, mcx
from .pebble import PebbleSchedule, pebbled_compile

TABLE_SYNTH_MAX_BITS = 24


def _table_gates(table, n_ctl, ctl_base, n_tgt, tgt_base):
    gates = []
    for x, y in enumerate(table):
        y = int(y)
        if not y:
            continue
        pattern = [(ctl_base + i, bool(x >> i & 1)) for i in range(n_ctl)]
        for j in range(n_tgt):
            if y >> j & 1:
                gates.append(mcx(pattern, tgt_base + j))
    return gates


def synthesize_crev_from_table(encode_table, n: int, m: int) -> ReversibleCircuit:
    """One polarity-controlled X per (input pattern, set output bit)."""
    if n + m > TABLE_SYNTH_MAX_BITS:
        raise CapacityError(f"table synthesis needs n + m <= {TABLE_SYNTH_MAX_BITS}")
    if len(encode_table) != 1 << n:
        raise ValidationError(f"encode table: expected {1 << n} entries")
    gates = _table_gates(encode_table, n, 0, m, n)
    return ReversibleCircuit(n + m, gates, {"input": (0, n), "code": (n, n + m)})


def synthesize_drev_from_table(decode_table, n: int, m: int) -> ReversibleCircuit:
    """Controls on the code register, targets on the input register."""
    if n + m > TABLE_SYNTH_MAX_BITS:
        raise CapacityError(f"table synthesis needs n + m <= {TABLE_SYNTH_MAX_BITS}")
    if len(decode_table) != 1 << m:
        raise ValidationError(f"decode table: expected {1 << m} entries")
    gates = _table_gates(decode_table, m, n, n, 0)
    return ReversibleCircuit(n + m, gates, {"input": (0, n), "code": (n, n + m)})


def _bennett_circuit(bc, n, m, in_q, out_q):
    g = len(bc.gates)
    gates = bennett_gates(bc, in_q, out_q, range(n + m, n + m + g))
    regs = {"input": (0, n), "code": (n, n + m), "work": (n + m, n + m + g)}
    return ReversibleCircuit(n + m + g, gates, regs)


def encoder_bool_circuit(codec: BlockCodec):
    if codec.kind == "enumerative":
        return enumerative_encoder_bool_circuit(codec.n, codec.params["wmax"])
    return table_bool_circuit(codec.encode_table, codec.n, codec.m)


def synthesize_crev_bennett(codec: BlockCodec) -> ReversibleCircuit:
    bc = encoder_bool_circuit(codec)
    n, m = codec.n, codec.m
    return _bennett_circuit(bc, n, m, range(n), range(n, n + m))


def synthesize_drev_bennett(codec: BlockCodec) -> ReversibleCircuit:
    bc = table_bool_circuit(codec.decode_table, codec.m, codec.n)
    n, m = codec.n, codec.m
    return _bennett_circuit(bc, n, m, range(n, n + m), range(n))


def encoder_stages(codec: BlockCodec, num_stages: int):
    """Split the encoder into a stage chain suitable for :func:`pebbled_compile`.

    Enumerative codecs are cut along the bit scan. Other codecs have no
    sequential structure, so the whole table circuit is stage 1 and the
    remaining stages pass the codeword through.
    """
    if codec.kind == "enumerative":
        return enumerative_encoder_stages(codec.n, codec.params["wmax"], num_stages)
    first = table_bool_circuit(codec.encode_table, codec.n, codec.m)
    rest = []
    for _ in range(num_stages - 1):
        b = CircuitBuilder(codec.m)
        rest.append(b.build([b.input(i) for i in range(codec.m)]))
    return [first] + rest


def synthesize_crev_pebbled(codec: BlockCodec, schedule: PebbleSchedule) -> ReversibleCircuit:
    stages = encoder_stages(codec, schedule.num_segments)
    return pebbled_compile(stages, schedule, n_out=codec.m)


def compose_disentangled(crev: ReversibleCircuit, drev: ReversibleCircuit) -> ReversibleCircuit:
    """C_rev gates followed by D_rev gates on a shared input/code layout.

    Ancilla regions of the two halves may overlap since each half returns its
    ancillas to 0; the composite keeps one ``work`` register spanning them.
    """
    for name in ("input", "code"):
        if crev.registers.get(name) != drev.registers.get(name):
            raise CompositionError(
                f"register {name!r} differs: {crev.registers.get(name)} vs {drev.registers.get(name)}"
            )
    if "input" not in crev.registers:
        raise CompositionError("circuits carry no input register")
    n_lo, n_hi = crev.registers["input"]
    c_lo, c_hi = crev.registers.get("code", (n_hi, n_hi))
    if n_lo != 0 or c_lo != n_hi:
        raise CompositionError("expected layout input=[0, n), code=[n, n + m)")
    width = max(crev.width, drev.width)
    regs = {"input": (n_lo, n_hi), "code": (c_lo, c_hi)}
    if width > c_hi:
        regs["work"] = (c_hi, width)
    return ReversibleCircuit(width, crev.gates + drev.gates, regs)
