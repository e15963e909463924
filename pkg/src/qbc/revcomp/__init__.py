"""Reversible compilation: circuits, Bennett embeddings, pebbling, composition."""
from .boolean import (
    CONST,
    BoolCircuit,
    BoolGate,
    CircuitBuilder,
    WireRef,
    bennett_compile,
    chain_stages,
    enumerative_encoder_bool_circuit,
    enumerative_encoder_stages,
    evaluate,
    evaluate_batch,
    table_bool_circuit,
)
from .circuit import (
    CCX,
    CX,
    MCX,
    U1,
    X,
    ReversibleCircuit,
    basis_permutation,
    bits_to_int,
    classical_simulate,
    int_to_bits,
    mcx,
    reverse,
    simulate_batch,
)
from .pebble import Move, PebbleSchedule, pebble_schedule, pebbled_compile, place, remove, validate_schedule
from .resources import ResourceReport, resource_report
from .synthesis import (
    compose_disentangled,
    encoder_stages,
    synthesize_crev_bennett,
    synthesize_crev_from_table,
    synthesize_crev_pebbled,
    synthesize_drev_bennett,
    synthesize_drev_from_table,
)
from .textio import dumps, loads, read_circuit, write_circuit
