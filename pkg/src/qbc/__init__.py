"""Quantum block compression compiled from classical block codecs."""
from .codec import (
    BlockCodec,
    build_enumerative_codec,
    build_identity_codec,
    build_optimal_codec,
    choose_code_length,
    failure_probability,
)
from .pipeline import (
    CompressionPipeline,
    ExperimentReport,
    compress,
    decompress,
    exact_fidelity,
    make_quantum_compression_circuit,
    mc_fidelity,
    sweep,
)
from .source_model import (
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    PureQubitState,
    QubitSource,
    density_matrix,
    eigendecompose,
    shannon_entropy,
    von_neumann_entropy,
)

__version__ = "0.1.0"
