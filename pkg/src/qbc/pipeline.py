"""
Quantum block compression built from a classical codec.

:func:`make_quantum_compression_circuit` performs the four compile steps:
reversible encoder and decoder, their disentangling composition, the
eigendecomposition of the source, and the per-qubit rotation into the
eigenbasis. :func:`compress` and :func:`decompress` run the result on the
statevector simulator; :func:`exact_fidelity` and :func:`mc_fidelity`
score it against the source.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import qsim
from .codec import BlockCodec, build_optimal_codec, choose_code_length
from .errors import BudgetError, ValidationError
from .qsim import StateVector
from .revcomp import (
    U1,
    ReversibleCircuit,
    compose_disentangled,
    pebble_schedule,
    resource_report,
    reverse,
    simulate_batch,
    synthesize_crev_bennett,
    synthesize_crev_from_table,
    synthesize_crev_pebbled,
    synthesize_drev_bennett,
    synthesize_drev_from_table,
)
from .revcomp.circuit import int_to_bits
from .revcomp.pebble import PebbleSchedule
from .revcomp.resources import ResourceReport
from .source_model import QubitSource, density_matrix, eigendecompose, sample_sequence, von_neumann_entropy

DEFAULT_BUDGET = 1 << 24


def parse_synthesis(synthesis) -> tuple[str, tuple[int, ...]]:
    """``"table"``, ``"bennett"``, ``"pebbled:M,K"`` or ``("pebbled", M, K)``."""
    if isinstance(synthesis, tuple):
        kind, *params = synthesis
    else:
        kind, _, rest = str(synthesis).partition(":")
        try:
            params = [int(t) for t in rest.split(",")] if rest else []
        except ValueError:
            raise ValidationError(f"synthesis: cannot parse {synthesis!r}") from None
    if kind in ("table", "bennett") and not params:
        return kind, ()
    if kind == "pebbled" and len(params) == 2:
        return kind, (int(params[0]), int(params[1]))
    raise ValidationError(f"synthesis: expected table, bennett or pebbled:M,K, got {synthesis!r}")


@dataclass(frozen=True, eq=False)
class CompressionPipeline:
    n: int
    m: int
    rotation: np.ndarray  # W, applied to every input qubit before the forward circuit
    forward: ReversibleCircuit
    codec: BlockCodec | None = None
    synthesis: str = "table"
    schedule: PebbleSchedule | None = None

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=complex)
        if rot.shape != (2, 2) or np.max(np.abs(rot.conj().T @ rot - np.eye(2))) > qsim.UNITARY_TOL:
            raise ValidationError("rotation: expected a 2x2 unitary")
        rot.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        if not self.forward.is_classical:
            raise ValidationError("forward: must contain only X/CX/CCX/MCX gates")
        if self.forward.registers.get("input") != (0, self.n):
            raise ValidationError("forward: input register must be [0, n)")
        if self.forward.size("code") != self.m:
            raise ValidationError("forward: code register size != m")

    @property
    def width(self) -> int:
        return self.forward.width

    @property
    def rate(self) -> float:
        return self.m / self.n if self.n else 0.0

    @property
    def code_qubits(self) -> list[int]:
        return list(range(self.n, self.n + self.m))

    @property
    def ancilla_qubits(self) -> list[int]:
        """Everything measured after the forward pass: input (garbage) then work."""
        return list(range(self.n)) + list(range(self.n + self.m, self.width))

    @cached_property
    def _perm(self) -> np.ndarray:
        return qsim.circuit_permutation(self.forward)

    @cached_property
    def _inverse_perm(self) -> np.ndarray:
        inv = np.empty_like(self._perm)
        inv[self._perm] = np.arange(self._perm.size)
        return inv

    def compiled_circuit(self) -> ReversibleCircuit:
        """Rotations as leading u1 gates followed by the forward circuit."""
        rot = tuple(U1(q, self.rotation) for q in range(self.n))
        return ReversibleCircuit(self.width, rot + self.forward.gates, self.forward.registers)

    def resources(self) -> ResourceReport:
        return resource_report(self.forward, self.schedule)


def make_quantum_compression_circuit(source: QubitSource, codec: BlockCodec, synthesis="table", n=None):
    if n is not None and n != codec.n:
        raise ValidationError(f"codec block length {codec.n} != requested n={n}")
    kind, params = parse_synthesis(synthesis)
    schedule = None
    # 1. reversible encoder and decoder
    if kind == "table":
        crev = synthesize_crev_from_table(codec.encode_table, codec.n, codec.m)
        drev = synthesize_drev_from_table(codec.decode_table, codec.n, codec.m)
    elif kind == "bennett":
        crev = synthesize_crev_bennett(codec)
        drev = synthesize_drev_bennett(codec)
    else:
        schedule = pebble_schedule(*params)
        crev = synthesize_crev_pebbled(codec, schedule)
        drev = synthesize_drev_bennett(codec)
    # 2. disentangling composition
    forward = compose_disentangled(crev, drev)
    # 3. eigenbasis of the source
    basis = eigendecompose(density_matrix(source))
    # 4. rotate every input qubit into that basis
    label = kind if not params else f"{kind}:{params[0]},{params[1]}"
    return CompressionPipeline(codec.n, codec.m, basis.rotation, forward, codec, label, schedule)


def pipeline_from_circuit(circuit: ReversibleCircuit) -> CompressionPipeline:
    """Rebuild a pipeline from a compiled circuit with leading u1 rotations."""
    n = circuit.size("input")
    m = circuit.size("code")
    rots = []
    for g in circuit.gates:
        if not isinstance(g, U1):
            break
        rots.append(g)
    if sorted(g.qubit for g in rots) != list(range(n)):
        raise ValidationError("circuit must start with one u1 rotation per input qubit")
    w = rots[0].array if rots else np.eye(2)
    if any(np.max(np.abs(g.array - w)) > 1e-12 for g in rots):
        raise ValidationError("input rotations differ between qubits")
    forward = ReversibleCircuit(circuit.width, circuit.gates[len(rots):], circuit.registers)
    return CompressionPipeline(n, m, w, forward)


@dataclass(frozen=True)
class TrialResult:
    garbage_outcome: tuple[int, ...]
    outcome_probability: float
    work_outcome: tuple[int, ...] = ()
    fidelity_contribution: float | None = None


def _embed(pipeline, input_amps) -> np.ndarray:
    full = np.zeros(1 << pipeline.width, dtype=complex)
    full[: 1 << pipeline.n] = input_amps
    return full


def _rotate_inputs(amps: np.ndarray, u: np.ndarray, n: int) -> np.ndarray:
    for q in range(n):
        amps = qsim.apply_single_qubit(amps, u, q)
    return amps


def compress(pipeline: CompressionPipeline, input_state: StateVector, rng):
    """Rotate, run the forward circuit and measure the garbage (input and work) qubits."""
    if input_state.width != pipeline.n:
        raise ValidationError(f"input has {input_state.width} qubits, pipeline expects {pipeline.n}")
    qsim.check_capacity(pipeline.width)
    amps = _rotate_inputs(_embed(pipeline, input_state.amplitudes), pipeline.rotation, pipeline.n)
    state = qsim.apply_permutation(StateVector(pipeline.width, amps), pipeline._perm)
    record, collapsed = qsim.measure_subset(state, pipeline.ancilla_qubits, rng)
    code = qsim.extract_register(collapsed, pipeline.code_qubits)
    n = pipeline.n
    return code, TrialResult(record.outcome[:n], record.probability, record.outcome[n:])


def _decompressed_full(pipeline, code_amps: np.ndarray) -> np.ndarray:
    qsim.check_capacity(pipeline.width)
    full = np.zeros(1 << pipeline.width, dtype=complex)
    full[np.arange(1 << pipeline.m) << pipeline.n] = code_amps
    out = np.empty_like(full)
    out[pipeline._inverse_perm] = full
    return _rotate_inputs(out, pipeline.rotation.conj().T, pipeline.n)


def decompress(pipeline: CompressionPipeline, code_state: StateVector) -> StateVector:
    """Run the compiled circuit backwards from (0^n, code, 0) and return the input register."""
    if code_state.width != pipeline.m:
        raise ValidationError(f"code has {code_state.width} qubits, pipeline expects {pipeline.m}")
    full = StateVector(pipeline.width, _decompressed_full(pipeline, code_state.amplitudes))
    return qsim.extract_register(full, range(pipeline.n))


def _reduced_fidelity(full: np.ndarray, target: np.ndarray, n: int) -> float:
    # <b| Tr_rest(|psi><psi|) |b> for the input register in the low n bits
    rows = full.reshape(-1, 1 << n) @ target.conj()
    return float(np.sum(np.abs(rows) ** 2))


@dataclass
class ExperimentReport:
    n: int
    m: int
    rate: float
    entropy_bits: float
    fidelity: float
    fidelity_mode: str
    trials: int | None
    garbage_zero_probability: float
    resource: ResourceReport = field(default_factory=ResourceReport)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "rate": self.rate,
            "entropy_bits": self.entropy_bits,
            "fidelity": self.fidelity,
            "fidelity_mode": self.fidelity_mode,
            "trials": self.trials,
            "garbage_zero_probability": self.garbage_zero_probability,
            "resource": self.resource.to_dict(),
        }


def _report(pipeline, source, fidelity, mode, trials, gzero):
    return ExperimentReport(
        n=pipeline.n,
        m=pipeline.m,
        rate=pipeline.rate,
        entropy_bits=von_neumann_entropy(density_matrix(source)),
        fidelity=fidelity,
        fidelity_mode=mode,
        trials=trials,
        garbage_zero_probability=gzero,
        resource=pipeline.resources(),
    )


def _sequences(source, n):
    k = len(source)
    probs = source.probabilities
    for seq in itertools.product(range(k), repeat=n):
        yield seq, math.prod(probs[i] for i in seq)


def _exact_by_permutation(pipeline, source):
    n, m = pipeline.n, pipeline.m
    fwd = simulate_batch(pipeline.forward, int_to_bits(np.arange(1 << n), pipeline.width))
    anc = pipeline.ancilla_qubits
    _, key = np.unique(fwd[:, anc], axis=0, return_inverse=True)
    key = key.reshape(-1)
    code = (fwd[:, n : n + m].astype(np.int64) << np.arange(m)).sum(axis=1)
    start = np.zeros((1 << m, pipeline.width), dtype=bool)
    start[:, n : n + m] = int_to_bits(np.arange(1 << m), m)
    back = simulate_batch(reverse(pipeline.forward), start)
    y = (back[:, :n].astype(np.int64) << np.arange(n)).sum(axis=1)
    _, rest = np.unique(back[:, n:], axis=0, return_inverse=True)
    rest = rest.reshape(-1)
    group = key * (int(rest.max()) + 1) + rest[code]
    image = y[code]
    garbage_zero = ~fwd[:, anc].any(axis=1)
    vecs = [pipeline.rotation @ s.vector for s in source.states]
    fid, gz = [], []
    for seq, p in _sequences(source, n):
        v = qsim.product_amplitudes([vecs[i] for i in seq])
        t = v * v[image].conj()
        s = np.bincount(group, weights=t.real) ** 2 + np.bincount(group, weights=t.imag) ** 2
        fid.append(p * s.sum())
        gz.append(p * np.sum(np.abs(v[garbage_zero]) ** 2))
    return math.fsum(fid), math.fsum(gz)


def _exact_by_statevector(pipeline, source):
    n = pipeline.n
    fid, gz = [], []
    anc = pipeline.ancilla_qubits
    for seq, p in _sequences(source, n):
        b = qsim.prepare_product([source.states[i] for i in seq])
        amps = _rotate_inputs(_embed(pipeline, b.amplitudes), pipeline.rotation, n)
        state = qsim.apply_permutation(StateVector(pipeline.width, amps), pipeline._perm)
        for outcome, q in qsim.outcome_distribution(state, anc).items():
            if q < 1e-15:
                continue
            collapsed, _ = qsim.project(state, anc, outcome)
            code = qsim.extract_register(collapsed, pipeline.code_qubits)
            full = _decompressed_full(pipeline, code.amplitudes)
            fid.append(p * q * _reduced_fidelity(full, b.amplitudes, n))
            if not any(outcome):
                gz.append(p * q)
    return math.fsum(fid), math.fsum(gz)


def exact_fidelity(pipeline, source, budget: int = DEFAULT_BUDGET, backend: str = "permutation"):
    """Fidelity averaged exactly over all k^n source sequences and all measurement outcomes.

    ``backend="permutation"`` evaluates the forward circuit classically on
    the 2^n relevant basis inputs and works on n-qubit vectors;
    ``backend="statevector"`` runs every branch through the dense simulator.
    """
    k = len(source)
    cost = k**pipeline.n * 2**pipeline.n
    if cost > budget:
        raise BudgetError(f"exact fidelity needs {cost} branch evaluations > budget {budget}; use Monte Carlo")
    if backend == "permutation":
        f, gz = _exact_by_permutation(pipeline, source)
    elif backend == "statevector":
        f, gz = _exact_by_statevector(pipeline, source)
    else:
        raise ValidationError(f"backend: unknown {backend!r}")
    return _report(pipeline, source, min(f, 1.0 + 1e-9), "exact", None, gz)


def mc_fidelity(pipeline, source, trials: int, seed: int = 0) -> ExperimentReport:
    """Monte Carlo fidelity; trial t uses the t-th child of ``SeedSequence(seed)``."""
    if trials < 1:
        raise ValidationError(f"trials: need at least 1, got {trials}")
    qsim.check_capacity(pipeline.width)
    children = np.random.SeedSequence(seed).spawn(trials)
    fid, zero = [], 0
    for child in children:
        trial = run_trial(pipeline, source, np.random.default_rng(child))
        fid.append(trial.fidelity_contribution)
        zero += not any(trial.garbage_outcome) and not any(trial.work_outcome)
    return _report(pipeline, source, math.fsum(fid) / trials, "monte-carlo", trials, zero / trials)


def run_trial(pipeline, source, rng) -> TrialResult:
    """One sampled compress/decompress round with its fidelity contribution."""
    seq = sample_sequence(source, pipeline.n, rng)
    b = qsim.prepare_product([source.states[i] for i in seq])
    code, trial = compress(pipeline, b, rng)
    full = _decompressed_full(pipeline, code.amplitudes)
    f = _reduced_fidelity(full, b.amplitudes, pipeline.n)
    return TrialResult(trial.garbage_outcome, trial.outcome_probability, trial.work_outcome, f)


def evaluate_pipeline(pipeline, source, budget=DEFAULT_BUDGET, trials=10_000, seed=0) -> ExperimentReport:
    """Exact fidelity when the budget allows it, Monte Carlo otherwise."""
    try:
        return exact_fidelity(pipeline, source, budget=budget)
    except BudgetError:
        return mc_fidelity(pipeline, source, trials, seed)


def sweep(
    source: QubitSource,
    n_list: Sequence[int],
    delta: float,
    synthesis="table",
    trials: int = 10_000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> list[ExperimentReport]:
    if not len(n_list):
        raise ValidationError("n_list: empty")
    q = eigendecompose(density_matrix(source)).values
    reports = []
    for n in n_list:
        m = choose_code_length(q, n, delta)
        codec = build_optimal_codec(q, n, m)
        pipeline = make_quantum_compression_circuit(source, codec, synthesis)
        reports.append(evaluate_pipeline(pipeline, source, budget, trials, seed))
    return reports
