import dataclasses
import itertools
import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_source, random_unitary, run, sources
from qbc.codec import (
    build_enumerative_codec,
    build_identity_codec,
    build_optimal_codec,
    choose_code_length,
    failure_probability,
)
from qbc.errors import BudgetError, ValidationError
from qbc.pipeline import (
    compress,
    decompress,
    evaluate_pipeline,
    exact_fidelity,
    make_quantum_compression_circuit,
    mc_fidelity,
    parse_synthesis,
    pipeline_from_circuit,
    run_trial,
    sweep,
)
from qbc.qsim import StateVector, apply_circuit, prepare_product
from qbc.revcomp import basis_permutation, reverse
from qbc.source_model import KET0, KET1, KET_PLUS, PureQubitState, QubitSource, density_matrix, eigendecompose

HADAMARD = QubitSource(((1.0, KET_PLUS),))
DIAG = QubitSource(((0.9, KET0), (0.1, KET1)))
MIXED = QubitSource(((0.5, KET0), (0.5, KET_PLUS)))


def dense_fidelity(pipeline, source):
    """Brute-force oracle: explicit unitary matrices, projectors and partial traces."""
    n, w = pipeline.n, pipeline.width
    dim = 1 << w
    perm = basis_permutation(pipeline.forward)
    P = np.zeros((dim, dim))
    P[perm, np.arange(dim)] = 1
    rot = reduce(np.kron, [np.eye(2)] * (w - n) + [pipeline.rotation] * n)
    U = P @ rot
    anc = pipeline.ancilla_qubits
    total = 0.0
    for seq in itertools.product(range(len(source)), repeat=n):
        p = math.prod(source.probabilities[list(seq)])
        b = reduce(np.kron, [source.states[i].vector for i in reversed(seq)])
        psi = U @ np.concatenate([b, np.zeros(dim - b.size)])
        for outcome in itertools.product((0, 1), repeat=len(anc)):
            mask = np.array([all((x >> q) & 1 == o for q, o in zip(anc, outcome)) for x in range(dim)])
            branch = np.where(mask, psi, 0)
            q = np.vdot(branch, branch).real
            if q < 1e-15:
                continue
            # reset the measured qubits to 0 and run the circuit backwards
            reset = np.zeros(dim, dtype=complex)
            for x in np.nonzero(mask)[0]:
                reset[x & ~sum(1 << a for a in anc)] += branch[x]
            back = U.conj().T @ reset / math.sqrt(q)
            rho = back.reshape(-1, 1 << n)
            total += p * q * np.sum(np.abs(rho @ b.conj()) ** 2)
    return total


def test_parse_synthesis():
    assert parse_synthesis("table") == ("table", ())
    assert parse_synthesis("pebbled:2,3") == ("pebbled", (2, 3))
    assert parse_synthesis(("pebbled", 3, 1)) == ("pebbled", (3, 1))
    for bad in ("pebbled", "pebbled:2", "bogus", "pebbled:a,b"):
        with pytest.raises(ValidationError):
            parse_synthesis(bad)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_hadamard_showcase(n):
    p = make_quantum_compression_circuit(HADAMARD, build_optimal_codec((1.0, 0.0), n, 0))
    np.testing.assert_allclose(p.rotation, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-12)
    rep = exact_fidelity(p, HADAMARD)
    assert rep.fidelity == pytest.approx(1.0, abs=1e-9) and rep.rate == 0.0
    code, trial = compress(p, prepare_product([KET_PLUS] * n), np.random.default_rng(0))
    assert trial.garbage_outcome == (0,) * n and trial.outcome_probability == pytest.approx(1.0)
    assert code.width == 0
    out = decompress(p, code)
    np.testing.assert_allclose(out.amplitudes, prepare_product([KET_PLUS] * n).amplitudes, atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_rotation_is_necessary(n):
    p = make_quantum_compression_circuit(HADAMARD, build_optimal_codec((1.0, 0.0), n, 0))
    plain = dataclasses.replace(p, rotation=np.eye(2))
    assert exact_fidelity(plain, HADAMARD).fidelity == pytest.approx(2.0**-n, abs=1e-9)


def test_diagonal_source_needs_no_rotation():
    p = make_quantum_compression_circuit(DIAG, build_optimal_codec((0.9, 0.1), 2, 1))
    np.testing.assert_array_equal(p.rotation, np.eye(2))
    assert exact_fidelity(p, DIAG).fidelity == pytest.approx(0.9, abs=1e-9)


def lossless_mass(codec, q1):
    return math.fsum((1 - q1) ** (codec.n - bin(int(x)).count("1")) * q1 ** bin(int(x)).count("1") for x in codec.lossless_set())


@pytest.mark.parametrize("synthesis", ["table", "bennett"])
@pytest.mark.parametrize("q1, n, delta", [(0.1, 2, 0.1), (0.1, 4, 0.1), (0.1, 8, 0.1), (0.3, 6, 0.2), (0.25, 5, 0.05)])
def test_diagonal_fidelity_is_lossless_mass(q1, n, delta, synthesis):
    src = QubitSource(((1 - q1, KET0), (q1, KET1)))
    m = choose_code_length((1 - q1, q1), n, delta)
    codec = build_optimal_codec((1 - q1, q1), n, m)
    rep = exact_fidelity(make_quantum_compression_circuit(src, codec, synthesis), src)
    assert rep.fidelity == pytest.approx(lossless_mass(codec, q1), abs=1e-9)
    assert rep.fidelity == pytest.approx(1 - failure_probability(codec, (1 - q1, q1)), abs=1e-9)
    assert rep.garbage_zero_probability == pytest.approx(1 - failure_probability(codec, (1 - q1, q1)), abs=1e-9)


def test_enumerative_codec_on_diagonal_source():
    codec = build_enumerative_codec(5, 1)
    for synthesis in ("table", "bennett", "pebbled:2,1"):
        rep = exact_fidelity(make_quantum_compression_circuit(DIAG, codec, synthesis), DIAG)
        assert rep.fidelity == pytest.approx(lossless_mass(codec, 0.1), abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_exact_backends_match_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    src = random_source(rng, k=2)
    q = eigendecompose(density_matrix(src)).values
    n = 2 + seed % 2
    codec = build_optimal_codec(q, n, int(rng.integers(0, n)))
    p = make_quantum_compression_circuit(src, codec)
    oracle = dense_fidelity(p, src)
    assert exact_fidelity(p, src).fidelity == pytest.approx(oracle, abs=1e-9)
    assert exact_fidelity(p, src, backend="statevector").fidelity == pytest.approx(oracle, abs=1e-9)


def test_nonorthogonal_source_backends_agree():
    q = eigendecompose(density_matrix(MIXED)).values
    codec = build_optimal_codec(q, 4, choose_code_length(q, 4, 0.1))
    p = make_quantum_compression_circuit(MIXED, codec)
    a = exact_fidelity(p, MIXED).fidelity
    b = exact_fidelity(p, MIXED, backend="statevector").fidelity
    assert a == pytest.approx(b, abs=1e-9)
    pb = make_quantum_compression_circuit(MIXED, codec, "bennett")
    assert exact_fidelity(pb, MIXED).fidelity == pytest.approx(a, abs=1e-9)


def test_forward_invariant_on_lossless_strings():
    for synthesis in ("table", "bennett", "pebbled:2,2"):
        codec = build_enumerative_codec(5, 2)
        p = make_quantum_compression_circuit(DIAG, codec, synthesis)
        x = np.array(sorted(codec.lossless_set()))
        garbage, code, dirty = run(p.forward, x, 5, codec.m)
        assert not garbage.any() and not dirty.any()
        np.testing.assert_array_equal(code, codec.encode_table[x])


def test_compress_basis_states():
    codec = build_optimal_codec((0.9, 0.1), 4, 2)
    p = make_quantum_compression_circuit(DIAG, codec)
    for x in range(16):
        bx = StateVector.basis(4, x)
        code, trial = compress(p, bx, np.random.default_rng(x))
        assert trial.outcome_probability == pytest.approx(1.0)
        cx = codec.encode(x)
        np.testing.assert_allclose(code.amplitudes, StateVector.basis(2, cx).amplitudes)
        g = x ^ codec.decode(cx)
        assert trial.garbage_outcome == tuple((g >> i) & 1 for i in range(4))
        if g == 0:
            np.testing.assert_allclose(decompress(p, code).amplitudes, bx.amplitudes, atol=1e-12)


@pytest.mark.parametrize("synthesis", ["table", "bennett"])
def test_identity_codec_round_trip(synthesis, rng):
    codec = build_identity_codec(2)
    src = random_source(rng)
    p = make_quantum_compression_circuit(src, codec, synthesis)
    for _ in range(5):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi = StateVector(2, v / np.linalg.norm(v))
        code, trial = compress(p, psi, rng)
        assert trial.outcome_probability == pytest.approx(1.0)
        np.testing.assert_allclose(decompress(p, code).amplitudes, psi.amplitudes, atol=1e-10)
    assert exact_fidelity(p, src).fidelity == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_unitary_round_trip(seed):
    rng = np.random.default_rng(seed)
    src = random_source(rng)
    n = int(rng.integers(1, 6))
    q = eigendecompose(density_matrix(src)).values
    codec = build_optimal_codec(q, n, int(rng.integers(0, min(n, 10 - n) + 1)))
    circ = make_quantum_compression_circuit(src, codec).compiled_circuit()
    v = rng.normal(size=1 << circ.width) + 1j * rng.normal(size=1 << circ.width)
    psi = StateVector(circ.width, v / np.linalg.norm(v))
    back = apply_circuit(apply_circuit(psi, circ), reverse(circ))
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(sources(max_entries=3), st.integers(0, 2**32 - 1))
def test_rotation_covariance(src, seed):
    rng = np.random.default_rng(seed)
    n = 3
    q = eigendecompose(density_matrix(src)).values
    m = choose_code_length(q, n, 0.2)
    f = exact_fidelity(make_quantum_compression_circuit(src, build_optimal_codec(q, n, m)), src).fidelity
    rotated = src.rotated(random_unitary(rng))
    q2 = eigendecompose(density_matrix(rotated)).values
    g = exact_fidelity(make_quantum_compression_circuit(rotated, build_optimal_codec(q2, n, m)), rotated).fidelity
    assert g == pytest.approx(f, abs=1e-9)


def test_mc_is_deterministic_and_agrees():
    p = make_quantum_compression_circuit(DIAG, build_optimal_codec((0.9, 0.1), 2, 1))
    a = mc_fidelity(p, DIAG, 10_000, seed=3)
    b = mc_fidelity(p, DIAG, 10_000, seed=3)
    assert a.to_dict() == b.to_dict()
    assert a.trials == 10_000 and a.fidelity_mode == "monte-carlo"
    f = exact_fidelity(p, DIAG).fidelity
    assert abs(a.fidelity - f) <= 4 * math.sqrt(f * (1 - f) / 10_000)
    with pytest.raises(ValidationError):
        mc_fidelity(p, DIAG, 0)


def test_mc_hadamard_trials_are_perfect():
    p = make_quantum_compression_circuit(HADAMARD, build_optimal_codec((1.0, 0.0), 3, 0))
    rng = np.random.default_rng(1)
    assert all(run_trial(p, HADAMARD, rng).fidelity_contribution == pytest.approx(1.0) for _ in range(20))


def test_sweep_examples():
    rows = sweep(HADAMARD, [1, 2, 4], 0.1)
    assert all(r.m == 0 and r.rate == 0 and r.fidelity == pytest.approx(1.0) and r.entropy_bits == 0 for r in rows)
    (row,) = sweep(DIAG, [12], 0.05)
    assert row.m == 8 and row.rate == pytest.approx(2 / 3) and row.fidelity_mode == "exact"
    assert row.fidelity == pytest.approx(1 - 0.04230, abs=5e-5)
    with pytest.raises(ValidationError):
        sweep(DIAG, [], 0.1)


def test_budget_and_fallback():
    p = make_quantum_compression_circuit(MIXED, build_optimal_codec((0.85, 0.15), 3, 2))
    with pytest.raises(BudgetError):
        exact_fidelity(p, MIXED, budget=10)
    rep = evaluate_pipeline(p, MIXED, budget=10, trials=200, seed=1)
    assert rep.fidelity_mode == "monte-carlo" and rep.trials == 200


def test_pipeline_from_compiled_circuit():
    codec = build_optimal_codec((0.85, 0.15), 3, 2)
    p = make_quantum_compression_circuit(MIXED, codec)
    q = pipeline_from_circuit(p.compiled_circuit())
    np.testing.assert_allclose(q.rotation, p.rotation)
    assert q.forward.gates == p.forward.gates
    assert exact_fidelity(q, MIXED).fidelity == pytest.approx(exact_fidelity(p, MIXED).fidelity, abs=1e-12)


def test_codec_length_mismatch():
    with pytest.raises(ValidationError):
        make_quantum_compression_circuit(DIAG, build_optimal_codec((0.9, 0.1), 3, 1), n=4)
