from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbc.codec import (
    build_enumerative_codec,
    build_identity_codec,
    build_optimal_codec,
    choose_code_length,
    codec_from_json,
    codec_to_json,
    enumerative_code_length,
    enumerative_decode,
    enumerative_encode,
    explicit_codec,
    failure_probability,
)
from qbc.errors import CapacityError, ParseError


def brute_choose(q1, n, delta):
    """Smallest m by sorting all 2^n blocks in exact rationals."""
    q1 = Fraction(q1)
    q0 = 1 - q1
    probs = sorted((q0 ** (n - bin(x).count("1")) * q1 ** bin(x).count("1") for x in range(1 << n)), reverse=True)
    for m in range(n + 1):
        if sum(probs[1 << m :], Fraction(0)) <= Fraction(delta):
            return m


def brute_enumerative(n, wmax):
    """Codeword of every typical block: position in the (weight, value) order."""
    typical = sorted((bin(x).count("1"), x) for x in range(1 << n) if bin(x).count("1") <= wmax)
    return {x: i for i, (_, x) in enumerate(typical)}


def test_optimal_n2_example():
    c = build_optimal_codec((0.9, 0.1), 2, 1)
    assert [c.encode(x) for x in range(4)] == [0, 1, 0, 0]
    assert [c.decode(k) for k in range(2)] == [0b00, 0b01]
    assert sorted(c.lossless_set()) == [0, 1]
    assert failure_probability(c, (0.9, 0.1)) == pytest.approx(0.10, abs=1e-12)


def test_optimal_full_rate_is_identity():
    c = build_optimal_codec((0.9, 0.1), 5, 5)
    assert c.kind == "identity"
    assert failure_probability(c, (0.9, 0.1)) == 0.0
    np.testing.assert_array_equal(c.encode_table, np.arange(32))


def test_optimal_zero_rate():
    c = build_optimal_codec((0.8, 0.2), 4, 0)
    assert set(c.encode_table.tolist()) == {0}
    assert c.decode(0) == 0
    assert build_optimal_codec((0.2, 0.8), 3, 0).decode(0) == 0b111


def test_optimal_capacity_errors():
    with pytest.raises(CapacityError):
        build_optimal_codec((0.9, 0.1), 3, 4)
    with pytest.raises(CapacityError):
        build_optimal_codec((0.9, 0.1), 25, 3)


def test_choose_code_length_examples():
    assert choose_code_length((0.9, 0.1), 12, 0.05) == 8
    assert choose_code_length((0.9, 0.1), 7, 0.0) == 7
    assert choose_code_length((1.0, 0.0), 9, 0.01) == 0


@pytest.mark.parametrize("q1", ["0.1", "0.25", "0.4", "0.5", "0.7"])
@pytest.mark.parametrize("n", [1, 3, 6, 10])
@pytest.mark.parametrize("delta", ["0.01", "0.1", "0.3"])
def test_choose_code_length_matches_brute_force(q1, n, delta):
    q = (1 - float(q1), float(q1))
    assert choose_code_length(q, n, float(delta)) == brute_choose(float(q1), n, float(delta))


def test_choose_code_length_table_for_rate_trend():
    # frozen from brute_choose; the fixed-rate curve is a sawtooth in n
    assert brute_choose(0.25, 8, 0.1) == 7
    assert choose_code_length((0.75, 0.25), 8, 0.1) == 7
    assert choose_code_length((0.75, 0.25), 20, 0.1) == 18


def test_choose_code_length_meets_delta_minimally():
    q = (0.8, 0.2)
    for n in range(1, 11):
        m = choose_code_length(q, n, 0.05)
        assert failure_probability(build_optimal_codec(q, n, m), q) <= 0.05 + 1e-12
        if m:
            assert failure_probability(build_optimal_codec(q, n, m - 1), q) > 0.05


def test_enumerative_examples():
    c = build_enumerative_codec(4, 1)
    assert c.m == 3
    assert c.encode(0b0000) == 0 and c.encode(0b1000) == 4
    assert c.encode(0b0011) == 0 and c.decode(0) == 0
    full = build_enumerative_codec(3, 3)
    assert full.m == 3 and sorted(full.encode_table.tolist()) == list(range(8))
    assert failure_probability(full, (0.6, 0.4)) == 0.0
    assert failure_probability(build_enumerative_codec(4, 4), (0.9, 0.1)) == 0.0


def test_enumerative_zero_length():
    c = build_enumerative_codec(5, 0)
    assert c.m == 0 and c.decode(0) == 0


@pytest.mark.parametrize("n", range(1, 13))
def test_enumerative_matches_sorted_enumeration(n):
    for wmax in {0, 1, n // 2, n}:
        ref = brute_enumerative(n, wmax)
        assert enumerative_code_length(n, wmax) == (len(ref) - 1).bit_length()
        for x in range(1 << n):
            assert enumerative_encode(x, n, wmax) == ref.get(x, 0)
        for x, c in ref.items():
            assert enumerative_decode(c, n, wmax) == x


def test_enumerative_streaming_large_n():
    n, wmax = 40, 5
    rng = np.random.default_rng(1)
    for _ in range(200):
        bits = rng.choice(n, size=int(rng.integers(0, wmax + 1)), replace=False)
        x = int(sum(1 << int(b) for b in bits))
        assert enumerative_decode(enumerative_encode(x, n, wmax), n, wmax) == x


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.floats(0.0, 1.0), st.data())
def test_lossless_set_invariants(n, q1, data):
    m = data.draw(st.integers(0, n))
    c = build_optimal_codec((1 - q1, q1), n, m)
    lossless = c.lossless_set()
    assert len(lossless) <= 1 << m
    assert all(c.decode(c.encode(int(x))) == x for x in lossless)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.floats(0.01, 0.99))
def test_failure_non_increasing_in_m(n, q1):
    q = (1 - q1, q1)
    fails = [failure_probability(build_optimal_codec(q, n, m), q) for m in range(n + 1)]
    assert all(a >= b - 1e-12 for a, b in zip(fails, fails[1:]))


def test_optimal_failure_is_minimal_exhaustively():
    # every 2-block subset of 3-bit blocks; the optimal code keeps the best mass
    q = (0.7, 0.3)
    p = [0.7 ** (3 - bin(x).count("1")) * 0.3 ** bin(x).count("1") for x in range(8)]
    best = max(p[a] + p[b] for a in range(8) for b in range(a + 1, 8))
    assert failure_probability(build_optimal_codec(q, 3, 1), q) == pytest.approx(1 - best, abs=1e-12)


def test_identity_codec():
    c = build_identity_codec(4)
    assert len(c.lossless_set()) == 16


@pytest.mark.parametrize(
    "codec",
    [
        explicit_codec(2, 1, [0, 1, 0, 0], [0, 1]),
        build_optimal_codec((0.9, 0.1), 12, 8),
        build_enumerative_codec(4, 1),
        build_identity_codec(3),
    ],
)
def test_codec_json_roundtrip(codec):
    again = codec_from_json(codec_to_json(codec))
    assert (again.kind, again.n, again.m) == (codec.kind, codec.n, codec.m)
    np.testing.assert_array_equal(again.encode_table, codec.encode_table)
    np.testing.assert_array_equal(again.decode_table, codec.decode_table)


def test_codec_json_formats():
    assert codec_from_json('{"kind":"explicit-table","n":2,"m":1,"encode":[0,1,0,0],"decode":[0,1]}').encode(1) == 1
    assert codec_from_json('{"kind":"optimal","q1":0.1,"n":12,"m":8}').m == 8
    assert codec_from_json('{"kind":"enumerative","n":4,"wmax":1}').m == 3
    with pytest.raises(ParseError):
        codec_from_json('{"kind":"huffman"}')
    with pytest.raises(ParseError):
        codec_from_json('{"kind":"optimal","n":3}')
