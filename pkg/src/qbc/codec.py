"""
Classical fixed-length block codecs.

Blocks are integers: bit ``i`` of ``x`` is source symbol ``i``. Strings in
docstrings are written as binary numerals, so ``"01"`` is ``x = 1`` (symbol 0
is 1). Every codec is total; inputs outside the lossless set encode to
codeword 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .errors import CapacityError, ParseError, ValidationError

TABLE_MAX_N = 24
KINDS = ("optimal", "enumerative", "identity", "explicit-table")


def popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


@dataclass(frozen=True, eq=False)
class BlockCodec:
    n: int
    m: int
    encode_table: np.ndarray
    decode_table: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.m <= self.n:
            raise CapacityError(f"m={self.m} must satisfy 0 <= m <= n={self.n}")
        if self.kind not in KINDS:
            raise ValidationError(f"kind: unknown codec kind {self.kind!r}")
        enc = np.asarray(self.encode_table, dtype=np.int64)
        dec = np.asarray(self.decode_table, dtype=np.int64)
        if enc.shape != (1 << self.n,) or dec.shape != (1 << self.m,):
            raise ValidationError("encode/decode: tables must have 2^n and 2^m entries")
        if enc.size and (enc.min() < 0 or enc.max() >= 1 << self.m):
            raise ValidationError("encode: codeword out of range")
        if dec.min() < 0 or dec.max() >= 1 << self.n:
            raise ValidationError("decode: block out of range")
        enc.setflags(write=False)
        dec.setflags(write=False)
        object.__setattr__(self, "encode_table", enc)
        object.__setattr__(self, "decode_table", dec)

    def encode(self, x: int) -> int:
        return int(self.encode_table[x])

    def decode(self, c: int) -> int:
        return int(self.decode_table[c])

    def lossless_mask(self) -> np.ndarray:
        x = np.arange(1 << self.n)
        return self.decode_table[self.encode_table] == x

    def lossless_set(self) -> np.ndarray:
        return np.flatnonzero(self.lossless_mask())


def _check_table_bound(n):
    if n > TABLE_MAX_N:
        raise CapacityError(f"n={n} exceeds the table bound {TABLE_MAX_N}")
    if n < 0:
        raise ValidationError(f"n: {n} is negative")


def _weight_order(q, n) -> list[int]:
    # weight classes from most to least probable
    q0, q1 = q
    if q1 < q0:
        return list(range(n + 1))
    if q1 > q0:
        return list(range(n, -1, -1))
    return []  # all strings equiprobable


def ranked_strings(q, n: int) -> np.ndarray:
    """All n-bit blocks by descending product-Bernoulli probability, ties ascending."""
    x = np.arange(1 << n, dtype=np.int64)
    order = _weight_order(q, n)
    if not order:
        return x
    w = popcount(x)
    key = w if order[0] == 0 else -w
    return x[np.lexsort((x, key))]


def build_identity_codec(n: int) -> BlockCodec:
    _check_table_bound(n)
    t = np.arange(1 << n)
    return BlockCodec(n, n, t, t, "identity", {"n": n})


def build_optimal_codec(q, n: int, m: int) -> BlockCodec:
    """Fixed-rate code covering the 2^m most probable blocks.

    ``q = (q0, q1)`` with bit value 1 having probability ``q1``. With ``m == n``
    every block is coded and the identity codec is returned.
    """
    _check_table_bound(n)
    if not 0 <= m <= n:
        raise CapacityError(f"m={m} must satisfy 0 <= m <= n={n}")
    if m == n:
        return build_identity_codec(n)
    top = ranked_strings(q, n)[: 1 << m]
    enc = np.zeros(1 << n, dtype=np.int64)
    enc[top] = np.arange(1 << m)
    return BlockCodec(n, m, enc, top.copy(), "optimal", {"q1": float(q[1]), "n": n, "m": m})


def _class_probabilities(q1, n):
    q1 = Fraction(q1)
    q0 = 1 - q1
    return {w: q0 ** (n - w) * q1**w for w in range(n + 1)}


def optimal_failure_exact(q, n: int, m: int) -> Fraction:
    """Failure probability of the optimal (n, m) code, exactly in rationals.

    The complement ``q0`` is taken as ``1 - q1`` so boundary cases such as
    a failure mass equal to delta compare exactly.
    """
    probs = _class_probabilities(q[1], n)
    order = _weight_order(q, n) or list(range(n + 1))
    keep = 1 << m
    fail = Fraction(0)
    for w in order:
        c = comb(n, w)
        taken = min(c, keep)
        keep -= taken
        fail += (c - taken) * probs[w]
    return fail


def choose_code_length(q, n: int, delta: float) -> int:
    """Smallest m whose optimal (n, m) code fails with probability at most ``delta``."""
    if not 0 <= delta <= 1:
        raise ValidationError(f"delta: {delta!r} not in [0, 1]")
    d = Fraction(delta)
    for m in range(n + 1):
        if optimal_failure_exact(q, n, m) <= d:
            return m
    return n


def enumerative_total(n: int, wmax: int) -> int:
    return sum(comb(n, w) for w in range(wmax + 1))


def enumerative_code_length(n: int, wmax: int) -> int:
    return (enumerative_total(n, wmax) - 1).bit_length()


def enumerative_encode(x: int, n: int, wmax: int) -> int:
    """Table-free encoder: weight offset plus rank among equal-weight blocks."""
    w = bin(x).count("1")
    if w > wmax:
        return 0
    offset = sum(comb(n, v) for v in range(w))
    rank, j = 0, 0
    for p in range(n):
        if x >> p & 1:
            j += 1
            rank += comb(p, j)
    return offset + rank


def enumerative_decode(c: int, n: int, wmax: int) -> int:
    """Inverse of :func:`enumerative_encode` on valid codewords; others map to 0."""
    if c >= enumerative_total(n, wmax):
        return 0
    w = 0
    while c >= comb(n, w):
        c -= comb(n, w)
        w += 1
    x = 0
    for p in range(n - 1, -1, -1):
        if w and comb(p, w) <= c:
            c -= comb(p, w)
            x |= 1 << p
            w -= 1
    return x


def build_enumerative_codec(n: int, wmax: int) -> BlockCodec:
    _check_table_bound(n)
    if not 0 <= wmax <= n:
        raise ValidationError(f"wmax: {wmax} not in [0, {n}]")
    m = enumerative_code_length(n, wmax)
    enc = np.array([enumerative_encode(x, n, wmax) for x in range(1 << n)], dtype=np.int64)
    dec = np.array([enumerative_decode(c, n, wmax) for c in range(1 << m)], dtype=np.int64)
    return BlockCodec(n, m, enc, dec, "enumerative", {"n": n, "wmax": wmax})


def explicit_codec(n: int, m: int, encode: Sequence[int], decode: Sequence[int]) -> BlockCodec:
    _check_table_bound(n)
    return BlockCodec(n, m, np.asarray(encode), np.asarray(decode), "explicit-table")


def block_probabilities(q, n: int) -> np.ndarray:
    """Product-Bernoulli(q1) probability of every n-bit block."""
    _check_table_bound(n)
    w = popcount(np.arange(1 << n))
    return float(q[0]) ** (n - w) * float(q[1]) ** w


def failure_probability(codec: BlockCodec, q) -> float:
    p = block_probabilities(q, codec.n)
    return float(min(max(p[~codec.lossless_mask()].sum(), 0.0), 1.0))


def codec_to_dict(codec: BlockCodec) -> dict:
    if codec.kind == "explicit-table":
        return {
            "kind": "explicit-table",
            "n": codec.n,
            "m": codec.m,
            "encode": codec.encode_table.tolist(),
            "decode": codec.decode_table.tolist(),
        }
    return {"kind": codec.kind, **codec.params}


def codec_from_dict(doc: dict) -> BlockCodec:
    try:
        kind = doc["kind"]
        if kind == "explicit-table":
            return explicit_codec(int(doc["n"]), int(doc["m"]), doc["encode"], doc["decode"])
        if kind == "optimal":
            q1 = float(doc["q1"])
            return build_optimal_codec((1.0 - q1, q1), int(doc["n"]), int(doc["m"]))
        if kind == "enumerative":
            return build_enumerative_codec(int(doc["n"]), int(doc["wmax"]))
        if kind == "identity":
            return build_identity_codec(int(doc["n"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"codec: missing or malformed field {exc}") from None
    except ValidationError as exc:
        raise ParseError(f"codec: {exc}") from None
    raise ParseError(f"kind: unknown codec kind {doc.get('kind')!r}")


def codec_to_json(codec: BlockCodec) -> str:
    return json.dumps(codec_to_dict(codec))


def codec_from_json(text: str) -> BlockCodec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("codec: expected a JSON object")
    return codec_from_dict(doc)
