"""
I.i.d. single-qubit sources: density matrix, eigenbasis, entropies, sampling.

A source emits ``state_i`` with probability ``p_i``. Everything downstream only
needs the density matrix of one emitted qubit and its eigendecomposition
``rho = R diag(q0, q1) R^dagger`` with ``q0 >= q1``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParseError, ValidationError

INPUT_TOL = 1e-12
CHAIN_TOL = 1e-9
EIG_TOL = 1e-10
_NORMALIZE_TOL = 1e-6


@dataclass(frozen=True)
class PureQubitState:
    a0: complex
    a1: complex

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > INPUT_TOL:
            raise ValidationError(f"amplitudes: |a0|^2 + |a1|^2 = {norm!r}, expected 1")

    @classmethod
    def normalized(cls, a0, a1, tol=_NORMALIZE_TOL):
        """Build a state, rescaling when the squared norm is within ``tol`` of 1."""
        a0, a1 = complex(a0), complex(a1)
        norm = abs(a0) ** 2 + abs(a1) ** 2
        if abs(norm - 1.0) > tol:
            raise ValidationError(f"amp: squared norm {norm!r} deviates from 1 by more than {tol}")
        s = math.sqrt(norm)
        return cls(a0 / s, a1 / s)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)


KET0 = PureQubitState(1, 0)
KET1 = PureQubitState(0, 1)
KET_PLUS = PureQubitState(1 / math.sqrt(2), 1 / math.sqrt(2))
KET_MINUS = PureQubitState(1 / math.sqrt(2), -1 / math.sqrt(2))


@dataclass(frozen=True)
class QubitSource:
    entries: tuple[tuple[float, PureQubitState], ...]

    def __post_init__(self):
        entries = tuple((float(p), s) for p, s in self.entries)
        if not entries:
            raise ValidationError("entries: source must have at least one state")
        for i, (p, s) in enumerate(entries):
            if not isinstance(s, PureQubitState):
                raise ValidationError(f"entries[{i}].state: expected PureQubitState")
            if not p >= 0.0:
                raise ValidationError(f"entries[{i}].p: probability {p!r} is negative")
        total = math.fsum(p for p, _ in entries)
        if abs(total - 1.0) > INPUT_TOL:
            raise ValidationError(f"entries[].p: probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "entries", entries)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries])

    @property
    def states(self) -> tuple[PureQubitState, ...]:
        return tuple(s for _, s in self.entries)

    def __len__(self):
        return len(self.entries)

    def rotated(self, u) -> "QubitSource":
        """The same source with every state mapped through the 2x2 unitary ``u``."""
        u = np.asarray(u, dtype=complex)
        out = []
        for p, s in self.entries:
            v = u @ s.vector
            out.append((p, PureQubitState.normalized(v[0], v[1], tol=CHAIN_TOL)))
        return QubitSource(tuple(out))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.shape != (2, 2):
            raise ValidationError(f"matrix: expected shape (2, 2), got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > INPUT_TOL:
            raise ValidationError("matrix: not Hermitian")
        if abs(np.trace(rho) - 1.0) > INPUT_TOL:
            raise ValidationError(f"matrix: trace {np.trace(rho).real!r}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < -INPUT_TOL:
            raise ValidationError("matrix: negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Eigenvalues in descending order; column j of ``vectors`` belongs to ``values[j]``."""

    values: tuple[float, float]
    vectors: np.ndarray

    @property
    def rotation(self) -> np.ndarray:
        """The single-qubit map W = R^dagger sending the eigenbasis to |0>, |1>."""
        return self.vectors.conj().T

    def recompose(self) -> np.ndarray:
        return self.vectors @ np.diag(self.values) @ self.vectors.conj().T


def density_matrix(source: QubitSource) -> DensityMatrix:
    rho = np.zeros((2, 2), dtype=complex)
    for p, s in source.entries:
        v = s.vector
        rho += p * np.outer(v, v.conj())
    return DensityMatrix(rho)


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    # first component above tolerance made real and positive
    for c in v:
        if abs(c) > EIG_TOL:
            return v * (abs(c) / c)
    return v


def eigendecompose(rho: DensityMatrix) -> EigenBasis:
    """Deterministic eigendecomposition of a single-qubit density matrix.

    Diagonal matrices get a permutation (the identity unless the |1> population
    dominates), so a computationally aligned source needs no rotation. Otherwise
    eigenvectors come from ``eigh`` with their phase fixed so the first
    nonzero component is real and positive.
    """
    m = rho.matrix
    if abs(m[0, 1]) <= INPUT_TOL:
        d0, d1 = float(m[0, 0].real), float(m[1, 1].real)
        if d0 >= d1:
            values, vecs = (d0, d1), np.eye(2, dtype=complex)
        else:
            values, vecs = (d1, d0), np.array([[0, 1], [1, 0]], dtype=complex)
    else:
        w, v = np.linalg.eigh(m)
        order = [1, 0]
        if abs(w[1] - w[0]) <= EIG_TOL and abs(v[0, 0]) > abs(v[0, 1]):
            order = [0, 1]
        values = (float(w[order[0]]), float(w[order[1]]))
        vecs = np.column_stack([_canonical_phase(v[:, j]) for j in order])
    q0, q1 = values
    if q1 <= INPUT_TOL:
        q0, q1 = 1.0, 0.0
    vecs.setflags(write=False)
    return EigenBasis((q0, q1), vecs)


def shannon_entropy(dist: Sequence[float]) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(dist, dtype=float)
    if np.any(p < 0):
        raise ValidationError(f"dist: negative probability {float(p.min())!r}")
    if abs(p.sum() - 1.0) > CHAIN_TOL:
        raise ValidationError(f"dist: probabilities sum to {float(p.sum())!r}, expected 1")
    nz = p[p > 0]
    h = -float(np.sum(nz * np.log2(nz)))
    return h if h > 0 else 0.0


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return shannon_entropy(eigendecompose(rho).values)


def sample_sequence(source: QubitSource, length: int, seed) -> tuple[int, ...]:
    """Draw ``length`` i.i.d. entry indices.

    ``seed`` is anything ``numpy.random.default_rng`` accepts (an int, a
    ``SeedSequence`` or an existing ``Generator``); the PCG64 stream makes the
    result reproducible across platforms.
    """
    if length < 0:
        raise ValidationError(f"length: {length} is negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if len(source) == 1:
        return (0,) * length
    p = source.probabilities
    return tuple(int(i) for i in rng.choice(len(p), size=length, p=p / p.sum()))


def source_from_json(text: str) -> QubitSource:
    """Parse ``{"states": [{"p": .., "amp": [[re0, im0], [re1, im1]]}, ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("states"), list):
        raise ParseError("states: expected a list of {p, amp} objects")
    entries = []
    for i, item in enumerate(doc["states"]):
        try:
            p = float(item["p"])
            (r0, i0), (r1, i1) = item["amp"]
            state = PureQubitState.normalized(complex(r0, i0), complex(r1, i1))
        except ValidationError as exc:
            raise ParseError(f"states[{i}].{exc}") from None
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"states[{i}]: expected {{'p': float, 'amp': [[re, im], [re, im]]}}") from None
        entries.append((p, state))
    try:
        return QubitSource(tuple(entries))
    except ValidationError as exc:
        raise ParseError(f"states: {exc}") from None


def source_to_json(source: QubitSource) -> str:
    states = [
        {"p": p, "amp": [[s.a0.real, s.a0.imag], [s.a1.real, s.a1.imag]]}
        for p, s in source.entries
    ]
    return json.dumps({"states": states})


def load_source(path) -> QubitSource:
    with open(path, encoding="utf-8") as fh:
        return source_from_json(fh.read())
