import math

import numpy as np
import pytest
from hypothesis import strategies as st

from qbc.codec import explicit_codec
from qbc.revcomp import bits_to_int, int_to_bits, simulate_batch
from qbc.source_model import PureQubitState, QubitSource


def random_unitary(rng):
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return PureQubitState(v[0], v[1])


def random_source(rng, k=None):
    k = k or int(rng.integers(1, 4))
    p = rng.dirichlet(np.ones(k))
    p[-1] = 1.0 - p[:-1].sum()
    return QubitSource(tuple((float(pi), random_state(rng)) for pi in p))


def random_codec(rng, max_bits=12):
    n = int(rng.integers(1, max_bits))
    m = int(rng.integers(0, min(n, max_bits - n) + 1))
    enc = rng.integers(0, 1 << m, size=1 << n)
    dec = rng.integers(0, 1 << n, size=1 << m)
    return explicit_codec(n, m, enc, dec)


def run(circ, values, n, m):
    """Simulate basis inputs (input + code integers, work 0); return (input, code, work_dirty)."""
    values = np.asarray(values, dtype=np.int64)
    bits = np.zeros((values.size, circ.width), dtype=bool)
    bits[:, : n + m] = int_to_bits(values, n + m)
    out = simulate_batch(circ, bits)
    return bits_to_int(out, 0, n), bits_to_int(out, n, n + m), out[:, n + m :].any(axis=1)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@st.composite
def qubit_states(draw):
    re = st.floats(-1, 1, allow_nan=False)
    a = [complex(draw(re), draw(re)) for _ in range(2)]
    norm = math.sqrt(abs(a[0]) ** 2 + abs(a[1]) ** 2)
    if norm < 1e-3:
        a, norm = [1, 0], 1.0
    return PureQubitState(a[0] / norm, a[1] / norm)


@st.composite
def sources(draw, max_entries=4):
    k = draw(st.integers(1, max_entries))
    w = [draw(st.floats(0.01, 1.0)) for _ in range(k)]
    total = math.fsum(w)
    p = [x / total for x in w]
    p[-1] = 1.0 - math.fsum(p[:-1])
    return QubitSource(tuple((pi, draw(qubit_states())) for pi in p))
