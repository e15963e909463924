"""
Bennett's pebble game on a linear chain of segments.

Segment ``i`` can be (un)computed only while segment ``i - 1`` holds a pebble
(segment 1 reads the never-modified input). The recursive strategy with
fan-in ``m`` and depth ``k`` covers ``m**k`` segments with ``k(m - 1) + 1``
pebbles and ``(2m - 1)**k`` moves, trading space logarithmic in the segment
count against a polynomial blow-up in recomputation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from ..errors import CapacityError, ValidationError
from .boolean import BoolCircuit, bennett_gates
from .circuit import CX, ReversibleCircuit

MAX_SEGMENTS = 1 << 20
MAX_MOVES = 1 << 20


class Move(NamedTuple):
    kind: str  # "place" | "remove"
    segment: int

    def __repr__(self):
        return f"{self.kind}({self.segment})"


def place(i: int) -> Move:
    return Move("place", i)


def remove(i: int) -> Move:
    return Move("remove", i)


@dataclass(frozen=True)
class PebbleSchedule:
    num_segments: int
    moves: tuple[Move, ...]
    params: tuple[int, int] | None = None  # (fan-in m, depth k)

    @property
    def max_pebbles(self) -> int:
        held, peak = set(), 0
        for mv in self.moves:
            if mv.kind == "place":
                held.add(mv.segment)
            else:
                held.discard(mv.segment)
            peak = max(peak, len(held))
        return peak

    @property
    def segment_evaluations(self) -> int:
        # every move runs one segment block, forwards or backwards
        return len(self.moves)


def pebble_schedule(m: int, k: int) -> PebbleSchedule:
    if m < 2 or k < 1:
        raise ValidationError(f"need m >= 2 and k >= 1, got m={m}, k={k}")
    if m**k > MAX_SEGMENTS:
        raise CapacityError(f"m**k = {m ** k} segments exceeds {MAX_SEGMENTS}")
    if (2 * m - 1) ** k > MAX_MOVES:
        raise CapacityError(f"(2m-1)**k = {(2 * m - 1) ** k} moves exceeds {MAX_MOVES}")

    def advance(start: int, level: int) -> list[Move]:
        # move a pebble from `start` to `start + m**level`, other pebbles untouched
        if level == 0:
            return [place(start + 1)]
        step = m ** (level - 1)
        subs = [advance(start + j * step, level - 1) for j in range(m)]
        moves = [mv for sub in subs for mv in sub]
        for sub in reversed(subs[:-1]):
            moves += [Move("remove" if mv.kind == "place" else "place", mv.segment) for mv in reversed(sub)]
        return moves

    return PebbleSchedule(m**k, tuple(advance(0, k)), (m, k))


def validate_schedule(schedule: PebbleSchedule) -> list[str]:
    """Rule violations, 1-based move numbers; an empty list means valid."""
    t = schedule.num_segments
    held: set[int] = set()
    problems = []
    for n, mv in enumerate(schedule.moves, start=1):
        i = mv.segment
        if mv.kind not in ("place", "remove"):
            problems.append(f"move {n}: unknown move kind {mv.kind!r}")
            continue
        if not 1 <= i <= t:
            problems.append(f"move {n}: {mv!r} outside segments 1..{t}")
            continue
        if i > 1 and i - 1 not in held:
            problems.append(f"move {n}: {mv!r} needs a pebble on segment {i - 1}")
        if mv.kind == "place":
            if i in held:
                problems.append(f"move {n}: {mv!r} on an already pebbled segment")
            held.add(i)
        else:
            if i not in held:
                problems.append(f"move {n}: {mv!r} on an empty segment")
            held.discard(i)
    if held != {t}:
        problems.append(f"final configuration {sorted(held)} is not [{t}]")
    return problems


def pebbled_compile(
    stages: Sequence[BoolCircuit], schedule: PebbleSchedule, n_out: int | None = None
) -> ReversibleCircuit:
    """Compile a chain of stages under a pebbling schedule.

    Stage 1 reads the input register; stage ``i > 1`` reads checkpoint
    ``i - 1``, optionally followed by the input register. All checkpoints have
    the same live width. The first ``n_out`` wires of the last checkpoint are
    XOR-copied into the code register and the whole schedule is then run
    backwards, so every checkpoint and work qubit ends at 0.

    Layout: input, code, checkpoint (max_pebbles slots), work.
    """
    if len(stages) != schedule.num_segments:
        raise ValidationError(f"{len(stages)} stages but schedule has {schedule.num_segments} segments")
    bad = validate_schedule(schedule)
    if bad:
        raise ValidationError(f"invalid schedule: {bad[0]}")
    n = stages[0].n_inputs
    live = stages[0].n_outputs
    for s, st in enumerate(stages):
        if st.n_outputs != live:
            raise ValidationError(f"stage {s + 1}: live width {st.n_outputs} != {live}")
        if s and st.n_inputs not in (live, live + n):
            raise ValidationError(f"stage {s + 1}: arity {st.n_inputs} fits neither checkpoint nor checkpoint+input")
    m = live if n_out is None else n_out
    if not 0 <= m <= live:
        raise ValidationError(f"n_out={m} exceeds live width {live}")
    slots = schedule.max_pebbles
    ck0 = n + m
    work0 = ck0 + slots * live
    nwork = max(len(st.gates) for st in stages)
    width = work0 + nwork
    work = range(work0, width)

    free = list(range(slots))
    slot_of: dict[int, int] = {}

    def slot_qubits(i):
        lo = ck0 + slot_of[i] * live
        return list(range(lo, lo + live))

    forward = []
    for mv in schedule.moves:
        i = mv.segment
        if mv.kind == "place":
            slot_of[i] = free.pop(0)
        st = stages[i - 1]
        if i == 1:
            ins = list(range(n))
        else:
            ins = slot_qubits(i - 1) + (list(range(n)) if st.n_inputs == live + n else [])
        forward += bennett_gates(st, ins, slot_qubits(i), work)
        if mv.kind == "remove":
            free.append(slot_of.pop(i))
            free.sort()
    last = slot_qubits(schedule.num_segments)
    copy = [CX(last[j], n + j) for j in range(m)]
    gates = forward + copy + forward[::-1]
    regs = {
        "input": (0, n),
        "code": (n, n + m),
        "checkpoint": (ck0, work0),
        "work": (work0, width),
    }
    return ReversibleCircuit(width, gates, regs)
