"""Exact resource counts for circuits and pebbling schedules."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import singledispatch

from .circuit import ReversibleCircuit
from .pebble import PebbleSchedule

GATE_NAMES = ("x", "cx", "ccx", "mcx", "u1")


@dataclass
class ResourceReport:
    width: int = 0
    gate_histogram: dict = field(default_factory=dict)
    ancilla_count: int = 0
    max_pebbles: int = 0
    segment_evaluations: int = 0

    @property
    def total_gates(self) -> int:
        return sum(self.gate_histogram.values())

    def to_dict(self) -> dict:
        d = {"width": self.width, "gates": dict(self.gate_histogram), "ancilla_count": self.ancilla_count}
        if self.max_pebbles or self.segment_evaluations:
            d["max_pebbles"] = self.max_pebbles
            d["segment_evaluations"] = self.segment_evaluations
        return d


@singledispatch
def resource_report(obj, schedule: PebbleSchedule | None = None) -> ResourceReport:
    raise TypeError(f"no resource accounting for {type(obj).__name__}")


@resource_report.register
def _(obj: ReversibleCircuit, schedule: PebbleSchedule | None = None) -> ResourceReport:
    hist = dict.fromkeys(GATE_NAMES, 0)
    for g in obj.gates:
        hist[type(g).__name__.lower()] += 1
    ancilla = obj.width - obj.size("input") - obj.size("code")
    rep = ResourceReport(width=obj.width, gate_histogram=hist, ancilla_count=ancilla)
    if schedule is not None:
        rep.max_pebbles = schedule.max_pebbles
        rep.segment_evaluations = schedule.segment_evaluations
    return rep


@resource_report.register
def _(obj: PebbleSchedule, schedule=None) -> ResourceReport:
    return ResourceReport(max_pebbles=obj.max_pebbles, segment_evaluations=obj.segment_evaluations)
