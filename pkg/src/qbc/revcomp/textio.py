"""
Line-oriented circuit files::

    qbc-circuit v1
    qubits 7
    reg input 0 3
    x 2
    cx 0 4
    ccx 1 2 5
    mcx +1 -2 +3 ; 6
    u1 0 re00 im00 re01 im01 re10 im10 re11 im11
    measure 0 1 2 3

``reg`` bounds are inclusive and empty registers are omitted. ``measure``
lines may only form a trailing block. Blank lines and ``#`` comments are
ignored.
"""
from __future__ import annotations

from .circuit import CCX, CX, MCX, U1, ReversibleCircuit, X
from ..errors import ParseError, ValidationError

HEADER = "qbc-circuit v1"


def dumps(circuit: ReversibleCircuit, measure=()) -> str:
    lines = [HEADER, f"qubits {circuit.width}"]
    for name, (lo, hi) in circuit.registers.items():
        if hi > lo:
            lines.append(f"reg {name} {lo} {hi - 1}")
    for g in circuit.gates:
        if isinstance(g, X):
            lines.append(f"x {g.target}")
        elif isinstance(g, CX):
            lines.append(f"cx {g.control} {g.target}")
        elif isinstance(g, CCX):
            lines.append(f"ccx {g.control1} {g.control2} {g.target}")
        elif isinstance(g, MCX):
            ctl = " ".join(f"{'+' if p else '-'}{q}" for q, p in g.controls)
            lines.append(f"mcx {ctl} ; {g.target}".replace("mcx  ;", "mcx ;"))
        elif isinstance(g, U1):
            nums = " ".join(f"{v.real!r} {v.imag!r}" for row in g.matrix for v in row)
            lines.append(f"u1 {g.qubit} {nums}")
    if len(measure):
        lines.append("measure " + " ".join(str(q) for q in measure))
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def loads(text: str) -> tuple[ReversibleCircuit, tuple[int, ...]]:
    """Parse a circuit file into ``(circuit, measured qubits)``."""
    width = None
    regs: dict[str, tuple[int, int]] = {}
    gates = []
    measure: list[int] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != HEADER:
                raise ParseError(f"expected header {HEADER!r}", lineno)
            seen_header = True
            continue
        op, *args = line.split()
        if measure and op != "measure":
            raise ParseError("only measure lines may follow a measure line", lineno)
        if op == "qubits":
            if width is not None or len(args) != 1:
                raise ParseError("malformed or repeated qubits line", lineno)
            (width,) = _ints(args, lineno)
            continue
        if width is None:
            raise ParseError("qubits line must precede registers and gates", lineno)
        if op == "reg":
            if len(args) != 3:
                raise ParseError("reg needs NAME LO HI", lineno)
            lo, hi = _ints(args[1:], lineno)
            if args[0] in regs or hi < lo:
                raise ParseError(f"bad register {args[0]!r}", lineno)
            regs[args[0]] = (lo, hi + 1)
        elif op == "x" and len(args) == 1:
            gates.append(X(*_ints(args, lineno)))
        elif op == "cx" and len(args) == 2:
            gates.append(CX(*_ints(args, lineno)))
        elif op == "ccx" and len(args) == 3:
            gates.append(CCX(*_ints(args, lineno)))
        elif op == "mcx":
            if ";" not in args or args.count(";") != 1 or args.index(";") != len(args) - 2:
                raise ParseError("mcx needs CONTROLS ; TARGET", lineno)
            controls = []
            for tok in args[:-2]:
                if tok[:1] not in "+-" or len(tok) < 2:
                    raise ParseError(f"mcx control {tok!r} lacks a +/- polarity", lineno)
                controls.append((_ints([tok[1:]], lineno)[0], tok[0] == "+"))
            gates.append(MCX(tuple(controls), _ints(args[-1:], lineno)[0]))
        elif op == "u1" and len(args) == 9:
            (q,) = _ints(args[:1], lineno)
            try:
                v = [float(t) for t in args[1:]]
            except ValueError:
                raise ParseError("u1 entries must be numbers", lineno) from None
            c = [complex(v[i], v[i + 1]) for i in range(0, 8, 2)]
            gates.append(U1(q, ((c[0], c[1]), (c[2], c[3]))))
        elif op == "measure":
            measure += _ints(args, lineno)
        else:
            raise ParseError(f"unknown or malformed line {line!r}", lineno)
    if not seen_header or width is None:
        raise ParseError("missing header or qubits line")
    try:
        circuit = ReversibleCircuit(width, gates, regs)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
    if any(not 0 <= q < width for q in measure):
        raise ParseError("measured qubit out of range")
    return circuit, tuple(measure)


def write_circuit(path, circuit, measure=()):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(circuit, measure))


def read_circuit(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
