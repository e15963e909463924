"""
Command-line front end.

Exit codes: 0 ok, 1 usage, 2 unreadable input, 3 capacity.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import codec as codec_mod
from .errors import CapacityError, ParseError, QBCError, ValidationError
from .pipeline import (
    exact_fidelity,
    make_quantum_compression_circuit,
    mc_fidelity,
    parse_synthesis,
    pipeline_from_circuit,
    sweep,
)
from .revcomp import resource_report
from .revcomp.textio import dumps, read_circuit
from .source_model import density_matrix, eigendecompose, load_source, von_neumann_entropy

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(doc, args, out=None) -> None:
    if getattr(args, "pretty", False):
        text = _pretty(doc)
    else:
        text = json.dumps(doc, indent=None if out else 2)
    if out:
        _atomic_write(out, text + "\n")
    else:
        print(text)


def _pretty(doc) -> str:
    rows = doc if isinstance(doc, list) else [doc]
    lines = []
    for row in rows:
        lines.append("  ".join(f"{k}={v}" for k, v in row.items() if not isinstance(v, (dict, list))))
    return "\n".join(lines)


def _read_source(path):
    try:
        return load_source(path)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def cmd_entropy(args) -> int:
    source = _read_source(args.source)
    rho = density_matrix(source)
    basis = eigendecompose(rho)
    r = basis.vectors
    doc = {
        "entropy_bits": von_neumann_entropy(rho),
        "eigenvalues": list(basis.values),
        "rotation": [[[v.real, v.imag] for v in row] for row in r],
    }
    _emit(doc, args)
    return EXIT_OK


def cmd_codec_build(args) -> int:
    if args.kind == "optimal":
        if (args.m is None) == (args.delta is None):
            raise UsageError("optimal codecs need exactly one of --m or --delta")
        if args.source is None:
            raise UsageError("optimal codecs need --source")
        if args.wmax is not None:
            raise UsageError("--wmax only applies to --kind enumerative")
    else:
        if args.wmax is None:
            raise UsageError("enumerative codecs need --wmax")
        if args.m is not None or args.delta is not None:
            raise UsageError("--m/--delta do not apply to --kind enumerative")
    if args.n > codec_mod.TABLE_MAX_N:
        raise CapacityError(f"n={args.n} exceeds the table bound {codec_mod.TABLE_MAX_N}")
    q = None
    if args.source is not None:
        q = eigendecompose(density_matrix(_read_source(args.source))).values
    if args.kind == "optimal":
        m = args.m if args.m is not None else codec_mod.choose_code_length(q, args.n, args.delta)
        codec = codec_mod.build_optimal_codec(q, args.n, m)
    else:
        codec = codec_mod.build_enumerative_codec(args.n, args.wmax)
    _atomic_write(args.out, codec_mod.codec_to_json(codec) + "\n")
    fail = codec_mod.failure_probability(codec, q) if q is not None else None
    _emit({"kind": codec.kind, "n": codec.n, "m": codec.m, "failure_probability": fail}, args)
    return EXIT_OK


def _read_codec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return codec_mod.codec_from_json(fh.read())
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def cmd_compile(args) -> int:
    source = _read_source(args.source)
    codec = _read_codec(args.codec)
    parse_synthesis(args.synthesis)
    pipeline = make_quantum_compression_circuit(source, codec, args.synthesis)
    circuit = pipeline.compiled_circuit()
    _atomic_write(args.out, dumps(circuit, measure=range(pipeline.n)))
    rep = resource_report(pipeline.forward, pipeline.schedule).to_dict()
    rep.update(n=pipeline.n, m=pipeline.m, synthesis=pipeline.synthesis)
    sidecar = f"{args.out}.resources.json"
    _atomic_write(sidecar, json.dumps(rep) + "\n")
    _emit({"circuit": str(args.out), "resources": sidecar, **rep}, args)
    return EXIT_OK


def cmd_run(args) -> int:
    if args.mode == "mc" and args.trials is None:
        raise UsageError("--mode mc requires --trials")
    source = _read_source(args.source)
    try:
        circuit, _ = read_circuit(args.circuit)
    except OSError as exc:
        raise ParseError(f"{args.circuit}: {exc.strerror}") from None
    pipeline = pipeline_from_circuit(circuit)
    if args.mode == "exact":
        report = exact_fidelity(pipeline, source)
    else:
        report = mc_fidelity(pipeline, source, args.trials, args.seed)
    _emit(report.to_dict(), args, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        n_list = [int(t) for t in args.n_list.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--n-list: cannot parse {args.n_list!r}") from None
    if not n_list:
        raise UsageError("--n-list is empty")
    source = _read_source(args.source)
    reports = sweep(source, n_list, args.delta, args.synthesis, trials=args.trials, seed=args.seed)
    _emit([r.to_dict() for r in reports], args, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbc", description="Quantum block compression compiler and simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = common(sub.add_parser("entropy", help="von Neumann entropy and eigenbasis of a source"))
    sp.add_argument("--source", required=True)
    sp.set_defaults(func=cmd_entropy)

    sp = common(sub.add_parser("codec-build", help="build a classical block codec"))
    sp.add_argument("--source")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--kind", choices=("optimal", "enumerative"), default="optimal")
    sp.add_argument("--wmax", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_codec_build)

    sp = common(sub.add_parser("compile", help="compile source + codec into a circuit file"))
    sp.add_argument("--source", required=True)
    sp.add_argument("--codec", required=True)
    sp.add_argument("--synthesis", default="table", help="table | bennett | pebbled:M,K")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_compile)

    sp = common(sub.add_parser("run", help="simulate a compiled circuit and report fidelity"))
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--source", required=True)
    sp.add_argument("--mode", choices=("exact", "mc"), default="exact")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_run)

    sp = common(sub.add_parser("sweep", help="rate/fidelity over block lengths"))
    sp.add_argument("--source", required=True)
    sp.add_argument("--n-list", required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--synthesis", default="table")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qbc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"qbc: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ParseError as exc:
        print(f"qbc: input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as exc:
        # bad flag values (synthesis string, delta range) are usage problems
        print(f"qbc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QBCError as exc:
        print(f"qbc: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
