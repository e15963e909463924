"""Fidelity of a pure |+> source at rate 0, with and without the eigenbasis rotation."""
import argparse
import dataclasses

import numpy as np

from qbc import build_optimal_codec, exact_fidelity, make_quantum_compression_circuit
from qbc.source_model import KET_PLUS, QubitSource


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3, 4, 6, 8])
    args = ap.parse_args()
    src = QubitSource(((1.0, KET_PLUS),))
    print(f"{'n':>3} {'rate':>5} {'F rotated':>10} {'F plain':>10} {'2^-n':>10}")
    for n in args.n:
        p = make_quantum_compression_circuit(src, build_optimal_codec((1.0, 0.0), n, 0))
        f = exact_fidelity(p, src).fidelity
        g = exact_fidelity(dataclasses.replace(p, rotation=np.eye(2)), src).fidelity
        print(f"{n:>3} {p.rate:>5.2f} {f:>10.6f} {g:>10.6f} {2.0**-n:>10.6f}")


if __name__ == "__main__":
    main()
