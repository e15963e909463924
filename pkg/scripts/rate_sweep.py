"""Exact-enumeration code rate against block length for a biased source.

Prints the smallest rate m/n whose optimal block code fails with
probability at most delta, next to the entropy it approaches.
"""
import argparse

from qbc import choose_code_length, shannon_entropy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q1", type=float, default=0.25)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--n-max", type=int, default=64)
    args = ap.parse_args()
    q = (1 - args.q1, args.q1)
    h = shannon_entropy(q)
    print(f"H = {h:.4f} bits, delta = {args.delta}")
    print(f"{'n':>4} {'m':>4} {'rate':>7} {'rate - H':>9}")
    for n in range(1, args.n_max + 1):
        m = choose_code_length(q, n, args.delta)
        print(f"{n:>4} {m:>4} {m / n:>7.4f} {m / n - h:>9.4f}")


if __name__ == "__main__":
    main()
