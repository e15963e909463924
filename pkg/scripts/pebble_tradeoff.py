"""Space/time profile of pebbled enumerative encoders.

For each (m, k) schedule over m**k stages, compile the staged encoder and
report checkpoints, total width and gate count next to the closed forms.
"""
import argparse

from qbc.codec import build_enumerative_codec
from qbc.revcomp import enumerative_encoder_stages, pebble_schedule, pebbled_compile, resource_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--wmax", type=int, default=3)
    args = ap.parse_args()
    m_code = build_enumerative_codec(args.n, args.wmax).m if args.n <= 24 else None
    print(f"n={args.n} wmax={args.wmax} code bits={m_code}")
    print(f"{'m':>2} {'k':>2} {'segs':>5} {'pebbles':>7} {'k(m-1)+1':>8} {'moves':>6} {'(2m-1)^k':>8} {'width':>6} {'gates':>7}")
    for m in (2, 3, 4, 8, 16):
        for k in range(1, 5):
            segs = m**k
            if segs > args.n:
                continue
            s = pebble_schedule(m, k)
            c = pebbled_compile(enumerative_encoder_stages(args.n, args.wmax, segs), s, n_out=m_code)
            rep = resource_report(c, s)
            print(
                f"{m:>2} {k:>2} {segs:>5} {rep.max_pebbles:>7} {k * (m - 1) + 1:>8} "
                f"{rep.segment_evaluations:>6} {(2 * m - 1) ** k:>8} {rep.width:>6} {rep.total_gates:>7}"
            )


if __name__ == "__main__":
    main()
