"""Exact Eisenstein cycle coefficients against numeric contour periods.

    python scripts/oracle_table.py --N 3 --divisor "a0 - c1" --bits 128 --steps 1024
"""

import argparse
import time

import mpmath as mp

from cuspforge.analytic import TruncationParams
from cuspforge.cuspidal import parse_divisor
from cuspforge.dessin import from_fermat
from cuspforge.eisenstein import boundary_check, fermat_cycle, verify_with_oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--divisor", default="a0 - c1")
    ap.add_argument("--labeling", default="combinatorial")
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--steps", type=int, default=2048)
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--den-bound", type=int, default=18)
    ap.add_argument("--tol", type=float, default=1e-6)
    args = ap.parse_args()

    n = args.N
    d = from_fermat(n)
    div = parse_divisor(args.divisor, d, n, args.labeling)
    cycle = fermat_cycle(n, div)
    prm = TruncationParams(precision=args.bits, quad_steps=args.steps, eps=args.eps)
    print(f"D = {div}  side {cycle.side}  boundary check {boundary_check(d, cycle)}")
    t0 = time.perf_counter()
    rows = verify_with_oracle(n, cycle, prm, args.den_bound, args.tol)
    print(f"{'coset':>5}  {'exact':>8}  {'numeric':>24}  {'error':>9}  recognized  ok")
    for r in rows:
        est = r["numeric"]
        rec = r["recognized"]
        shown = str(rec.value) if rec else rec.status
        print(f"{r['coset']:>5}  {str(r['exact']):>8}  {mp.nstr(mp.re(est.value), 18):>24}  {mp.nstr(est.error, 2):>9}  {shown:>10}  {r['ok']}")
    print(f"{sum(r['ok'] for r in rows)}/{len(rows)} agree, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
