"""Refinement tables for the Kloosterman-sum estimators on Gamma(2) and Fermat N=3.

Prints phi under c_max doubling, the boundary primitive under c_max and eps
refinement, and periods rebuilt from it next to contour integrals.

    python scripts/estimator_stability.py --cmax 100 200 400
"""

import argparse
from fractions import Fraction

import mpmath as mp

from cuspforge.analytic import TruncationParams, UnitSpec, contour_F, oracle_F, phi_truncated, sD_estimate
from cuspforge.cuspidal import fermat_labels
from cuspforge.dessin import from_fermat, trivial
from cuspforge.gamma2 import GEN_A, GEN_B, IDENTITY
from cuspforge.homology import CuspDivisor


def show(e):
    return f"{mp.nstr(e.value, 10):>32}  +- {mp.nstr(e.error, 2)}"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cmax", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--s", type=float, default=1.5)
    ap.add_argument("--rmax", type=int, default=400)
    args = ap.parse_args()

    g2 = trivial()
    inf, zero, one = (g2.cusp_at(0, k) for k in ("inf", "zero", "one"))
    print(f"phi on Gamma(2) at s = {args.s}")
    for j, k, r in [(inf, inf, 0), (inf, zero, 1), (zero, one, 2)]:
        for cm in args.cmax:
            print(f"  {str(j):>6} {str(k):>6} r={r} c_max={cm:<4}", show(phi_truncated(g2, j, k, r, args.s, cm)))

    div = CuspDivisor({inf: 1, zero: -1})
    print("boundary primitive for (inf) - (zero) at x = 1/3")
    for s in (args.s, 1):
        for cm in args.cmax:
            for eps in (0.04, 0.02):
                prm = TruncationParams(c_max=cm, r_max=args.rmax, eps=eps)
                print(f"  s={s:<4} c_max={cm:<4} eps={eps:<5}", show(sD_estimate(g2, div, Fraction(1, 3), prm, s=s)))

    quick = TruncationParams(eps=1e-3, quad_steps=512, precision=64)
    prm = TruncationParams(c_max=args.cmax[-1], r_max=args.rmax, eps=0.02)
    lam = [(UnitSpec("lambda_itself", 0, 1), 1)]
    print("periods on Gamma(2): primitive difference vs contour integral")
    for name, g in (("id", IDENTITY), ("B", GEN_B), ("AB^-1", GEN_A @ GEN_B.inverse())):
        per = sD_estimate(g2, div, g.act(Fraction(-1)), prm) - sD_estimate(g2, div, g.act(Fraction(1)), prm)
        print(f"  {name:<6}", show(per), "  contour", mp.nstr(contour_F(lam, g2, g, "plus", quick).value, 10))

    d = from_fermat(3)
    lab = fermat_labels(3, "geometric")
    fdiv = CuspDivisor({lab["c", 0]: 1, lab["c", 1]: -1})
    prm3 = TruncationParams(c_max=min(args.cmax[-1], 200), r_max=args.rmax, eps=0.02)
    print("periods on Fermat N=3 for (c0) - (c1)")
    for i in range(d.n):
        g = d.coset_reps[i]
        per = sD_estimate(d, fdiv, g.act(Fraction(-1)), prm3) - sD_estimate(d, fdiv, g.act(Fraction(1)), prm3)
        print(f"  coset {i}", show(per), "  oracle", mp.nstr(mp.re(oracle_F(3, d, fdiv, g, "plus", quick).value), 10))


if __name__ == "__main__":
    main()
