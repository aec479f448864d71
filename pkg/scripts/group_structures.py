"""Cuspidal group structures of Fermat curves next to their closed forms.

    python scripts/group_structures.py --levels 3 5 7 9 --csv groups.csv
"""

import argparse
import time

from cuspforge.cli import predicted_structure
from cuspforge.cuspidal import (
    cuspidal_group_full,
    cuspidal_group_minus,
    cuspidal_group_plus,
    export_csv,
    theta_image,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=[3, 5, 7, 9])
    ap.add_argument("--labeling", default="rohrlich")
    ap.add_argument("--csv")
    args = ap.parse_args()

    rows = []
    for n in args.levels:
        t0 = time.perf_counter()
        groups = {
            "full": cuspidal_group_full(n, args.labeling),
            "minus": cuspidal_group_minus(n, args.labeling),
            "plus": cuspidal_group_plus(n),
        }
        dt = time.perf_counter() - t0
        for jac, g in groups.items():
            pred = predicted_structure(n, jac)
            ok = g.free_rank == 0 and g.invariant_factors == pred
            rows.append([n, jac, str(g), g.order, "PASS" if ok else "FAIL", f"{dt:.2f}"])
        for side in ("plus", "minus"):
            img = theta_image(n, side)
            rows.append([n, f"theta_{side} image", str(img), img.order, "", ""])

    header = ["N", "group", "structure", "order", "closed form", "seconds"]
    width = max(len(r[2]) for r in rows)
    print(f"{'N':>3}  {'group':<20}{'structure':<{width + 2}}{'order':>14}  check")
    for r in rows:
        print(f"{r[0]:>3}  {r[1]:<20}{r[2]:<{width + 2}}{r[3]:>14}  {r[4]}")
    if args.csv:
        export_csv(rows, args.csv, header)


if __name__ == "__main__":
    main()
