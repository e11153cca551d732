"""Robustness of the gradient error in the nearly incompressible limit.

The incompressible benchmark family is parametrized by the second Lame
coefficient L; its exact solution is a divergence-free cubic plus a
1/L-scaled contact perturbation.  A locking-free method keeps the
gradient error and its convergence order essentially unchanged as L
grows by six orders of magnitude; a locking method would see the error
blow up with L.

Usage: python3 demos/locking_sweep.py [csv_prefix]
"""

import sys

from ddrcontact.verification import convergence_study, get_case, write_csv


def main():
    sweep = {}
    for L in (1.0, 1e4, 1e6):
        case = get_case("incompressible_63", L=L)
        print(f"L = {L:g}: running Cartesian n = 2, 4 ...")
        sweep[L] = convergence_study(case, "cartesian", levels=(2, 4))

    print(f"\n{'h':>9}", end="")
    for L in sweep:
        print(f"  {'e_grad(L=%g)' % L:>14} {'order':>6}", end="")
    print()
    for lvl in range(2):
        print(f"{sweep[1.0][lvl].h:>9.4f}", end="")
        for L, rows in sweep.items():
            o = rows[lvl].ord_grad
            print(f"  {rows[lvl].e_grad:>14.3e} "
                  f"{('%6.3f' % o) if o == o else '     -'}", end="")
        print()

    base = sweep[1.0][1].e_grad
    worst = max(sweep[L][1].e_grad for L in (1e4, 1e6)) / base
    print(f"\nfine-level error ratio (stiff / compressible): {worst:.3f}")

    if len(sys.argv) > 1:
        for L, rows in sweep.items():
            path = f"{sys.argv[1]}_L{L:g}.csv"
            write_csv(rows, path)
            print(f"wrote {path}")


if __name__ == "__main__":
    main()
