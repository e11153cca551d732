"""Convergence of the frictionless contact benchmark.

Runs the closed-form frictionless case (fracture open for z < 0 with a
quartic normal gap, in contact for z > 0) over a sequence of Cartesian
meshes and tabulates the relative errors of displacement, jump, gradient,
and normal multiplier together with their observed convergence orders.
The displacement and gradient errors converge at second order, the
piecewise-constant normal multiplier at first order.

Usage: python3 demos/convergence_frictionless.py [csv_path]
"""

import sys

from ddrcontact.verification import convergence_study, get_case, write_csv


def main():
    case = get_case("frictionless_61")
    print(f"case {case.name}: G={case.params.G:g}, L={case.params.L:g}, "
          f"friction threshold g={case.g:g}")
    print("running Cartesian meshes n = 2, 4, 8 ...")
    rows = convergence_study(case, "cartesian", levels=(2, 4, 8))

    hdr = (f"{'n':>3} {'h':>9} {'dofs':>7} {'it':>3} "
           f"{'e_u':>10} {'ord':>5} {'e_grad':>10} {'ord':>5} "
           f"{'e_lam_n':>10} {'ord':>5}")
    print(hdr)
    for r in rows:
        print(f"{r.n:>3} {r.h:>9.4f} {r.n_dofs:>7} {r.newton_iters:>3} "
              f"{r.e_u:>10.3e} {r.ord_u:>5.2f} "
              f"{r.e_grad:>10.3e} {r.ord_grad:>5.2f} "
              f"{r.e_lambda_n:>10.3e} {r.ord_lambda_n:>5.2f}")

    if len(sys.argv) > 1:
        write_csv(rows, sys.argv[1])
        print(f"wrote {sys.argv[1]}")


if __name__ == "__main__":
    main()
