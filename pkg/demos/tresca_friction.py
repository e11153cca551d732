"""Tresca friction benchmark: sticking and slipping contact.

The closed-form Tresca case keeps the fracture in contact everywhere,
sticking for z > 0 and slipping for z < 0 against a unit friction
threshold.  The script solves two Cartesian meshes, reports the Newton
iteration counts (the semi-smooth method identifies the active set in a
handful of steps), the per-face contact states, and the error row.

Usage: python3 demos/tresca_friction.py [csv_path]
"""

import sys
from collections import Counter

from ddrcontact.contact import STATE_NAMES
from ddrcontact.verification import (
    compute_errors,
    convergence_study,
    get_case,
    solve_case,
    write_csv,
)


def main():
    case = get_case("tresca_62")
    print(f"case {case.name}: friction threshold g={case.g:g}")

    for n in (2, 4):
        result = solve_case(case, "cartesian", n)
        sol = result.solution
        hist = Counter(sol.states.tolist())
        states = ", ".join(f"{STATE_NAMES[s]}={hist.get(s, 0)}"
                           for s in range(4))
        e_u, e_jump, e_grad, e_ln = compute_errors(case, result)
        print(f"n={n}: {sol.iterations} Newton iterations, "
              f"final residual {sol.residual_history[-1]:.2e}")
        print(f"      states: {states}")
        print(f"      e_u={e_u:.3e} e_jump={e_jump:.3e} "
              f"e_grad={e_grad:.3e} e_lambda_n={e_ln:.3e}")

    if len(sys.argv) > 1:
        rows = convergence_study(case, "cartesian", levels=(2, 4))
        write_csv(rows, sys.argv[1])
        print(f"wrote {sys.argv[1]}")


if __name__ == "__main__":
    main()
