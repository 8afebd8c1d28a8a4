"""A 7-dim algebra whose Gram system has no positive solution.

With no soliton available, the projectivized flow drifts to the boundary
point s = (0, 1, ..., 1).  That point is not hyperbolic: eta_1 vanishes
there, so s_1 decays like 1/(2 tau) rather than exponentially.  The table
below shows tau * s_1 levelling off, which is the algebraic rate.
"""

from __future__ import annotations

import numpy as np

from nilflow import build_projective_system, integrate_projective, positive_gram_solution, root_system
from nilflow.catalog import get
from nilflow.linalg import rational_nullspace


def main():
    roots = root_system(get("r6").spec)
    print("U =\n", roots.U)
    print("positive solution of U v = lambda 1:", positive_gram_solution(roots.U))
    psys = build_projective_system(roots.U)
    print("ker PU basis:", rational_nullspace(psys.normals.tolist()))

    s0 = np.ones(psys.m - 1)
    taus = [10, 50, 100, 500, 1000]
    tr = integrate_projective(psys, s0, 1000.0, t_eval=taus, keep_steps=False, match=False)
    print(f"{'tau':>6} {'s_1':>12} {'tau*s_1':>10} {'max|s_i-1|, i>1':>18}")
    for tau, s in zip(tr.tau, tr.s):
        print(f"{tau:6g} {s[0]:12.4e} {tau * s[0]:10.4f} {np.max(np.abs(s[1:] - 1)):18.2e}")
    print("eta at the end:", np.round(tr.eta[-1], 6))


if __name__ == "__main__":
    main()
