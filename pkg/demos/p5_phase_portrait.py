"""Phase portrait of the projectivized bracket flow for the 5-dim prototype.

The equilibria of ``(ln s)' = -eta(s)`` on the closed quadrant are enumerated
exactly by zero set.  A grid of random starts is then integrated; every orbit
should settle on the interior soliton point s = (2, 2).  Orbits go to a CSV
file for plotting.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from nilflow import build_projective_system, equilibria, integrate_projective, root_system
from nilflow.catalog import get
from nilflow.io import projective_csv


def main(out_dir="."):
    roots = root_system(get("p5").spec)
    psys = build_projective_system(roots.U)
    print("normals n_i = rows of PU:\n", psys.normals)

    eqs = equilibria(psys)
    for p in eqs:
        print(f"  s = {p.s.tolist()}  M = {p.zero_set}  {p.kind}  eta = {p.eta.tolist()}")

    rng = np.random.default_rng(7)
    grid = np.linspace(0, 40, 401)
    chunks = []
    for run in range(12):
        s0 = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=2))
        tr = integrate_projective(psys, s0, 40.0, t_eval=grid, keep_steps=False)
        print(f"run {run:2d}: s0 = {np.round(s0, 4)} -> {np.round(tr.final, 8)} (nearest {tr.nearest.kind})")
        chunks.append(projective_csv(tr, run=run))
    text = chunks[0] + "".join(c.split("\n", 1)[1] for c in chunks[1:])
    path = Path(out_dir) / "p5_orbits.csv"
    path.write_text(text)
    print(f"wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
