"""Stability of the homothetic orbits of an elliptic refraction billiard.

Walks through the closed-form Jacobian at the two axis points, checks it
against finite differences of the simulated map, and locates the value of h
where the minor-axis orbit changes stability.
"""

import math

import numpy as np

from refraction_billiards.model import EllipseBoundary, PhysParams
from refraction_billiards.return_map import BoundaryState, map_jacobian
from refraction_billiards.scan import bifurcation_root
from refraction_billiards.stability import h_bar_brake, stability_report_elliptic

E, OMEGA, MU, ECC = 2.5, math.sqrt(2.0), 2.0, 0.1


def main():
    curve = EllipseBoundary(ECC)
    print(f"E = {E}, omega = {OMEGA:.6f}, mu = {MU}, e = {ECC}\n")

    for h in (50.0, 150.0):
        p = PhysParams(E, OMEGA, h, MU)
        print(f"h = {h}")
        for axis, name in ((0, "major"), (1, "minor")):
            rep = stability_report_elliptic(p, ECC, axis)
            fd = map_jacobian(p, curve, BoundaryState(rep.xi, 0.0))
            err = np.linalg.norm(fd - rep.DF_xi) / np.linalg.norm(rep.DF_xi)
            print(
                f"  {name} axis: trace = {rep.trace:+.6f}  Delta = {rep.Delta:+.4e}  "
                f"-> {rep.classification.value:6s} (closed form vs finite differences: {err:.1e})"
            )

    root = bifurcation_root(dict(E=E, omega=OMEGA, mu=MU, e=ECC), 1, "h", (50.0, 200.0))
    print(f"\nminor-axis discriminant vanishes at h = {root:.6f}")
    print(f"closed-form brake threshold          h = {h_bar_brake(E, OMEGA, MU, ECC):.6f}")


if __name__ == "__main__":
    main()
