"""Free-fall map and 2-periodic brake orbits on either side of the bifurcation.

Below the threshold the free-fall deflection keeps one sign on (0, pi/2);
above it a zero appears, and each zero closes into a period-two orbit.
"""

import math

from refraction_billiards.model import EllipseBoundary, PhysParams
from refraction_billiards.return_map import find_brake_orbits
from refraction_billiards.scan import freefall_profile
from refraction_billiards.stability import brake_derivatives

E, OMEGA, MU, ECC = 2.5, math.sqrt(2.0), 2.0, 0.1


def main():
    curve = EllipseBoundary(ECC)
    for h in (100.0, 120.0):
        p = PhysParams(E, OMEGA, h, MU)
        d0, d1 = brake_derivatives(p, ECC)
        print(f"h = {h}: delta'(0) = {d0:+.6f}, delta'(pi/2) = {d1:+.6f}")
        for s in freefall_profile(p, ECC, 7):
            print(f"  theta = {s.theta:.4f}  delta = {s.delta:+.3e}")
        found = find_brake_orbits(p, curve)
        if not found:
            print("  no brake orbit in (0, pi/2)")
        for b in found:
            print(f"  brake orbit at theta = {b.theta:.6f}, period-2 closure {b.closure:.1e}")
        print()


if __name__ == "__main__":
    main()
