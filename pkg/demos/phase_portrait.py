"""Phase portrait of the first return map, written as CSV and SVG.

Usage: python demos/phase_portrait.py [output_prefix]
"""

import math
import sys

from refraction_billiards import io as rio
from refraction_billiards.model import PhysParams
from refraction_billiards.scan import PortraitSpec, phase_portrait


def main(prefix="portrait"):
    p = PhysParams(2.5, math.sqrt(2.0), 0.1, 1.0)
    spec = PortraitSpec(p, 0.3, xi_seeds=12, alpha_seeds=8, alpha_range=(-0.5, 0.5), iterations=200)
    records = phase_portrait(spec)
    rio.write_csv(rio.portrait_rows(records), rio.PORTRAIT_COLUMNS, f"{prefix}.csv")
    rio.portrait_svg(records, f"{prefix}.svg", title="e = 0.3, h = 0.1, mu = 1")
    ends = {}
    for r in records:
        ends[r.termination] = ends.get(r.termination, 0) + 1
    print(f"{len(records)} orbits, terminations: {ends}")
    print(f"wrote {prefix}.csv and {prefix}.svg")


if __name__ == "__main__":
    main(*sys.argv[1:])
