"""Render the coefficient-by-coefficient ramp as a set of SVG panels.

Sweeps the truncation degree at fixed (altitude, circular inclination)
and writes one eccentricity-vector diagram per degree, the workflow used
to judge how many zonal harmonics a mission analysis needs.

Usage: python scripts/ramp_panels.py --alt 600 --inc 63.45 --degrees 3 4 5 6 7 12 30
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from zonalflow.dynamics import PhaseMapSpec, frozen_2d, phase_map  # noqa: E402
from zonalflow.gravity import bundled_field  # noqa: E402
from zonalflow.hamiltonian import MeanModelSpec  # noqa: E402
from zonalflow.svgplot import render_svg  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alt", type=float, default=600.0)
    parser.add_argument("--inc", type=float, default=63.45)
    parser.add_argument("--degrees", type=int, nargs="+",
                        default=[3, 4, 5, 6, 7, 8, 10, 12, 20, 30])
    parser.add_argument("--grid", type=int, default=96)
    parser.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("ramp_panels"))
    args = parser.parse_args()

    field = bundled_field()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for degree in args.degrees:
        spec = PhaseMapSpec(
            a=field.reference_radius + args.alt,
            i_circ=math.radians(args.inc),
            model=MeanModelSpec(field=field, n_max=degree),
            resolution=args.grid,
        )
        pmap = phase_map(spec).with_frozen(frozen_2d(spec))
        payload = pmap.to_dict()
        stem = args.outdir / f"panel_deg{degree:02d}"
        stem.with_suffix(".svg").write_text(render_svg(payload))
        stem.with_suffix(".json").write_text(json.dumps(payload, sort_keys=True))
        frozen = ", ".join(
            f"e={fo.e:.4f}@{math.degrees(fo.omega):.0f}deg[{fo.classification[0]}"
            f"{'!' if fo.impact else ''}]"
            for fo in pmap.frozen_orbits
        ) or "none"
        print(f"degree {degree:2d}: {frozen} -> {stem}.svg")


if __name__ == "__main__":
    main()
