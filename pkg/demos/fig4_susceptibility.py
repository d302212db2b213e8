"""Amplitude change h(0) of a weak coherent pulse against carrier detuning.

The narrow pulse follows the Lorentzian -gamma1 / (gamma - i delta) closely;
the broad pulse is flattened because most of its spectrum misses the line.
"""

from _common import sweep

for tag in ("narrow", "wide"):
    spec, rows = sweep(f"fig4_{tag}.cfg", "susceptibility")
    print(f"Omega = {spec.config.omega}")
    for r in rows[::10]:
        c = r.columns
        print(f"  delta {r.x:6.2f}  h = {c['re_h']:+.4f} {c['im_h']:+.4f}i   "
              f"Lorentzian {c['re_lorentz']:+.4f} {c['im_lorentz']:+.4f}i")
