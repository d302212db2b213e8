"""Phase shift Im h(tau) across the pulse at delta = 4 gamma0.

For Omega = gamma0/10 the shift is nearly uniform over the pulse, about
0.11 rad in magnitude; for Omega = gamma0 it varies strongly with position.
"""

from _common import column, sweep

for tag in ("narrow", "wide"):
    spec, rows = sweep(f"fig5_{tag}.cfg", "phase-shift")
    im = column(rows, "im_h")
    mid = im[len(im) // 2]
    print(f"Omega = {spec.config.omega}: Im h(0) = {mid:+.4f}, "
          f"range over |Omega tau| <= 3: [{min(im):+.4f}, {max(im):+.4f}]")
