"""Transmitted and reflected photon numbers with coherent-state noise bands.

At Omega = gamma0/10 and N_a near 1 the sqrt(N) noise of each signal is
larger than the signal itself; both signals rise above their noise only
for several photons per pulse.
"""

from _common import sweep

spec, rows = sweep("fig3.cfg", "detection")
print(f"{'N_a':>5} {'N_T':>9} {'+-':>7} {'N_R':>9} {'+-':>7}")
for r in rows[::5]:
    c = r.columns
    print(f"{r.x:5.0f} {c['N_T']:9.4f} {c['N_T_high'] - c['N_T']:7.4f} "
          f"{c['N_R']:9.4f} {c['N_R_high'] - c['N_R']:7.4f}")
