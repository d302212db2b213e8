"""Forward photon number of two colliding coherent pulses against relative phase.

In phase (phi = 0) the forward and back-scattered fields interfere
destructively in the +z output; at phi = pi the fields cancel on the atom,
which stays dark and lets both pulses pass unchanged (N_+ = 1).
"""

from wgqed.observables import fringe_visibility

from _common import column, sweep

spec, rows = sweep("fig6.cfg", "collision-fringes")
n_plus = column(rows, "N_plus")
for r in rows[::8]:
    print(f"phi = {r.x:5.3f}  N_+ = {r.columns['N_plus']:.5f}")
print(f"fringe contrast (max - min) / max = {fringe_visibility(n_plus):.3f}")
