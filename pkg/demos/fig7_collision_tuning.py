"""Tuning the forward output of one pulse with a counter-propagating pulse.

With N_a = 1 and phi = 0, N_+ first drops (the cross term scales as
sqrt(N_b)) and then rises (back-scattered light grows linearly in N_b);
saturation bends the curve away from that simple form.
"""

from _common import column, sweep

spec, rows = sweep("fig7.cfg", "collision-tuning")
n_plus = column(rows, "N_plus")
k = min(range(len(n_plus)), key=n_plus.__getitem__)
for r in rows[::5]:
    print(f"N_b = {r.x:4.2f}  N_+ = {r.columns['N_plus']:.5f}")
print(f"minimum N_+ = {n_plus[k]:.5f} at N_b = {rows[k].x:.2f}")
