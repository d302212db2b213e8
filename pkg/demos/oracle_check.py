"""Quadrature path against the brute-force discretized continuum.

The discretized solver keeps all guided modes explicitly with no Markov
approximation; agreement within a few parts per thousand confirms the
input-output treatment for single-photon pulses.
"""

from _common import sweep

spec, rows = sweep("oracle.cfg", "oracle-check")
for r in rows:
    c = r.columns
    print(f"Omega = {r.x:5.2f}  T = {c['T']:.5f} (oracle {c['T_oracle']:.5f})  "
          f"R = {c['R']:.5f} (oracle {c['R_oracle']:.5f})  "
          f"rel dT = {c['rel_dT']:+.1e}  rel dR = {c['rel_dR']:+.1e}")
