"""Transmittance against pulse bandwidth for a coherent pulse and a single photon.

Long pulses approach the monochromatic value (2 gamma0 / gamma)^2 = 4/9;
short pulses have too little spectral weight on the line to be scattered.
Between gamma0 and 10 gamma0 the single photon transmits less than the
coherent pulse of the same mean number, because a coherent pulse also
carries multi-photon components that saturate the atom.
"""

from _common import sweep

spec, rows = sweep("fig1.cfg", "transmittance-sweep")
print(f"{'Omega':>10} {'T coherent':>12} {'T Fock':>10}")
for r in rows:
    print(f"{r.x:10.4g} {r.columns['T_coherent']:12.5f} {r.columns['T_fock']:10.5f}")
print(f"\nlong-pulse limit 4/9 = {4 / 9:.5f}; first Fock point {rows[0].columns['T_fock']:.5f}")
