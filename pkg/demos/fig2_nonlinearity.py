"""Saturation: transmittance against the mean photon number of a coherent pulse.

The four curves use Omega = gamma0/100, gamma0/10, gamma0 and 10 gamma0.
The effective coupling grows with bandwidth, so short pulses saturate the
atom (and pass) already at a few photons while long pulses barely do.
"""

from _common import column, sweep

for curve in ("i", "ii", "iii", "iv"):
    spec, rows = sweep(f"fig2_{curve}.cfg", "nonlinearity")
    t = column(rows, "T")
    print(f"({curve:>3}) Omega = {spec.config.omega:<5g} T(N=1) = {t[0]:.4f}  T(N=100) = {t[-1]:.4f}")
