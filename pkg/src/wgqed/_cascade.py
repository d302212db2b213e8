"""Streaming evaluation of the scattered-field integrals.

The forward and backward photon currents need, at every retarded time, the
kernel-weighted integrals

    R(t) = int_0^t exp(lam (t - t')) e(t') m(t') dt'
    D(t) = int_0^t int_0^t G*(t, t') G(t, t'') M2(t', t'') dt' dt''

with ``lam = i delta - gamma``, ``e`` the pulse envelope at the atom and
``G(t, t') = exp(lam (t - t')) e(t')``. Differentiating under the integral
turns both into ODEs in the upper limit: ``R' = lam R + e m`` and
``D' = -2 gamma D + 2 e Re Q`` where ``Q(t) = int G(t, t'') M2(t, t'') dt''``
is the kernel-weighted regression solution, itself obeying the regression
system plus ``lam Q`` and a boundary source at t'' = t. Everything is then a
single RK4 integration with O(M) cost instead of an M x M correlator matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .model import PhysParams, SimGrid, g_eff as _g_eff


@dataclass(frozen=True)
class Stream:
    """Per-grid-point quantities from which both photon currents follow.

    ``cross`` is the integral multiplying 2 gamma1 e(t) in the interference
    term (already scaled by the state-dependent factor), ``double`` the
    double-integral D(t), ``inversion`` the one-time inversion (or None when
    it is not a physical expectation value).
    """

    times: np.ndarray
    envelope: np.ndarray
    cross_fwd: np.ndarray
    cross_bwd: np.ndarray
    double: np.ndarray
    free_fwd: float
    free_bwd: float
    inversion: np.ndarray | None = None


def _rk4_tuple(rhs, y0, times):
    y = tuple(y0)
    out = [y]
    for n in range(len(times) - 1):
        t = times[n]
        h = times[n + 1] - t
        hh = 0.5 * h
        k1 = rhs(t, y)
        k2 = rhs(t + hh, tuple(a + hh * b for a, b in zip(y, k1)))
        k3 = rhs(t + hh, tuple(a + hh * b for a, b in zip(y, k2)))
        k4 = rhs(t + h, tuple(a + h * b for a, b in zip(y, k3)))
        h6 = h / 6.0
        y = tuple(a + h6 * (p + 2.0 * q + 2.0 * r + s)
                  for a, p, q, r, s in zip(y, k1, k2, k3, k4))
        out.append(y)
    return np.array(out)


def _envelope(params, omega):
    q = 0.25 * omega**2
    ta = params.t_atom
    return lambda t: math.exp(-q * (t - ta) ** 2)


def stream_coherent(params: PhysParams, omega: float, na: float, nb: float, phi: float,
                    grid: SimGrid) -> Stream:
    """Coherent pulses from both sides: c = sqrt(na) + exp(i phi) sqrt(nb)."""
    gam, dlt = params.gamma, params.delta
    lam = complex(-gam, dlt)
    c = math.sqrt(na) + np.exp(1j * phi) * math.sqrt(nb)
    c = complex(c)
    cc = c.conjugate()
    c2 = abs(c) ** 2
    env = _envelope(params, omega)
    geff = _g_eff(params, omega)
    gp, gm = complex(-gam, -dlt), complex(-gam, dlt)

    def rhs(t, y):
        sz, x, r, wz, wx, wy, d = y
        e = env(t)
        g = geff * e
        xb = x.conjugate()
        return (
            -2.0 * gam * sz - gam - 2.0 * g * (c * x).real,
            gp * x + 2.0 * g * cc * sz,
            lam * r + e * sz,
            (lam - 2.0 * gam) * wz - g * (c * wx + cc * wy) + e - 4.0 * gam * r,
            (lam + gp) * wx + 2.0 * g * cc * wz - 2.0 * e * x,
            (lam + gm) * wy + 2.0 * g * c * wz + 2.0 * e * xb,
            -2.0 * gam * d + 2.0 * e * c2 * wz.real,
        )

    y0 = (complex(-0.5), 0j, 0j, 0j, 0j, 0j, 0j)
    times = grid.times
    sol = _rk4_tuple(rhs, y0, times)
    e = np.exp(-0.25 * omega**2 * (times - params.t_atom) ** 2)
    r = sol[:, 2]
    kappa_f = math.sqrt(na) * c
    kappa_b = math.sqrt(nb) * np.exp(-1j * phi) * c
    return Stream(
        times=times,
        envelope=e,
        cross_fwd=2.0 * kappa_f * r,
        cross_bwd=2.0 * kappa_b * r,
        double=sol[:, 6].real,
        free_fwd=na,
        free_bwd=nb,
        inversion=sol[:, 0].real,
    )


def stream_fock_collision(params: PhysParams, omega: float, grid: SimGrid) -> Stream:
    """Single-photon pulses from both sides arriving together at the atom."""
    gam, dlt = params.gamma, params.delta
    lam = complex(-gam, dlt)
    env = _envelope(params, omega)
    geff = _g_eff(params, omega)
    gp, gm = complex(-gam, -dlt), complex(-gam, dlt)

    def rhs(t, y):
        sz, yb, r, big_e, wz, wx, wy, d = y
        e = env(t)
        g = geff * e
        return (
            -2.0 * gam * sz - 4.0 * g * yb.real - 2.0 * gam,
            gp * yb - 2.0 * g,
            lam * r + e * sz,
            lam * big_e + e,
            (lam - 2.0 * gam) * wz - 2.0 * g * (wx + wy) + 2.0 * e - 4.0 * gam * r,
            (lam + gm) * wx + 4.0 * g * big_e + 2.0 * e * yb.conjugate(),
            (lam + gp) * wy + 4.0 * g * big_e - 2.0 * e * yb,
            -2.0 * gam * d + 2.0 * e * wz.real,
        )

    y0 = (complex(-1.0),) + (0j,) * 7
    times = grid.times
    sol = _rk4_tuple(rhs, y0, times)
    e = np.exp(-0.25 * omega**2 * (times - params.t_atom) ** 2)
    r = sol[:, 2]
    return Stream(times, e, r, r, sol[:, 7].real, 1.0, 1.0, None)


def _rk4_linear_coefficients(z):
    """RK4 step of y' = lam y + f(t) written as phi y + h (c0 f0 + ch fh + c1 f1)."""
    phi = 1 + z + z**2 / 2 + z**3 / 6 + z**4 / 24
    c0 = (1 + z + z**2 / 2 + z**3 / 4) / 6
    ch = (4 + 2 * z + z**2 / 2) / 6
    c1 = 1.0 / 6
    return phi, c0, ch, c1


def rk4_linear(lam: complex, f0, fh, f1, h: float, y0=0j) -> np.ndarray:
    """Vectorised RK4 for a scalar linear ODE with known forcing samples.

    ``f0``, ``fh``, ``f1`` hold the forcing at the start, middle and end of
    each step. The result equals the step-by-step RK4 solution.
    """
    phi, c0, ch, c1 = _rk4_linear_coefficients(lam * h)
    u = h * (c0 * np.asarray(f0) + ch * np.asarray(fh) + c1 * np.asarray(f1))
    u = u.astype(complex)
    u[0] += phi * y0
    y = lfilter([1.0], [1.0, -phi], u)
    return np.concatenate([[y0], y])


def stream_fock_single(params: PhysParams, omega: float, grid: SimGrid) -> Stream:
    """One single-photon pulse: the correlators are constants, D = |E|^2."""
    times = grid.times
    h = grid.dt
    lam = complex(-params.gamma, params.delta)
    q = 0.25 * omega**2
    ta = params.t_atom
    e = np.exp(-q * (times - ta) ** 2)
    eh = np.exp(-q * (times[:-1] + 0.5 * h - ta) ** 2)
    big_e = rk4_linear(lam, e[:-1], eh, e[1:], h)
    return Stream(times, e, -big_e, np.zeros_like(big_e), np.abs(big_e) ** 2, 1.0, 0.0, None)
