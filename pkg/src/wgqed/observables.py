"""Photon currents, transmittance, reflectance and the forward phase change.

Photon currents are in units of photons per unit time (integrating a free
pulse gives its mean photon number). Retarded times are measured from the
arrival of the pulse centre at the atom, so the atom-clock time of a current
sample is ``tau + t_atom``.

Two routes evaluate the same integrals:

* the *dense* route contracts the kernel-weighted vector w(t') against a
  solved two-time correlator matrix (``poynting_forward``,
  ``poynting_backward``, ``poynting_collision``);
* the *streaming* route (``transmittance_reflectance``,
  ``collision_photon_numbers``) integrates the kernel-weighted integrals as
  extra ODE components, which keeps the cost linear in the number of grid
  points and makes narrow-band pulses affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _cascade
from .bloch import (CoherentDrive, CorrelatorGrid, FockCollisionElements,
                    fock_single_pulse_correlators, solve_coherent_correlators,
                    solve_fock_collision)
from .errors import AccuracyError, ContractError, GridCoverageError
from .model import Direction, PhysParams, PulseSpec, SimGrid, g_eff, make_grid

RICHARDSON_TOL = 1e-4
SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ScatterResult:
    tau_grid: np.ndarray
    s_forward: np.ndarray
    s_backward: np.ndarray
    transmittance: float
    reflectance: float

    @property
    def loss(self) -> float:
        return 1.0 - self.transmittance - self.reflectance


@dataclass(frozen=True)
class CollisionResult:
    """Outgoing currents and photon numbers for two counter-propagating pulses."""

    tau_grid: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    n_plus: float
    n_minus: float
    n_in: float

    @property
    def loss(self) -> float:
        return self.n_in - self.n_plus - self.n_minus


def kernel_f(params: PhysParams, omega: float, tau, tprime):
    """Propagation kernel from emission at atom time t' to retarded time tau.

    F = exp(Omega^2/4 (tau + t' - T_A)(tau + T_A - t') + i (delta + i gamma)(tau + T_A - t')).
    """
    tau = np.asarray(tau, dtype=float)
    tprime = np.asarray(tprime, dtype=float)
    ta = params.t_atom
    delay = tau + ta - tprime
    return np.exp(0.25 * omega**2 * (tau + tprime - ta) * delay
                  + complex(-params.gamma, params.delta) * delay)


def free_poynting(pulse: PulseSpec, tau):
    """Photon current of the unscattered pulse, N Omega / sqrt(2 pi) exp(-Omega^2 tau^2 / 2)."""
    tau = np.asarray(tau, dtype=float)
    om = pulse.bandwidth
    return pulse.mean_n * om / SQRT_2PI * np.exp(-0.5 * om**2 * tau**2)


# -- dense route -----------------------------------------------------------

def _trap_weights(m: int, dt: float) -> np.ndarray:
    w = np.full(m, dt)
    if m >= 1:
        w[0] *= 0.5
        w[-1] *= 0.5
    if m == 1:
        w[0] = 0.0
    return w


def _dense_node(params, omega, times, node, n_free, m1, m2):
    """Forward and backward current at grid node ``node`` (tau = t_node - T_A).

    Returns (forward, backward, imaginary residue of the double term).
    """
    ta = params.t_atom
    tau = times[node] - ta
    tp = times[: node + 1]
    # Log-space: F(tau, t') exp(-Omega^2 tau^2 / 4) = exp(lam (t - t')) e(t').
    logw = (-0.25 * omega**2 * (tp - ta) ** 2
            + complex(-params.gamma, params.delta) * (times[node] - tp))
    w = np.exp(logw) * _trap_weights(node + 1, times[1] - times[0])
    eps = math.exp(-0.25 * omega**2 * tau**2)
    cross = 2.0 * params.gamma1 * (eps * np.dot(w, m1[: node + 1])).real
    quad = np.vdot(w, m2[: node + 1, : node + 1] @ w)
    double = params.gamma1**2 * quad
    pre = omega / SQRT_2PI
    fwd = pre * (eps**2 * n_free + cross + double.real)
    return fwd, pre * double.real, pre * abs(double.imag)


def _interp_nodes(params, grid, tau, fn):
    """Evaluate ``fn(node)`` at the grid nodes bracketing each tau and interpolate linearly."""
    times = grid.times
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    t = tau_arr + params.t_atom
    if np.any(t > grid.t_end * (1 + 1e-12)):
        raise GridCoverageError(
            f"tau + t_atom = {t.max():.6g} exceeds the correlator grid end {grid.t_end:.6g}")
    out = np.zeros(tau_arr.shape)
    cache = {}

    def at(node):
        if node not in cache:
            cache[node] = fn(node)
        return cache[node]

    dt = grid.dt
    for k, tk in enumerate(t):
        if tk <= 0:
            continue
        x = tk / dt
        lo = min(int(math.floor(x)), grid.n_points - 1)
        frac = x - lo
        if frac < 1e-9 or lo == grid.n_points - 1:
            out[k] = at(lo)
        elif frac > 1 - 1e-9:
            out[k] = at(lo + 1)
        else:
            out[k] = (1 - frac) * at(lo) + frac * at(lo + 1)
    return out.reshape(np.shape(tau)) if np.ndim(tau) else float(out[0])


def _single_weights(pulse: PulseSpec, correlators: CorrelatorGrid):
    q = 1.0 if pulse.is_fock else pulse.mean_n
    return q, q * 2.0 * correlators.one_time, q * 4.0 * correlators.two_time


def poynting_forward(params: PhysParams, pulse_a: PulseSpec, correlators: CorrelatorGrid, tau):
    """Transmitted-side photon current from a solved correlator grid."""
    n_free, m1, m2 = _single_weights(pulse_a, correlators)
    times = correlators.grid.times
    om = pulse_a.bandwidth
    return _interp_nodes(params, correlators.grid, tau,
                         lambda node: _dense_node(params, om, times, node, n_free, m1, m2)[0])


def poynting_backward(params: PhysParams, pulse_a: PulseSpec, correlators: CorrelatorGrid, tau):
    """Reflected photon current; its argument is tau' = t - (2 z_A - z)/c."""
    n_free, m1, m2 = _single_weights(pulse_a, correlators)
    times = correlators.grid.times
    om = pulse_a.bandwidth
    return _interp_nodes(params, correlators.grid, tau,
                         lambda node: _dense_node(params, om, times, node, n_free, m1, m2)[1])


def _check_pair(pulses):
    fwd, bwd = pulses
    if fwd.direction is not Direction.FORWARD or bwd.direction is not Direction.BACKWARD:
        raise ContractError("collision needs a forward and a backward pulse, in that order")
    if fwd.bandwidth != bwd.bandwidth:
        raise ContractError("colliding pulses must share one bandwidth")
    if fwd.is_fock != bwd.is_fock:
        raise ContractError("mixed Fock/coherent collisions are not supported")
    return fwd, bwd


def _collision_weights(pulses, correlators):
    fwd, bwd = _check_pair(pulses)
    if fwd.is_fock:
        if not isinstance(correlators, FockCollisionElements) or correlators.two_time is None:
            raise ContractError("Fock collision needs FockCollisionElements with two-time data")
        return 1.0, 2.0 * correlators.cross_element, 4.0 * correlators.two_time
    c = CoherentDrive(fwd.mean_n, bwd.mean_n, bwd.phase - fwd.phase).amplitude
    return (fwd.mean_n, math.sqrt(fwd.mean_n) * c * 2.0 * correlators.one_time,
            abs(c) ** 2 * 4.0 * correlators.two_time)


def poynting_collision(params: PhysParams, pulses: tuple[PulseSpec, PulseSpec], correlators, tau):
    """Photon current leaving in +z after two counter-propagating pulses meet at the atom.

    ``correlators`` is a :class:`CorrelatorGrid` solved with the combined
    coherent drive, or :class:`FockCollisionElements` for two Fock pulses.
    """
    n_free, m1, m2 = _collision_weights(pulses, correlators)
    times = correlators.grid.times
    om = pulses[0].bandwidth
    return _interp_nodes(params, correlators.grid, tau,
                         lambda node: _dense_node(params, om, times, node, n_free, m1, m2)[0])


def dense_profile(params, omega, grid, n_free, m1, m2, stride=1):
    """Forward/backward currents and imaginary residues on every ``stride``-th node."""
    times = grid.times
    nodes = np.arange(0, grid.n_points, stride)
    if nodes[-1] != grid.n_points - 1:
        nodes = np.append(nodes, grid.n_points - 1)
    vals = np.array([_dense_node(params, omega, times, int(n), n_free, m1, m2) for n in nodes])
    return times[nodes] - params.t_atom, vals[:, 0], vals[:, 1], vals[:, 2]


# -- streaming route -------------------------------------------------------

def _integrate_current(tau, s, gamma):
    """Trapezoid integral plus the exponential tail past the grid end."""
    return float(integrate.trapezoid(s, tau) + s[-1] / (2.0 * gamma))


def _currents(params, omega, st: _cascade.Stream):
    pre = omega / SQRT_2PI
    e = st.envelope
    g1 = params.gamma1
    double = g1**2 * st.double
    s_fwd = pre * (e**2 * st.free_fwd + 2.0 * g1 * (e * st.cross_fwd).real + double)
    s_bwd = pre * (e**2 * st.free_bwd + 2.0 * g1 * (e * st.cross_bwd).real + double)
    return st.times - params.t_atom, s_fwd, s_bwd


def _stream_single(params, pulse, grid):
    om = pulse.bandwidth
    if pulse.is_fock or pulse.mean_n == 0:
        st = _cascade.stream_fock_single(params, om, grid)
        n_in = 1.0
    else:
        st = _cascade.stream_coherent(params, om, pulse.mean_n, 0.0, 0.0, grid)
        n_in = pulse.mean_n
    tau, s_f, s_b = _currents(params, om, st)
    if pulse.mean_n == 0:
        zero = np.zeros_like(s_f)
        t_val = _integrate_current(tau, s_f, params.gamma) / n_in
        r_val = _integrate_current(tau, s_b, params.gamma) / n_in
        return ScatterResult(tau, zero, zero, t_val, r_val)
    return ScatterResult(tau, s_f, s_b,
                         _integrate_current(tau, s_f, params.gamma) / n_in,
                         _integrate_current(tau, s_b, params.gamma) / n_in)


def _dense_single(params, pulse, grid, stride):
    om = pulse.bandwidth
    if pulse.is_fock or pulse.mean_n == 0:
        corr = fock_single_pulse_correlators(grid)
        probe = PulseSpec.fock(om)
    else:
        _, corr = solve_coherent_correlators(params, CoherentDrive(pulse.mean_n), om, grid)
        probe = pulse
    n_free, m1, m2 = _single_weights(probe, corr)
    tau, s_f, s_b, _ = dense_profile(params, om, grid, n_free, m1, m2, stride)
    n_in = probe.mean_n
    t_val = _integrate_current(tau, s_f, params.gamma) / n_in
    r_val = _integrate_current(tau, s_b, params.gamma) / n_in
    if pulse.mean_n == 0:
        s_f, s_b = np.zeros_like(s_f), np.zeros_like(s_b)
    return ScatterResult(tau, s_f, s_b, t_val, r_val)


def _rel_change(a, b, floor=1e-12):
    return abs(a - b) / max(abs(b), floor)


def transmittance_reflectance(params: PhysParams, pulse_a: PulseSpec, grid: SimGrid | None = None,
                              *, method: str = "stream", richardson: bool = True,
                              stride: int = 1) -> ScatterResult:
    """Transmittance, reflectance and loss of a single forward pulse.

    T and R are the transmitted and reflected photon numbers divided by the
    incident mean photon number. A vanishing coherent pulse returns the
    linear-response (single-photon) values, its N -> 0 limit.

    With ``richardson=True`` the calculation is repeated with half the step;
    a relative change above 1e-4 in T or R raises :class:`AccuracyError`, and
    the refined result is returned.
    """
    if pulse_a.direction is not Direction.FORWARD:
        raise ContractError("single-pulse scattering expects a forward pulse")
    if grid is None:
        grid = make_grid(params, pulse_a)
    if method == "stream":
        run = lambda gr: _stream_single(params, pulse_a, gr)
    elif method == "dense":
        run = lambda gr: _dense_single(params, pulse_a, gr, stride)
    else:
        raise ValueError(f"unknown method {method!r}")
    coarse = run(grid)
    if not richardson:
        return coarse
    fine = run(grid.refined())
    for name in ("transmittance", "reflectance"):
        a, b = getattr(coarse, name), getattr(fine, name)
        if _rel_change(a, b) > RICHARDSON_TOL and abs(a - b) > 1e-12:
            raise AccuracyError(f"{name} changed by {_rel_change(a, b):.2e} on grid refinement")
    return fine


def collision_photon_numbers(params: PhysParams, fwd: PulseSpec, bwd: PulseSpec,
                             grid: SimGrid | None = None, *, richardson: bool = True
                             ) -> CollisionResult:
    """Outgoing photon numbers N_+ (along +z) and N_- for two colliding pulses.

    Both pulses reach the atom at ``t_atom``. For coherent pulses the
    relative phase is ``bwd.phase - fwd.phase``; Fock pulses carry no phase.
    """
    fwd, bwd = _check_pair((fwd, bwd))
    om = fwd.bandwidth
    if grid is None:
        grid = make_grid(params, fwd)

    def run(gr):
        if fwd.is_fock:
            st = _cascade.stream_fock_collision(params, om, gr)
            n_in = 2.0
        else:
            st = _cascade.stream_coherent(params, om, fwd.mean_n, bwd.mean_n,
                                          bwd.phase - fwd.phase, gr)
            n_in = fwd.mean_n + bwd.mean_n
        tau, s_p, s_m = _currents(params, om, st)
        return CollisionResult(tau, s_p, s_m, _integrate_current(tau, s_p, params.gamma),
                               _integrate_current(tau, s_m, params.gamma), n_in)

    coarse = run(grid)
    if not richardson:
        return coarse
    fine = run(grid.refined())
    for name in ("n_plus", "n_minus"):
        a, b = getattr(coarse, name), getattr(fine, name)
        if _rel_change(a, b) > RICHARDSON_TOL and abs(a - b) > 1e-12:
            raise AccuracyError(f"{name} changed by {_rel_change(a, b):.2e} on grid refinement")
    return fine


def fringe_visibility(n_plus) -> float:
    """(max - min) / max of an outgoing photon number scanned over the relative phase."""
    n_plus = np.asarray(n_plus, dtype=float)
    return float((n_plus.max() - n_plus.min()) / n_plus.max())


# -- forward phase change --------------------------------------------------

def lorentzian_h(params: PhysParams, delta=None):
    """Monochromatic limit of the amplitude change, -gamma1 / (gamma - i delta)."""
    delta = params.delta if delta is None else np.asarray(delta, dtype=float)
    return -params.gamma1 / (params.gamma - 1j * delta)


def phase_h(params: PhysParams, omega: float, tau: float = 0.0, *, extend: bool = True,
            printed: bool = False) -> complex:
    """Relative change h(tau) of the coherent amplitude by forward scattering.

    With sigma_z frozen at -1/2 the forward correction is
    -gamma1 int exp(lam (t - t')) e(t') dt' divided by the local envelope
    e(t). Substituting s = t - t' gives the integrand
    exp(i delta s - (gamma - Omega^2 tau / 2) s - Omega^2 s^2 / 4) over
    0 <= s <= tau + T_A. The commonly printed form has ``gamma + 2 Omega^2 tau``
    in place of ``gamma - Omega^2 tau / 2``; ``printed=True`` evaluates that
    form instead. Both agree at tau = 0.

    When the pulse starts far from the atom (T_A >= 6 / Omega) and ``extend``
    is set, the upper limit is taken to infinity. Valid while the atom stays
    close to its ground state; for small |h| with h close to the imaginary
    axis, Im h is the phase shift.
    """
    upper = tau + params.t_atom
    if extend and params.t_atom * omega >= 6.0 - 1e-9:
        upper = math.inf
    if params.gamma1 == 0 or upper <= 0:
        return 0j
    if printed:
        a = params.gamma + 2.0 * omega**2 * tau
    else:
        a = params.gamma - 0.5 * omega**2 * tau
    b = 0.25 * omega**2
    # Beyond the point where the exponent reaches -60 the integrand is negligible.
    s_cut = (-a + math.sqrt(a * a + 240.0 * b)) / (2.0 * b)
    upper = min(upper, s_cut)
    dlt = params.delta

    def mag(s):
        return math.exp(-a * s - b * s * s)

    opts = dict(epsabs=1e-13, epsrel=1e-10, limit=500)
    if dlt == 0:
        return complex(-params.gamma1 * integrate.quad(mag, 0.0, upper, **opts)[0])
    # Oscillatory weights handle the carrier without splitting the interval.
    re = integrate.quad(mag, 0.0, upper, weight="cos", wvar=dlt, **opts)[0]
    im = integrate.quad(mag, 0.0, upper, weight="sin", wvar=dlt, **opts)[0]
    return -params.gamma1 * complex(re, im)


def susceptibility_scan(params: PhysParams, omega: float, detunings):
    """h(0) and its Lorentzian reference for each carrier detuning."""
    detunings = np.asarray(detunings, dtype=float)
    h = np.array([phase_h(params.replace(delta=float(d)), omega, 0.0) for d in detunings])
    return h, lorentzian_h(params, detunings)


def shot_noise_bands(n: float) -> tuple[float, float]:
    """Mean signal plus and minus its square root (coherent-state photon noise)."""
    if n < 0:
        raise ValueError(f"mean signal must be >= 0, got {n!r}")
    root = math.sqrt(n)
    return n - root, n + root


def peak_excitation_estimate(params: PhysParams, omega: float, na: float) -> float:
    """Rough atomic excitation scale g_eff^2 N_a / gamma^2 for validity warnings."""
    return g_eff(params, omega) ** 2 * na / params.gamma**2
