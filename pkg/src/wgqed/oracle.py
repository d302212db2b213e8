"""Brute-force single-excitation reference solver.

The two guided continua are replaced by ``n_modes`` discrete modes each on a
frequency window ``[-W, W]`` around the carrier. The wavefunction
``c_e |e,0> + sum_j alpha_j |g,1_j^+> + beta_j |g,1_j^->`` then obeys a
closed linear system with no Markov approximation. Free-space loss is the
non-Hermitian decay ``-gamma0`` of ``c_e`` (exact in this sector because lost
population never returns).

Amplitudes are taken in the interaction picture, so the fast carrier never
enters the integrator. Writing ``I_j(t) = int_0^t exp(i nu_j s) c_e(s) ds``
with ``nu_j = delta_j + Delta``, the mode amplitudes are
``alpha_j = alpha_j(0) + g_j exp(-i delta_j T_A) I_j`` (beta likewise with the
opposite phase), and only ``(c_e, I_j)`` are integrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError
from .model import PhysParams

DEFAULT_MODES = 1024
WINDOW_FACTOR = 25.0
MIN_WINDOW_FACTOR = 10.0
CONVERGENCE_TOL = 5e-3
STEPS_PER_PERIOD = 40


@dataclass(frozen=True)
class Discretization:
    """Mode grid per direction: ``delta_j`` in [-window, window] and couplings g_j."""

    n_modes: int
    window: float
    gamma1: float

    def __post_init__(self):
        if self.n_modes < 16:
            raise ParameterError(f"n_modes must be >= 16, got {self.n_modes}")
        if not self.window > 0:
            raise ParameterError(f"window must be positive, got {self.window!r}")

    @classmethod
    def default(cls, params: PhysParams, omega: float, n_modes: int = DEFAULT_MODES,
                window: float | None = None) -> "Discretization":
        if window is None:
            window = WINDOW_FACTOR * max(omega, params.gamma)
        return cls(int(n_modes), float(window), params.gamma1)

    @property
    def d_omega(self) -> float:
        return 2.0 * self.window / (self.n_modes - 1)

    @property
    def detunings(self) -> np.ndarray:
        return np.linspace(-self.window, self.window, self.n_modes)

    @property
    def couplings(self) -> np.ndarray:
        return np.full(self.n_modes, math.sqrt(self.gamma1 * self.d_omega / (2.0 * math.pi)))

    @property
    def recurrence_time(self) -> float:
        """Revival period 2 pi / d_omega of the discrete spectrum."""
        return 2.0 * math.pi / self.d_omega

    def check_coverage(self, params: PhysParams, omega: float) -> None:
        need = MIN_WINDOW_FACTOR * max(omega, params.gamma)
        if self.window < need * (1 - 1e-12):
            raise ParameterError(f"window {self.window:.4g} below {need:.4g} = 10 max(Omega, gamma)")


@dataclass(frozen=True)
class ExcitationState:
    """Amplitudes of the atom and of the forward/backward modes."""

    c_e: complex
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def norm(self) -> float:
        return abs(self.c_e) ** 2 + float(np.sum(np.abs(self.alpha) ** 2) + np.sum(np.abs(self.beta) ** 2))


def gaussian_amplitudes(disc: Discretization, omega: float) -> np.ndarray:
    """Discrete single-photon spectrum (2 / pi Omega^2)^{1/4} exp(-delta^2/Omega^2) sqrt(d_omega)."""
    d = disc.detunings
    return (2.0 / (math.pi * omega**2)) ** 0.25 * np.exp(-(d / omega) ** 2) * math.sqrt(disc.d_omega)


def default_t_final(params: PhysParams, omega: float) -> float:
    return params.t_atom + 8.0 / omega + 20.0 / params.gamma


def incident_envelope(params: PhysParams, omega: float, disc: Discretization, t) -> np.ndarray:
    """Free forward field at the atom, sum_j g_j alpha_j(0) exp(-i delta_j (t - T_A)).

    For a fine enough mode grid it equals the continuum coupling g(t).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a0 = gaussian_amplitudes(disc, omega) * disc.couplings
    return np.exp(-1j * np.outer(t - params.t_atom, disc.detunings)) @ a0


def _evolve(params, omega, disc, t_final, alpha0, beta0, sample_times=None):
    """RK4 on (c_e, I_j). Returns the final state and |c_e|^2 interpolated to ``sample_times``."""
    dlt = disc.detunings
    g = disc.couplings
    nu = dlt + params.delta
    ta = params.t_atom
    drive_w = g * (alpha0 * np.exp(1j * dlt * ta) + beta0 * np.exp(-1j * dlt * ta))
    g2 = 2.0 * g**2
    gam0 = params.gamma0

    n_steps = int(math.ceil(t_final * STEPS_PER_PERIOD * max(disc.window + abs(params.delta),
                                                                params.gamma) / (2.0 * math.pi)))
    h = t_final / n_steps
    half = np.exp(0.5j * nu * h)
    phase = np.ones_like(nu, dtype=complex)  # exp(i nu t)

    track = sample_times is not None
    pop = np.empty(n_steps + 1) if track else None

    def dc(c, ints, conj_phase):
        return -gam0 * c - np.dot(drive_w + g2 * ints, conj_phase)

    c = 0j
    ints = np.zeros_like(nu, dtype=complex)
    for n in range(n_steps):
        if track:
            pop[n] = abs(c) ** 2
        p0, ph = phase, phase * half
        p1 = ph * half
        # dI/dt = exp(i nu t) c_e; stage values of I follow from the stage slopes.
        k1c = dc(c, ints, p0.conj())
        k1i = p0 * c
        c2 = c + 0.5 * h * k1c
        k2i = ph * c2
        k2c = dc(c2, ints + 0.5 * h * k1i, ph.conj())
        c3 = c + 0.5 * h * k2c
        k3i = ph * c3
        k3c = dc(c3, ints + 0.5 * h * k2i, ph.conj())
        c4 = c + h * k3c
        k4i = p1 * c4
        k4c = dc(c4, ints + h * k3i, p1.conj())
        c = c + h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c)
        ints = ints + h / 6.0 * (k1i + 2 * k2i + 2 * k3i + k4i)
        phase = p1
        if n % 512 == 511:
            phase = np.exp(1j * nu * (n + 1) * h)
    samples = None
    if track:
        pop[n_steps] = abs(c) ** 2
        samples = np.interp(np.asarray(sample_times, dtype=float), h * np.arange(n_steps + 1), pop)
    alpha = alpha0 + g * np.exp(-1j * dlt * ta) * ints
    beta = beta0 + g * np.exp(1j * dlt * ta) * ints
    return ExcitationState(c, alpha, beta), samples


def _resolve(params, omega, disc, t_final):
    if not omega > 0:
        raise ParameterError(f"bandwidth must be positive, got {omega!r}")
    if t_final is None:
        t_final = default_t_final(params, omega)
    if t_final < params.t_atom + 8.0 / omega:
        raise ParameterError("t_final must be at least t_atom + 8 / Omega")
    if disc is None:
        disc = Discretization.default(params, omega)
        # Keep revivals of the discrete spectrum out of the simulated interval.
        while disc.recurrence_time < 2.0 * t_final:
            disc = Discretization(2 * disc.n_modes - 1, disc.window, disc.gamma1)
    disc.check_coverage(params, omega)
    return disc, t_final


def _run_single(params, omega, disc, t_final):
    a0 = gaussian_amplitudes(disc, omega)
    state, _ = _evolve(params, omega, disc, t_final, a0, np.zeros_like(a0))
    t = float(np.sum(np.abs(state.alpha) ** 2))
    r = float(np.sum(np.abs(state.beta) ** 2))
    return t, r, 1.0 - t - r


def oracle_transmittance(params: PhysParams, omega: float, disc: Discretization | None = None,
                         t_final: float | None = None, *, check_convergence: bool = False
                         ) -> tuple[float, float, float]:
    """Single-photon (T, R, L) from the discretized continuum.

    With the default discretization the mode count is raised until the
    revival time 2 pi / d_omega is at least twice ``t_final``. With
    ``check_convergence`` the run is repeated with twice the modes, and again
    with twice the window at that spacing; a change in T above 0.5% raises
    :class:`ConvergenceError`.
    """
    disc, t_final = _resolve(params, omega, disc, t_final)
    base = _run_single(params, omega, disc, t_final)
    if check_convergence:
        finer = Discretization(2 * disc.n_modes - 1, disc.window, disc.gamma1)
        wider = Discretization(2 * finer.n_modes - 1, 2 * disc.window, disc.gamma1)
        t_fine = _run_single(params, omega, finer, t_final)[0]
        t_wide = _run_single(params, omega, wider, t_final)[0]
        for label, ref, other in (("n_modes", base[0], t_fine), ("window", t_fine, t_wide)):
            if abs(other - ref) > CONVERGENCE_TOL * max(abs(ref), 1e-12):
                raise ConvergenceError(
                    f"oracle T changed from {ref:.6g} to {other:.6g} when doubling {label}")
    return base


def oracle_collision_inversion(params: PhysParams, omega: float, times,
                               disc: Discretization | None = None) -> np.ndarray:
    """<1|sigma_z(t)|1> for one photon from each side, both meeting at the atom at t_atom.

    ``|1> = |1_a,0_b> + |0_a,1_b>`` lies in the single-excitation sector, where
    the element equals |c_e(t)|^2 - 1 (norm 2, lost population in the ground state).
    """
    times = np.asarray(times, dtype=float)
    t_final = max(float(times.max()), params.t_atom + 8.0 / omega)
    disc, t_final = _resolve(params, omega, disc, t_final)
    a0 = gaussian_amplitudes(disc, omega)
    # A backward pulse centred at 2 z_A at t = 0 reaches the atom at T_A too.
    b0 = a0 * np.exp(2j * disc.detunings * params.t_atom)
    _, pe = _evolve(params, omega, disc, t_final, a0.astype(complex), b0, times)
    return pe - 1.0
