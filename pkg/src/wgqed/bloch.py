"""Linear equations of motion for the atomic matrix elements.

Three driven systems of the form ds/dt = B(t) s + b(t) are solved on a
uniform grid with classical fixed-step RK4:

* coherent drive: mean inversion and frame-rotated coherence
  x = <sigma'_+> (the usual optical Bloch equations with drive amplitude
  c = sqrt(N_a) + exp(i phi) sqrt(N_b));
* the regression system for <sigma_z(t) sigma_z(t')> under the same drive;
* the 1 + 1 photon Fock collision, where the matrix elements with respect to
  the single-excitation state |1> = |0_a,1_b> + |1_a,0_b> obey closed
  inhomogeneous equations.

Two-time systems are integrated in the complex basis
(<sz sz'>, <s'_+ sz'>, <s'_- sz'>). Initial values at t = t' follow from the
spin-1/2 algebra: sz^2 = 1/4, s_+ sz = -s_+/2 and s_- sz = +s_-/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContractError, ParameterError
from .model import PhysParams, SimGrid, check_resolution, effective_rabi

BLOCH_BALL_TOL = 1e-9


def rk4(rhs, y0, times):
    """Integrate ``dy/dt = rhs(t, y)`` with classical RK4 on the given grid.

    Returns an array of shape ``(len(times),) + y0.shape``.
    """
    y = np.array(y0)
    out = np.empty((len(times),) + y.shape, dtype=y.dtype)
    out[0] = y
    for n in range(len(times) - 1):
        t, h = times[n], times[n + 1] - times[n]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n + 1] = y
    return out


@dataclass(frozen=True)
class CoherentDrive:
    """Coherent amplitudes of the forward (a) and backward (b) pulses."""

    na: float = 1.0
    nb: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not (self.na >= 0 and self.nb >= 0):
            raise ParameterError(f"photon numbers must be >= 0, got {self.na!r}, {self.nb!r}")

    @property
    def amplitude(self) -> complex:
        """Total drive amplitude seen by the atom, sqrt(N_a) + e^{i phi} sqrt(N_b)."""
        return np.sqrt(self.na) + np.exp(1j * self.phi) * np.sqrt(self.nb)


class BlochVector(NamedTuple):
    sz: float
    sp: complex


@dataclass(frozen=True)
class BlochTrajectory:
    """Inversion ``sz`` and coherence ``sp = <sigma'_+>`` on a grid."""

    grid: SimGrid
    sz: np.ndarray
    sp: np.ndarray

    def __len__(self):
        return len(self.sz)

    def __getitem__(self, i) -> BlochVector:
        return BlochVector(float(self.sz[i]), complex(self.sp[i]))

    def radius_sq(self) -> np.ndarray:
        return self.sz**2 + np.abs(self.sp) ** 2


@dataclass(frozen=True)
class CorrelatorGrid:
    """One-time <sz(t_i)> and two-time K_ij = <sz(t_i) sz(t_j)> on a grid."""

    grid: SimGrid
    one_time: np.ndarray
    two_time: np.ndarray


@dataclass(frozen=True)
class FockCollisionElements:
    """Matrix elements for two colliding single-photon pulses.

    ``sz11 = <1|sz(t)|1>`` (the state |1> has norm 2), ``coherence`` is
    ``<1|sigma'_+(t)|0>`` and ``two_time[i, j] = <1|sz(t_i) sz(t_j)|1>``.
    """

    grid: SimGrid
    sz11: np.ndarray
    coherence: np.ndarray
    two_time: np.ndarray | None = None

    @property
    def cross_element(self) -> np.ndarray:
        """<0_a,1_b|sz(t)|1>, half of sz11 by the a <-> b symmetry."""
        return 0.5 * self.sz11


def coherent_bloch_matrix(params: PhysParams, drive: CoherentDrive, g: float) -> np.ndarray:
    """Real-basis matrix for s = (<sz>, Re<s'_+>, Im<s'_+>) at drive strength g."""
    gam, dlt = params.gamma, params.delta
    re = 2.0 * (np.sqrt(drive.na) + np.sqrt(drive.nb) * np.cos(drive.phi)) * g
    im = 2.0 * np.sqrt(drive.nb) * np.sin(drive.phi) * g
    return np.array([
        [-2.0 * gam, -re, im],
        [re, -gam, dlt],
        [-im, -dlt, -gam],
    ])


# (Z, X, Y) = T (s1, s2, s3) with X = s2 + i s3 and Y = s2 - i s3.
_TO_COMPLEX = np.array([[1, 0, 0], [0, 1, 1j], [0, 1, -1j]])
_FROM_COMPLEX = np.linalg.inv(_TO_COMPLEX)


def complex_basis(matrix: np.ndarray) -> np.ndarray:
    """Similarity transform of a real-basis Bloch matrix to the (sz, s'_+, s'_-) basis."""
    return _TO_COMPLEX @ matrix @ _FROM_COMPLEX


def _drive_fn(params, omega):
    return lambda t: float(effective_rabi(params, omega, t))


def solve_coherent_inversion(params: PhysParams, drive: CoherentDrive, omega: float,
                             grid: SimGrid) -> BlochTrajectory:
    """Bloch equations for an atom starting in the ground state."""
    check_resolution(params, omega, grid)
    g = _drive_fn(params, omega)
    b = np.array([-params.gamma, 0.0, 0.0])

    def rhs(t, s):
        return coherent_bloch_matrix(params, drive, g(t)) @ s + b

    s = rk4(rhs, np.array([-0.5, 0.0, 0.0]), grid.times)
    return BlochTrajectory(grid, s[:, 0].copy(), s[:, 1] + 1j * s[:, 2])


def _check_same_grid(grid: SimGrid, other: SimGrid):
    if grid != other:
        raise ContractError(f"correlators solved on {other}, requested {grid}")


def _regression(times, matrix_at, inhomogeneity, initial):
    """Integrate one regression system per anchor time, vectorised over anchors.

    ``matrix_at(t)`` gives the complex 3x3 matrix, ``inhomogeneity(t)`` the
    (3, M) anchor-dependent source and ``initial`` the (3, M) values at each
    anchor. Returns the lower triangle of the first component, L[i, j] for
    i >= j.
    """
    m = len(times)
    lower = np.zeros((m, m), dtype=complex)
    state = np.zeros((3, m), dtype=complex)
    for i in range(m):
        state[:, i] = initial[:, i]
        lower[i, : i + 1] = state[0, : i + 1]
        if i == m - 1:
            break
        t, h = times[i], times[i + 1] - times[i]
        s = state[:, : i + 1]

        def f(tt, y):
            return matrix_at(tt) @ y + inhomogeneity(tt)[:, : i + 1]

        k1 = f(t, s)
        k2 = f(t + 0.5 * h, s + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, s + 0.5 * h * k2)
        k4 = f(t + h, s + h * k3)
        state[:, : i + 1] = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return lower


def _hermitian_fill(lower: np.ndarray, diagonal: float) -> np.ndarray:
    full = np.tril(lower, -1)
    full = full + full.conj().T
    np.fill_diagonal(full, diagonal)
    return full


def solve_coherent_two_time(params: PhysParams, drive: CoherentDrive, omega: float,
                            grid: SimGrid, one_time: BlochTrajectory) -> np.ndarray:
    """Two-time inversion correlator K[i, j] = <sz(t_i) sz(t_j)> for coherent drive.

    For each anchor t_j the regression system is integrated forward with the
    same Bloch matrix and source (-gamma <sz(t_j)>, 0, 0); entries with
    t_i < t_j follow from Hermitian symmetry.
    """
    _check_same_grid(grid, one_time.grid)
    check_resolution(params, omega, grid)
    g = _drive_fn(params, omega)
    m = grid.n_points
    source = np.zeros((3, m), dtype=complex)
    source[0] = -params.gamma * one_time.sz
    initial = np.vstack([
        np.full(m, 0.25, dtype=complex),
        -0.5 * one_time.sp,
        0.5 * np.conj(one_time.sp),
    ])
    lower = _regression(
        grid.times,
        lambda t: complex_basis(coherent_bloch_matrix(params, drive, g(t))),
        lambda t: source,
        initial,
    )
    return _hermitian_fill(lower, 0.25)


def solve_coherent_correlators(params, drive, omega, grid) -> tuple[BlochTrajectory, CorrelatorGrid]:
    traj = solve_coherent_inversion(params, drive, omega, grid)
    k = solve_coherent_two_time(params, drive, omega, grid, traj)
    return traj, CorrelatorGrid(grid, traj.sz, k)


def fock_single_pulse_correlators(grid: SimGrid) -> CorrelatorGrid:
    """Vacuum-pulse correlators of a single Fock photon: <sz> = -1/2, <sz sz'> = 1/4."""
    m = grid.n_points
    return CorrelatorGrid(grid, np.full(m, -0.5), np.full((m, m), 0.25, dtype=complex))


def fock_collision_matrix(params: PhysParams, g: float) -> np.ndarray:
    """Real-basis matrix for (<1|sz|1>, Re<1|s'_+|0>, Im<1|s'_+|0>)."""
    gam, dlt = params.gamma, params.delta
    return np.array([
        [-2.0 * gam, -4.0 * g, 0.0],
        [0.0, -gam, dlt],
        [0.0, -dlt, -gam],
    ])


def fock_collision_two_time_matrix(params: PhysParams, g: float) -> np.ndarray:
    """Matrix for (<1|sz sz'|1>, <0|s'_- sz'|1>, <1|s'_+ sz'|0>)."""
    gam, dlt = params.gamma, params.delta
    return np.array([
        [-2.0 * gam, -2.0 * g, -2.0 * g],
        [0.0, 1j * dlt - gam, 0.0],
        [0.0, 0.0, -1j * dlt - gam],
    ])


def solve_fock_collision(params: PhysParams, omega: float, grid: SimGrid,
                         two_time: bool = True) -> FockCollisionElements:
    """Matrix elements for the collision of two single-photon pulses.

    The one-time source is (-2 gamma, -2 g(t), 0): the constant term carries
    the norm <1|1> = 2, so the undriven fixed point is sz11 = -1.
    """
    check_resolution(params, omega, grid)
    g = _drive_fn(params, omega)
    gam = params.gamma

    def rhs(t, s):
        gt = g(t)
        return fock_collision_matrix(params, gt) @ s + np.array([-2.0 * gam, -2.0 * gt, 0.0])

    s = rk4(rhs, np.array([-1.0, 0.0, 0.0]), grid.times)
    sz11 = s[:, 0].copy()
    coh = s[:, 1] + 1j * s[:, 2]
    if not two_time:
        return FockCollisionElements(grid, sz11, coh)

    m = grid.n_points
    times = grid.times

    def source(t):
        gt = g(t)
        out = np.empty((3, m), dtype=complex)
        out[0] = -gam * sz11
        out[1] = gt
        out[2] = gt
        return out

    # <0|s'_-|1> is the conjugate of the tracked <1|s'_+|0>.
    initial = np.vstack([np.full(m, 0.5, dtype=complex), 0.5 * np.conj(coh), -0.5 * coh])
    lower = _regression(times, lambda t: fock_collision_two_time_matrix(params, g(t)),
                        source, initial)
    return FockCollisionElements(grid, sz11, coh, _hermitian_fill(lower, 0.5))
