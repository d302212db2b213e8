"""Physical parameters, pulse descriptions and simulation grids.

Units: the free-space decay rate ``gamma0`` sets the time unit and c = 1, so
the atom position z_A and the travel time T_A = z_A / c are the same number.
All rates (gamma, delta, bandwidth) are in units of 1/time.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ParameterError, ResolutionError

#: Pulse-to-atom distance in units of the pulse length 1/Omega.
DEFAULT_T_ATOM_SPAN = 6.0
#: Grid extent past the atom in units of 1/Omega.
DEFAULT_SPAN = 8.0
#: Default resolution: dt <= 1 / (DEFAULT_STEPS_PER_RATE * fastest rate).
DEFAULT_STEPS_PER_RATE = 40.0
#: Coarsest accepted resolution, same convention.
MIN_STEPS_PER_RATE = 20.0


def derive_rates(gamma0: float, ratio: float) -> tuple[float, float]:
    """Return ``(gamma1, gamma)`` for a given free-space rate and cross-section ratio.

    ``gamma1 = ratio * gamma0 / 2`` is the emission rate into the waveguide and
    ``gamma = gamma0 + gamma1`` the total dipole decay rate.
    """
    if not gamma0 > 0:
        raise ParameterError(f"gamma0 must be positive, got {gamma0!r}")
    if not ratio >= 0:
        raise ParameterError(f"ratio must be non-negative, got {ratio!r}")
    gamma1 = ratio * gamma0 / 2.0
    return gamma1, gamma0 + gamma1


def default_t_atom(omega: float) -> float:
    """Pulse-to-atom travel time used when none is given: 6 / Omega."""
    return DEFAULT_T_ATOM_SPAN / omega


@dataclass(frozen=True)
class PhysParams:
    """Atom and waveguide constants.

    Attributes:
        gamma0: free-space spontaneous decay rate.
        ratio: atomic cross section over effective mode area.
        delta: carrier detuning omega_0 - omega_A.
        t_atom: travel time from the initial pulse centre to the atom.
        gamma1: waveguide emission rate (derived).
        gamma: total dipole decay rate (derived).
    """

    gamma0: float = 1.0
    ratio: float = 1.0
    delta: float = 0.0
    t_atom: float = DEFAULT_T_ATOM_SPAN
    gamma1: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        gamma1, gamma = derive_rates(self.gamma0, self.ratio)
        if not self.t_atom > 0:
            raise ParameterError(f"t_atom must be positive, got {self.t_atom!r}")
        if not math.isfinite(self.delta):
            raise ParameterError(f"delta must be finite, got {self.delta!r}")
        object.__setattr__(self, "gamma1", gamma1)
        object.__setattr__(self, "gamma", gamma)

    def replace(self, **changes) -> "PhysParams":
        return dataclasses.replace(self, **changes)


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class Coherent:
    """Multimode coherent state with mean photon number and carrier phase."""

    mean_n: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if not self.mean_n >= 0:
            raise ParameterError(f"mean photon number must be >= 0, got {self.mean_n!r}")


@dataclass(frozen=True)
class FockOne:
    """Exactly one photon in the Gaussian spectral envelope."""


PulseKind = Union[Coherent, FockOne]


@dataclass(frozen=True)
class PulseSpec:
    """One Gaussian wave packet of spectral width ``bandwidth``."""

    bandwidth: float
    kind: PulseKind = Coherent()
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ParameterError(f"bandwidth must be positive, got {self.bandwidth!r}")

    @classmethod
    def coherent(cls, bandwidth, mean_n=1.0, phase=0.0, direction=Direction.FORWARD):
        return cls(bandwidth, Coherent(mean_n, phase), direction)

    @classmethod
    def fock(cls, bandwidth, direction=Direction.FORWARD):
        return cls(bandwidth, FockOne(), direction)

    @property
    def is_fock(self) -> bool:
        return isinstance(self.kind, FockOne)

    @property
    def mean_n(self) -> float:
        return 1.0 if self.is_fock else self.kind.mean_n

    @property
    def phase(self) -> float:
        return 0.0 if self.is_fock else self.kind.phase


@dataclass(frozen=True)
class SimGrid:
    """Uniform time grid starting at the Heisenberg initial time t = 0."""

    t_end: float
    n_points: int
    t_start: float = 0.0

    def __post_init__(self):
        if self.n_points < 1:
            raise ParameterError("a grid needs at least one point")
        if self.n_points > 1 and not self.t_end > self.t_start:
            raise ParameterError("t_end must exceed t_start")

    @property
    def dt(self) -> float:
        if self.n_points == 1:
            return 0.0
        return (self.t_end - self.t_start) / (self.n_points - 1)

    @property
    def times(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([self.t_start])
        return np.linspace(self.t_start, self.t_end, self.n_points)

    def refined(self) -> "SimGrid":
        """Same interval with the step halved."""
        return SimGrid(self.t_end, 2 * self.n_points - 1, self.t_start)


def _fastest_rate(params: PhysParams, omega: float) -> float:
    return max(params.gamma, omega)


def effective_rabi(params: PhysParams, pulse: PulseSpec | float, t):
    """Single-photon Rabi frequency g(t) = g_eff exp(-Omega^2 (t - T_A)^2 / 4).

    ``g_eff = sqrt(gamma1 * Omega / sqrt(2 pi))``, the coupling per photon of a
    transform-limited Gaussian pulse centred at the atom at ``t = T_A``.
    """
    omega = pulse.bandwidth if isinstance(pulse, PulseSpec) else float(pulse)
    if not omega > 0:
        raise ParameterError(f"bandwidth must be positive, got {omega!r}")
    g_eff = math.sqrt(params.gamma1 * omega / math.sqrt(2.0 * math.pi))
    t = np.asarray(t, dtype=float)
    return g_eff * np.exp(-0.25 * omega**2 * (t - params.t_atom) ** 2)


def g_eff(params: PhysParams, omega: float) -> float:
    return math.sqrt(params.gamma1 * omega / math.sqrt(2.0 * math.pi))


def max_step(params: PhysParams, omega: float, steps_per_rate=MIN_STEPS_PER_RATE) -> float:
    return 1.0 / (steps_per_rate * _fastest_rate(params, omega))


def make_grid(params: PhysParams, pulse: PulseSpec | float, span: float = DEFAULT_SPAN,
              n_points: int | None = None) -> SimGrid:
    """Uniform grid on ``[0, T_A + span / Omega]``.

    With ``n_points=None`` the step is chosen so that
    ``dt <= 1 / (40 max(gamma, Omega, |delta|))``. An explicit ``n_points`` is
    accepted down to ``dt = 1 / (20 max(gamma, Omega))``; coarser grids raise
    :class:`ResolutionError`.
    """
    omega = pulse.bandwidth if isinstance(pulse, PulseSpec) else float(pulse)
    if span < 4:
        raise ParameterError(f"span must be >= 4, got {span!r}")
    t_end = params.t_atom + span / omega
    if n_points is None:
        rate = max(_fastest_rate(params, omega), abs(params.delta))
        n_points = int(math.ceil(t_end * DEFAULT_STEPS_PER_RATE * rate)) + 1
        n_points = max(n_points, 64)
    if n_points < 64:
        raise ParameterError(f"n_points must be >= 64, got {n_points}")
    grid = SimGrid(t_end, int(n_points))
    limit = max_step(params, omega)
    if grid.dt > limit * (1 + 1e-12):
        raise ResolutionError(
            f"dt = {grid.dt:.4g} exceeds the resolution limit {limit:.4g} "
            f"(gamma = {params.gamma:.4g}, omega = {omega:.4g})")
    return grid


def check_resolution(params: PhysParams, omega: float, grid: SimGrid) -> None:
    limit = max_step(params, omega)
    if grid.n_points > 1 and grid.dt > limit * (1 + 1e-12):
        raise ResolutionError(f"dt = {grid.dt:.4g} exceeds the resolution limit {limit:.4g}")
