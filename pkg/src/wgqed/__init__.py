"""Scattering of Gaussian light pulses on a two-level atom in a one-dimensional waveguide.

Coherent-state and single-photon Fock pulses, single-pulse transmission and
reflection, the forward phase change, and collisions of two
counter-propagating pulses on the atom.
"""

__version__ = "0.1.0"

from .errors import (AccuracyError, ContractError, ConvergenceError, GridCoverageError,
                     ParameterError, ResolutionError, WgqedError)
from .model import (Direction, PhysParams, PulseSpec, SimGrid, effective_rabi, g_eff,
                    make_grid)
from .bloch import (CoherentDrive, CorrelatorGrid, FockCollisionElements,
                    solve_coherent_correlators, solve_coherent_inversion, solve_fock_collision)
from .observables import (CollisionResult, ScatterResult, collision_photon_numbers,
                          fringe_visibility, free_poynting, kernel_f, lorentzian_h, phase_h,
                          poynting_backward, poynting_collision, poynting_forward,
                          shot_noise_bands, susceptibility_scan, transmittance_reflectance)
from .oracle import Discretization, oracle_collision_inversion, oracle_transmittance

__all__ = [name for name in dir() if not name.startswith("_")]
