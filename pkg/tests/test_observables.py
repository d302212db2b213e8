import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from wgqed import _cascade, observables as obs
from wgqed.bloch import (CoherentDrive, fock_single_pulse_correlators, solve_coherent_correlators,
                         solve_fock_collision)
from wgqed.errors import AccuracyError, ContractError, GridCoverageError
from wgqed.model import Direction, PhysParams, PulseSpec, SimGrid, make_grid

from oracles import fock_currents, master_equation_bloch, fock_hierarchy_forward_number, fock_transmittance_quad

FWD_FOCK = PulseSpec.fock
BWD = Direction.BACKWARD


def params_for(omega, **kw):
    return PhysParams(t_atom=6.0 / omega, **kw)


# -- kernel and free pulse -------------------------------------------------

def test_kernel_endpoint_is_one():
    p = PhysParams(delta=1.2, t_atom=6.0)
    for tau in (-2.0, 0.0, 3.5):
        assert obs.kernel_f(p, 0.8, tau, tau + p.t_atom) == pytest.approx(1.0)


def test_kernel_decays_with_gamma():
    p = PhysParams(t_atom=6.0)
    tau = 0.0
    near, far = obs.kernel_f(p, 0.5, tau, [5.0, 3.0])
    overlap = math.exp(0.25 * 0.25 * ((-3.0 * 3.0) - (-1.0 * 1.0)))
    assert abs(far) / abs(near) == pytest.approx(math.exp(-2.0 * p.gamma) * overlap)


def test_free_poynting():
    assert obs.free_poynting(PulseSpec.coherent(1.0, 1.0), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert np.all(obs.free_poynting(PulseSpec.coherent(1.0, 0.0), np.linspace(-3, 3, 7)) == 0.0)
    tau = np.linspace(-12, 12, 4001)
    assert trapezoid(obs.free_poynting(PulseSpec.coherent(0.7, 3.0), tau), tau) == pytest.approx(3.0, rel=1e-9)
    assert trapezoid(obs.free_poynting(FWD_FOCK(2.0), tau), tau) == pytest.approx(1.0, rel=1e-9)


# -- single pulse ----------------------------------------------------------

@pytest.mark.parametrize("omega", [0.1, 1.0, 10.0])
def test_fock_matches_faddeeva_reference(omega):
    p = params_for(omega, ratio=0.8, delta=0.5)
    res = obs.transmittance_reflectance(p, FWD_FOCK(omega))
    t_ref, r_ref = fock_transmittance_quad(p, omega)
    assert res.transmittance == pytest.approx(t_ref, rel=1e-6)
    assert res.reflectance == pytest.approx(r_ref, rel=1e-6)
    tau = res.tau_grid[::97]
    fwd, bwd = fock_currents(p, omega, tau)
    peak = omega / math.sqrt(2 * math.pi)
    assert np.max(np.abs(res.s_forward[::97] - fwd)) < 1e-4 * peak
    assert np.max(np.abs(res.s_backward[::97] - bwd)) < 1e-4 * peak


def test_ratio_zero_is_free_propagation():
    om = 1.0
    p = params_for(om, ratio=0.0)
    grid = make_grid(p, om)
    _, corr = solve_coherent_correlators(p, CoherentDrive(2.0), om, grid)
    pulse = PulseSpec.coherent(om, 2.0)
    tau = np.array([-1.0, 0.0, 0.5, 2.0])
    assert obs.poynting_forward(p, pulse, corr, tau) == pytest.approx(obs.free_poynting(pulse, tau), rel=1e-12)
    assert np.all(obs.poynting_backward(p, pulse, corr, tau) == 0.0)
    res = obs.transmittance_reflectance(p, pulse)
    assert res.transmittance == pytest.approx(1.0, abs=1e-9)
    assert res.reflectance == 0.0


def test_dense_and_stream_agree_coherent():
    om = 1.0
    p = params_for(om, ratio=0.9, delta=0.6)
    grid = make_grid(p, om)
    pulse = PulseSpec.coherent(om, 2.5)
    dense = obs.transmittance_reflectance(p, pulse, grid, method="dense", richardson=False)
    stream = obs.transmittance_reflectance(p, pulse, grid, richardson=False)
    assert dense.transmittance == pytest.approx(stream.transmittance, rel=2e-4)
    assert dense.reflectance == pytest.approx(stream.reflectance, rel=2e-4)
    assert np.max(np.abs(dense.s_forward - stream.s_forward)) < 1e-3 * om


def test_dense_profile_reality_and_nonnegativity():
    om = 2.0
    p = params_for(om, ratio=1.0, delta=-1.0)
    grid = make_grid(p, om)
    _, corr = solve_coherent_correlators(p, CoherentDrive(3.0), om, grid)
    n_free, m1, m2 = obs._single_weights(PulseSpec.coherent(om, 3.0), corr)
    _, fwd, bwd, imag = obs.dense_profile(p, om, grid, n_free, m1, m2, stride=3)
    peak = float(obs.free_poynting(PulseSpec.coherent(om, 3.0), 0.0))
    assert np.max(imag) < 1e-8 * peak
    assert fwd.min() >= -1e-8 and bwd.min() >= -1e-8


def test_fock_double_term_factorizes():
    om = 1.5
    p = params_for(om, ratio=0.7, delta=0.9)
    grid = make_grid(p, om)
    corr = fock_single_pulse_correlators(grid)
    n_free, m1, m2 = obs._single_weights(FWD_FOCK(om), corr)
    nodes = [100, 400, grid.n_points - 1]
    times = grid.times
    pre = om / math.sqrt(2 * math.pi)
    for node in nodes:
        _, bwd, _ = obs._dense_node(p, om, times, node, n_free, m1, m2)
        tau = times[node] - p.t_atom
        w = obs.kernel_f(p, om, tau, times[: node + 1]) * math.exp(-0.25 * om**2 * tau**2)
        amp = trapezoid(w, times[: node + 1])
        assert bwd == pytest.approx(pre * p.gamma1**2 * abs(amp) ** 2, rel=1e-8)


def test_poynting_interpolation_and_coverage():
    om = 1.0
    p = params_for(om)
    grid = SimGrid(14.0, 841)
    corr = fock_single_pulse_correlators(grid)
    pulse = FWD_FOCK(om)
    nodes = obs.poynting_forward(p, pulse, corr, np.array([0.0, 1.0 / 60.0]))
    mid = obs.poynting_forward(p, pulse, corr, 0.5 / 60.0)
    assert mid == pytest.approx(nodes.mean())
    with pytest.raises(GridCoverageError):
        obs.poynting_forward(p, pulse, corr, 8.5)


def test_transmittance_invariants():
    for om, pulse in [(0.5, PulseSpec.coherent(0.5, 4.0)), (3.0, FWD_FOCK(3.0))]:
        res = obs.transmittance_reflectance(params_for(om, delta=1.0), pulse)
        assert 0.0 <= res.transmittance <= 1.0 + 1e-6
        assert res.reflectance >= 0.0
        assert res.transmittance + res.reflectance + res.loss == pytest.approx(1.0, abs=1e-15)
        assert res.loss >= -1e-6
        assert res.s_forward.min() >= -1e-8


def test_fock_below_coherent_and_reflectance_bound():
    om = 1.0
    p = params_for(om)
    fock = obs.transmittance_reflectance(p, FWD_FOCK(om))
    coh = obs.transmittance_reflectance(p, PulseSpec.coherent(om, 1.0))
    assert fock.transmittance < coh.transmittance
    assert fock.reflectance < 1.0 / 9.0


def test_short_pulse_transparency():
    om = 10.0
    res = obs.transmittance_reflectance(params_for(om), PulseSpec.coherent(om, 1.0))
    assert res.transmittance > 0.8


def test_saturation_raises_transmittance():
    om = 1.0
    p = params_for(om)
    ts = [obs.transmittance_reflectance(p, PulseSpec.coherent(om, n)).transmittance
          for n in (1, 2, 4, 8, 16)]
    assert np.all(np.diff(ts) >= 0.0)


def test_vanishing_coherent_pulse_gives_linear_response():
    om = 0.8
    p = params_for(om, delta=0.3)
    lin = obs.transmittance_reflectance(p, FWD_FOCK(om))
    zero = obs.transmittance_reflectance(p, PulseSpec.coherent(om, 0.0))
    assert zero.transmittance == pytest.approx(lin.transmittance, rel=1e-12)
    assert zero.reflectance == pytest.approx(lin.reflectance, rel=1e-12)
    assert np.all(zero.s_forward == 0.0)


def test_photon_conservation_identity():
    # N_in - N_+ - N_- = 2 gamma0 int (<sz> + 1/2) dt for coherent drive.
    om = 0.7
    p = params_for(om, ratio=0.6, delta=1.3)
    grid = make_grid(p, om)
    res = obs.collision_photon_numbers(p, PulseSpec.coherent(om, 3.0),
                                       PulseSpec.coherent(om, 2.0, 0.7, BWD), grid, richardson=False)
    st = _cascade.stream_coherent(p, om, 3.0, 2.0, 0.7, grid)
    excited = st.inversion + 0.5
    lost = 2 * p.gamma0 * (trapezoid(excited, grid.times) + excited[-1] / (2 * p.gamma))
    assert res.loss == pytest.approx(lost, rel=1e-6)


def test_richardson_failure_raises(monkeypatch):
    monkeypatch.setattr(obs, "RICHARDSON_TOL", 1e-14)
    om = 1.0
    p = params_for(om)
    with pytest.raises(AccuracyError):
        obs.transmittance_reflectance(p, PulseSpec.coherent(om, 1.0), make_grid(p, om, n_points=500))


def test_richardson_returns_refined():
    om = 1.0
    p = params_for(om)
    grid = make_grid(p, om)
    res = obs.transmittance_reflectance(p, FWD_FOCK(om), grid)
    assert len(res.tau_grid) == grid.refined().n_points


def test_backward_pulse_rejected_for_single_scattering():
    with pytest.raises(ContractError):
        obs.transmittance_reflectance(PhysParams(), PulseSpec.fock(1.0, BWD))


# -- collisions ------------------------------------------------------------

@pytest.mark.parametrize("pair", [
    (PulseSpec.coherent(1.0, 1.0), PulseSpec.coherent(2.0, 1.0, 0.0, BWD)),
    (PulseSpec.coherent(1.0, 1.0), PulseSpec.fock(1.0, BWD)),
    (PulseSpec.coherent(1.0, 1.0, 0.0, BWD), PulseSpec.coherent(1.0, 1.0)),
])
def test_collision_contract(pair):
    with pytest.raises(ContractError):
        obs.collision_photon_numbers(PhysParams(), *pair)


def test_dark_pulse_is_free():
    om = 0.3
    p = params_for(om)
    grid = make_grid(p, om)
    fwd, bwd = PulseSpec.coherent(om, 1.0), PulseSpec.coherent(om, 1.0, math.pi, BWD)
    _, corr = solve_coherent_correlators(p, CoherentDrive(1.0, 1.0, math.pi), om, SimGrid(25.0, 801))
    tau = np.array([-3.0, 0.0, 2.0])
    assert obs.poynting_collision(p, (fwd, bwd), corr, tau) == pytest.approx(
        obs.free_poynting(fwd, tau), rel=1e-12)
    res = obs.collision_photon_numbers(p, fwd, bwd, grid)
    assert res.n_plus == pytest.approx(1.0, abs=1e-6)
    assert res.n_minus == pytest.approx(1.0, abs=1e-6)


def test_collision_dense_matches_stream():
    om = 1.0
    p = params_for(om, ratio=0.8, delta=0.4)
    grid = SimGrid(14.0, 561)
    fwd, bwd = PulseSpec.coherent(om, 1.5), PulseSpec.coherent(om, 0.5, 1.1, BWD)
    _, corr = solve_coherent_correlators(p, CoherentDrive(1.5, 0.5, 1.1), om, grid)
    res = obs.collision_photon_numbers(p, fwd, bwd, grid, richardson=False)
    tau = res.tau_grid[100::60]
    dense = obs.poynting_collision(p, (fwd, bwd), corr, tau)
    assert dense == pytest.approx(res.s_plus[100::60], abs=2e-4)


def test_fock_collision_dense_matches_stream():
    om = 1.0
    p = params_for(om)
    grid = SimGrid(14.0, 561)
    fwd, bwd = FWD_FOCK(om), PulseSpec.fock(om, BWD)
    elems = solve_fock_collision(p, om, grid)
    res = obs.collision_photon_numbers(p, fwd, bwd, grid, richardson=False)
    tau = res.tau_grid[100::60]
    dense = obs.poynting_collision(p, (fwd, bwd), elems, tau)
    assert dense == pytest.approx(res.s_plus[100::60], abs=2e-4)
    with pytest.raises(ContractError):
        obs.poynting_collision(p, (fwd, bwd), solve_fock_collision(p, om, grid, two_time=False), tau)


def test_fock_collision_matches_hierarchy_reference():
    # Values from the Fock-state master-equation hierarchy (tests/oracles.py).
    cases = [(0.3, {}, 0.5917370658036692), (0.7, {"ratio": 0.6, "delta": 1.1}, 0.805469663789367)]
    for om, kw, ref in cases:
        p = params_for(om, **kw)
        res = obs.collision_photon_numbers(p, FWD_FOCK(om), PulseSpec.fock(om, BWD))
        assert res.n_plus == pytest.approx(ref, rel=1e-6)
        assert res.n_minus == pytest.approx(ref, rel=1e-6)


def test_fock_collision_hierarchy_live():
    om = 1.0
    p = params_for(om, ratio=0.9, delta=-0.5)
    res = obs.collision_photon_numbers(p, FWD_FOCK(om), PulseSpec.fock(om, BWD))
    assert res.n_plus == pytest.approx(fock_hierarchy_forward_number(p, om), rel=1e-6)
    single = obs.transmittance_reflectance(p, FWD_FOCK(om))
    assert single.transmittance == pytest.approx(
        fock_hierarchy_forward_number(p, om, collision=False), rel=1e-6)


def test_fock_collision_close_to_incoherent_sum():
    # No interference: N_+ stays near T + R of separately scattered photons.
    om = 0.3
    p = params_for(om)
    single = obs.transmittance_reflectance(p, FWD_FOCK(om))
    res = obs.collision_photon_numbers(p, FWD_FOCK(om), PulseSpec.fock(om, BWD))
    base = single.transmittance + single.reflectance
    assert abs(res.n_plus - base) / base < 0.15


def test_collision_phase_symmetry():
    om = 1.0
    p = params_for(om, delta=0.0)
    n = [obs.collision_photon_numbers(p, PulseSpec.coherent(om, 1.0),
                                      PulseSpec.coherent(om, 1.0, phi, BWD)).n_plus
         for phi in (0.9, -0.9)]
    assert n[0] == pytest.approx(n[1], rel=1e-10)


def test_fringe_visibility():
    assert obs.fringe_visibility([1.0, 0.25, 0.5]) == pytest.approx(0.75)


# -- phase change ----------------------------------------------------------

def test_phase_h_zero_without_coupling():
    assert obs.phase_h(PhysParams(ratio=0.0, delta=4.0, t_atom=60.0), 0.1) == 0j


@pytest.mark.parametrize("delta", [-4.0, 0.0, 2.0])
def test_phase_h_lorentzian_limit(delta):
    om = 1e-3
    p = params_for(om, delta=delta)
    assert obs.phase_h(p, om) == pytest.approx(complex(obs.lorentzian_h(p)), rel=1e-2)


def test_phase_h_symmetry_in_detuning():
    om = 0.5
    p = params_for(om)
    h, lor = obs.susceptibility_scan(p, om, [-2.5, 2.5])
    assert h[0].real == pytest.approx(h[1].real, rel=1e-10)
    assert h[0].imag == pytest.approx(-h[1].imag, rel=1e-10)
    assert lor[0] == pytest.approx(np.conj(lor[1]))


def test_phase_h_merges_with_lorentzian_far_detuned():
    for om in (0.1, 1.0):
        p = params_for(om)
        h, lor = obs.susceptibility_scan(p, om, [40.0])
        assert abs(h[0] - lor[0]) / abs(lor[0]) < 0.02


def test_narrower_bandwidth_larger_change():
    narrow, wide = (np.abs(obs.susceptibility_scan(params_for(om), om, [0.0, 0.5, 1.0])[0])
                    for om in (0.1, 1.0))
    assert np.all(narrow > wide)


def test_phase_h_finite_start_matches_truncated_integral():
    om = 1.0
    p = PhysParams(delta=4.0, t_atom=3.0)
    full = obs.phase_h(p, om, 0.0)
    trunc = obs.phase_h(p, om, 0.0, extend=False)
    assert full == trunc  # t_atom < 6 / omega: limit stays at tau + t_atom
    p6 = p.replace(t_atom=6.0)
    assert abs(obs.phase_h(p6, om, 0.0, extend=False) - obs.phase_h(p6, om, 0.0)) < 1e-6


def test_phase_h_position_dependence_matches_master_equation():
    # Weak drive: <sigma_+>(t) / e(tau) follows conj h(tau) up to a constant.
    om = 1.0
    p = PhysParams(delta=4.0, t_atom=12.0)
    taus = np.array([-1.5, -0.5, 0.0, 1.0, 1.5])
    _, sp = master_equation_bloch(p, om, 1e-3, taus + p.t_atom)
    ratio = sp / np.exp(-0.25 * om**2 * taus**2)
    h = np.array([obs.phase_h(p, om, t) for t in taus])
    assert np.allclose(ratio / ratio[2], np.conj(h / h[2]), atol=1e-6)


def test_phase_h_printed_form():
    om = 1.0
    p = PhysParams(delta=4.0, t_atom=6.0)
    assert obs.phase_h(p, om, 0.0, printed=True) == pytest.approx(obs.phase_h(p, om, 0.0), rel=1e-12)
    tau = 0.4
    a = p.gamma + 2.0 * om**2 * tau
    f = lambda s: np.exp(1j * p.delta * s - a * s - 0.25 * om**2 * s**2)
    s = np.linspace(0.0, 40.0, 400001)
    ref = -p.gamma1 * trapezoid(f(s), s)
    # Trapezoid endpoint error h^2 f'(0) / 12 is about 1e-8 relative here.
    assert obs.phase_h(p, om, tau, printed=True) == pytest.approx(ref, rel=1e-7)
    assert abs(obs.phase_h(p, om, tau) - ref) > 0.1 * abs(ref)


def test_shot_noise_bands():
    assert obs.shot_noise_bands(4.0) == (2.0, 6.0)
    assert obs.shot_noise_bands(0.0) == (0.0, 0.0)
    lo, hi = obs.shot_noise_bands(20.0)
    assert hi - lo == pytest.approx(2 * math.sqrt(20.0))
    with pytest.raises(ValueError):
        obs.shot_noise_bands(-1.0)


def test_peak_excitation_estimate():
    p = PhysParams()
    est = obs.peak_excitation_estimate(p, 1.0, 2.0)
    assert est == pytest.approx(0.5 / math.sqrt(2 * math.pi) * 2.0 / 2.25)
