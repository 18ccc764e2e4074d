from pyqse.amplitude import AmplitudeTrajectory
from pyqse.dissipation import (EvolvedStateSeries, evolve_series,
                               family_entries, family_qse,
                               integrate_master_equation, lindblad_generator,
                               rho_of_t, state_at, steady_state_qse)
from pyqse.errors import NumericalFailureError, ParameterDomainError
from pyqse.geometry import ellipsoid_of_A, ellipsoid_of_B
from pyqse.state import (TwoQubitDensity, bell_state, from_initial_family,
                         ground_state, pauli_decompose, validate)
from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest
from . conftests import ConfTests


conf = ConfTests()


def amplitude(modulus, phase):
    return(modulus * np.exp(1j * phase))


# TESTS for rho_of_t()

def test_unit_amplitudes_give_initial_state():
    params = conf.fig1_params()
    rho = rho_of_t(params.p, params.theta, 1.0, 1.0)
    assert np.allclose(rho.entries, from_initial_family(params).entries,
                       atol=1e-15)


def test_zero_amplitudes_give_ground_state():
    rho = rho_of_t(0.8, np.pi / 3, 0.0, 0.0)
    assert np.allclose(rho.entries, ground_state().entries)


def test_coherence_follows_amplitudes():
    cA, cB = amplitude(0.7, 0.4), amplitude(0.5, -1.1)
    rho = rho_of_t(0.9, np.pi / 8, cA, cB)
    expected = 0.9 * np.cos(np.pi / 8) * np.sin(np.pi / 8) * np.conj(cA * cB)
    assert rho.element('gg', 'ee') == pytest.approx(expected, abs=1e-15)
    assert rho.element('ee', 'gg') == pytest.approx(np.conj(expected),
                                                    abs=1e-15)


def test_single_side_decayed():
    # Bob's qubit relaxed: rho_AB = rho_A(t) x |g><g|
    theta = np.pi / 3
    rho = rho_of_t(0.8, theta, amplitude(0.6, 0.2), 0.0)
    assert rho.entries[1, 1] == 0 and rho.entries[3, 3] == 0
    assert rho.entries[2, 2].real == pytest.approx(0.36 * np.sin(theta) ** 2)


@pytest.mark.parametrize('cA, cB', [(1.1, 0.5), (0.5, 1j * 1.01)])
def test_amplitude_above_one(cA, cB):
    with pytest.raises(ParameterDomainError):
        rho_of_t(0.5, 0.3, cA, cB)


def test_family_out_of_domain():
    with pytest.raises(ParameterDomainError):
        rho_of_t(1.5, 0.3, 0.5, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=np.pi / 2),
       st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=-np.pi, max_value=np.pi),
       st.floats(min_value=-np.pi, max_value=np.pi))
def test_closed_form_is_a_state(p, theta, zA, zB, phiA, phiB):
    rho = rho_of_t(p, theta, amplitude(zA, phiA), amplitude(zB, phiB))
    d = validate(rho)
    assert d.hermiticity_defect <= 1e-15
    assert d.trace_defect <= 1e-12
    assert d.min_eigenvalue >= -1e-12


def test_family_entries_broadcast():
    entries = family_entries(0.9, np.pi / 8, np.ones(5), np.linspace(0, 1, 5))
    assert entries.shape == (5, 4, 4)
    assert np.allclose(np.trace(entries, axis1=1, axis2=2), 1.0)


# TESTS for evolve_series()

def test_series_starts_at_initial_state():
    traj = conf.trajectory(conf.ETA_BOUND, t_max=10.0)
    params = conf.fig1_params()
    series = evolve_series(params.p, params.theta, traj, traj)
    assert len(series) == len(traj)
    assert np.allclose(series[0].entries, from_initial_family(params).entries)
    assert isinstance(series[3], TwoQubitDensity)


def test_series_read_only():
    traj = conf.trajectory(conf.ETA_BOUND, t_max=10.0)
    series = evolve_series(0.9, np.pi / 8, traj, traj)
    with pytest.raises(ValueError):
        series.entries[0, 0, 0] = 0.0


def test_series_matches_pointwise_closed_form():
    traj_a = conf.trajectory(conf.ETA_BOUND, t_max=10.0)
    traj_b = conf.trajectory(conf.ETA_FREE, t_max=10.0)
    series = evolve_series(0.8, np.pi / 3, traj_a, traj_b)
    for k in (0, 17, 250, 500):
        rho = rho_of_t(0.8, np.pi / 3, traj_a.values[k], traj_b.values[k])
        assert np.allclose(series.entries[k], rho.entries, atol=1e-15)


def test_series_grid_mismatch():
    with pytest.raises(ParameterDomainError):
        evolve_series(0.9, np.pi / 8, conf.trajectory(0.06, t_max=10.0),
                      conf.trajectory(0.06, t_max=20.0))


def test_series_modulus_check():
    bad = AmplitudeTrajectory(conf.env(0.0), 0.1, [1.0, 1.01, 0.9])
    good = AmplitudeTrajectory(conf.env(0.0), 0.1, [1.0, 0.95, 0.9])
    with pytest.raises(ParameterDomainError) as err:
        evolve_series(0.5, 0.3, bad, good)
    assert err.value.field == 'traj_a'


def test_series_shape_check():
    traj = AmplitudeTrajectory(conf.env(0.0), 0.1, [1.0, 0.9])
    with pytest.raises(TypeError):
        EvolvedStateSeries(conf.fig1_params(), [0.0, 0.1], np.zeros((3, 4, 4)),
                           traj, traj)


def test_state_at_nearest_sample():
    traj = conf.trajectory(conf.ETA_BOUND, t_max=10.0)
    series = evolve_series(0.9, np.pi / 8, traj, traj)
    rho = state_at(series, 5.004)
    assert np.array_equal(rho.entries, series.entries[250])


# TESTS for lindblad_generator()

def test_generator_traceless_and_hermitian():
    rng = np.random.default_rng(conf.SEED)
    rho = conf.random_density(rng)
    out = lindblad_generator(rho, (0.9, 1.1), (0.3, 0.05))
    assert abs(np.trace(out)) <= 1e-14
    assert np.allclose(out, out.conj().T)


def test_generator_ground_state_stationary():
    out = lindblad_generator(ground_state().entries, (1.0, 1.0), (0.2, 0.2))
    assert np.allclose(out, 0.0)


# TESTS for integrate_master_equation()

def test_oracle_exact_without_coupling():
    traj = conf.trajectory(0.0, t_max=20.0, dt=1e-2)
    params = conf.fig1_params()
    closed = evolve_series(params.p, params.theta, traj, traj)
    oracle = integrate_master_equation(params.p, params.theta, traj, traj)
    assert np.max(np.abs(oracle.entries - closed.entries)) <= 1e-6


@pytest.mark.parametrize('eta_a, eta_b, p, theta', [
    (0.06, 0.06, 0.9, np.pi / 8),
    (0.06, 0.03, 0.8, np.pi / 3),
    (0.03, 0.06, 0.8, np.pi / 3)])
def test_oracle_matches_closed_form(eta_a, eta_b, p, theta):
    traj_a = conf.trajectory(eta_a, t_max=50.0, dt=1e-2)
    traj_b = conf.trajectory(eta_b, t_max=50.0, dt=1e-2)
    closed = evolve_series(p, theta, traj_a, traj_b)
    oracle = integrate_master_equation(p, theta, traj_a, traj_b)
    assert np.max(np.abs(oracle.entries - closed.entries)) <= 1e-4
    traces = np.trace(oracle.entries, axis1=1, axis2=2)
    assert np.max(np.abs(traces - 1.0)) <= 1e-10


def test_oracle_stops_early():
    traj = conf.trajectory(conf.ETA_BOUND, t_max=20.0, dt=1e-2)
    oracle = integrate_master_equation(0.9, np.pi / 8, traj, traj, t_stop=5.0)
    assert len(oracle) == 501
    assert oracle.times[-1] == pytest.approx(5.0)


def test_oracle_halts_on_missing_rate():
    traj = AmplitudeTrajectory(conf.env(0.0), 0.1,
                               [1.0, 0.9, 0.8, 0.0, 0.5, 0.4])
    with pytest.raises(NumericalFailureError) as err:
        integrate_master_equation(0.9, np.pi / 8, traj, traj)
    assert err.value.diagnostics['last_valid_time'] == pytest.approx(0.1)
    assert len(err.value.partial) == 2


def test_oracle_grid_mismatch():
    with pytest.raises(ParameterDomainError):
        integrate_master_equation(0.9, np.pi / 8,
                                  conf.trajectory(0.06, t_max=10.0),
                                  conf.trajectory(0.06, t_max=10.0, dt=1e-2))


# TESTS for family_qse()

# semiaxes come from sqrt of eigenvalues: keep the smallest one above 1e-5
@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.1, max_value=1.0),
       st.floats(min_value=0.1, max_value=np.pi / 2 - 0.1),
       st.floats(min_value=0.1, max_value=1.0),
       st.floats(min_value=0.1, max_value=1.0),
       st.floats(min_value=-np.pi, max_value=np.pi))
def test_closed_form_matches_generic(p, theta, zA, zB, phase):
    pf = pauli_decompose(rho_of_t(p, theta, amplitude(zA, phase),
                                  amplitude(zB, -2 * phase)))
    for party, build in (('A', ellipsoid_of_A), ('B', ellipsoid_of_B)):
        generic = build(pf)
        closed = family_qse(party, p, theta, zA, zB)
        assert np.allclose(generic.semiaxes, closed.semiaxes, rtol=0,
                           atol=1e-10)
        assert np.allclose(generic.center, closed.center, rtol=0,
                           atol=1e-10)


def test_closed_form_along_trajectory():
    traj_a = conf.trajectory(conf.ETA_BOUND, t_max=20.0, dt=1e-2)
    traj_b = conf.trajectory(conf.ETA_FREE, t_max=20.0, dt=1e-2)
    params = conf.fig3_params()
    series = evolve_series(params.p, params.theta, traj_a, traj_b)
    for k in (100, 700, 1500):
        generic = ellipsoid_of_A(pauli_decompose(series[k]))
        closed = family_qse('A', params.p, params.theta,
                            abs(traj_a.values[k]), abs(traj_b.values[k]))
        assert np.allclose(generic.semiaxes, closed.semiaxes, rtol=0,
                           atol=1e-10)


def test_closed_form_partner_decayed():
    p, theta, z = 0.8, np.pi / 3, 0.83
    r = p * np.cos(2 * theta) - 1
    e = family_qse('A', p, theta, z, 0.0)
    transverse = p * z * np.sin(2 * theta) / np.sqrt(2 * abs(r))
    longitudinal = 4 * p * z ** 2 * np.cos(theta) ** 2 * np.sin(theta) ** 2 \
        / (2 * abs(r))
    assert not e.degenerate_flag
    assert np.allclose(np.sort(e.semiaxes), np.sort([transverse, transverse,
                                                     longitudinal]))
    assert np.allclose(family_qse('B', p, theta, z, 0.0).semiaxes, 0.0)


def test_closed_form_bell_state():
    for party in ('A', 'B'):
        e = family_qse(party, 1.0, np.pi / 4, 1.0, 1.0)
        assert np.allclose(e.semiaxes, 1.0) and np.allclose(e.center, 0.0)


def test_closed_form_vanishing_denominator():
    e = family_qse('B', 0.5, np.pi / 2, 1.0, 0.4)
    assert e.degenerate_flag
    assert np.allclose(e.center, [0, 0, 1 + (0.5 * np.cos(np.pi) - 1) * 0.16])


def test_closed_form_out_of_domain():
    with pytest.raises(ParameterDomainError):
        family_qse('A', 0.5, 0.3, 1.2, 0.5)
    with pytest.raises(ParameterDomainError):
        family_qse('C', 0.5, 0.3, 0.5, 0.5)


# TESTS for steady_state_qse()

def test_steady_state_fully_decayed():
    for party in ('A', 'B'):
        e = steady_state_qse(party, 0.9, np.pi / 8, 0.0, 0.0)
        assert np.allclose(e.semiaxes, 0.0)
        assert np.allclose(e.center, [0, 0, 1])


def test_steady_state_without_dissipation_is_initial():
    pf = pauli_decompose(bell_state())
    e = steady_state_qse('B', 1.0, np.pi / 4, 1.0, 1.0)
    assert np.allclose(e.semiaxes, ellipsoid_of_B(pf).semiaxes)
