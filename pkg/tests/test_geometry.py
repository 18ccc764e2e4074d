from pyqse.dissipation import family_qse
from pyqse.errors import ParameterDomainError, SingularMeasurementError
from pyqse.geometry import (SteeringEllipsoid, containment_excess,
                            ellipsoid_coordinates, ellipsoid_of_A,
                            ellipsoid_of_B, is_separable, min_pt_eigenvalues,
                            partial_transpose, steered_bloch, surface_points)
from pyqse.state import (InitialFamilyParams, PauliForm, TwoQubitDensity,
                         bell_state, from_initial_family, ground_state,
                         maximally_mixed, pauli_decompose, swap_parties)
from pyqse.witness import concurrence
from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest
from . conftests import ConfTests


conf = ConfTests()


# TESTS for SteeringEllipsoid

def test_semiaxes_sorted_with_axes():
    e = SteeringEllipsoid('A', [0, 0, 0], [0.2, 0.5, 0.3])
    assert np.allclose(e.semiaxes, [0.5, 0.3, 0.2])
    assert np.allclose(e.axes[:, 0], [0, 1, 0])
    assert np.allclose(e.axes[:, 2], [1, 0, 0])


def test_ellipsoid_matrix():
    e = SteeringEllipsoid('B', [0, 0, 0], [0.2, 0.5, 0.3])
    assert np.allclose(e.matrix(), np.diag([0.04, 0.25, 0.09]))


def test_ellipsoid_bad_party():
    with pytest.raises(ParameterDomainError):
        SteeringEllipsoid('C', [0, 0, 0], [0, 0, 0])


# TESTS for ellipsoid_of_B() and ellipsoid_of_A()

@pytest.mark.parametrize('build', [ellipsoid_of_A, ellipsoid_of_B])
def test_bell_state_unit_sphere(build):
    e = build(pauli_decompose(bell_state()))
    assert np.allclose(e.center, 0.0, atol=1e-14)
    assert np.allclose(e.semiaxes, 1.0, atol=1e-12)
    assert not e.degenerate_flag


def test_maximally_mixed_point():
    e = ellipsoid_of_B(pauli_decompose(maximally_mixed()))
    assert np.allclose(e.center, 0.0) and np.allclose(e.semiaxes, 0.0)


def test_pure_marginal_degenerate():
    e = ellipsoid_of_A(pauli_decompose(ground_state()))
    assert e.degenerate_flag
    assert np.allclose(e.center, [0, 0, 1]) and np.allclose(e.semiaxes, 0.0)


@pytest.mark.parametrize('p, theta', [(0.9, np.pi / 8), (0.8, np.pi / 3),
                                      (0.5, 0.3)])
def test_initial_family_matches_closed_form(p, theta):
    pf = pauli_decompose(from_initial_family(InitialFamilyParams(p, theta)))
    for party, build in (('A', ellipsoid_of_A), ('B', ellipsoid_of_B)):
        generic = build(pf)
        closed = family_qse(party, p, theta, 1.0, 1.0)
        assert np.allclose(generic.semiaxes, closed.semiaxes, atol=1e-10)
        assert np.allclose(generic.center, closed.center, atol=1e-10)


def test_axes_orthonormal():
    rng = np.random.default_rng(conf.SEED)
    for _ in range(20):
        e = ellipsoid_of_B(pauli_decompose(conf.random_density(rng)))
        assert np.allclose(e.axes.T @ e.axes, np.eye(3), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_ellipsoid_inside_bloch_sphere(seed):
    rho = conf.random_density(np.random.default_rng(seed))
    pf = pauli_decompose(rho)
    for e in (ellipsoid_of_A(pf), ellipsoid_of_B(pf)):
        assert np.all(e.semiaxes <= 1 + 1e-8)
        points = surface_points(e, 256)
        assert np.max(np.linalg.norm(points, axis=1)) <= 1 + 1e-8


def test_exchange_symmetry():
    rng = np.random.default_rng(conf.SEED)
    rho = conf.random_density(rng)
    pf, swapped = pauli_decompose(rho), pauli_decompose(swap_parties(rho))
    e_a, e_b = ellipsoid_of_A(pf), ellipsoid_of_B(pf)
    s_a, s_b = ellipsoid_of_A(swapped), ellipsoid_of_B(swapped)
    assert np.allclose(s_a.semiaxes, e_b.semiaxes, atol=1e-12)
    assert np.allclose(s_a.center, e_b.center, atol=1e-12)
    assert np.allclose(s_b.semiaxes, e_a.semiaxes, atol=1e-12)
    assert np.allclose(s_b.center, e_a.center, atol=1e-12)


def test_local_unitary_keeps_semiaxes():
    rng = np.random.default_rng(conf.SEED + 1)
    for _ in range(10):
        rho = conf.random_density(rng)
        u = np.kron(np.eye(2), conf.local_unitary(rng))
        rotated = TwoQubitDensity(u @ rho @ u.conj().T)
        before = ellipsoid_of_B(pauli_decompose(rho))
        after = ellipsoid_of_B(pauli_decompose(rotated))
        assert np.allclose(before.semiaxes, after.semiaxes, atol=1e-10)
        assert np.linalg.norm(before.center) == pytest.approx(
            np.linalg.norm(after.center), abs=1e-10)


# TESTS for steered_bloch()

def test_steered_unmeasured_is_marginal():
    rng = np.random.default_rng(conf.SEED)
    pf = pauli_decompose(conf.random_density(rng))
    assert np.allclose(steered_bloch(pf, [0, 0, 0], 'A'), pf.b)
    assert np.allclose(steered_bloch(pf, [0, 0, 0], 'B'), pf.a)


@pytest.mark.parametrize('e', [[0, 0, 1], [1, 0, 0]])
def test_steered_bell_state(e):
    v = steered_bloch(pauli_decompose(bell_state()), e, 'A')
    assert np.allclose(v, e)


def test_steered_stack_shape():
    pf = pauli_decompose(bell_state())
    v = steered_bloch(pf, np.eye(3), 'B')
    assert v.shape == (3, 3)


def test_steered_povm_outside_ball():
    with pytest.raises(ParameterDomainError):
        steered_bloch(pauli_decompose(bell_state()), [1, 1, 0], 'A')


def test_steered_singular_denominator():
    pf = PauliForm([0, 0, 1], [0, 0, 1], np.diag([0, 0, 1]))
    with pytest.raises(SingularMeasurementError):
        steered_bloch(pf, [0, 0, -1], 'A')


# TESTS for containment

@pytest.mark.parametrize('party', ['A', 'B'])
def test_containment_random_states(party):
    rng = np.random.default_rng(conf.SEED)
    for _ in range(5):
        pf = pauli_decompose(conf.random_density(rng))
        report = containment_excess(pf, party, n=10000, seed=conf.SEED)
        assert report.samples == 10000
        assert report.max_excess <= 1e-6
        assert report.max_collapsed_offset <= 1e-8


def test_containment_family_state():
    pf = pauli_decompose(from_initial_family(conf.fig3_params()))
    for party in ('A', 'B'):
        assert containment_excess(pf, party).max_excess <= 1e-6


def test_containment_degenerate_skipped():
    report = containment_excess(pauli_decompose(ground_state()), 'B')
    assert report.samples == 0


def test_ellipsoid_coordinates_of_surface():
    e = SteeringEllipsoid('B', [0, 0, 0.1], [0.5, 0.4, 0.2])
    y = ellipsoid_coordinates(e, surface_points(e, 100))
    assert np.allclose(np.sum((y / e.semiaxes) ** 2, axis=1), 1.0)


def test_surface_points_deterministic():
    e = ellipsoid_of_B(pauli_decompose(from_initial_family(
        conf.fig1_params())))
    assert np.array_equal(surface_points(e, 2048), surface_points(e, 2048))
    assert surface_points(e, 2048).shape == (2048, 3)


# TESTS for is_separable()

def test_bell_state_entangled():
    verdict = is_separable(bell_state())
    assert not verdict
    assert verdict.min_pt_eigenvalue == pytest.approx(-0.5)


def test_maximally_mixed_separable():
    assert is_separable(maximally_mixed())


@pytest.mark.parametrize('theta', np.linspace(0, np.pi / 2, 5))
def test_product_family_separable(theta):
    assert is_separable(from_initial_family(InitialFamilyParams(0.0, theta)))


def test_partial_transpose_involution():
    rng = np.random.default_rng(conf.SEED)
    rho = conf.random_density(rng)
    assert np.allclose(partial_transpose(partial_transpose(rho)), rho)


def test_min_pt_eigenvalues_stack():
    stack = np.array([bell_state().entries, maximally_mixed().entries])
    assert np.allclose(min_pt_eigenvalues(stack), [-0.5, 0.25])


def test_separability_matches_concurrence():
    rng = np.random.default_rng(conf.SEED)
    for k in range(200):
        if k % 2:
            rho = conf.random_density(rng)
        else:
            mix = rng.random()
            rho = mix * conf.random_pure_density(rng) \
                + (1 - mix) * np.eye(4) / 4
        assert bool(is_separable(rho)) == (concurrence(rho) <= 1e-10)
