'''Quantum steering ellipsoids of two-qubit states.

Bob's ellipsoid E_B is the set of Bloch vectors Alice can steer Bob to with
every POVM element E = e0 (I + e.sigma), |e| <= 1:

    E_B = { (b + T^T e) / (1 + a.e) }

with center C_B = (b - T^T a) / (1 - |a|^2) and ellipsoid matrix

    Q_B = (T^T - b a^T) (I + a a^T / (1 - |a|^2)) (T - a b^T) / (1 - |a|^2)

Alice's ellipsoid E_A is the mirror image (a <-> b, T <-> T^T). The semiaxis
lengths are the square roots of the eigenvalues of Q, the eigenvectors give
their orientation.

    Typical usage examples:

    pf = pauli_decompose(rho)
    e_b = ellipsoid_of_B(pf)
    v = steered_bloch(pf, [0, 0, 1], 'A')
    verdict = is_separable(rho)
'''
from dataclasses import dataclass
import logging

import numpy as np

from pyqse.errors import ParameterDomainError, SingularMeasurementError
from pyqse.state import check_party, _as_matrix


logger = logging.getLogger(__name__)

PURE_MARGINAL_TOL = 1e-9
EIGEN_CLAMP = 1e-12
PPT_TOL = 1e-10
SINGULAR_DENOMINATOR = 1e-12
COLLAPSED_AXIS = 1e-9

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class SteeringEllipsoid():
    '''
    The SteeringEllipsoid class represents one party's steering ellipsoid

    Args:
    -----
    party: str
        'A' for Alice's ellipsoid (Bob measures), 'B' for Bob's

    center: array_like
        Center in Bloch coordinates

    semiaxes: array_like
        Semiaxis lengths; stored sorted in descending order, the columns of
        axes being permuted accordingly

    axes (optional): array_like
        3x3 orthonormal matrix whose columns are the semiaxis directions,
        identity by default

    degenerate_flag (optional): bool
        True when the steering party's marginal is pure (or the closed form
        hits a vanishing denominator); the ellipsoid then reduces to a point

    Return:
    -------
    SteeringEllipsoid: an instance of this class

    Raise:
    ------
    TypeError: wrong shapes
    '''
    def __init__(self, party, center, semiaxes, axes=None,
                 degenerate_flag=False):
        self._party = check_party(party)
        center = np.array(center, dtype=float)
        semiaxes = np.array(semiaxes, dtype=float)
        axes = np.eye(3) if axes is None else np.array(axes, dtype=float)
        if center.shape != (3,) or semiaxes.shape != (3,) \
                or axes.shape != (3, 3):
            raise TypeError('center and semiaxes are expected to be'
                            ' 3-vectors and axes a 3x3 matrix')
        order = np.argsort(-semiaxes, kind='stable')
        self._center = _frozen(center)
        self._semiaxes = _frozen(semiaxes[order])
        self._axes = _frozen(axes[:, order])
        self._degenerate_flag = bool(degenerate_flag)

    def __repr__(self):
        return(f'SteeringEllipsoid(party=\'{self.party}\','
               f' center={np.round(self.center, 6).tolist()},'
               f' semiaxes={np.round(self.semiaxes, 6).tolist()})')

    @property
    def party(self):
        return(self._party)

    @property
    def center(self):
        return(self._center)

    @property
    def semiaxes(self):
        return(self._semiaxes)

    @property
    def axes(self):
        return(self._axes)

    @property
    def degenerate_flag(self):
        return(self._degenerate_flag)

    def matrix(self):
        '''Ellipsoid matrix Q = axes diag(semiaxes^2) axes^T'''
        return(self._axes @ np.diag(self._semiaxes ** 2) @ self._axes.T)


@dataclass(frozen=True)
class SeparabilityVerdict:
    '''Outcome of the partial-transpose test; truthy when separable'''
    separable: bool
    min_pt_eigenvalue: float

    def __bool__(self):
        return(self.separable)


@dataclass(frozen=True)
class ContainmentReport:
    '''Worst containment violation found over sampled POVM directions'''
    samples: int
    max_excess: float
    max_collapsed_offset: float


def ellipsoid_of_B(pf):
    '''Bob's steering ellipsoid, generated by Alice's measurements

    Args:
    -----
    pf: PauliForm

    Return:
    -------
    ellipsoid: SteeringEllipsoid
        When |a| >= 1 - 1e-9 the ellipsoid is the point b with
        degenerate_flag set.
    '''
    return(_ellipsoid('B', pf.a, pf.b, pf.T))


def ellipsoid_of_A(pf):
    '''Alice's steering ellipsoid, generated by Bob's measurements

    Mirror image of ellipsoid_of_B with a <-> b and T <-> T^T.
    '''
    return(_ellipsoid('A', pf.b, pf.a, pf.T.T))


def _ellipsoid(party, g, v, M):
    # g: steering party's Bloch vector, v: steered party's,
    # M: correlation matrix with the steering party's index first
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)
    gamma = 1.0 - float(g @ g)
    if np.sqrt(float(g @ g)) >= 1.0 - PURE_MARGINAL_TOL:
        logger.debug('pure steering marginal, ellipsoid of %s is a point',
                     party)
        return(SteeringEllipsoid(party, v, np.zeros(3),
                                 degenerate_flag=True))

    center = (v - M.T @ g) / gamma
    K = M.T - np.outer(v, g)
    Q = K @ (np.eye(3) + np.outer(g, g) / gamma) @ K.T / gamma
    Q = (Q + Q.T) / 2
    values, vectors = np.linalg.eigh(Q)
    if values[0] < -EIGEN_CLAMP:
        logger.warning('ellipsoid matrix of %s has eigenvalue %.3e < 0',
                       party, values[0])
    values = np.clip(values, 0.0, None)
    return(SteeringEllipsoid(party, center, np.sqrt(values),
                             _oriented(vectors)))


def _oriented(vectors):
    # deterministic sign: largest component of every column positive
    vectors = np.array(vectors, dtype=float)
    for k in range(vectors.shape[1]):
        if vectors[np.argmax(np.abs(vectors[:, k])), k] < 0:
            vectors[:, k] = -vectors[:, k]
    return(vectors)


def steered_bloch(pf, e, measuring):
    '''Bloch vector the other party is steered to by the POVM element e

    For measuring == 'A' the result is (b + T^T e) / (1 + a.e) (Bob's
    steered state); for measuring == 'B' it is (a + T e) / (1 + b.e).

    Args:
    -----
    pf: PauliForm

    e: array_like
        A POVM vector with |e| <= 1, or an (n, 3) stack of them

    measuring: str
        'A' when Alice measures, 'B' when Bob measures

    Return:
    -------
    v: numpy.ndarray
        Steered Bloch vector(s), same leading shape as e

    Raise:
    ------
    ParameterDomainError: |e| > 1
    SingularMeasurementError: 1 + a.e <= 1e-12
    '''
    e = np.asarray(e, dtype=float)
    single = e.ndim == 1
    e = np.atleast_2d(e)
    if np.any(np.linalg.norm(e, axis=1) > 1.0 + 1e-12):
        raise ParameterDomainError('e', e.tolist() if single else 'stack',
                                   'POVM vectors need |e| <= 1')
    if check_party(measuring) == 'A':
        g, v, M = pf.a, pf.b, pf.T
    else:
        g, v, M = pf.b, pf.a, pf.T.T
    denominator = 1.0 + e @ g
    if np.any(denominator <= SINGULAR_DENOMINATOR):
        raise SingularMeasurementError(
            'steering denominator 1 + a.e vanishes for the requested POVM')
    steered = (v + e @ M) / denominator[:, None]
    return(steered[0] if single else steered)


def partial_transpose(rho):
    '''Transpose on Bob's qubit'''
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    return(m.transpose(0, 3, 2, 1).reshape(4, 4))


def min_pt_eigenvalues(entries):
    '''Smallest partial-transpose eigenvalue of every matrix in a stack'''
    entries = np.asarray(entries, dtype=complex)
    m = entries.reshape(entries.shape[:-2] + (2, 2, 2, 2))
    pt = np.swapaxes(m, -3, -1).reshape(entries.shape)
    pt = (pt + np.conj(np.swapaxes(pt, -1, -2))) / 2
    return(np.linalg.eigvalsh(pt)[..., 0])


def is_separable(rho):
    '''Peres-Horodecki verdict, exact for two qubits

    A two-qubit state is separable if and only if its partial transpose is
    positive semidefinite, which is also when its steering ellipsoid fits in
    a tetrahedron inscribed in the Bloch sphere.

    Args:
    -----
    rho: TwoQubitDensity

    Return:
    -------
    verdict: SeparabilityVerdict
        separable is True iff the smallest partial-transpose eigenvalue is
        >= -1e-10
    '''
    pt = partial_transpose(rho)
    min_eig = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    return(SeparabilityVerdict(min_eig >= -PPT_TOL, min_eig))


def surface_points(ellipsoid, n=2048):
    '''Deterministic point cloud on the ellipsoid surface

    A spherical Fibonacci lattice of n unit vectors u mapped through
    center + axes diag(semiaxes) u.

    Return:
    -------
    points: numpy.ndarray of shape (n, 3)
    '''
    if n <= 0:
        return(np.zeros((0, 3)))
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    radius = np.sqrt(np.clip(1.0 - z ** 2, 0.0, None))
    phi = k * GOLDEN_ANGLE
    u = np.column_stack((radius * np.cos(phi), radius * np.sin(phi), z))
    return(ellipsoid.center + (u * ellipsoid.semiaxes) @ ellipsoid.axes.T)


def ellipsoid_coordinates(ellipsoid, points):
    '''Coordinates y = axes^T (v - center) in the ellipsoid frame'''
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return((points - ellipsoid.center) @ ellipsoid.axes)


def unit_ball_samples(n, seed):
    '''n seeded vectors uniformly distributed in the closed unit ball'''
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = rng.random(n) ** (1.0 / 3.0)
    return(directions * radii[:, None])


def containment_excess(pf, party, n=10000, seed=42):
    '''Check that steered states lie inside the matching ellipsoid

    Args:
    -----
    pf: PauliForm

    party: str
        Whose ellipsoid to check ('B' uses Alice's measurements)

    n: int
        Number of seeded POVM vectors

    seed: int

    Return:
    -------
    report: ContainmentReport
        max_excess is the largest sum (y_i/l_i)^2 - 1 over non-collapsed
        axes, max_collapsed_offset the largest |y_i| along collapsed axes.
        A degenerate ellipsoid is not sampled (samples == 0).
    '''
    party = check_party(party)
    if party == 'B':
        ellipsoid, measuring = ellipsoid_of_B(pf), 'A'
    else:
        ellipsoid, measuring = ellipsoid_of_A(pf), 'B'
    if ellipsoid.degenerate_flag or n <= 0:
        return(ContainmentReport(0, 0.0, 0.0))

    steered = steered_bloch(pf, unit_ball_samples(n, seed), measuring)
    y = ellipsoid_coordinates(ellipsoid, steered)
    open_axes = ellipsoid.semiaxes > COLLAPSED_AXIS
    if np.any(open_axes):
        ratio = np.sum((y[:, open_axes] / ellipsoid.semiaxes[open_axes]) ** 2,
                       axis=1)
        excess = float(np.max(ratio) - 1.0)
    else:
        excess = 0.0
    if np.any(~open_axes):
        collapsed = float(np.max(np.abs(y[:, ~open_axes])))
    else:
        collapsed = 0.0
    return(ContainmentReport(n, excess, collapsed))


def _frozen(array):
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return(array)
