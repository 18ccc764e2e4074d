'''This module defines the two-qubit state types and their Pauli expansion.

The TwoQubitDensity class holds a 4x4 density matrix written in the ordered
product basis (|gg>, |ge>, |eg>, |ee>), Alice's qubit first. Single-qubit
operators act on the ordered basis (|g>, |e>) with sigma_z = diag(1, -1), so
the ground state sits at the north pole of the Bloch sphere.

    Typical usage examples:

    rho = from_initial_family(InitialFamilyParams(p=0.9, theta=np.pi / 8))
    pf = pauli_decompose(rho)
    report = validate(rho)

The PauliForm class holds the local Bloch vectors a, b and the correlation
matrix T of such a state:

    rho = (I x I + a.sigma x I + I x b.sigma + sum T_mn sigma_m x sigma_n) / 4
'''
from dataclasses import dataclass
import logging

import numpy as np

from pyqse.errors import ParameterDomainError


logger = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULIS = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])

# lowering operator |g><e|
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)

BASIS_LABELS = ('gg', 'ge', 'eg', 'ee')
PARTIES = ('A', 'B')

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-8

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)


def check_party(party):
    '''Normalise a party name to 'A' or 'B'

    Raise:
    ------
    ParameterDomainError: party is neither 'A' nor 'B'
    '''
    name = str(party).upper()
    if name not in PARTIES:
        raise ParameterDomainError('party', party, 'expected \'A\' or \'B\'')
    return(name)


class TwoQubitDensity():
    '''
    The TwoQubitDensity class represents a two-qubit density matrix in the
    ordered basis (|gg>, |ge>, |eg>, |ee>).

    The instance is immutable: the matrix is copied on construction and
    exposed read-only. Physical validity is NOT enforced here, see validate().

    Args:
    -----
    entries: array_like
        A 4x4 complex matrix

    Return:
    -------
    TwoQubitDensity: an instance of this class

    Raise:
    ------
    TypeError: entries cannot be read as a numeric 4x4 matrix
    '''
    def __init__(self, entries):
        try:
            matrix = np.array(entries, dtype=complex)
        except (TypeError, ValueError) as err:
            raise TypeError('entries is expected to be a numeric 4x4 matrix'
                            ) from err
        if matrix.shape != (4, 4):
            raise TypeError(
                f'entries is expected to be 4x4, got shape {matrix.shape}')
        matrix.flags.writeable = False
        self._entries = matrix

    def __repr__(self):
        diag = ', '.join(f'{v.real:.4g}' for v in np.diag(self._entries))
        return(f'TwoQubitDensity(diag=[{diag}])')

    # entries attribute
    @property
    def entries(self):
        return(self._entries)

    def element(self, row, col):
        '''Matrix element <row|rho|col> addressed by basis labels

        Args:
        -----
        row, col: str
            One of 'gg', 'ge', 'eg', 'ee'
        '''
        return(self._entries[BASIS_LABELS.index(row),
                             BASIS_LABELS.index(col)])


class PauliForm():
    '''
    The PauliForm class holds the Pauli-basis components of a two-qubit state

    Args:
    -----
    a: array_like
        Alice's Bloch vector (3 reals)

    b: array_like
        Bob's Bloch vector (3 reals)

    T: array_like
        3x3 real correlation matrix, T_mn = Tr[rho sigma_m x sigma_n]

    Return:
    -------
    PauliForm: an instance of this class

    Raise:
    ------
    TypeError: wrong shapes
    '''
    def __init__(self, a, b, T):
        self._a = self._frozen(a, (3,), 'a')
        self._b = self._frozen(b, (3,), 'b')
        self._T = self._frozen(T, (3, 3), 'T')

    @staticmethod
    def _frozen(value, shape, name):
        array = np.array(value, dtype=float)
        if array.shape != shape:
            raise TypeError(
                f'\'{name}\' is expected to have shape {shape},'
                f' got {array.shape}')
        array.flags.writeable = False
        return(array)

    def __repr__(self):
        return(f'PauliForm(a={self._a.tolist()}, b={self._b.tolist()})')

    @property
    def a(self):
        return(self._a)

    @property
    def b(self):
        return(self._b)

    @property
    def T(self):
        return(self._T)

    def swapped(self):
        '''The PauliForm of the same state with the qubits exchanged'''
        return(PauliForm(self._b, self._a, self._T.T))


class InitialFamilyParams():
    '''
    The parameters (p, theta) of the initial-state family

        rho(0) = p |psi><psi| + (1 - p) rho_A x I/2,
        |psi> = cos(theta) |gg> + sin(theta) |ee>

    Closed ranges are accepted; the edges give degenerate geometry which the
    downstream modules flag instead of refusing.

    Args:
    -----
    p: float
        Mixing weight in [0, 1]

    theta: float
        Entanglement angle in [0, pi/2] (radians)

    Raise:
    ------
    ParameterDomainError
    '''
    def __init__(self, p, theta):
        self._p = self.p = p
        self._theta = self.theta = theta

    def __repr__(self):
        return(f'InitialFamilyParams(p={self.p}, theta={self.theta})')

    # p attribute
    @property
    def p(self):
        return(self._p)

    @p.setter
    def p(self, p):
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ParameterDomainError('p', p, 'expected 0 <= p <= 1')
        self._p = p

    # theta attribute
    @property
    def theta(self):
        return(self._theta)

    @theta.setter
    def theta(self, theta):
        theta = float(theta)
        if not 0.0 <= theta <= np.pi / 2:
            raise ParameterDomainError('theta', theta,
                                       'expected 0 <= theta <= pi/2')
        self._theta = theta


@dataclass(frozen=True)
class Diagnostics:
    '''Validity defects of a density matrix'''
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def is_valid(self):
        return(self.hermiticity_defect <= HERMITICITY_TOL
               and self.trace_defect <= TRACE_TOL
               and self.min_eigenvalue >= PSD_TOL)


def from_initial_family(params):
    '''Build rho(0) = p |psi(theta)><psi(theta)| + (1 - p) rho_A x I/2

    Args:
    -----
    params: InitialFamilyParams

    Return:
    -------
    rho: TwoQubitDensity

    Raise:
    ------
    TypeError: params is not an InitialFamilyParams
    '''
    if not isinstance(params, InitialFamilyParams):
        raise TypeError('params is expected to be of type InitialFamilyParams')
    c, s = np.cos(params.theta), np.sin(params.theta)
    psi = np.array([c, 0.0, 0.0, s], dtype=complex)
    rho_a = np.diag([c ** 2, s ** 2]).astype(complex)
    mixed = np.kron(rho_a, IDENTITY_2 / 2)
    entries = params.p * np.outer(psi, psi.conj()) + (1 - params.p) * mixed
    return(TwoQubitDensity(entries))


def pauli_decompose(rho):
    '''Pauli-basis components a_m, b_n, T_mn of a two-qubit state

    a_m = Tr[rho sigma_m x I], b_n = Tr[rho I x sigma_n],
    T_mn = Tr[rho sigma_m x sigma_n]

    Args:
    -----
    rho: TwoQubitDensity

    Return:
    -------
    pf: PauliForm
    '''
    return(PauliForm(*pauli_components(_as_matrix(rho))))


def pauli_components(entries):
    '''a, b, T of a stack of 4x4 matrices with shape (..., 4, 4)

    Return:
    -------
    a, b: numpy.ndarray of shape (..., 3)
    T: numpy.ndarray of shape (..., 3, 3)
    '''
    entries = np.asarray(entries, dtype=complex)
    m = entries.reshape(entries.shape[:-2] + (2, 2, 2, 2))
    # m[..., i, k, j, l] = <i k| rho |j l>, Alice index first
    a = np.einsum('...ikjk,mji->...m', m, PAULIS).real
    b = np.einsum('...ikil,nlk->...n', m, PAULIS).real
    T = np.einsum('...ikjl,mji,nlk->...mn', m, PAULIS, PAULIS).real
    return(a, b, T)


def recompose(pf):
    '''Inverse of pauli_decompose'''
    entries = np.kron(IDENTITY_2, IDENTITY_2).astype(complex)
    for m in range(3):
        entries = entries + pf.a[m] * np.kron(PAULIS[m], IDENTITY_2)
        entries = entries + pf.b[m] * np.kron(IDENTITY_2, PAULIS[m])
        for n in range(3):
            entries = entries + pf.T[m, n] * np.kron(PAULIS[m], PAULIS[n])
    return(TwoQubitDensity(entries / 4))


def validate(rho):
    '''Report the hermiticity, trace and positivity defects of a state

    Never raises on an invalid matrix and never mutates it, so trajectories
    with accumulated quadrature error stay inspectable.

    Args:
    -----
    rho: TwoQubitDensity or 4x4 array

    Return:
    -------
    diagnostics: Diagnostics
        (hermiticity defect, trace defect, smallest eigenvalue of the
        hermitian part)
    '''
    m = _as_matrix(rho)
    herm = float(np.max(np.abs(m - m.conj().T)))
    trace = float(abs(np.trace(m) - 1))
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    return(Diagnostics(herm, trace, min_eig))


def partial_trace(rho, keep='A'):
    '''Reduced 2x2 state of one party

    Args:
    -----
    rho: TwoQubitDensity

    keep: str
        'A' keeps Alice's qubit (traces Bob out), 'B' the converse
    '''
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    if check_party(keep) == 'A':
        return(np.einsum('ikjk->ij', m))
    return(np.einsum('kikj->ij', m))


def bloch_vector(rho_1):
    '''Bloch vector of a single-qubit density matrix'''
    return(np.einsum('ij,mji->m', np.asarray(rho_1), PAULIS).real)


def swap_parties(rho):
    '''The same state with Alice's and Bob's qubits exchanged'''
    m = _as_matrix(rho)
    return(TwoQubitDensity(SWAP @ m @ SWAP))


def trace_distance(rho, sigma):
    '''Trace distance 1/2 ||rho - sigma||_1 between two states'''
    diff = _as_matrix(rho) - _as_matrix(sigma)
    diff = (diff + diff.conj().T) / 2
    return(float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)))))


def bell_state():
    '''The Bell state (|gg> + |ee>)/sqrt(2)'''
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return(TwoQubitDensity(np.outer(psi, psi.conj())))


def ground_state():
    '''The fully decayed state |gg><gg|'''
    entries = np.zeros((4, 4), dtype=complex)
    entries[0, 0] = 1.0
    return(TwoQubitDensity(entries))


def maximally_mixed():
    '''I/4'''
    return(TwoQubitDensity(np.eye(4, dtype=complex) / 4))


def _as_matrix(rho):
    if isinstance(rho, TwoQubitDensity):
        return(rho.entries)
    matrix = np.asarray(rho, dtype=complex)
    if matrix.shape != (4, 4):
        raise TypeError('rho is expected to be a TwoQubitDensity or a 4x4'
                        ' matrix')
    return(matrix)
