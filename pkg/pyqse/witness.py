'''Entanglement and EPR-steering witnesses of two-qubit states.

concurrence is the Wootters entanglement monotone. lur_witness is the
local-uncertainty-relation steering witness with the three Pauli settings
A_i = B_i = sigma_i:

    dS_AB = 2 - sum_i var(A_i + alpha_i B_i),  alpha_i = -Cov(A_i, B_i) / var(B_i)

and dS_BA with the roles of the two qubits exchanged. The optimal linear
compensation gives var(A_i + alpha_i B_i) = var(A_i) - Cov_i^2 / var(B_i).
A positive value certifies steering in the named direction.

asymptotic_witnesses evaluates both witnesses in closed form on the
long-time orbit of the initial family when bound states pin the amplitudes
to Z_j exp(-i E_j t).
'''
from dataclasses import dataclass
import logging

import numpy as np

from pyqse.errors import ParameterDomainError
from pyqse.state import SIGMA_Y, _as_matrix, pauli_components


logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-12
EIGEN_CLAMP = 1e-12
STEERING_THRESHOLD = 1e-6

SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

DIRECTIONS = {'AtoB': 'AtoB', 'AB': 'AtoB', 'A->B': 'AtoB',
              'BtoA': 'BtoA', 'BA': 'BtoA', 'B->A': 'BtoA'}


@dataclass(frozen=True)
class WitnessSample:
    '''Concurrence and both steering witnesses at one time'''
    time: float
    concurrence: float
    dS_AB: float
    dS_BA: float
    degenerate_AB: bool = False
    degenerate_BA: bool = False


@dataclass(frozen=True)
class AsymptoticWitnessParams:
    '''Initial family (p, theta) plus the bound-state data of both sides

    zA, zB are the residues (0 without bound state) and ebA, ebB the bound
    energies (0 without bound state).
    '''
    p: float
    theta: float
    zA: float
    zB: float
    ebA: float = 0.0
    ebB: float = 0.0

    def __post_init__(self):
        for name in ('zA', 'zB'):
            z = getattr(self, name)
            if not 0.0 <= z <= 1.0:
                raise ParameterDomainError(name, z, 'expected 0 <= z <= 1')
        for name in ('ebA', 'ebB'):
            if getattr(self, name) > 0.0:
                raise ParameterDomainError(name, getattr(self, name),
                                           'bound energies are <= 0')

    @classmethod
    def from_bound_states(cls, p, theta, bound_a, bound_b):
        '''Build from two optional BoundState records'''
        def unpack(bound):
            if bound is None:
                return(0.0, 0.0)
            return(bound.residue, bound.energy)
        zA, ebA = unpack(bound_a)
        zB, ebB = unpack(bound_b)
        return(cls(p, theta, zA, zB, ebA, ebB))


class WitnessSeries():
    '''
    The WitnessSeries class holds witness values along a state series

    Iterating yields one WitnessSample per time.
    '''
    def __init__(self, times, concurrence, dS_AB, dS_BA, degenerate_AB,
                 degenerate_BA):
        self._times = np.asarray(times, dtype=float)
        self._concurrence = np.asarray(concurrence, dtype=float)
        self._dS_AB = np.asarray(dS_AB, dtype=float)
        self._dS_BA = np.asarray(dS_BA, dtype=float)
        self._degenerate_AB = np.asarray(degenerate_AB, dtype=bool)
        self._degenerate_BA = np.asarray(degenerate_BA, dtype=bool)

    def __len__(self):
        return(self._times.size)

    def __getitem__(self, k):
        return(WitnessSample(float(self._times[k]),
                             float(self._concurrence[k]),
                             float(self._dS_AB[k]), float(self._dS_BA[k]),
                             bool(self._degenerate_AB[k]),
                             bool(self._degenerate_BA[k])))

    def __iter__(self):
        return(self[k] for k in range(len(self)))

    @property
    def times(self):
        return(self._times)

    @property
    def concurrence(self):
        return(self._concurrence)

    @property
    def dS_AB(self):
        return(self._dS_AB)

    @property
    def dS_BA(self):
        return(self._dS_BA)

    @property
    def degenerate_AB(self):
        return(self._degenerate_AB)

    @property
    def degenerate_BA(self):
        return(self._degenerate_BA)

    def window(self, t0, t1):
        '''Boolean mask of the samples with t0 <= t <= t1'''
        return((self._times >= t0 - 1e-9) & (self._times <= t1 + 1e-9))


def check_direction(direction):
    try:
        return(DIRECTIONS[direction])
    except KeyError:
        raise ParameterDomainError('direction', direction,
                                   'expected \'AtoB\' or \'BtoA\'') from None


def concurrence_of_stack(entries):
    '''Wootters concurrence of every matrix in a (..., 4, 4) stack'''
    entries = np.asarray(entries, dtype=complex)
    flipped = SIGMA_YY @ np.conj(entries) @ SIGMA_YY
    values = np.linalg.eigvals(entries @ flipped).real
    if np.any(values < -EIGEN_CLAMP):
        logger.debug('clamping concurrence eigenvalue %.3e',
                     float(np.min(values)))
    roots = np.sort(np.sqrt(np.clip(values, 0.0, None)), axis=-1)[..., ::-1]
    value = roots[..., 0] - roots[..., 1] - roots[..., 2] - roots[..., 3]
    return(np.clip(value, 0.0, 1.0))


def concurrence(rho):
    '''C = max(0, l1 - l2 - l3 - l4), l_k the decreasing square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy)'''
    return(float(concurrence_of_stack(_as_matrix(rho))))


def lur_terms(a, b, T, direction):
    '''Witness values and degeneracy flags from Pauli components

    Args:
    -----
    a, b: numpy.ndarray of shape (..., 3)

    T: numpy.ndarray of shape (..., 3, 3)

    direction: str
        'AtoB' or 'BtoA'

    Return:
    -------
    value: numpy.ndarray
    degenerate: numpy.ndarray of bool
        True where some setting had a compensating variance below 1e-12
        (alpha_i is then 0)
    '''
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    covariance = np.diagonal(T, axis1=-2, axis2=-1) - a * b
    var_a = 1.0 - a ** 2
    var_b = 1.0 - b ** 2
    if check_direction(direction) == 'AtoB':
        measured, compensating = var_a, var_b
    else:
        measured, compensating = var_b, var_a
    flat = compensating < VARIANCE_FLOOR
    safe = np.where(flat, 1.0, compensating)
    residual = measured - np.where(flat, 0.0, covariance ** 2 / safe)
    return(2.0 - np.sum(residual, axis=-1), np.any(flat, axis=-1))


class WitnessValue(float):
    '''A witness value that also carries its degeneracy flag

    degenerate is True when some setting had a compensating variance below
    1e-12 (alpha_i is then 0).
    '''
    def __new__(cls, value, degenerate=False):
        instance = super().__new__(cls, value)
        instance._degenerate = bool(degenerate)
        return(instance)

    def __repr__(self):
        return(f'WitnessValue({float(self)!r},'
               f' degenerate={self._degenerate})')

    @property
    def degenerate(self):
        return(self._degenerate)


def lur_witness(rho, direction):
    '''Three-setting LUR steering witness dS_AB ('AtoB') or dS_BA ('BtoA')

    Args:
    -----
    rho: TwoQubitDensity

    direction: str

    Return:
    -------
    value: WitnessValue
        At most 2; positive values certify steering. value.degenerate
        flags a zero-variance setting.
    '''
    a, b, T = pauli_components(_as_matrix(rho))
    value, degenerate = lur_terms(a, b, T, direction)
    if degenerate:
        logger.warning('lur witness %s: zero variance setting, alpha set to 0',
                       direction)
    return(WitnessValue(value, degenerate))


def asymptotic_witnesses(params, t):
    '''Both witnesses on the long-time orbit of the initial family

    With q_j = Z_j^2, s = sin(theta), c = cos(theta), r = p cos(2 theta) - 1
    and phi(t) = cos[2 (E_A + E_B) t]:

        dS_AB = q_A [h_A + p^2 q_B phi sin^2(2 theta)]
        dS_BA = q_B [h_B + p^2 q_A phi sin^2(2 theta)]

    A side without bound state has Z = 0 and contributes 0.

    Args:
    -----
    params: AsymptoticWitnessParams

    t: float or numpy.ndarray

    Return:
    -------
    dS_AB, dS_BA: float or numpy.ndarray
    '''
    p, theta = params.p, params.theta
    qa, qb = params.zA ** 2, params.zB ** 2
    t = np.asarray(t, dtype=float)
    beat = np.cos(2 * (params.ebA + params.ebB) * t)
    sin2_2t = np.sin(2 * theta) ** 2
    common = p ** 2 * sin2_2t * beat

    if qa == 0.0:
        ds_ab = np.zeros_like(t)
    else:
        ds_ab = qa * (_h_a(p, theta, qa, qb) + qb * common)
    if qb == 0.0:
        ds_ba = np.zeros_like(t)
    else:
        ds_ba = qb * (_h_b(p, theta, qa, qb) + qa * common)
    if t.ndim == 0:
        return(float(ds_ab), float(ds_ba))
    return(ds_ab, ds_ba)


def _h_a(p, theta, qa, qb):
    s2 = np.sin(theta) ** 2
    c2 = np.cos(theta) ** 2
    cos_2t = np.cos(2 * theta)
    r = p * cos_2t - 1.0
    h1 = 4 * s2 * (qb * p ** 2 * c2 - 1.0)
    denominator = r * (2.0 + r * qb)
    if denominator == 0.0:
        # r = 0 only at theta = 0, where the s^4 numerators vanish as well
        return(h1)
    h2 = 4 * qa * s2 ** 2 * (2.0 + qb * p ** 2 - qb) / denominator
    h3 = 8 * p * qa * s2 ** 2 * cos_2t * (qb + p * qb - 1.0) / denominator
    return(h1 - h2 - h3)


def _h_b(p, theta, qa, qb):
    s2 = np.sin(theta) ** 2
    cos_2t = np.cos(2 * theta)
    sin2_2t = np.sin(2 * theta) ** 2
    denominator = 1.0 - qa * s2
    h1 = (qb * (1.0 + p ** 2 * cos_2t ** 2) - 2.0) / denominator
    h2 = qa * p ** 2 * sin2_2t \
        + qa * (2.0 - qb + qb * p ** 2) * s2 / denominator
    h3 = 2 * p * (1.0 - qb + qa * (qb * (1.0 + p) - 1.0) * s2) * cos_2t \
        / denominator
    return(h1 + h2 + h3)


def witness_series(series):
    '''Concurrence and both LUR witnesses at every sample of a series

    Args:
    -----
    series: EvolvedStateSeries

    Return:
    -------
    witnesses: WitnessSeries
    '''
    entries = series.entries
    a, b, T = pauli_components(entries)
    ds_ab, flat_ab = lur_terms(a, b, T, 'AtoB')
    ds_ba, flat_ba = lur_terms(a, b, T, 'BtoA')
    flagged = int(np.sum(flat_ab | flat_ba))
    if flagged:
        logger.warning('%d samples with a zero variance witness setting',
                       flagged)
    return(WitnessSeries(series.times, concurrence_of_stack(entries), ds_ab,
                         ds_ba, flat_ab, flat_ba))


def dominant_frequency(times, values, padding=64):
    '''Frequency (cycles per unit time) of the strongest spectral line

    The signal is mean-removed, Hann-windowed and zero-padded; the peak of
    the magnitude spectrum is refined by parabolic interpolation.

    Args:
    -----
    times: numpy.ndarray
        Uniform grid

    values: numpy.ndarray
        Real samples

    padding (optional): int
        Zero-padding factor

    Return:
    -------
    frequency: float
        0.0 for a constant signal
    '''
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size < 4:
        raise ParameterDomainError('values', values.size,
                                   'need at least 4 samples')
    step = (times[-1] - times[0]) / (times.size - 1)
    signal = (values - np.mean(values)) * np.hanning(values.size)
    n = padding * values.size
    magnitude = np.abs(np.fft.rfft(signal, n=n))
    if not np.any(magnitude[1:] > 0.0):
        return(0.0)
    k = int(np.argmax(magnitude[1:])) + 1
    offset = 0.0
    if k + 1 < magnitude.size:
        left, centre, right = magnitude[k - 1], magnitude[k], magnitude[k + 1]
        curvature = left - 2 * centre + right
        if curvature != 0.0:
            offset = 0.5 * (left - right) / curvature
    return(float((k + offset) / (n * step)))


def classify_steering(samples, window=None):
    '''Steering class of a witness series over a time window

    Return:
    -------
    label: str
        'two-way', 'one-way A->B', 'one-way B->A' or 'none', depending on
        which witnesses exceed 1e-6 somewhere in the window
    '''
    mask = np.ones(len(samples), dtype=bool) if window is None \
        else samples.window(*window)
    ab = bool(np.any(samples.dS_AB[mask] > STEERING_THRESHOLD))
    ba = bool(np.any(samples.dS_BA[mask] > STEERING_THRESHOLD))
    if ab and ba:
        return('two-way')
    if ab:
        return('one-way A->B')
    if ba:
        return('one-way B->A')
    return('none')
