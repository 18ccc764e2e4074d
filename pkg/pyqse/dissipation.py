'''Two-qubit state under independent dissipation of both qubits.

Each qubit exchanges its excitation with its own environment only, so the
whole evolution of the initial family is fixed by the two amplitudes c_A(t)
and c_B(t). rho_of_t gives the state in closed form from them; this is the
production path. integrate_master_equation propagates the time-local master
equation instead and serves as an independent check of the closed form.

    Typical usage examples:

    series = evolve_series(0.9, np.pi / 8, traj_a, traj_b)
    e_a = family_qse('A', 0.9, np.pi / 8, abs(c_a), abs(c_b))
    e_inf = steady_state_qse('B', 0.9, np.pi / 8, bound_a.residue,
                             bound_b.residue)
'''
import logging

import numpy as np

from pyqse.amplitude import rates_from_amplitude
from pyqse.errors import NumericalFailureError, ParameterDomainError
from pyqse.geometry import SteeringEllipsoid
from pyqse.state import (IDENTITY_2, SIGMA_MINUS, InitialFamilyParams,
                         TwoQubitDensity, check_party)


logger = logging.getLogger(__name__)

MODULUS_TOL = 1e-9
SINGULAR_DENOMINATOR = 1e-14

LOWERING = (np.kron(SIGMA_MINUS, IDENTITY_2), np.kron(IDENTITY_2, SIGMA_MINUS))


class EvolvedStateSeries():
    '''
    The EvolvedStateSeries class holds rho_AB(t) on the amplitude time grid

    Args:
    -----
    params: InitialFamilyParams
        Initial-state parameters (p, theta)

    times: numpy.ndarray
        Uniform time grid

    entries: numpy.ndarray
        Stack of shape (len(times), 4, 4), one density matrix per sample

    traj_a, traj_b: AmplitudeTrajectory
        The amplitudes the series was built from

    Return:
    -------
    EvolvedStateSeries: an instance of this class
    '''
    def __init__(self, params, times, entries, traj_a, traj_b):
        entries = np.array(entries, dtype=complex)
        times = np.array(times, dtype=float)
        if entries.shape != (times.size, 4, 4):
            raise TypeError('entries is expected to have shape'
                            f' ({times.size}, 4, 4), got {entries.shape}')
        entries.flags.writeable = False
        times.flags.writeable = False
        self._params = params
        self._times = times
        self._entries = entries
        self._traj_a = traj_a
        self._traj_b = traj_b

    def __repr__(self):
        return(f'EvolvedStateSeries(params={self._params!r},'
               f' samples={len(self)})')

    def __len__(self):
        return(self._times.size)

    def __getitem__(self, k):
        return(TwoQubitDensity(self._entries[k]))

    @property
    def params(self):
        return(self._params)

    @property
    def times(self):
        return(self._times)

    @property
    def entries(self):
        return(self._entries)

    @property
    def states(self):
        return([TwoQubitDensity(m) for m in self._entries])

    @property
    def traj_a(self):
        return(self._traj_a)

    @property
    def traj_b(self):
        return(self._traj_b)


def family_entries(p, theta, cA, cB):
    '''Closed-form rho_AB for arrays of amplitudes, shape (..., 4, 4)

    With z_j = |c_j|^2, s = sin(theta) and
    d = z_B [-1 + p cos(2 theta) + (1 + p) z_A s^2] / 2 the non-zero
    elements are

        rho_gg,gg = 1 - z_A s^2 + d       rho_ge,ge = -d
        rho_eg,eg = z_A [2 - (1 + p) z_B] s^2 / 2
        rho_ee,ee = (1 + p) z_A z_B s^2 / 2
        rho_gg,ee = p cos(theta) sin(theta) conj(c_A c_B)
    '''
    cA = np.asarray(cA, dtype=complex)
    cB = np.asarray(cB, dtype=complex)
    za = np.abs(cA) ** 2
    zb = np.abs(cB) ** 2
    s2 = np.sin(theta) ** 2
    d = zb * (-1.0 + p * np.cos(2 * theta) + (1.0 + p) * za * s2) / 2
    coherence = p * np.cos(theta) * np.sin(theta) * np.conj(cA * cB)

    entries = np.zeros(np.broadcast(cA, cB).shape + (4, 4), dtype=complex)
    entries[..., 0, 0] = 1.0 - za * s2 + d
    entries[..., 1, 1] = -d
    entries[..., 2, 2] = za * (2.0 - (1.0 + p) * zb) * s2 / 2
    entries[..., 3, 3] = (1.0 + p) * za * zb * s2 / 2
    entries[..., 0, 3] = coherence
    entries[..., 3, 0] = np.conj(coherence)
    return(entries)


def rho_of_t(p, theta, cA, cB):
    '''State of the initial family once the amplitudes are cA and cB

    Args:
    -----
    p, theta: float
        Initial-state parameters

    cA, cB: complex
        Excited-state amplitudes of Alice's and Bob's qubits

    Return:
    -------
    rho: TwoQubitDensity

    Raise:
    ------
    ParameterDomainError: p or theta out of range, or |c| > 1 + 1e-9
    '''
    params = InitialFamilyParams(p, theta)
    for name, c in (('cA', cA), ('cB', cB)):
        if abs(c) > 1.0 + MODULUS_TOL:
            raise ParameterDomainError(name, c, 'expected |c| <= 1')
    return(TwoQubitDensity(family_entries(params.p, params.theta, cA, cB)))


def evolve_series(p, theta, traj_a, traj_b):
    '''Apply the closed form along two amplitude trajectories

    Raise:
    ------
    ParameterDomainError: the trajectories do not share a time grid, or an
        amplitude modulus exceeds 1
    '''
    params = InitialFamilyParams(p, theta)
    _check_grids(traj_a, traj_b)
    for name, traj in (('traj_a', traj_a), ('traj_b', traj_b)):
        peak = float(np.max(np.abs(traj.values)))
        if peak > 1.0 + MODULUS_TOL:
            raise ParameterDomainError(name, peak, 'expected |c| <= 1')
    entries = family_entries(params.p, params.theta, traj_a.values,
                             traj_b.values)
    logger.debug('evolved %d states for %r', len(traj_a), params)
    return(EvolvedStateSeries(params, traj_a.times, entries, traj_a, traj_b))


def lindblad_generator(rho, omega, gamma):
    '''Time-local generator of the two-qubit master equation

    L(rho) = sum_j -i Omega_j [s_j^+ s_j, rho]
             + Gamma_j (2 s_j rho s_j^+ - {s_j^+ s_j, rho})

    Args:
    -----
    rho: numpy.ndarray
        4x4 matrix

    omega, gamma: sequence of two floats
        Lamb-shifted frequencies and decay rates of (A, B)
    '''
    out = np.zeros((4, 4), dtype=complex)
    for lower, w, g in zip(LOWERING, omega, gamma):
        raise_ = lower.conj().T
        number = raise_ @ lower
        out += -1j * w * (number @ rho - rho @ number)
        out += g * (2 * lower @ rho @ raise_ - number @ rho - rho @ number)
    return(out)


def integrate_master_equation(p, theta, traj_a, traj_b, t_stop=None):
    '''Fourth-order Runge-Kutta propagation of the master equation

    The rates come from rates_from_amplitude on both trajectories; midpoint
    rates are linear interpolations between grid samples. Each state is
    symmetrised after its step.

    Args:
    -----
    p, theta: float

    traj_a, traj_b: AmplitudeTrajectory
        Trajectories on a common grid

    t_stop (optional): float
        Stop at this time instead of the end of the grid

    Return:
    -------
    series: EvolvedStateSeries

    Raise:
    ------
    ParameterDomainError: grid mismatch
    NumericalFailureError: a rate is unavailable; diagnostics hold the last
        valid time and the partial series is attached as .partial
    '''
    params = InitialFamilyParams(p, theta)
    _check_grids(traj_a, traj_b)
    rates_a = rates_from_amplitude(traj_a)
    rates_b = rates_from_amplitude(traj_b)
    omega = np.column_stack((rates_a.omega, rates_b.omega))
    gamma = np.column_stack((rates_a.gamma, rates_b.gamma))

    steps = len(traj_a) - 1
    if t_stop is not None:
        steps = min(steps, traj_a.index_of(t_stop))
    dt = traj_a.dt
    entries = np.zeros((steps + 1, 4, 4), dtype=complex)
    entries[0] = family_entries(params.p, params.theta, 1.0, 1.0)
    for n in range(steps):
        if not (np.all(np.isfinite(omega[n:n + 2]))
                and np.all(np.isfinite(gamma[n:n + 2]))):
            partial = EvolvedStateSeries(params, traj_a.times[:n + 1],
                                         entries[:n + 1], traj_a, traj_b)
            err = NumericalFailureError(
                'master equation halted, rate unavailable',
                {'step': n, 'last_valid_time': float(traj_a.times[n])})
            err.partial = partial
            raise err
        w_mid = (omega[n] + omega[n + 1]) / 2
        g_mid = (gamma[n] + gamma[n + 1]) / 2
        rho = entries[n]
        k1 = lindblad_generator(rho, omega[n], gamma[n])
        k2 = lindblad_generator(rho + dt / 2 * k1, w_mid, g_mid)
        k3 = lindblad_generator(rho + dt / 2 * k2, w_mid, g_mid)
        k4 = lindblad_generator(rho + dt * k3, omega[n + 1], gamma[n + 1])
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        entries[n + 1] = (rho + rho.conj().T) / 2
    logger.debug('master equation integrated over %d steps', steps)
    return(EvolvedStateSeries(params, traj_a.times[:steps + 1], entries,
                              traj_a, traj_b))


def family_qse(party, p, theta, zA, zB):
    '''Steering ellipsoid of the initial family at amplitude moduli zA, zB

    The family's correlation matrix is diagonal up to a rotation about z,
    so both ellipsoids are spheroids centred on the z axis, with x and y
    semiaxes equal. With q_j = z_j^2, s = sin(theta), c = cos(theta) and
    r = p cos(2 theta) - 1 (never positive):

    Alice's ellipsoid (Bob measures)
        C_z   = 1 + 2 s^2 q_A [(1 + p)(1 + r q_B) - r] / (r (2 + r q_B))
        l_x,y = p sqrt(q_A) sin(2 theta) / sqrt(-r (2 + r q_B))
        l_z   = 4 p q_A c^2 s^2 / (|r| (2 + r q_B))

    Bob's ellipsoid (Alice measures)
        C_z   = 1 - (1 + p) q_B + p q_B c^2 / (1 - q_A s^2)
        l_x,y = p sqrt(q_B) c / sqrt(1 - q_A s^2)
        l_z   = p q_B c^2 / (1 - q_A s^2)

    These stay finite when the steering party's amplitude vanishes (the
    generic construction is 0/0 there). The ellipsoid is flagged degenerate
    only when a denominator vanishes; it is then the steered party's Bloch
    vector.

    Args:
    -----
    party: str
        'A' or 'B'

    p, theta: float
        Initial-state parameters

    zA, zB: float
        Amplitude moduli |c_A|, |c_B| in [0, 1]

    Return:
    -------
    ellipsoid: SteeringEllipsoid
    '''
    party = check_party(party)
    params = InitialFamilyParams(p, theta)
    p, theta = params.p, params.theta
    for name, z in (('zA', zA), ('zB', zB)):
        if not 0.0 <= z <= 1.0 + MODULUS_TOL:
            raise ParameterDomainError(name, z, 'expected 0 <= z <= 1')
    qa, qb = min(zA, 1.0) ** 2, min(zB, 1.0) ** 2
    s2 = np.sin(theta) ** 2
    c2 = np.cos(theta) ** 2
    r = p * np.cos(2 * theta) - 1.0

    if party == 'A':
        denominator = r * (2.0 + r * qb)
        if abs(denominator) < SINGULAR_DENOMINATOR:
            return(_point('A', 1.0 - 2.0 * qa * s2))
        center = 1.0 + 2.0 * s2 * qa * ((1.0 + p) * (1.0 + r * qb) - r) \
            / denominator
        transverse = p * np.sqrt(qa) * np.sin(2 * theta) \
            / np.sqrt(abs(denominator))
        longitudinal = 4.0 * p * qa * c2 * s2 / abs(denominator)
    else:
        denominator = 1.0 - qa * s2
        if abs(denominator) < SINGULAR_DENOMINATOR:
            return(_point('B', 1.0 + r * qb))
        center = 1.0 - (1.0 + p) * qb + p * qb * c2 / denominator
        transverse = p * np.sqrt(qb) * np.cos(theta) / np.sqrt(denominator)
        longitudinal = p * qb * c2 / denominator
    return(SteeringEllipsoid(party, [0.0, 0.0, center],
                             [transverse, transverse, longitudinal]))


def steady_state_qse(party, p, theta, zA, zB):
    '''Long-time ellipsoid: family_qse at the bound-state residues

    zA and zB are the residues Z_j (0 on a side without bound state); the
    long-time moduli |c_j| tend to them whatever the phases.
    '''
    return(family_qse(party, p, theta, zA, zB))


def state_at(series, t):
    '''Sample of the series nearest to time t'''
    k = int(np.argmin(np.abs(series.times - float(t))))
    return(series[k])


def _point(party, z):
    logger.debug('family ellipsoid of %s has a vanishing denominator', party)
    return(SteeringEllipsoid(party, [0.0, 0.0, z], np.zeros(3),
                             degenerate_flag=True))


def _check_grids(traj_a, traj_b):
    if len(traj_a) != len(traj_b) \
            or not np.isclose(traj_a.dt, traj_b.dt, rtol=1e-12, atol=0.0):
        raise ParameterDomainError(
            'trajectories', (len(traj_a), len(traj_b)),
            'expected a common time grid')
