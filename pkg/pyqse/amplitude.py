'''Excited-state amplitude c(t) of a qubit decaying into its environment.

The amplitude obeys the integro-differential equation

    dc/dt + i omega0 c + int_0^t f(t - tau) c(tau) dtau = 0,   c(0) = 1

solve_volterra integrates it on a uniform grid. The free rotation is
propagated exactly (exponential integrator), the memory term is interpolated
linearly across each step, and the convolution history is treated as
piecewise linear and integrated against the kernel exactly, cell by cell
(product integration). The equation is linear, so the implicit trapezoidal corrector
is solved in closed form at every step.

    Typical usage examples:

    traj = solve_volterra(env, t_max=500.0, dt=1e-2)
    rates = rates_from_amplitude(traj)
    c_inf = asymptotic_amplitude(env, 500.0)
'''
from dataclasses import dataclass
import logging

import numpy as np

from pyqse.environment import (OMEGA0, find_bound_state, kernel_moments,
                               markov_rates)
from pyqse.errors import NumericalFailureError, ParameterDomainError


logger = logging.getLogger(__name__)

RATE_FLOOR = 1e-10


class AmplitudeTrajectory():
    '''
    The AmplitudeTrajectory class holds c(t) sampled on a uniform grid

    Args:
    -----
    env: OhmicSpectralDensity
        The environment that generated the trajectory

    dt: float
        Time step (units of 1/omega0)

    values: numpy.ndarray
        Complex samples c(k dt), k = 0..N; values[0] must be 1

    derivative (optional): numpy.ndarray
        dc/dt at the same samples, as given by the amplitude equation

    Return:
    -------
    AmplitudeTrajectory: an instance of this class
    '''
    def __init__(self, env, dt, values, derivative=None):
        values = np.array(values, dtype=complex)
        if values.ndim != 1 or values.size == 0:
            raise TypeError('values is expected to be a non-empty 1-d array')
        self._env = env
        self._dt = float(dt)
        self._values = _frozen(values)
        self._derivative = None if derivative is None \
            else _frozen(np.array(derivative, dtype=complex))
        self._times = _frozen(np.arange(values.size) * self._dt)

    def __repr__(self):
        return(f'AmplitudeTrajectory(env={self._env!r}, dt={self._dt},'
               f' samples={self._values.size})')

    def __len__(self):
        return(self._values.size)

    @property
    def env(self):
        return(self._env)

    @property
    def dt(self):
        return(self._dt)

    @property
    def times(self):
        return(self._times)

    @property
    def values(self):
        return(self._values)

    @property
    def derivative(self):
        return(self._derivative)

    @property
    def t_max(self):
        return(self._times[-1])

    def index_of(self, t):
        '''Index of the grid sample nearest to t'''
        k = int(round(float(t) / self._dt))
        return(min(max(k, 0), self._values.size - 1))

    def at(self, t):
        '''c at the grid sample nearest to t'''
        return(self._values[self.index_of(t)])


@dataclass(frozen=True)
class RateSeries:
    '''Time-local Lamb-shifted frequency Omega(t) and decay rate Gamma(t)

    Samples where |c| is below the floor are NaN and listed in unavailable.
    '''
    times: np.ndarray
    omega: np.ndarray
    gamma: np.ndarray
    unavailable: tuple = ()


def product_weights(env, n, dt):
    '''Convolution weights for piecewise-linear history

    With u_k = k dt, the memory term at t_n is

        I_n = sum_{m=0}^{n-1} W[m] c_{n-m} + tail[n-1] c_0

    Return:
    -------
    W: numpy.ndarray of n complex weights
    tail: numpy.ndarray of n complex end weights
    '''
    moment0, moment1 = kernel_moments(env, n, dt)
    alpha = moment0 - moment1 / dt
    beta = moment1 / dt
    W = alpha.copy()
    W[1:] += beta[:-1]
    return(W, beta)


def solve_volterra(env, t_max, dt):
    '''Integrate the amplitude equation on the grid 0, dt, ..., t_max

    Args:
    -----
    env: OhmicSpectralDensity

    t_max: float
        Final time (units of 1/omega0), >= dt

    dt: float
        Time step, > 0

    Return:
    -------
    trajectory: AmplitudeTrajectory
        values[0] == 1; derivative holds dc/dt from the equation itself

    Raise:
    ------
    ParameterDomainError: invalid grid
    NumericalFailureError: a non-finite sample was produced
    '''
    dt = float(dt)
    t_max = float(t_max)
    if not dt > 0.0:
        raise ParameterDomainError('dt', dt, 'expected dt > 0')
    if not t_max >= dt:
        raise ParameterDomainError('t_max', t_max, 'expected t_max >= dt')
    steps = int(round(t_max / dt))
    logger.debug('solving amplitude equation for %r: %d steps of %g', env,
                 steps, dt)

    W, tail = product_weights(env, steps, dt)
    z = -1j * OMEGA0 * dt
    rotation = np.exp(z)
    # exact integrals of exp(-i omega0 (dt - s)) against 1 and s/dt
    q0 = dt * (rotation - 1.0) / z
    q1 = dt * (rotation - 1.0 - z) / z ** 2
    lhs = 1.0 + q1 * W[0]

    c = np.zeros(steps + 1, dtype=complex)
    memory = np.zeros(steps + 1, dtype=complex)
    c[0] = 1.0
    for n in range(steps):
        history = np.dot(W[1:n + 1], c[n:0:-1]) + tail[n] * c[0]
        c[n + 1] = (rotation * c[n] - (q0 - q1) * memory[n]
                    - q1 * history) / lhs
        memory[n + 1] = W[0] * c[n + 1] + history
        if not np.isfinite(c[n + 1]):
            raise NumericalFailureError('amplitude equation diverged',
                                        {'step': n + 1, 't': (n + 1) * dt})
    derivative = -1j * OMEGA0 * c - memory
    return(AmplitudeTrajectory(env, dt, c, derivative))


def markov_amplitude(env, t):
    '''Born-Markov amplitude exp(-[kappa + i (omega0 + delta)] t)'''
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ParameterDomainError('t', t, 'expected t >= 0')
    rates = markov_rates(env)
    value = np.exp(-(rates.kappa + 1j * (OMEGA0 + rates.delta)) * t_arr)
    return(complex(value) if np.ndim(value) == 0 else value)


def asymptotic_amplitude(env, t, bound=False):
    '''Long-time amplitude: Z exp(-i E_b t) with a bound state, else 0

    Args:
    -----
    env: OhmicSpectralDensity

    t: float or numpy.ndarray

    bound (optional): BoundState or None
        Pass an already located bound state (or None) to skip the search
    '''
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ParameterDomainError('t', t, 'expected t >= 0')
    if bound is False:
        bound = find_bound_state(env)
    if bound is None:
        value = np.zeros_like(t_arr, dtype=complex)
    else:
        value = bound.residue * np.exp(-1j * bound.energy * t_arr)
    return(complex(value) if np.ndim(value) == 0 else value)


def rates_from_amplitude(traj):
    '''Omega(t) = -Im[c'/c] and Gamma(t) = -Re[c'/c] along a trajectory

    c' is the derivative stored on the trajectory by solve_volterra, which
    comes from the amplitude equation itself. A trajectory built without one
    falls back to central differences of ln|c| and of the unwrapped phase
    (one-sided at both ends). Samples where |c| <= 1e-10 are reported as
    unavailable (NaN), Gamma diverging there.

    Return:
    -------
    rates: RateSeries
    '''
    values = traj.values
    modulus = np.abs(values)
    available = modulus > RATE_FLOOR
    if traj.derivative is not None:
        with np.errstate(divide='ignore', invalid='ignore'):
            log_derivative = np.where(available, traj.derivative / values,
                                      np.nan)
        gamma = -log_derivative.real
        omega = -log_derivative.imag
    elif values.size < 2:
        zeros = np.zeros(values.size)
        return(RateSeries(traj.times, zeros + OMEGA0, zeros))
    else:
        gamma, omega = _difference_rates(traj, available)
    # a neighbour below the floor poisons a difference too
    unavailable = ~available | ~np.isfinite(gamma) | ~np.isfinite(omega)
    gamma[unavailable] = np.nan
    omega[unavailable] = np.nan
    missing = tuple(int(k) for k in np.flatnonzero(unavailable))
    if missing:
        logger.warning('rates unavailable at %d samples (|c| below %.0e)',
                       len(missing), RATE_FLOOR)
    return(RateSeries(traj.times, omega, gamma, missing))


def _difference_rates(traj, available):
    with np.errstate(divide='ignore', invalid='ignore'):
        log_modulus = np.log(np.where(available, np.abs(traj.values), np.nan))
    phase = np.unwrap(np.angle(traj.values))
    gamma = -np.gradient(log_modulus, traj.dt, edge_order=1)
    omega = -np.gradient(phase, traj.dt, edge_order=1)
    return(gamma, omega)


def window_mean_modulus(traj, t0, t1):
    '''Mean of |c(t)| over the samples with t0 <= t <= t1'''
    mask = (traj.times >= t0 - 1e-9) & (traj.times <= t1 + 1e-9)
    if not np.any(mask):
        raise ParameterDomainError('window', (t0, t1),
                                   'no sample inside the window')
    return(float(np.mean(np.abs(traj.values[mask]))))


def _frozen(array):
    array.flags.writeable = False
    return(array)
