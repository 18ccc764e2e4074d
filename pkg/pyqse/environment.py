'''Ohmic-family environments: spectral density, memory kernel, bound state.

Frequencies are in units of the qubit frequency omega0 = 1 and times in
units of 1/omega0. The spectral density of the Ohmic family is

    J(w) = eta w^s wc^(1-s) exp(-w / wc)

and its bath correlation function has the closed form

    f(t) = int_0^inf J(w) exp(-i w t) dw
         = eta wc^(1-s) Gamma(s+1) (1/wc + i t)^-(s+1)

A bound state of the qubit plus its environment is a root E_b < 0 of

    Y(E) = omega0 - int_0^inf J(w) / (w - E) dw = E

which exists if and only if Y(0) < 0, i.e. eta > eta_c = 1 / (wc Gamma(s)).

    Typical usage examples:

    env = OhmicSpectralDensity(eta=0.06, s=1, omega_c=20)
    bound = find_bound_state(env)      # BoundState or None
    rates = markov_rates(env)
'''
from dataclasses import dataclass
import logging
import warnings

import numpy as np
from scipy import integrate, optimize, special

from pyqse.errors import NumericalFailureError, ParameterDomainError


logger = logging.getLogger(__name__)

OMEGA0 = 1.0

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200
# quadrature error estimates above this are failures
QUAD_FAILURE = 1e-8

ROOT_RESIDUAL = 1e-12
ROOT_FAILURE = 1e-10


class OhmicSpectralDensity():
    '''
    The OhmicSpectralDensity class represents an Ohmic-family environment

    Args:
    -----
    eta: float
        Dimensionless coupling, >= 0

    s: float
        Ohmicity exponent, > 0 (sub-Ohmic < 1, Ohmic = 1, super-Ohmic > 1)

    omega_c: float
        Cutoff frequency in units of omega0, > 0

    Return:
    -------
    OhmicSpectralDensity: an instance of this class

    Raise:
    ------
    ParameterDomainError
    '''
    def __init__(self, eta, s=1.0, omega_c=20.0):
        self._eta = self.eta = eta
        self._s = self.s = s
        self._omega_c = self.omega_c = omega_c

    def __repr__(self):
        return(f'OhmicSpectralDensity(eta={self.eta}, s={self.s},'
               f' omega_c={self.omega_c})')

    def __eq__(self, other):
        if not isinstance(other, OhmicSpectralDensity):
            return(NotImplemented)
        return((self.eta, self.s, self.omega_c)
               == (other.eta, other.s, other.omega_c))

    def __hash__(self):
        return(hash((self.eta, self.s, self.omega_c)))

    # eta attribute
    @property
    def eta(self):
        return(self._eta)

    @eta.setter
    def eta(self, eta):
        eta = float(eta)
        if not eta >= 0.0:
            raise ParameterDomainError('eta', eta, 'expected eta >= 0')
        self._eta = eta

    # s attribute
    @property
    def s(self):
        return(self._s)

    @s.setter
    def s(self, s):
        s = float(s)
        if not s > 0.0:
            raise ParameterDomainError('s', s, 'expected s > 0')
        self._s = s

    # omega_c attribute
    @property
    def omega_c(self):
        return(self._omega_c)

    @omega_c.setter
    def omega_c(self, omega_c):
        omega_c = float(omega_c)
        if not omega_c > 0.0:
            raise ParameterDomainError('omega_c', omega_c,
                                       'expected omega_c > 0')
        self._omega_c = omega_c

    @property
    def omega0(self):
        return(OMEGA0)

    @property
    def kernel_amplitude(self):
        '''A = eta wc^(1-s) Gamma(s+1), so that f(t) = A (1/wc + i t)^-(s+1)'''
        return(self._eta * self._omega_c ** (1.0 - self._s)
               * special.gamma(self._s + 1.0))

    def with_eta(self, eta):
        '''Copy of this environment with another coupling'''
        return(OhmicSpectralDensity(eta, self._s, self._omega_c))


@dataclass(frozen=True)
class BoundState:
    '''Isolated eigenstate below the band: energy E_b < 0, pole residue Z'''
    energy: float
    residue: float

    def __post_init__(self):
        if not self.energy < 0.0:
            raise ParameterDomainError('energy', self.energy,
                                       'a bound state lies below the band')
        if not 0.0 < self.residue <= 1.0:
            raise ParameterDomainError('residue', self.residue,
                                       'expected 0 < Z <= 1')


@dataclass(frozen=True)
class MarkovRates:
    '''Born-Markov decay rate kappa = pi J(omega0) and Lamb shift delta'''
    kappa: float
    delta: float


@dataclass(frozen=True)
class SpectrumRow:
    '''One coupling value of a spectrum scan'''
    eta: float
    bound_state: BoundState = None

    @property
    def band(self):
        return((0.0, np.inf))


def j_omega(env, omega):
    '''Spectral density J(omega) = eta omega^s wc^(1-s) exp(-omega/wc)

    Args:
    -----
    env: OhmicSpectralDensity

    omega: float or numpy.ndarray
        Frequency (>= 0)

    Return:
    -------
    J: float or numpy.ndarray

    Raise:
    ------
    ParameterDomainError: negative frequency
    '''
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr < 0.0):
        raise ParameterDomainError('omega', omega, 'expected omega >= 0')
    value = env.eta * omega_arr ** env.s * env.omega_c ** (1.0 - env.s) \
        * np.exp(-omega_arr / env.omega_c)
    return(float(value) if np.ndim(value) == 0 else value)


def kernel_f(env, t):
    '''Bath correlation function f(t) in closed form (principal branch)

    Return:
    -------
    f: complex or numpy.ndarray of complex

    Raise:
    ------
    ParameterDomainError: negative time
    '''
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ParameterDomainError('t', t, 'expected t >= 0')
    base = 1.0 / env.omega_c + 1j * t_arr
    value = env.kernel_amplitude * base ** (-(env.s + 1.0))
    return(complex(value) if np.ndim(value) == 0 else value)


def kernel_primitive(env, t):
    '''F(t) = int_0^t f(u) du = (iA/s) [(1/wc + i t)^-s - wc^s]'''
    t_arr = np.asarray(t, dtype=float)
    a = 1.0 / env.omega_c
    s = env.s
    return(1j * env.kernel_amplitude / s
           * ((a + 1j * t_arr) ** (-s) - a ** (-s)))


def kernel_moments(env, n, dt):
    '''Exact moments of f over the cells [u_k, u_k+1], u_k = k dt

        M0_k = int f(u) du,   M1_k = int f(u) (u - u_k) du,   k = 0..n-1

    The constant parts of the kernel primitives cancel analytically, so
    the moments keep full relative precision at long lags.

    Return:
    -------
    M0, M1: numpy.ndarray of n complex values
    '''
    a = 1.0 / env.omega_c
    s = env.s
    scale = 1j * env.kernel_amplitude / s
    base = a + 1j * np.arange(n + 1) * dt
    g = base ** (-s)
    if abs(s - 1.0) < 1e-8:
        # antiderivative of (a + i u)^-1 is -i log(a + i u)
        step = -1j * np.log(base[1:] / base[:-1])
    else:
        step = (base[1:] ** (1.0 - s) - base[:-1] ** (1.0 - s)) \
            / (1j * (1.0 - s))
    moment0 = scale * (g[1:] - g[:-1])
    moment1 = -scale * (step - dt * g[1:])
    return(moment0, moment1)


def eta_critical(s, omega_c):
    '''Coupling threshold for bound-state formation, omega0 / (wc Gamma(s))'''
    if not s > 0.0:
        raise ParameterDomainError('s', s, 'expected s > 0')
    if not omega_c > 0.0:
        raise ParameterDomainError('omega_c', omega_c, 'expected omega_c > 0')
    return(OMEGA0 / (omega_c * special.gamma(s)))


def self_energy_Y(env, E, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    '''Y(E) = omega0 - int_0^inf J(w) / (w - E) dw for E < 0

    The integral is evaluated on x = w / wc, split at x = -E / wc.
    Y is strictly decreasing on (-inf, 0).

    Raise:
    ------
    ParameterDomainError: E >= 0 (band region)
    NumericalFailureError: quadrature did not converge
    '''
    E = float(E)
    if not E < 0.0:
        raise ParameterDomainError('E', E, 'Y(E) is only defined below the'
                                   ' band, E < 0')
    x0 = -E / env.omega_c
    s = env.s

    def integrand(x):
        return(x ** s * np.exp(-x) / (x + x0))

    integral = _split_quad(integrand, x0, epsabs, epsrel, 'Y(E)')
    return(OMEGA0 - env.eta * env.omega_c * integral)


def self_energy_Y_at_band_edge(env):
    '''Y(0) = omega0 - eta wc Gamma(s), the limit E -> 0-'''
    return(OMEGA0 - env.eta * env.omega_c * special.gamma(env.s))


def self_energy_Y_ohmic(env, E):
    '''Closed form of Y(E) for s = 1 through the exponential integral

    Y(E) = omega0 - eta [wc - u exp(u/wc) E1(u/wc)], u = -E. Used as an
    independent check of the quadrature route.
    '''
    if abs(env.s - 1.0) > 1e-12:
        raise ParameterDomainError('s', env.s, 'closed form needs s = 1')
    if not E < 0.0:
        raise ParameterDomainError('E', E, 'expected E < 0')
    u = -E
    x = u / env.omega_c
    return(OMEGA0 - env.eta * (env.omega_c - u * np.exp(x) * special.exp1(x)))


def find_bound_state(env, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    '''Locate the bound state of a qubit in the environment env

    The root of Y(E) = E is bracketed on [-eta wc Gamma(s), 0) and refined by
    bisection; the residue is Z = [1 + int_0^inf J(w)/(E_b - w)^2 dw]^-1.

    Args:
    -----
    env: OhmicSpectralDensity

    epsabs, epsrel (optional): float
        Quadrature tolerances

    Return:
    -------
    bound: BoundState or None
        None if and only if Y(0) >= 0 (eta <= eta_c)

    Raise:
    ------
    NumericalFailureError: quadrature or root refinement failed
    '''
    y_edge = self_energy_Y_at_band_edge(env)
    if y_edge >= 0.0:
        logger.debug('%r: Y(0) = %.6g >= 0, no bound state', env, y_edge)
        return(None)

    def gap(E):
        if E >= 0.0:
            return(y_edge - E)
        return(self_energy_Y(env, E, epsabs, epsrel) - E)

    lower = y_edge - OMEGA0
    logger.debug('%r: bisection on [%.6g, 0)', env, lower)
    energy = optimize.bisect(gap, lower, 0.0, xtol=1e-15,
                             rtol=4 * np.finfo(float).eps, maxiter=500)
    residual = abs(gap(energy))
    if residual > ROOT_FAILURE or not energy < 0.0:
        raise NumericalFailureError('bound-state root not refined',
                                    {'energy': energy, 'residual': residual})
    if residual > ROOT_RESIDUAL:
        logger.warning('%r: bound-state residual %.3e above %.0e', env,
                       residual, ROOT_RESIDUAL)
    return(BoundState(energy, bound_state_residue(env, energy, epsabs,
                                                  epsrel)))


def bound_state_residue(env, energy, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    '''Z = [1 + int_0^inf J(w) / (E - w)^2 dw]^-1 for E < 0'''
    x0 = -energy / env.omega_c
    s = env.s

    def integrand(x):
        return(x ** s * np.exp(-x) / (x + x0) ** 2)

    integral = env.eta * _split_quad(integrand, x0, epsabs, epsrel, 'Z')
    return(1.0 / (1.0 + integral))


def bound_state_residue_ohmic(env, energy):
    '''Closed form of Z for s = 1

    1/Z = 1 + eta [(1 + x) exp(x) E1(x) - 1], x = -E/wc. E1 diverges
    logarithmically as E -> 0-, so Z -> 0 at the threshold, but slowly:
    over couplings just above eta_c the residue first grows with eta.
    '''
    if abs(env.s - 1.0) > 1e-12:
        raise ParameterDomainError('s', env.s, 'closed form needs s = 1')
    if not energy < 0.0:
        raise ParameterDomainError('energy', energy, 'expected E < 0')
    x = -energy / env.omega_c
    integral = env.eta * ((1.0 + x) * np.exp(x) * special.exp1(x) - 1.0)
    return(1.0 / (1.0 + integral))


def markov_rates(env, epsabs=1e-12, epsrel=1e-10):
    '''Born-Markov rates: kappa = pi J(omega0), delta = P int J/(omega0 - w)

    The principal value is taken with QUADPACK's Cauchy weight on
    [0, 2 omega0]; the tail [2 omega0, inf) is regular.

    Raise:
    ------
    NumericalFailureError: quadrature did not converge
    '''
    kappa = np.pi * j_omega(env, OMEGA0)
    if env.eta == 0.0:
        return(MarkovRates(kappa, 0.0))

    def density(w):
        return(j_omega(env, w))

    # quad's Cauchy weight integrates density(w) / (w - wvar)
    near = _checked_quad(density, 0.0, 2 * OMEGA0, epsabs, epsrel,
                         'Lamb shift (principal value)',
                         weight='cauchy', wvar=OMEGA0)
    tail = _checked_quad(lambda w: density(w) / (w - OMEGA0), 2 * OMEGA0,
                         np.inf, epsabs, epsrel, 'Lamb shift (tail)')
    return(MarkovRates(kappa, -(near + tail)))


def lamb_shift_ohmic(env):
    '''Closed form Lamb shift for s = 1: -eta wc + eta e^(-1/wc) Ei(1/wc)'''
    if abs(env.s - 1.0) > 1e-12:
        raise ParameterDomainError('s', env.s, 'closed form needs s = 1')
    x = OMEGA0 / env.omega_c
    return(-env.eta * env.omega_c
           + env.eta * OMEGA0 * np.exp(-x) * special.expi(x))


def spectrum_scan(s, omega_c, eta_grid):
    '''Bound-state branch of the single-excitation spectrum over couplings

    The continuum band always covers [0, inf); each row carries the bound
    state found at its coupling, if any.

    Args:
    -----
    s, omega_c: float
        Environment shape shared by every grid point

    eta_grid: iterable of float
        Couplings (>= 0)

    Return:
    -------
    rows: list of SpectrumRow
    '''
    rows = []
    for eta in eta_grid:
        env = OhmicSpectralDensity(eta, s, omega_c)
        rows.append(SpectrumRow(env.eta, find_bound_state(env)))
    return(rows)


def _split_quad(integrand, x0, epsabs, epsrel, what):
    if x0 > 0.0:
        head = _checked_quad(integrand, 0.0, x0, epsabs, epsrel, what)
    else:
        head = 0.0
    tail = _checked_quad(integrand, x0, np.inf, epsabs, epsrel, what)
    return(head + tail)


def _checked_quad(func, lo, hi, epsabs, epsrel, what, **kwargs):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', integrate.IntegrationWarning)
        value, error = integrate.quad(func, lo, hi, epsabs=epsabs,
                                      epsrel=epsrel, limit=QUAD_LIMIT,
                                      **kwargs)
    if not np.isfinite(value) or (caught and error > QUAD_FAILURE):
        raise NumericalFailureError(
            f'quadrature for {what} did not converge',
            {'interval': (lo, hi), 'value': value, 'error': error,
             'warning': str(caught[-1].message) if caught else None})
    if caught:
        logger.debug('quadrature for %s on [%s, %s]: %s (error %.2e)', what,
                     lo, hi, caught[-1].message, error)
    return(value)
