'''This module configures and runs scenarios and parameter sweeps.

A run goes through the pipeline

    spectral-env -> amplitude-dynamics -> dissipative-map
                 -> geometry and witnesses -> output files

and writes into its output directory:

    timeseries.csv            one row per (decimated) grid sample
    ellipsoid_<party>_<t>.csv ellipsoid parameters and a surface point cloud
    manifest.txt              parameters, results, metrics, file list

    Typical usage examples:

    cfg = preset_config('fig1', out_dir='out/fig1')
    manifest = run_scenario(cfg)
    manifests, summary = sweep(cfg, 'theta', [np.pi / 12, np.pi / 8])

Envs:
-----
PYQSE_OUT_DIR: default output directory (pyqse-out)
PYQSE_WORKERS: default number of concurrent sweep points (1)
'''
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
import copy
import csv
import functools
import logging
import os
import re

import numpy as np

from pyqse.amplitude import (solve_volterra, rates_from_amplitude,
                             window_mean_modulus)
from pyqse.dissipation import (evolve_series, family_qse,
                               integrate_master_equation, steady_state_qse,
                               state_at)
from pyqse.environment import (OhmicSpectralDensity, find_bound_state,
                               markov_rates, spectrum_scan)
from pyqse.errors import (ConfigError, NumericalFailureError,
                          ParameterDomainError, PyqseError)
from pyqse.geometry import (containment_excess, min_pt_eigenvalues,
                            surface_points)
from pyqse.manifest import MANIFEST_NAME, RunManifest, utc_now
from pyqse.state import (InitialFamilyParams, PARTIES, pauli_decompose,
                         validate)
from pyqse.witness import (AsymptoticWitnessParams, asymptotic_witnesses,
                           classify_steering, dominant_frequency,
                           witness_series)


logger = logging.getLogger(__name__)

DEFAULT_OUT_DIR = 'pyqse-out'
SWEEP_PARAMETERS = ('eta_A', 'eta_B', 'eta', 'p', 'theta')
ORACLE_WINDOW = 50.0
LATE_FRACTION = 0.6

TIMESERIES_COLUMNS = ('t', 'abs_cA', 'abs_cB',
                      'cA_x', 'cA_y', 'cA_z', 'lA_1', 'lA_2', 'lA_3',
                      'cB_x', 'cB_y', 'cB_z', 'lB_1', 'lB_2', 'lB_3',
                      'concurrence', 'dS_AB', 'dS_BA', 'ppt_min_eig')
ELLIPSOID_COLUMNS = ('center_x', 'center_y', 'center_z',
                     'l_1', 'l_2', 'l_3',
                     'axis1_x', 'axis1_y', 'axis1_z',
                     'axis2_x', 'axis2_y', 'axis2_z',
                     'axis3_x', 'axis3_y', 'axis3_z', 'degenerate')
SPECTRUM_COLUMNS = ('eta', 'bound_energy', 'residue_Z')
SUMMARY_COLUMNS = ('parameter', 'value', 'status', 'failed_stage',
                   'bound_energy_A', 'bound_energy_B', 'final_concurrence',
                   'final_lA_1', 'final_lB_1', 'late_steering',
                   'degenerate_witness_samples', 'out_dir')

_COMMON = {'s': 1.0, 'omega_c': 20.0}
PRESETS = {
    'fig1': dict(_COMMON, eta_A=0.06, eta_B=0.06, p=0.9, theta=np.pi / 8),
    'fig2a': dict(_COMMON, eta_A=0.06, eta_B=0.06, p=0.9, theta=np.pi / 8),
    'fig2b': dict(_COMMON, eta_A=0.06, eta_B=0.06, p=0.9, theta=np.pi / 12),
    'fig3a': dict(_COMMON, eta_A=0.06, eta_B=0.03, p=0.8, theta=np.pi / 3),
    'fig3b': dict(_COMMON, eta_A=0.03, eta_B=0.06, p=0.8, theta=np.pi / 3),
    'fig4': dict(_COMMON, eta_A=0.03, eta_B=0.03, p=0.8, theta=np.pi / 3),
}

_NUMBER = r'[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?'
_PI_EXPRESSION = re.compile(
    rf'^(?P<sign>-)?(?:(?P<factor>{_NUMBER})\s*\*?\s*)?pi'
    rf'(?:\s*/\s*(?P<divisor>{_NUMBER}))?$')


def parse_number(text):
    '''Read a decimal or a multiple of pi such as pi/8 or 3*pi/8

    Raise:
    ------
    ValueError: text is neither
    '''
    text = text.strip()
    match = _PI_EXPRESSION.match(text)
    if match is None:
        return(float(text))
    value = np.pi * float(match['factor'] or 1.0) \
        / float(match['divisor'] or 1.0)
    return(-value if match['sign'] else value)


def parse_grid(text):
    '''Inclusive grid from 'start:stop:step' (or a comma separated list)'''
    if ':' not in text:
        return([parse_number(v) for v in text.split(',') if v.strip()])
    try:
        start, stop, step = (parse_number(v) for v in text.split(':'))
    except ValueError as err:
        raise ConfigError(f'grid {text!r} is not start:stop:step') from err
    if not step > 0.0 or stop < start:
        raise ConfigError(f'grid {text!r} needs step > 0 and stop >= start')
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return([round(start + k * step, 12) for k in range(count)])


class RunConfig():
    '''
    The RunConfig class holds every setting of a run

    Values are validated as they are set; a value outside its physical
    domain raises a ParameterDomainError naming the field.

    Envs:
    -----
    PYQSE_OUT_DIR: default for out_dir
    PYQSE_WORKERS: default for workers

    Args:
    -----
    name (optional): str
        Run name, used for the manifest

    s, omega_c, eta_A, eta_B (optional): float
        Environments of Alice's and Bob's qubits (common shape)

    p, theta (optional): float
        Initial-state parameters

    dt, t_max (optional): float
        Time grid, dt <= t_max

    snapshot_times (optional): list of float
        Times of the ellipsoid exports, [0, t_max] by default

    povm_samples, seed (optional): int
        Containment diagnostic size and seed

    stride (optional): int
        Time-series decimation

    cloud_points (optional): int
        Points per ellipsoid surface cloud (0 disables the cloud)

    workers (optional): int
        Concurrent sweep points

    out_dir (optional): str
        Output directory

    Return:
    -------
    RunConfig: an instance of this class

    Raise:
    ------
    ParameterDomainError
    ConfigError: an environment variable cannot be read
    '''
    FIELDS = ('name', 's', 'omega_c', 'eta_A', 'eta_B', 'p', 'theta', 'dt',
              't_max', 'snapshot_times', 'povm_samples', 'seed', 'stride',
              'cloud_points', 'workers', 'out_dir')

    def __init__(self, name='custom', s=1.0, omega_c=20.0, eta_A=0.06,
                 eta_B=0.06, p=0.9, theta=np.pi / 8, dt=1e-2, t_max=500.0,
                 snapshot_times=None, povm_samples=10000, seed=42, stride=10,
                 cloud_points=2048, workers=None, out_dir=None):
        self.name = name
        self.environment_a = OhmicSpectralDensity(eta_A, s, omega_c)
        self.environment_b = OhmicSpectralDensity(eta_B, s, omega_c)
        self.initial = InitialFamilyParams(p, theta)
        self._dt = self._t_max = None
        self.dt = dt
        self.t_max = t_max
        self.snapshot_times = snapshot_times
        self.povm_samples = povm_samples
        self.seed = seed
        self.stride = stride
        self.cloud_points = cloud_points
        self.workers = _env_int('PYQSE_WORKERS', 1) if workers is None \
            else workers
        self.out_dir = os.environ.get('PYQSE_OUT_DIR', DEFAULT_OUT_DIR) \
            if out_dir is None else out_dir

    def __repr__(self):
        return(f'RunConfig(name=\'{self.name}\', eta_A={self.eta_A},'
               f' eta_B={self.eta_B}, p={self.p}, theta={self.theta},'
               f' dt={self.dt}, t_max={self.t_max})')

    def as_dict(self):
        return({k: getattr(self, k) for k in self.FIELDS})

    # environment parameters, shared shape
    @property
    def s(self):
        return(self.environment_a.s)

    @s.setter
    def s(self, s):
        self.environment_a.s = s
        self.environment_b.s = s

    @property
    def omega_c(self):
        return(self.environment_a.omega_c)

    @omega_c.setter
    def omega_c(self, omega_c):
        self.environment_a.omega_c = omega_c
        self.environment_b.omega_c = omega_c

    @property
    def eta_A(self):
        return(self.environment_a.eta)

    @eta_A.setter
    def eta_A(self, eta):
        self.environment_a.eta = eta

    @property
    def eta_B(self):
        return(self.environment_b.eta)

    @eta_B.setter
    def eta_B(self, eta):
        self.environment_b.eta = eta

    # initial-state parameters
    @property
    def p(self):
        return(self.initial.p)

    @p.setter
    def p(self, p):
        self.initial.p = p

    @property
    def theta(self):
        return(self.initial.theta)

    @theta.setter
    def theta(self, theta):
        self.initial.theta = theta

    # grid
    @property
    def dt(self):
        return(self._dt)

    @dt.setter
    def dt(self, dt):
        dt = float(dt)
        if not dt > 0.0:
            raise ParameterDomainError('dt', dt, 'expected dt > 0')
        if self._t_max is not None and dt > self._t_max:
            raise ParameterDomainError('dt', dt, 'expected dt <= t_max')
        self._dt = dt

    @property
    def t_max(self):
        return(self._t_max)

    @t_max.setter
    def t_max(self, t_max):
        t_max = float(t_max)
        if not t_max >= self._dt:
            raise ParameterDomainError('t_max', t_max, 'expected t_max >= dt')
        self._t_max = t_max

    @property
    def snapshot_times(self):
        if self._snapshot_times is None:
            return([0.0, self._t_max])
        return(list(self._snapshot_times))

    @snapshot_times.setter
    def snapshot_times(self, times):
        if times is None:
            self._snapshot_times = None
            return
        times = [float(t) for t in times]
        for t in times:
            if t < 0.0:
                raise ParameterDomainError('snapshot_times', t,
                                           'expected t >= 0')
        self._snapshot_times = times

    @property
    def povm_samples(self):
        return(self._povm_samples)

    @povm_samples.setter
    def povm_samples(self, n):
        self._povm_samples = _non_negative_int('povm_samples', n)

    @property
    def seed(self):
        return(self._seed)

    @seed.setter
    def seed(self, seed):
        self._seed = _non_negative_int('seed', seed)

    @property
    def stride(self):
        return(self._stride)

    @stride.setter
    def stride(self, stride):
        stride = _non_negative_int('stride', stride)
        if stride == 0:
            raise ParameterDomainError('stride', stride, 'expected >= 1')
        self._stride = stride

    @property
    def cloud_points(self):
        return(self._cloud_points)

    @cloud_points.setter
    def cloud_points(self, n):
        self._cloud_points = _non_negative_int('cloud_points', n)

    @property
    def workers(self):
        return(self._workers)

    @workers.setter
    def workers(self, workers):
        workers = _non_negative_int('workers', workers)
        if workers == 0:
            raise ParameterDomainError('workers', workers, 'expected >= 1')
        self._workers = workers

    def validate(self):
        '''Cross-field checks that single setters cannot make'''
        for t in self.snapshot_times:
            if t > self.t_max + 1e-9:
                raise ParameterDomainError('snapshot_times', t,
                                           'snapshot after t_max')
        return(self)


def preset_config(preset, /, **overrides):
    '''RunConfig of a named built-in scenario, with optional overrides

    The run name defaults to the preset name; a 'name' override replaces it.
    '''
    if preset not in PRESETS:
        raise ConfigError(f'unknown preset {preset!r}, expected one of'
                          f' {", ".join(sorted(PRESETS))}', field='preset')
    values = dict(PRESETS[preset], name=preset)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return(RunConfig(**values).validate())


def load_config(path):
    '''Read a flat key = value configuration file, or a preset name

    A 'preset = <name>' line loads the preset first; later keys override
    it. '#' starts a comment, blank lines are skipped, angles may be
    written as multiples of pi and snapshot_times as a comma separated list.

    Args:
    -----
    path: str
        File path, or the name of a built-in preset

    Return:
    -------
    cfg: RunConfig

    Raise:
    ------
    ConfigError: unreadable file, syntax error or unknown key, with the
        line number and field
    ParameterDomainError: a value outside its domain
    '''
    if path in PRESETS and not os.path.exists(path):
        return(preset_config(path))
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as err:
        raise ConfigError(f'cannot read configuration {path!r}: {err}'
                          ) from err

    preset, values = None, {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, text = (part.strip() for part in line.partition('='))
        if not sep or not key:
            raise ConfigError('expected key = value', line=number)
        if key == 'preset':
            preset = text
            continue
        if key not in RunConfig.FIELDS:
            raise ConfigError('unknown key', line=number, field=key)
        try:
            values[key] = _parse_field(key, text)
        except ValueError as err:
            raise ConfigError(f'cannot parse {text!r}', line=number,
                              field=key) from err

    values.setdefault('name', os.path.splitext(os.path.basename(path))[0])
    if preset is not None:
        return(preset_config(preset, **values))
    return(RunConfig(**values).validate())


def _parse_field(key, text):
    if key in ('name', 'out_dir'):
        return(text)
    if key == 'snapshot_times':
        return([parse_number(v) for v in text.split(',') if v.strip()])
    if key in ('povm_samples', 'seed', 'stride', 'cloud_points', 'workers'):
        return(int(text))
    return(parse_number(text))


def _non_negative_int(field, value):
    if isinstance(value, bool) or int(value) != value:
        raise ParameterDomainError(field, value, 'expected an integer')
    if int(value) < 0:
        raise ParameterDomainError(field, value, 'expected >= 0')
    return(int(value))


def _env_int(name, default):
    text = os.environ.get(name)
    if text is None:
        return(default)
    try:
        return(int(text))
    except ValueError as err:
        raise ConfigError(f'environment variable {name}={text!r} is not an'
                          ' integer', field=name) from err


def stage(name):
    '''Name the pipeline stage a ScenarioRun method implements

    A package error escaping the method is tagged with the stage name, so
    that run_scenario can record where a partial run stopped. Any other
    exception (a numpy or scipy failure) is wrapped in a
    NumericalFailureError tagged the same way.
    '''
    def decorator(func):
        @functools.wraps(func)
        def wrapper(self, *args, **kwargs):
            logger.debug('%s: entering stage %s', self.cfg.name, name)
            try:
                return(func(self, *args, **kwargs))
            except PyqseError as err:
                if getattr(err, 'stage', None) is None:
                    err.stage = name
                raise
            except Exception as err:
                logger.debug('%s: stage %s raised', self.cfg.name, name,
                             exc_info=True)
                wrapped = NumericalFailureError(
                    f'{type(err).__name__}: {err}', {'stage': name})
                wrapped.stage = name
                raise wrapped from err
        return wrapper
    return decorator


class ScenarioRun():
    '''
    The ScenarioRun class carries one run through the pipeline stages

    Args:
    -----
    cfg: RunConfig

    Return:
    -------
    ScenarioRun: an instance of this class
    '''
    def __init__(self, cfg):
        self.cfg = cfg
        self.manifest = RunManifest(cfg.name, started_at=utc_now())
        self.bound = {}
        self.trajectories = {}
        self.series = None
        self.witnesses = None
        self.geometry = {}

    def path(self, filename):
        return(os.path.join(self.cfg.out_dir, filename))

    @stage('spectral-env')
    def locate_bound_states(self):
        m = self.manifest
        for party, env in self._environments():
            bound = find_bound_state(env)
            rates = markov_rates(env)
            self.bound[party] = bound
            m[f'bound_state_{party}'] = bound is not None
            m[f'bound_energy_{party}'] = None if bound is None \
                else bound.energy
            m[f'residue_Z_{party}'] = None if bound is None else bound.residue
            m[f'markov_kappa_{party}'] = rates.kappa
            m[f'markov_delta_{party}'] = rates.delta

    @stage('amplitude-dynamics')
    def solve_amplitudes(self):
        cfg = self.cfg
        envs = dict(self._environments())
        if envs['A'] == envs['B']:
            traj = solve_volterra(envs['A'], cfg.t_max, cfg.dt)
            self.trajectories = {'A': traj, 'B': traj}
        else:
            with ThreadPoolExecutor(max_workers=2) as pool:
                futures = {party: pool.submit(solve_volterra, env, cfg.t_max,
                                              cfg.dt)
                           for party, env in envs.items()}
                self.trajectories = {party: future.result()
                                     for party, future in futures.items()}
        t0 = LATE_FRACTION * cfg.t_max
        for party, traj in self.trajectories.items():
            m = self.manifest
            modulus = np.abs(traj.values)
            m[f'max_abs_c_{party}'] = float(np.max(modulus))
            m[f'final_abs_c_{party}'] = float(modulus[-1])
            late = window_mean_modulus(traj, t0, cfg.t_max)
            m[f'late_mean_abs_c_{party}'] = late
            bound = self.bound.get(party)
            if bound is not None:
                m[f'late_mean_vs_Z_{party}'] = abs(late - bound.residue) \
                    / bound.residue
            m[f'rates_unavailable_{party}'] = \
                len(rates_from_amplitude(traj).unavailable)

    @stage('dissipative-map')
    def build_states(self):
        cfg = self.cfg
        a, b = self.trajectories['A'], self.trajectories['B']
        self.series = evolve_series(cfg.p, cfg.theta, a, b)
        m = self.manifest
        eigenvalues = np.linalg.eigvalsh(
            (self.series.entries
             + np.conj(np.swapaxes(self.series.entries, -1, -2))) / 2)
        m['min_state_eigenvalue'] = float(np.min(eigenvalues))
        m['max_trace_defect'] = float(np.max(np.abs(
            np.trace(self.series.entries, axis1=-2, axis2=-1) - 1.0)))
        try:
            oracle = integrate_master_equation(
                cfg.p, cfg.theta, a, b, t_stop=min(ORACLE_WINDOW, cfg.t_max))
        except NumericalFailureError as err:
            logger.warning('%s: master-equation check halted: %s', cfg.name,
                           err)
            oracle = err.partial
        m['oracle_window'] = float(oracle.times[-1])
        m['oracle_max_deviation'] = float(np.max(np.abs(
            oracle.entries - self.series.entries[:len(oracle)])))

    @stage('witnesses')
    def evaluate_witnesses(self):
        cfg = self.cfg
        self.witnesses = witness_series(self.series)
        w = self.witnesses
        m = self.manifest
        m['final_concurrence'] = float(w.concurrence[-1])
        m['final_dS_AB'] = float(w.dS_AB[-1])
        m['final_dS_BA'] = float(w.dS_BA[-1])
        final = state_at(self.series, cfg.t_max)
        m['final_ppt_min_eig'] = float(
            min_pt_eigenvalues(final.entries))
        m['final_state_valid'] = validate(final).is_valid

        window = (LATE_FRACTION * cfg.t_max, cfg.t_max)
        mask = w.window(*window)
        m['late_window'] = window
        m['late_steering'] = classify_steering(w, window)
        m['steering_without_entanglement'] = int(np.sum(
            ((w.dS_AB > 1e-8) | (w.dS_BA > 1e-8)) & (w.concurrence <= 0.0)))
        m['degenerate_witness_samples_AB'] = int(np.sum(w.degenerate_AB))
        m['degenerate_witness_samples_BA'] = int(np.sum(w.degenerate_BA))
        if np.any(w.degenerate_AB) or np.any(w.degenerate_BA):
            logger.warning('%s: zero variance witness settings at %d+%d'
                           ' samples', cfg.name,
                           m['degenerate_witness_samples_AB'],
                           m['degenerate_witness_samples_BA'])

        params = AsymptoticWitnessParams.from_bound_states(
            cfg.p, cfg.theta, self.bound['A'], self.bound['B'])
        analytic_ab, analytic_ba = asymptotic_witnesses(params, w.times[mask])
        m['asymptotic_witness_deviation'] = float(max(
            np.max(np.abs(w.dS_AB[mask] - analytic_ab)),
            np.max(np.abs(w.dS_BA[mask] - analytic_ba))))
        if self.bound['A'] is not None and self.bound['B'] is not None:
            expected = abs(2 * (params.ebA + params.ebB)) / (2 * np.pi)
            m['expected_witness_frequency'] = expected
            m['dominant_witness_frequency'] = dominant_frequency(
                w.times[mask], w.dS_AB[mask])

    @stage('geometry')
    def evaluate_geometry(self):
        cfg = self.cfg
        index = strided_index(len(self.series), cfg.stride)
        abs_a = np.abs(self.trajectories['A'].values)
        abs_b = np.abs(self.trajectories['B'].values)
        for party in PARTIES:
            self.geometry[party] = [
                family_qse(party, cfg.p, cfg.theta, min(abs_a[k], 1.0),
                           min(abs_b[k], 1.0)) for k in index]
        self.geometry['index'] = index
        self.geometry['ppt_min_eig'] = min_pt_eigenvalues(
            self.series.entries[index])
        m = self.manifest
        z = {party: 0.0 if self.bound[party] is None
             else self.bound[party].residue for party in PARTIES}
        for party in PARTIES:
            steady = steady_state_qse(party, cfg.p, cfg.theta, z['A'],
                                      z['B'])
            final = self.geometry[party][-1]
            m[f'steady_center_{party}'] = steady.center
            m[f'steady_semiaxes_{party}'] = steady.semiaxes
            m[f'final_semiaxes_{party}'] = final.semiaxes
            m[f'final_center_{party}'] = final.center

    @stage('output')
    def write_outputs(self):
        cfg = self.cfg
        os.makedirs(cfg.out_dir, exist_ok=True)
        self._write_timeseries()
        for t in cfg.snapshot_times:
            self._write_snapshot(t)

    def _write_timeseries(self):
        index = self.geometry['index']
        w = self.witnesses
        abs_a = np.abs(self.trajectories['A'].values)
        abs_b = np.abs(self.trajectories['B'].values)
        with open(self.path('timeseries.csv'), 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(TIMESERIES_COLUMNS)
            for row, k in enumerate(index):
                e_a = self.geometry['A'][row]
                e_b = self.geometry['B'][row]
                values = [self.series.times[k], abs_a[k], abs_b[k],
                          *e_a.center, *e_a.semiaxes,
                          *e_b.center, *e_b.semiaxes,
                          w.concurrence[k], w.dS_AB[k], w.dS_BA[k],
                          self.geometry['ppt_min_eig'][row]]
                writer.writerow([_cell(v) for v in values])
        self.manifest.add_file('timeseries.csv')

    def _write_snapshot(self, t):
        cfg = self.cfg
        k = self.trajectories['A'].index_of(t)
        t_k = float(self.series.times[k])
        ca = min(abs(self.trajectories['A'].values[k]), 1.0)
        cb = min(abs(self.trajectories['B'].values[k]), 1.0)
        pf = pauli_decompose(self.series[k])
        for party in PARTIES:
            ellipsoid = family_qse(party, cfg.p, cfg.theta, ca, cb)
            report = containment_excess(pf, party, cfg.povm_samples,
                                        cfg.seed)
            tag = f'{party}_{t_k:g}'
            self.manifest[f'containment_excess_{tag}'] = report.max_excess
            self.manifest[f'containment_collapsed_{tag}'] = \
                report.max_collapsed_offset
            filename = f'ellipsoid_{party}_{t_k:g}.csv'
            with open(self.path(filename), 'w', newline='') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(ELLIPSOID_COLUMNS)
                writer.writerow([_cell(v) for v in (
                    *ellipsoid.center, *ellipsoid.semiaxes,
                    *ellipsoid.axes.T.ravel(), ellipsoid.degenerate_flag)])
                writer.writerow(('x', 'y', 'z'))
                for point in surface_points(ellipsoid, cfg.cloud_points):
                    writer.writerow([_cell(v) for v in point])
            self.manifest.add_file(filename)

    def _environments(self):
        return((('A', self.cfg.environment_a), ('B', self.cfg.environment_b)))

    def run(self):
        cfg = self.cfg
        for key, value in cfg.as_dict().items():
            if key not in ('name', 'out_dir', 'workers'):
                self.manifest[key] = value
        logger.info('run %s: eta_A=%g eta_B=%g p=%g theta=%g', cfg.name,
                    cfg.eta_A, cfg.eta_B, cfg.p, cfg.theta)
        try:
            self.locate_bound_states()
            self.solve_amplitudes()
            self.build_states()
            self.evaluate_witnesses()
            self.evaluate_geometry()
            self.write_outputs()
        except PyqseError as err:
            failed = getattr(err, 'stage', None) or 'unknown'
            logger.error('run %s failed in stage %s: %s', cfg.name, failed,
                         err)
            self.manifest.record_failure(failed, err)
        os.makedirs(cfg.out_dir, exist_ok=True)
        self.manifest.finished_at = utc_now()
        self.manifest.write(self.path(MANIFEST_NAME))
        logger.info('run %s %s, %d files in %s', cfg.name,
                    'complete' if self.manifest.complete else 'partial',
                    len(self.manifest.files), cfg.out_dir)
        return(self.manifest)


def run_scenario(cfg):
    '''Run the whole pipeline for one configuration

    Args:
    -----
    cfg: RunConfig

    Return:
    -------
    manifest: RunManifest
        Written to <out_dir>/manifest.txt. A numerical failure does not
        raise: the manifest is then partial and names the failing stage.
    '''
    return(ScenarioRun(cfg.validate()).run())


def _run_point(cfg):
    try:
        return(run_scenario(cfg))
    except Exception as err:
        # a point that fails outside the stages still gets a manifest
        logger.error('sweep point %s failed: %s', cfg.name, err,
                     exc_info=not isinstance(err, PyqseError))
        manifest = RunManifest(cfg.name, started_at=utc_now())
        manifest.record_failure(getattr(err, 'stage', None) or 'setup', err)
        manifest.finished_at = utc_now()
        return(manifest)


def sweep(cfg, parameter, grid, workers=None):
    '''Independent runs over a grid of one parameter

    Every point writes into <out_dir>/<parameter>_<k>/; a summary row per
    point goes to <out_dir>/summary.csv. Failures are recorded per point and
    never abort the sweep.

    Args:
    -----
    cfg: RunConfig
        Template configuration

    parameter: str
        One of eta_A, eta_B, eta (both couplings), p, theta

    grid: iterable of float

    workers (optional): int
        Concurrent points, cfg.workers by default

    Return:
    -------
    manifests: list of RunManifest (None for a point whose value was
        rejected)
    summary: str
        Path of summary.csv
    '''
    if parameter not in SWEEP_PARAMETERS:
        raise ParameterDomainError('parameter', parameter,
                                   f'expected one of {SWEEP_PARAMETERS}')
    workers = cfg.workers if workers is None else workers
    grid = list(grid)
    points = []
    for k, value in enumerate(grid):
        point = copy.deepcopy(cfg)
        point.name = f'{cfg.name}_{parameter}_{k}'
        point.out_dir = os.path.join(cfg.out_dir, f'{parameter}_{k}')
        try:
            for field in (('eta_A', 'eta_B') if parameter == 'eta'
                          else (parameter,)):
                setattr(point, field, value)
        except ParameterDomainError as err:
            logger.error('sweep point %s=%r rejected: %s', parameter, value,
                         err)
            point = None
        points.append(point)

    logger.info('sweep over %s: %d points, %d workers', parameter, len(grid),
                workers)
    runnable = [p for p in points if p is not None]
    if workers > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = iter(list(pool.map(_run_point, runnable)))
    else:
        results = iter([_run_point(p) for p in runnable])
    manifests = [None if p is None else next(results) for p in points]

    os.makedirs(cfg.out_dir, exist_ok=True)
    summary = os.path.join(cfg.out_dir, 'summary.csv')
    with open(summary, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SUMMARY_COLUMNS)
        for value, manifest, point in zip(grid, manifests, points):
            writer.writerow(_summary_row(parameter, value, manifest, point))
    return(manifests, summary)


def _summary_row(parameter, value, manifest, point):
    if manifest is None:
        return([parameter, _cell(value), 'invalid']
               + [''] * (len(SUMMARY_COLUMNS) - 3))

    def get(key):
        return(manifest[key] if key in manifest else None)

    def first(key):
        values = get(key)
        return(None if values is None else values[0])

    return([parameter, _cell(value),
            'complete' if manifest.complete else 'partial',
            manifest.failed_stage or '',
            _cell(get('bound_energy_A')), _cell(get('bound_energy_B')),
            _cell(get('final_concurrence')),
            _cell(first('final_semiaxes_A')),
            _cell(first('final_semiaxes_B')),
            get('late_steering') or '',
            _degenerate_count(manifest), point.out_dir])


def _degenerate_count(manifest):
    counts = [manifest[key] for key in ('degenerate_witness_samples_AB',
                                        'degenerate_witness_samples_BA')
              if key in manifest]
    return(sum(counts) if counts else '')


def write_spectrum(s, omega_c, eta_grid, out_dir):
    '''Write spectrum.csv (eta, bound_energy, residue_Z) for a coupling grid

    Return:
    -------
    path: str
    '''
    rows = spectrum_scan(s, omega_c, eta_grid)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, 'spectrum.csv')
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SPECTRUM_COLUMNS)
        for row in rows:
            bound = row.bound_state
            writer.writerow([_cell(row.eta),
                             _cell(None if bound is None else bound.energy),
                             _cell(None if bound is None else bound.residue)])
    logger.info('spectrum of %d couplings written to %s', len(rows), path)
    return(path)


def _cell(value):
    if value is None:
        return('')
    if isinstance(value, (bool, np.bool_)):
        return('1' if value else '0')
    if isinstance(value, (float, np.floating)):
        return(repr(float(value)))
    return(str(value))


def strided_index(n, stride):
    '''Every stride-th sample index of n, the last one always included'''
    index = np.arange(0, n, max(int(stride), 1))
    if index[-1] != n - 1:
        index = np.append(index, n - 1)
    return(index)
