'''This module defines the run manifest written next to every run's outputs.

A manifest is a flat list of key = value lines: schema version, run
parameters, bound-state results, convergence metrics, the failing stage of
an incomplete run and the list of files written. Start and finish times are
aware ISO 8601 strings; they are the only fields that differ between two
runs of the same configuration.

    Typical usage examples:

    manifest = RunManifest(name='fig1', started_at=datetime.now())
    manifest['eta_A'] = 0.06
    manifest.add_file('timeseries.csv')
    manifest.write('out/fig1/manifest.txt')
'''
from datetime import datetime
import logging
import os

import numpy as np
import pytz
from tzlocal import get_localzone


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MANIFEST_NAME = 'manifest.txt'


def is_dt_aware(dt):
    '''Evaluates if a datetime object is aware

    A datetime object dt is aware if:
        dt.tzinfo is not None
        dt.tzinfo.utcoffset(dt) does not return None

    Args:
    -----
    dt: datetime
        the datetime object for which to test awareness

    Return:
    -------
    False: The datetime object is not aware
    True : The datetime object is aware
    '''
    if dt.tzinfo is not None:
        if dt.tzinfo.utcoffset(dt) is not None:
            return(True)
    return(False)


def as_isoformat(dt):
    '''Transforms a datetime object into a string

    Aware datetime objects are written as they are. Naive ones are first
    localised to the zone of the machine running the simulation.

        datetime.datetime(2021, 7, 21, 13, 23, 54, 78099,
                          tzinfo=datetime.timezone.utc)

    becomes '2021-07-21T13:23:54.078099+00:00'.

    Args:
    -----
    dt: datetime

    Return:
    -------
    str_dt: str
    '''
    if is_dt_aware(dt):
        return(dt.isoformat())
    local_tz = get_localzone()
    if hasattr(local_tz, 'localize'):
        local_dt = local_tz.localize(dt)
    else:
        local_dt = dt.replace(tzinfo=local_tz)
    return(local_dt.isoformat())


def utc_now():
    return(datetime.now(pytz.utc))


def format_value(value):
    '''Text form of a manifest value

    Floats use repr so they read back exactly; None is written empty;
    sequences are comma separated.
    '''
    if value is None:
        return('')
    if isinstance(value, (bool, np.bool_)):
        return('true' if value else 'false')
    if isinstance(value, (float, np.floating)):
        return(repr(float(value)))
    if isinstance(value, (int, np.integer)):
        return(str(int(value)))
    if isinstance(value, (list, tuple, np.ndarray)):
        return(', '.join(format_value(v) for v in value))
    return(str(value))


class RunManifest():
    '''
    The RunManifest class records what a run did and produced

    Args:
    -----
    name: str
        Run name (preset name or configuration file stem)

    started_at (optional): str, datetime object
        When a datetime object is used and is naive, the system local
        timezone is used to make it aware; it is then stored as a string

    Return:
    -------
    RunManifest: an instance of this class

    Raise:
    ------
    TypeError
    '''
    def __init__(self, name, started_at=None):
        self._name = name
        self._entries = {}
        self._files = []
        self._started_at = self.started_at = started_at
        self._finished_at = None
        self._failed_stage = None

    def __repr__(self):
        return(f'RunManifest(name=\'{self._name}\','
               f' entries={len(self._entries)}, files={len(self._files)})')

    def __setitem__(self, key, value):
        self._entries[key] = value

    def __getitem__(self, key):
        return(self._entries[key])

    def __contains__(self, key):
        return(key in self._entries)

    @property
    def name(self):
        return(self._name)

    @property
    def entries(self):
        return(dict(self._entries))

    @property
    def files(self):
        return(list(self._files))

    # started_at attribute
    @property
    def started_at(self):
        return(self._started_at)

    @started_at.setter
    def started_at(self, started_at):
        self._started_at = _timestamp(started_at, 'started_at')

    # finished_at attribute
    @property
    def finished_at(self):
        return(self._finished_at)

    @finished_at.setter
    def finished_at(self, finished_at):
        self._finished_at = _timestamp(finished_at, 'finished_at')

    # failed_stage attribute
    @property
    def failed_stage(self):
        return(self._failed_stage)

    @property
    def complete(self):
        return(self._failed_stage is None)

    def record_failure(self, stage, error):
        '''Mark the run as partially complete, failing at stage'''
        self._failed_stage = stage
        self._entries['error'] = f'{type(error).__name__}: {error}'

    def add_file(self, path):
        if path not in self._files:
            self._files.append(path)

    def to_text(self):
        '''key = value lines, header fields first and files last'''
        lines = [f'schema_version = {SCHEMA_VERSION}',
                 f'name = {self._name}',
                 f'started_at = {format_value(self._started_at)}',
                 f'finished_at = {format_value(self._finished_at)}',
                 'status = ' + ('complete' if self.complete else 'partial'),
                 f'failed_stage = {format_value(self._failed_stage)}']
        for key, value in self._entries.items():
            lines.append(f'{key} = {format_value(value)}')
        lines.append(f'files = {format_value(self._files)}')
        return('\n'.join(lines) + '\n')

    def write(self, path):
        '''Write the manifest; it lists itself among the files'''
        self.add_file(os.path.basename(path))
        with open(path, 'w') as f:
            f.write(self.to_text())
        logger.debug('manifest written to %s', path)
        return(path)


def read_manifest(path):
    '''Parse a manifest file back into a dict of strings'''
    entries = {}
    with open(path) as f:
        for line in f:
            line = line.rstrip('\n')
            if not line:
                continue
            key, _, value = line.partition(' = ')
            entries[key] = value
    return(entries)


def _timestamp(value, field):
    if value is None:
        return(None)
    if isinstance(value, datetime):
        return(as_isoformat(value))
    if isinstance(value, str):
        return(value)
    raise TypeError(f'{field} is expecting to be of type datetime or str')
