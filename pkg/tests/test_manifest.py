from pyqse.errors import NumericalFailureError
from pyqse.manifest import (MANIFEST_NAME, SCHEMA_VERSION, RunManifest,
                            as_isoformat, format_value, is_dt_aware,
                            read_manifest, utc_now)
from datetime import datetime, timezone
import numpy as np
import pytest
from . conftests import ConfTests


conf = ConfTests()


# TEST for is_dt_aware()

# NAIVE datetime object
# is_dt_aware() shall return False
def test_is_aware_false():
    dt = datetime.now()
    assert is_dt_aware(dt) is False


# AWARE datetime object
# is_dt_aware() shall return True
def test_is_aware_true():
    dt = datetime.now(timezone.utc)
    assert is_dt_aware(dt) is True


def test_utc_now_aware():
    assert is_dt_aware(utc_now())


# TESTS for as_isoformat()

# NAIVE datetime object
# ### This works only on system with 'Europe/Paris' timezone ! ###
def test_as_isoformat_naive():
    dt = conf.NAIVE_DATETIME
    assert as_isoformat(dt) == conf.NAIVE_DATETIME_STR


# AWARE datetime object
def test_as_isoformat_aware():
    dt = conf.AWARE_DATETIME
    assert as_isoformat(dt) == conf.AWARE_DATETIME_STR


# TESTS for format_value()

@pytest.mark.parametrize('value, text', [
    (None, ''), (True, 'true'), (np.bool_(False), 'false'),
    (0.1, '0.1'), (np.float64(1 / 3), repr(1 / 3)), (np.int64(7), '7'),
    ([0.5, 2], '0.5, 2'), ('fig1', 'fig1')])
def test_format_value(value, text):
    assert format_value(value) == text


# TESTS for RunManifest class

# Create manifest with started_at as datetime object
def test_create_manifest_datetime_object():
    m = RunManifest('fig1', conf.AWARE_DATETIME)
    assert m.name == 'fig1' and m.started_at == conf.AWARE_DATETIME_STR \
        and m.finished_at is None


# Create manifest with started_at as str object
def test_create_manifest_datetime_str():
    m = RunManifest('fig1', conf.NAIVE_DATETIME_STR)
    assert m.started_at == conf.NAIVE_DATETIME_STR


# Update manifest with finished_at
def test_update_manifest_finished_at():
    m = RunManifest('fig1')
    m.finished_at = conf.AWARE_DATETIME
    assert m.started_at is None and m.finished_at == conf.AWARE_DATETIME_STR


# Create manifest with started_at being of other types than str and datetime
def test_create_manifest_datetime_incorrect_type():
    with pytest.raises(TypeError):
        RunManifest('fig1', 1234)


def test_update_manifest_datetime_incorrect_type():
    m = RunManifest('fig1')
    with pytest.raises(TypeError):
        m.finished_at = 12.5


def test_manifest_entries():
    m = RunManifest('fig1')
    m['eta_A'] = 0.06
    assert 'eta_A' in m and m['eta_A'] == 0.06
    assert m.entries == {'eta_A': 0.06}
    m.add_file('timeseries.csv')
    m.add_file('timeseries.csv')
    assert m.files == ['timeseries.csv']


def test_manifest_failure():
    m = RunManifest('fig1')
    assert m.complete
    m.record_failure('amplitude-dynamics',
                     NumericalFailureError('diverged', {'step': 3}))
    assert not m.complete and m.failed_stage == 'amplitude-dynamics'
    assert m['error'].startswith('NumericalFailureError: diverged')


def test_manifest_text_layout():
    m = RunManifest('fig1', conf.AWARE_DATETIME)
    m['p'] = 0.9
    m.add_file('timeseries.csv')
    lines = m.to_text().splitlines()
    assert lines[0] == f'schema_version = {SCHEMA_VERSION}'
    assert lines[1] == 'name = fig1'
    assert lines[4] == 'status = complete'
    assert lines[5] == 'failed_stage = '
    assert lines[6] == 'p = 0.9'
    assert lines[-1] == 'files = timeseries.csv'


def test_manifest_write_and_read(tmp_path):
    m = RunManifest('fig3a', conf.AWARE_DATETIME)
    m['bound_state_A'] = True
    m['E_b_A'] = -0.123456789012345
    m.add_file('timeseries.csv')
    path = m.write(str(tmp_path / MANIFEST_NAME))
    back = read_manifest(path)
    assert back['name'] == 'fig3a'
    assert back['started_at'] == conf.AWARE_DATETIME_STR
    assert back['bound_state_A'] == 'true'
    assert float(back['E_b_A']) == -0.123456789012345
    assert back['files'] == f'timeseries.csv, {MANIFEST_NAME}'
