'''Exceptions raised by the pyqse package.

All package exceptions derive from PyqseError and from the builtin exception
that best describes them, so callers may catch either.
'''


class PyqseError(Exception):
    '''Base class of every pyqse exception'''


class ParameterDomainError(PyqseError, ValueError):
    '''A parameter lies outside its physical domain

    Args:
    -----
    field: str
        Name of the offending parameter

    value: any
        The rejected value

    reason (optional): str
        Human readable statement of the admissible domain
    '''
    def __init__(self, field, value, reason=None):
        self.field = field
        self.value = value
        message = f'{field}={value!r} is out of domain'
        if reason is not None:
            message += f': {reason}'
        super().__init__(message)


class NumericalFailureError(PyqseError, RuntimeError):
    '''A quadrature, root search or time integration did not succeed

    Args:
    -----
    message: str
        What failed

    diagnostics (optional): dict
        Whatever helps to locate the failure (step index, error estimate,
        last valid time, ...)
    '''
    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            details = ', '.join(f'{k}={v!r}'
                                for k, v in self.diagnostics.items())
            message = f'{message} ({details})'
        super().__init__(message)


class SingularMeasurementError(PyqseError, ZeroDivisionError):
    '''The steering denominator 1 + a.e vanishes for the requested POVM'''


class ConfigError(PyqseError, ValueError):
    '''A run configuration file could not be parsed

    Args:
    -----
    message: str
        What went wrong

    line (optional): int
        1-based line number in the configuration file

    field (optional): str
        Configuration key involved
    '''
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f'line {line}')
        if field is not None:
            where.append(f'field \'{field}\'')
        if where:
            message = f'{message} [{", ".join(where)}]'
        super().__init__(message)
