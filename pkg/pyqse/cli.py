'''Command-line entry point: pyqse simulate | sweep | spectrum

Envs:
-----
PYQSE_LOG_LEVEL: default log level (INFO)
PYQSE_OUT_DIR: default output directory
PYQSE_WORKERS: default number of concurrent sweep points
'''
import argparse
import logging
import os
import sys

from pyqse.errors import PyqseError
from pyqse.runner import (PRESETS, SWEEP_PARAMETERS, load_config, parse_grid,
                          preset_config, run_scenario, sweep, write_spectrum)


logger = logging.getLogger(__name__)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='pyqse',
        description='Steering ellipsoids and witnesses of two qubits in'
                    ' Ohmic-family environments')
    parser.add_argument('--log-level',
                        default=os.environ.get('PYQSE_LOG_LEVEL', 'INFO'),
                        help='logging level (default: PYQSE_LOG_LEVEL or'
                             ' INFO)')
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help='run one scenario')
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', help='key = value configuration file')
    source.add_argument('--preset', choices=sorted(PRESETS))
    _add_run_options(simulate)

    sweep_ = commands.add_parser('sweep', help='runs over a parameter grid')
    source = sweep_.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', help='key = value configuration file')
    source.add_argument('--preset', choices=sorted(PRESETS))
    sweep_.add_argument('--param', required=True, choices=SWEEP_PARAMETERS)
    sweep_.add_argument('--grid', required=True,
                        help='start:stop:step (inclusive) or a comma list')
    sweep_.add_argument('--workers', type=int)
    _add_run_options(sweep_)

    spectrum = commands.add_parser('spectrum',
                                   help='bound-state energies over couplings')
    spectrum.add_argument('--s', type=float, default=1.0)
    spectrum.add_argument('--omegac', type=float, default=20.0)
    spectrum.add_argument('--eta-grid', required=True,
                          help='start:stop:step (inclusive) or a comma list')
    spectrum.add_argument('--out')
    return(parser)


def _add_run_options(parser):
    parser.add_argument('--out', help='output directory')
    parser.add_argument('--dt', type=float)
    parser.add_argument('--tmax', type=float)


def _config(args):
    if args.preset is not None:
        cfg = preset_config(args.preset)
    else:
        cfg = load_config(args.config)
    grid = [('dt', args.dt), ('t_max', args.tmax)]
    # dt <= t_max holds between the two assignments
    if args.dt is not None and args.dt > cfg.t_max:
        grid.reverse()
    for field, value in grid:
        if value is not None:
            setattr(cfg, field, value)
    if args.out is not None:
        cfg.out_dir = args.out
    return(cfg.validate())


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if args.command == 'simulate':
            manifest = run_scenario(_config(args))
            return(0 if manifest.complete else 1)
        if args.command == 'sweep':
            cfg = _config(args)
            manifests, summary = sweep(cfg, args.param, parse_grid(args.grid),
                                       workers=args.workers)
            logger.info('sweep summary written to %s', summary)
            complete = all(m is not None and m.complete for m in manifests)
            return(0 if complete else 1)
        out = args.out or os.environ.get('PYQSE_OUT_DIR', 'pyqse-out')
        write_spectrum(args.s, args.omegac, parse_grid(args.eta_grid), out)
        return(0)
    except PyqseError as err:
        logger.error('%s', err)
        return(2)


if __name__ == '__main__':
    sys.exit(main())
