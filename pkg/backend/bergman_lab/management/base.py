"""
Shared plumbing for the bergman_lab management commands.

Every command reads a RunConfig (settings, then ``--config``, then flags),
computes a list of rows, writes them as CSV and prints a one-line summary.
Exit codes: 1 usage or config error, 2 numerical error, 3 failed check.
"""
import logging
import sys
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ..config import RunConfig
from ..exceptions import InputError, NumericalError
from ..serializers import SERIALIZERS, write_csv

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
NUMERICAL_ERROR = 2
CHECK_FAILED = 3

# flag -> (section, key, type, argparse extras)
FLAGS = {
    'p': ('exponents', 'p', float, {}),
    'q': ('exponents', 'q', float, {}),
    'alpha': ('exponents', 'alpha', float, {}),
    'a': ('exponents', 'a', float, {}),
    'beta_tgt': ('exponents', 'beta_tgt', float, {}),
    'f': ('functions', 'f', str, {}),
    'g': ('functions', 'g', str, {}),
    'weight': ('functions', 'weight', str, {}),
    'operator': ('functions', 'operator', str, {}),
    'beta': ('grid', 'beta', str, {}),
    'j_min': ('grid', 'j_min', int, {}),
    'j_max': ('grid', 'j_max', int, {}),
    'samples': ('experiment', 'samples', int, {}),
    'seed': ('experiment', 'seed', int, {}),
    'point': ('experiment', 'points', float, {'nargs': 2, 'action': 'append', 'metavar': ('X', 'Y')}),
    'delta': ('experiment', 'delta_list', float, {'nargs': '+'}),
    'truncations': ('experiment', 'truncations', float, {'nargs': '+'}),
    't_values': ('experiment', 't_values', float, {'nargs': '+'}),
    'gamma': ('experiment', 'gamma', float, {}),
    'nu': ('experiment', 'nu', float, {}),
    'kind': ('experiment', 'kind', str, {'choices': ['bpq', 'bp']}),
    'tolerance': ('quadrature', 'tolerance', float, {}),
    'nodes': ('quadrature', 'nodes', int, {}),
    'max_depth': ('quadrature', 'max_depth', int, {}),
}


class LabCommand(BaseCommand):
    """Base class: subclasses set ``table`` and ``flags`` and implement ``run``."""
    table = None
    flags = ()

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def error(message):
            if parser.called_from_command_line:
                parser.print_usage(sys.stderr)
                sys.stderr.write(f'{parser.prog}: error: {message}\n')
                sys.exit(USAGE_ERROR)
            raise CommandError(f'Error: {message}', returncode=USAGE_ERROR)

        parser.error = error
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--config', help='YAML RunConfig file')
        parser.add_argument('--output', help='CSV path (default: <command>.csv)')
        parser.add_argument('--threads', type=int, help='joblib workers (default: BERGMAN_LAB_THREADS)')
        for name in self.flags:
            section, key, kind, extra = FLAGS[name]
            parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind, default=None,
                                help=f'overrides {section}.{key}', **extra)

    def overrides(self, options):
        out = {}
        for name in self.flags:
            value = options.get(name)
            if value is None:
                continue
            section, key, _, _ = FLAGS[name]
            out.setdefault(section, {})[key] = value
        if options.get('output'):
            out.setdefault('output', {})['path'] = options['output']
        return out

    def output_path(self, config: RunConfig):
        return Path(config.value('output', 'path') or f'{self.table}.csv')

    def handle(self, *args, **options):
        try:
            config = RunConfig.build(self.table, options.get('config'), self.overrides(options),
                                     options.get('threads'))
            self.config = config
            rows, summary = self.run(config)
        except InputError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR)
        except NumericalError as exc:
            raise CommandError(str(exc), returncode=NUMERICAL_ERROR)
        self.write(rows)
        failure = self.check(rows)
        if failure:
            self.stdout.write(self.style.ERROR(summary))
            raise CommandError(f'check failed: {failure}', returncode=CHECK_FAILED)
        self.stdout.write(self.style.SUCCESS(summary))

    def write(self, rows):
        path = self.output_path(self.config)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(path, SERIALIZERS[self.table](), rows)
        self.stdout.write(f'wrote {len(rows)} row(s) to {path}')

    def run(self, config: RunConfig):
        """Return (rows, one-line summary)."""
        raise NotImplementedError

    def check(self, rows):
        """A failure message for check-type commands, else None."""
        return None
