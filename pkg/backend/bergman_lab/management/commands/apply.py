from ...exceptions import ConfigError
from ...geometry import HalfPlanePoint
from ...operators import KINDS, OperatorSpec, apply
from ..base import LabCommand


def operator_from(config):
    kind = config.value('functions', 'operator')
    exponents = config.section('exponents')
    if kind == 'positive_bergman':
        return OperatorSpec.positive_bergman(exponents['alpha'])
    if kind == 'fractional_s':
        return OperatorSpec.fractional_s(exponents['alpha'], exponents['a'])
    if kind == 'fractional_t':
        return OperatorSpec.fractional_t(exponents['alpha'], exponents['a'])
    if kind == 'general_t_plus':
        return config.off_diagonal().operator
    raise ConfigError(f'functions.operator must be one of {list(KINDS)}, got {kind!r}')


class Command(LabCommand):
    help = 'Evaluate a positive kernel operator on a function at sample points'
    table = 'apply'
    flags = ('operator', 'f', 'p', 'q', 'alpha', 'a', 'beta_tgt', 'point', 'tolerance', 'nodes', 'max_depth')

    def run(self, config):
        op = operator_from(config)
        f = config.function('f')
        qc = config.quadrature()
        points = config.points() or [HalfPlanePoint(0.0, 1.0)]
        rows = []
        for z in points:
            result = apply(op, f, z, qc)
            rows.append({**_metadata(config), 'operator': op, 'function': f, 'x': z.x, 'y': z.y,
                         'value': result.value, 'error_estimate': result.error_estimate,
                         'converged': result.converged})
        unconverged = sum(not row['converged'] for row in rows)
        return rows, f'{op} of {f} at {len(rows)} point(s), {unconverged} not converged'


def _metadata(config):
    exponents = config.section('exponents')
    return {'p': exponents['p'], 'q': exponents['q'] or exponents['p'], 'alpha': exponents['alpha'],
            'a': exponents['a']}
