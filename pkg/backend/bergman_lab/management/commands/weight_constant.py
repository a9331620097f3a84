from ...weights import WeightPair, bp_constant, bpq_constant, default_family
from ..base import LabCommand


class Command(LabCommand):
    help = 'Bekolle-Bonami constant of a weight over its search family'
    table = 'weight_constant'
    flags = ('weight', 'kind', 'p', 'q', 'alpha', 'a', 'tolerance', 'nodes', 'max_depth')

    def run(self, config):
        omega = config.function('weight')
        kind = config.value('experiment', 'kind')
        cfg = config.exponents()
        qc = config.quadrature()
        family = default_family(omega)
        if kind == 'bp':
            result = bp_constant(omega, cfg.p, cfg.alpha, family, qc, n_jobs=config.threads)
        else:
            result = bpq_constant(WeightPair.of(omega, cfg), cfg, family, qc, n_jobs=config.threads)
        row = {**cfg.metadata(), 'weight': omega, 'kind': kind, 'value': result.value,
               'interval_left': result.interval.left, 'interval_length': result.interval.length,
               'family_size': len(family)}
        return [row], f'[{omega}]_{kind} = {result.value!r}, attained on {result.interval}'
