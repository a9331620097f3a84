from ...schur import lemma_norm_scaling
from ..base import LabCommand


class Command(LabCommand):
    help = 'Fit the t-scaling of ||((z+it)/i)^-gamma||_(p,nu)^p'
    table = 'lemma_scaling'
    flags = ('p', 'gamma', 'nu', 't_values', 'tolerance', 'nodes', 'max_depth')

    def run(self, config):
        p = config.value('exponents', 'p')
        experiment = config.section('experiment')
        fit, rows = lemma_norm_scaling(p, experiment['nu'], experiment['gamma'], experiment['t_values'],
                                       config.quadrature())
        rows = [{'p': p, 'q': p, 'alpha': experiment['nu'], **row} for row in rows]
        expected = rows[0]['expected_slope']
        return rows, f'slope {fit.slope!r} (expected {expected!r}), residual {fit.residual!r}'
