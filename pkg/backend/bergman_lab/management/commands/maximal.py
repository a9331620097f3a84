from ...dyadic import sample_points
from ...operators import maximal_minorization_check
from ..base import LabCommand


class Command(LabCommand):
    help = 'Check M_(alpha,a) f <= C S_(alpha,a) f at sample points'
    table = 'maximal'
    flags = ('f', 'p', 'q', 'alpha', 'a', 'beta', 'j_min', 'j_max', 'samples', 'seed', 'point', 'tolerance',
             'nodes', 'max_depth')

    def run(self, config):
        f = config.function('f')
        cfg = config.exponents()
        grid = config.grid()
        experiment = config.section('experiment')
        points = config.points() or sample_points(experiment['samples'], experiment['seed'])
        report = maximal_minorization_check(f, cfg, grid, qc=config.quadrature(), points=points,
                                            n_jobs=config.threads)
        rows = [{**cfg.metadata(), 'function': f, 'grid_tag': grid.beta, **row} for row in report.rows]
        self.violations = len(report.violations)
        return rows, (f'M f <= {report.constant!r} S f at {len(rows)} point(s): {self.violations} violation(s), '
                      f'empirical constant {report.empirical_constant!r}')

    def check(self, rows):
        if self.violations:
            return f'{self.violations} sample(s) violate M f <= C S f'
        return None
