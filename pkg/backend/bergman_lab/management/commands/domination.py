from ...dyadic import domination_run, sample_points
from ..base import LabCommand


class Command(LabCommand):
    help = 'Compare S_(alpha,a) f with the two-grid dyadic model sum at sample points'
    table = 'domination'
    flags = ('f', 'p', 'q', 'alpha', 'a', 'j_min', 'j_max', 'samples', 'seed', 'point', 'tolerance', 'nodes',
             'max_depth')

    def run(self, config):
        f = config.function('f')
        cfg = config.exponents()
        grid = config.grid()
        experiment = config.section('experiment')
        points = config.points() or sample_points(experiment['samples'], experiment['seed'])
        report = domination_run([f], cfg, points, grid, config.quadrature(), n_jobs=config.threads)
        rows = [{**cfg.metadata(), **row, 'j_min': grid.j_min, 'j_max': grid.j_max} for row in report.rows]
        if not report.ratios:
            return rows, f'no sample point of {f} has a nonzero model sum'
        return rows, (f'S f / (Q^0 f + Q^1/3 f) for {f}: max {report.max_ratio!r}, '
                      f'min {report.min_ratio!r}, spread {report.spread!r}')
