from ...dyadic import tent_tiling_check
from ...geometry import Rectangle
from ..base import LabCommand


class Command(LabCommand):
    help = 'Check that the tents of a truncated dyadic grid tile its region'
    table = 'tiling_check'
    flags = ('beta', 'j_min', 'j_max', 'samples', 'seed')

    def run(self, config):
        grid = config.grid()
        experiment = config.section('experiment')
        region = Rectangle(grid.x_range[0], grid.x_range[1], 2.0 ** (grid.j_min - 1), 2.0 ** grid.j_max)
        report = tent_tiling_check(grid, region, samples=experiment['samples'], seed=experiment['seed'])
        self.violations = len(report.violations)
        covered = report.region
        row = {'grid_tag': grid.beta, 'j_min': grid.j_min, 'j_max': grid.j_max, 'x0': covered.x0,
               'x1': covered.x1, 'y0': covered.y0, 'y1': covered.y1, 'samples': report.samples,
               'violations': self.violations}
        return [row], f'{report.samples} sample(s) on grid beta={grid.beta}: {self.violations} violation(s)'

    def check(self, rows):
        if self.violations:
            return f'{self.violations} point(s) lie in zero or several tents'
        return None
