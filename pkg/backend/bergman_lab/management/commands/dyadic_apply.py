from ...dyadic import dyadic_model_terms
from ...geometry import HalfPlanePoint
from ...quadrature import CompensatedSum
from ..base import LabCommand


class Command(LabCommand):
    help = 'Evaluate the dyadic model operator Q^beta_(alpha,a) at sample points'
    table = 'dyadic_apply'
    flags = ('f', 'p', 'q', 'alpha', 'a', 'beta', 'j_min', 'j_max', 'point', 'tolerance', 'nodes', 'max_depth')

    def run(self, config):
        f = config.function('f')
        cfg = config.exponents()
        grid = config.grid()
        qc = config.quadrature()
        rows = []
        for z in config.points() or [HalfPlanePoint(0.5, 0.5)]:
            terms = dyadic_model_terms(f, cfg, grid, z, qc)
            acc = CompensatedSum()
            for _, term in terms:
                acc.add(term)
            rows.append({**cfg.metadata(), 'function': f, 'grid_tag': grid.beta, 'j_min': grid.j_min,
                         'j_max': grid.j_max, 'x': z.x, 'y': z.y, 'value': acc.value, 'boxes': len(terms)})
        return rows, f'Q^{grid.beta} of {f} at {len(rows)} point(s)'
