from ...schur import solve_rst, verify_schur_conditions
from ..base import LabCommand

CONSTANCY = 0.02
HEIGHTS = 10


class Command(LabCommand):
    help = 'Solve for Schur parameters (r, s, t) and verify both Schur integrals'
    table = 'schur'
    flags = ('p', 'q', 'alpha', 'a', 'beta_tgt', 'tolerance', 'nodes', 'max_depth')

    def run(self, config):
        cfg = config.off_diagonal()
        sp = solve_rst(cfg)
        report = verify_schur_conditions(cfg, sp, samples=HEIGHTS, qc=config.quadrature(), n_jobs=config.threads)
        self.report = report
        common = {**cfg.metadata(), 'beta_tgt': cfg.beta_tgt, 'b': cfg.b, 'omega_param': cfg.omega_param,
                  'r': sp.r, 's': sp.s, 't': sp.t, 'm1': report.m1, 'm2': report.m2, 'spread': report.spread}
        rows = [{**common, **row} for row in report.rows]
        return rows, (f'r={sp.r!r} s={sp.s!r} t={sp.t!r}: M1={report.m1!r} M2={report.m2!r}, '
                      f'spread {report.spread!r}')

    def check(self, rows):
        if not self.report.is_constant(CONSTANCY):
            return f'Schur ratios vary by {self.report.spread!r} > {CONSTANCY!r} across heights'
        return None
