from ...operators import norm_ratio
from ..base import LabCommand
from .apply import operator_from


class Command(LabCommand):
    help = 'Weighted norm ratio ||w op f||_(q, target) / ||w f||_(p, alpha) over the truncation'
    table = 'norm_ratio'
    flags = ('operator', 'f', 'weight', 'p', 'q', 'alpha', 'a', 'beta_tgt', 'tolerance', 'nodes', 'max_depth')

    def run(self, config):
        op = operator_from(config)
        f = config.function('f')
        weight = config.function('weight')
        cfg = config.exponents()
        qc = config.quadrature()
        target_order = config.value('exponents', 'beta_tgt')
        target_order = cfg.alpha if target_order is None else target_order
        result = norm_ratio(op, f, cfg, source_weight=weight, target_weight=weight, source_order=cfg.alpha,
                            target_order=target_order, qc=qc, n_jobs=config.threads)
        row = {**cfg.metadata(), 'operator': op, 'function': f, 'source_order': cfg.alpha,
               'target_order': target_order, 'truncation': str(qc.truncation), 'numerator': result.numerator,
               'denominator': result.denominator, 'ratio': result.ratio}
        return [row], f'||{op} f|| / ||f|| = {result.ratio!r} for f = {f}, weight {weight}'
