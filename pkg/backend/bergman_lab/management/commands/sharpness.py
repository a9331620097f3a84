from ...experiments import SharpnessConfig, sharpness_run
from ..base import LabCommand


class Command(LabCommand):
    help = 'Power-weight sharpness run: weight constant, source norm and ratio against 1/delta'
    table = 'sharpness'
    flags = ('operator', 'p', 'q', 'alpha', 'a', 'delta')

    def run(self, config):
        sc = SharpnessConfig(config.exponents(balanced=True), config.value('experiment', 'delta_list'),
                             operator=config.value('functions', 'operator'))
        result = sharpness_run(sc, n_jobs=config.threads, progress=True)
        slopes = ', '.join(f'{name} {fit.slope:.4f}' if fit else f'{name} -' for name, fit in result.fits.items())
        expected = ', '.join(f'{name} {value:.4f}' for name, value in sc.expected_slopes.items())
        exponent = '-' if result.weight_exponent is None else f'{result.weight_exponent:.4f}'
        return result.rows, (f'{sc.spec} slopes: {slopes} (expected {expected}); '
                             f'weight exponent {exponent} (expected {sc.expected_exponent:.4f})')
