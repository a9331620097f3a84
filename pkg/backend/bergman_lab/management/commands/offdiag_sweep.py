from ...exceptions import ConfigError
from ...experiments import offdiag_sweep
from ...schur import OffDiagonalConfig
from ..base import LabCommand

DEFAULT_CONFIGS = [
    {'p': 2.0, 'q': 2.0, 'alpha': 0.0, 'a': 0.0},
    {'p': 2.0, 'q': 4.0, 'alpha': 0.0, 'a': 0.0},
    {'p': 2.0, 'q': 2.0, 'alpha': 0.5, 'a': -0.6},
]


def sweep_configs(raw):
    configs = []
    for entry in raw or DEFAULT_CONFIGS:
        if not isinstance(entry, dict) or set(entry) - {'p', 'q', 'alpha', 'a', 'beta_tgt'}:
            raise ConfigError(f'experiment.configs entries take keys p, q, alpha, a, beta_tgt; got {entry!r}')
        p, q = float(entry['p']), float(entry.get('q', entry['p']))
        alpha, a = float(entry.get('alpha', 0.0)), float(entry.get('a', 0.0))
        if entry.get('beta_tgt') is None:
            configs.append(OffDiagonalConfig.with_default_target(p, q, alpha, a))
        else:
            configs.append(OffDiagonalConfig(p, q, alpha, float(entry['beta_tgt']), a))
    return configs


class Command(LabCommand):
    help = 'Classify (p, q, alpha, a) configurations by norm-ratio growth under truncation'
    table = 'offdiag_sweep'
    flags = ('truncations',)

    def run(self, config):
        configs = sweep_configs(config.value('experiment', 'configs'))
        rows = offdiag_sweep(configs, truncations=config.value('experiment', 'truncations'),
                             n_jobs=config.threads, progress=True)
        self.inconsistent = sum(not row['consistent'] for row in rows)
        verdicts = ', '.join(row['verdict'] for row in rows)
        return rows, f'{len(configs)} configuration(s): {verdicts}'

    def check(self, rows):
        if self.inconsistent:
            return f'{self.inconsistent} row(s) disagree with alpha+1 < p(a+1)'
        return None
