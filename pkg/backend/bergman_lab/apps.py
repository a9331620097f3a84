from django.apps import AppConfig
from django.core.exceptions import ImproperlyConfigured


class BergmanLabConfig(AppConfig):
    name = 'bergman_lab'
    verbose_name = 'Bergman operator lab'

    def ready(self):
        # Bad BERGMAN_LAB defaults should fail at startup, not mid-run.
        from .config import RunConfig
        from .exceptions import InputError

        try:
            config = RunConfig.build('settings')
            config.quadrature()
            config.grid()
            config.exponents()
        except InputError as exc:
            raise ImproperlyConfigured(f'settings.BERGMAN_LAB: {exc}') from exc
