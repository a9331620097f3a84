"""
Django settings for bergman_lab_project.

Only management commands and the test runner are used; there is no
database, no middleware and no URL configuration.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'bergman-lab-insecure-placeholder')

DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',

    # Local apps
    'bergman_lab',
]

DATABASES = {}


# Toolkit defaults; every RunConfig section starts from these
BERGMAN_LAB = {
    'THREADS': int(os.getenv('BERGMAN_LAB_THREADS', '1')),
    'quadrature': {
        'x_range': [-64.0, 64.0],
        'y_max': 64.0,
        'y_min': 0.0,
        'nodes': 8,
        'radial_layers': 24,
        'angular_layers': 6,
        'tolerance': 1e-6,
        'max_depth': 2,
    },
    'grid': {
        'beta': '0',
        'j_min': -14,
        'j_max': 7,
        'x_range': [-64.0, 64.0],
    },
    'exponents': {
        'p': 2.0,
        'q': None,
        'alpha': 0.0,
        'a': 0.0,
        'beta_tgt': None,
    },
    'functions': {
        'f': 'box(0, 1)',
        'g': 'box(0, 1)',
        'weight': 'const(1)',
        'operator': 'fractional_s',
    },
    'experiment': {
        'delta_list': [0.4, 0.2, 0.1, 0.05],
        'samples': 100,
        'seed': 0,
        'points': None,
        'truncations': [32.0, 128.0, 512.0],
        'configs': None,
        't_values': [0.5, 1.0, 2.0, 4.0],
        'gamma': 2.0,
        'nu': 0.0,
        'kind': 'bpq',
    },
    'output': {
        'path': None,
    },
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'bergman_lab': {
            'handlers': ['console'],
            'level': os.getenv('BERGMAN_LAB_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
