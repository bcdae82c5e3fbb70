"""
Django settings for numtheory_platform project.

The project has no database, URL routing or templates: Django provides
configuration, the management-command CLI and the test runner.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('PPRI_SECRET_KEY', 'numtheory-local-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'numtheory',
]

MIDDLEWARE = []

DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Exact-arithmetic engine
# Read through numtheory.conf.get_setting(); missing keys fall back to defaults.

NUMTHEORY = {
    'PADIC_PRECISION': 32,
    'OUTPUT_DIGITS': 15,
    'MAX_TERMS': 10**6,
    'BALL_BUDGET': 10**6,
    'RADIUS_CAP': 1e12,
    'JACOBI_TOL': 1e-12,
    'JACOBI_MAX_SWEEPS': 50,
    'MAX_DIMENSION': 64,
    'MAX_PRIMES': 8,
    'SPOT_CHECK_POINTS': 256,
    'PIGEONHOLE_START_CELLS': 2**4,
    'PIGEONHOLE_CELL_LIMIT': 2**24,
    'SEED': int(os.environ.get('PPRI_SEED', '0')),
}


# Logging
# Everything goes to stderr so command output on stdout stays parseable.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.environ.get('PPRI_LOG_LEVEL', 'WARNING'),
    },
}
