"""App settings with defaults, usable with or without a configured Django project."""

from django.conf import settings

DEFAULTS = {
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
    'SEED': 0,
}


def get_setting(name):
    if name not in DEFAULTS:
        raise KeyError(f"Unknown numtheory setting: {name}")
    if settings.configured:
        return getattr(settings, 'NUMTHEORY', {}).get(name, DEFAULTS[name])
    return DEFAULTS[name]
