"""
Text and JSON codecs for command-line arguments and results.
"""

import json
import math
from fractions import Fraction

import numpy as np

from .conf import get_setting
from .exceptions import ParseError
from .lattice import region_from_json
from .matrix import Matrix
from .norms import Vec
from .scalars import PAdic, as_rational
from .series import CoeffSeq, LaurentSeq, ScalarKind


def parse_rational(text):
    return as_rational(text)


def parse_complex(text):
    try:
        return complex(text.replace(' ', '').replace('i', 'j'))
    except ValueError as exc:
        raise ParseError(f"Not a complex number: {text!r}") from exc


def parse_real(text):
    try:
        value = float(text)
    except ValueError as exc:
        raise ParseError(f"Not a real number: {text!r}") from exc
    if not math.isfinite(value):
        raise ParseError(f"Real input must be finite, got {text!r}")
    return value


def _entry(text):
    """Rational when exact syntax is used, float for decimal input."""
    text = text.strip()
    try:
        return as_rational(text)
    except ParseError:
        return parse_real(text)


def parse_vector(text):
    """Comma separated entries such as "1,-2" or "1/2,0.25"."""
    pieces = [p for p in text.split(',') if p.strip()]
    if not pieces:
        raise ParseError("Empty vector")
    return Vec.of([_entry(p) for p in pieces])


def parse_rational_list(text):
    return [as_rational(p) for p in text.split(',') if p.strip()]


def load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Invalid JSON: {exc.msg} at position {exc.pos}") from exc


def _json_entry(value):
    if isinstance(value, bool):
        raise ParseError(f"Not a number: {value!r}")
    if isinstance(value, str):
        return _entry(value)
    if isinstance(value, (int, float)):
        return value
    raise ParseError(f"Not a number: {value!r}")


def parse_matrix(text):
    """A JSON row-major array like [[1,2],[3,4]] or the short form "1,2;3,4"."""
    text = text.strip()
    if text.startswith('['):
        rows = load_json(text)
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError("A matrix must be a JSON array of arrays")
        return Matrix.of([[_json_entry(x) for x in r] for r in rows])
    return Matrix.of([[_entry(x) for x in r.split(',')] for r in text.split(';') if r.strip()])


def parse_series(data):
    """{"scalar": "rational", "terms": [...]} as a finite CoeffSeq."""
    if isinstance(data, str):
        data = load_json(data)
    if not isinstance(data, dict) or 'terms' not in data:
        raise ParseError("A series needs a 'terms' list")
    scalar = data.get('scalar', 'rational')
    if not isinstance(scalar, str):
        raise ParseError(f"A scalar kind must be a string, got {scalar!r}")
    kind = ScalarKind.parse(scalar)
    terms = data['terms']
    if not isinstance(terms, list):
        raise ParseError(f"Series terms must be a JSON list, got {type(terms).__name__}")
    if kind.name == 'complex':
        terms = [_complex_term(t) for t in terms]
    else:
        terms = [as_rational(t) for t in terms]
    return CoeffSeq.finite(terms, kind)


def _complex_term(value):
    if isinstance(value, str):
        return parse_complex(value)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ParseError(f"Not a complex number: {value!r}")


def parse_laurent(data):
    """{"support": {"-1": "1/2", "0": 1}, "tail": "0"}."""
    if isinstance(data, str):
        data = load_json(data)
    if not isinstance(data, dict) or 'support' not in data:
        raise ParseError("A Laurent sequence needs a 'support' mapping")
    try:
        support = {int(j): _json_entry(c) for j, c in data['support'].items()}
    except (AttributeError, ValueError) as exc:
        raise ParseError("Laurent support keys must be integers") from exc
    return LaurentSeq.of(support, as_rational(str(data.get('tail', 0))))


def parse_region(data):
    if isinstance(data, str):
        data = load_json(data)
    return region_from_json(data)


def format_real(x, digits=None):
    digits = get_setting('OUTPUT_DIGITS') if digits is None else digits
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        x = float(x)
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return 'inf' if x > 0 else '-inf'
        return f"{float(x):.{digits}g}"
    return str(x)


def format_complex(z, digits=None):
    sign = '-' if z.imag < 0 else '+'
    return f"{format_real(z.real, digits)} {sign} {format_real(abs(z.imag), digits)}i"


def format_value(value, digits=None):
    if isinstance(value, complex):
        return format_complex(value, digits)
    if isinstance(value, (PAdic, Vec, Matrix)):
        return str(value)
    return format_real(value, digits)


def to_jsonable(value, digits=None):
    """Recursively convert results to JSON-safe values; exact numbers become strings."""
    if hasattr(value, 'to_json'):
        return to_jsonable(value.to_json(), digits)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v, digits) for v in value.tolist()]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return {'re': to_jsonable(value.real, digits), 'im': to_jsonable(value.imag, digits)}
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return format_real(float(value))
        return float(format_real(float(value), digits))
    return str(value)


def dumps(payload, digits=None):
    """Deterministic JSON: sorted keys, fixed separators."""
    return json.dumps(to_jsonable(payload, digits), sort_keys=True, separators=(',', ':'))
