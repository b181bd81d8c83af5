"""Canonical JSON for run artifacts.

Exact rationals never pass through floats: a Fraction becomes a
{"num", "den"} string pair and symbolic values are rendered through their
deterministic sorted-term string form.  Output is byte-stable for a given
input, which makes result digests meaningful.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .laurent import LaurentPolynomial
from .rational import RationalFunction
from .series import TruncatedSeries


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return str(k)


def jsonable(obj):
    """Recursively convert to plain JSON types without precision loss."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, float):
        return obj
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, LaurentPolynomial):
        return repr(obj)
    if isinstance(obj, RationalFunction):
        if obj.is_polynomial():
            return {"num": repr(obj.num), "den": "1"}
        return {"num": repr(obj.num), "den": repr(obj.den())}
    if isinstance(obj, TruncatedSeries):
        return {_key(e): jsonable(c) for e, c in sorted(obj.coeffs.items())}
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = list(obj)
        if isinstance(obj, (set, frozenset)):
            items = sorted(items)
        return [jsonable(v) for v in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
