"""JSON rendering of check results.  Exact values are printed as canonical strings."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .. import __version__
from ..coeff import CoeffFn, GaussianRational
from ..exterior import GradedElement, format_element
from .parser import print_expr

FLOAT_DIGITS = 9


def element(x: GradedElement) -> List[List[str]]:
    return [[m, c] for m, c in format_element(x)]


def coeff(f: CoeffFn) -> str:
    return print_expr(f)


def scalar(c: GaussianRational) -> str:
    return str(c)


def fraction(q: Fraction) -> str:
    return str(q)


def number(z: complex) -> List[float]:
    return [round(float(z.real), FLOAT_DIGITS) + 0.0, round(float(z.imag), FLOAT_DIGITS) + 0.0]


def point(p: Optional[Sequence[complex]]):
    return None if p is None else [number(z) for z in p]


def document(command: str, body: Dict[str, Any]) -> Dict[str, Any]:
    out = {"command": command, "version": __version__}
    out.update(body)
    return out


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def without_version(doc: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in doc.items() if k != "version"}
