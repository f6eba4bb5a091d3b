"""JSON formats for presentations, polynomials, and reports.

Presentation files look like

    {"n_gens": 4, "torus_rank": 4,
     "weights": [[...], ...],                  # one integer vector per generator
     "h": [["-1", "0", "1", "0"], ...],        # rationals as "p/q" strings
     "h_star": [...],                          # optional
     "delta": [{"k": 4, "j": 1, "poly": [[-2, 1, [0,1,1,0]]]}, ...],
     "names": ["t11", ...]}                    # optional, rendering only

Indices are 1-based on the wire, polynomials are lists of
[numerator, denominator, exponent-vector] triples ordered revlex-descending,
and missing delta entries mean zero.  Reports render polynomials both as the
authoritative triple list and in human notation.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import MvLaurent
from .presentation import PoissonPresentation, PresentationError


class FormatError(PresentationError):
    pass


def fraction_to_json(x: Fraction) -> str:
    return str(x)


def fraction_from_json(x) -> Fraction:
    if isinstance(x, bool):
        raise FormatError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        raise FormatError(f"floating point input rejected, use 'p/q' strings: {x!r}")
    raise FormatError(f"not a rational: {x!r}")


def poly_to_triples(f: MvLaurent) -> List[list]:
    return [[c.numerator, c.denominator, list(e)] for e, c in f.sorted_terms()]


def poly_from_triples(nvars: int, triples) -> MvLaurent:
    if not isinstance(triples, list):
        raise FormatError("polynomial must be a list of [num, den, exps] triples")
    out = MvLaurent.zero(nvars)
    for item in triples:
        if not (isinstance(item, list) and len(item) == 3):
            raise FormatError(f"bad polynomial term {item!r}")
        num, den, exps = item
        if not (isinstance(num, int) and isinstance(den, int) and den != 0):
            raise FormatError(f"bad coefficient in term {item!r}")
        if not (isinstance(exps, list) and len(exps) == nvars and all(isinstance(e, int) for e in exps)):
            raise FormatError(f"bad exponent vector in term {item!r}")
        out = out + MvLaurent.monomial(nvars, exps, Fraction(num, den))
    return out


def presentation_to_doc(p: PoissonPresentation, names: Optional[Sequence[str]] = None) -> dict:
    doc = {
        "n_gens": p.n,
        "torus_rank": p.torus_rank,
        "weights": [list(w) for w in p.weights],
        "h": [[fraction_to_json(x) for x in row] for row in p.h],
        "delta": [
            {"k": k + 1, "j": j + 1, "poly": poly_to_triples(poly)}
            for (k, j), poly in sorted(p.delta.items())
            if not poly.is_zero()
        ],
    }
    if p.h_star is not None:
        doc["h_star"] = [[fraction_to_json(x) for x in row] for row in p.h_star]
    if names is not None:
        doc["names"] = list(names)
    return doc


def presentation_from_doc(doc: dict) -> Tuple[PoissonPresentation, Optional[List[str]]]:
    if not isinstance(doc, dict):
        raise FormatError("presentation document must be a JSON object")
    try:
        n = int(doc["n_gens"])
        d = int(doc["torus_rank"])
        weights = tuple(tuple(int(x) for x in row) for row in doc["weights"])
        h = tuple(tuple(fraction_from_json(x) for x in row) for row in doc["h"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed presentation document: {exc}") from exc
    h_star = None
    if doc.get("h_star") is not None:
        h_star = tuple(tuple(fraction_from_json(x) for x in row) for row in doc["h_star"])
    delta: Dict[Tuple[int, int], MvLaurent] = {}
    for entry in doc.get("delta", []):
        try:
            k = int(entry["k"]) - 1
            j = int(entry["j"]) - 1
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed delta entry {entry!r}") from exc
        poly = poly_from_triples(n, entry.get("poly", []))
        if not poly.is_zero():
            delta[(k, j)] = poly
    names = None
    if doc.get("names") is not None:
        names = [str(x) for x in doc["names"]]
        if len(names) != n:
            raise FormatError("names must list one label per generator")
    p = PoissonPresentation(n=n, torus_rank=d, weights=weights, h=h, delta=delta, h_star=h_star)
    return p, names


def poly_report(f: MvLaurent, names: Optional[Sequence[str]] = None) -> dict:
    """Both renderings of a polynomial: authoritative triples plus human text."""
    return {"terms": poly_to_triples(f), "text": f.render(names)}


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


_TERM_RE = re.compile(r"\s*(?P<sign>[+-])?\s*(?P<body>(?:[^+\-]|(?<=\^)[+-])+)")
_FACTOR_RE = re.compile(r"(?P<name>[A-Za-z][A-Za-z0-9]*)(\^(?P<pow>-?\d+))?$")


def parse_poly_expr(expr: str, nvars: int, names: Optional[Sequence[str]] = None,
                    prefix: str = "x") -> MvLaurent:
    """Parse a small human expression like ``2*x1^2*x3 - 1/2*x2`` or ``y4^-1``.

    Variables are matched against `names` when given, otherwise against
    prefix1..prefixN.  Only sums of monomials are supported, which covers the
    membership and report use cases.
    """
    lookup = {}
    for i in range(nvars):
        lookup[f"{prefix}{i+1}"] = i
    if names:
        for i, nm in enumerate(names):
            lookup[nm] = i
    out = MvLaurent.zero(nvars)
    pos = 0
    expr = expr.strip()
    if not expr:
        raise FormatError("empty polynomial expression")
    while pos < len(expr):
        m = _TERM_RE.match(expr, pos)
        if not m or not m.group("body").strip():
            raise FormatError(f"cannot parse polynomial near {expr[pos:]!r}")
        pos = m.end()
        sign = -1 if m.group("sign") == "-" else 1
        coeff = Fraction(sign)
        exps = [0] * nvars
        body = m.group("body").strip()
        for chunk in body.split("*"):
            chunk = chunk.strip()
            if not chunk:
                raise FormatError(f"empty factor in {body!r}")
            fm = _FACTOR_RE.match(chunk)
            if fm and fm.group("name") in lookup:
                idx = lookup[fm.group("name")]
                exps[idx] += int(fm.group("pow") or 1)
            else:
                try:
                    coeff *= Fraction(chunk)
                except (ValueError, ZeroDivisionError) as exc:
                    raise FormatError(f"unknown factor {chunk!r}") from exc
        out = out + MvLaurent.monomial(nvars, exps, coeff)
    return out
