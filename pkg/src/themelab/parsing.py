"""Input parsing: series literals, log-expansion expressions, grids, TOML files.

Series literals are polynomial expressions in b with exact rational
coefficients and optional named parameters, e.g. "1 + beta*b + 5/2*b^2".
Generator expressions add power/log factors on top of the same coefficient
grammar, e.g. "log(s)*s^(1/2) + (z + b)*s^(-1/2)".  Grids describe rational
parameter sweeps, e.g. "z = -2..2 step 1/2; w = 0, 1, 5".
"""

import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParseError
from .series import DEFAULT_PREC, Rational, TruncSeries, as_rational
from .themes import ThemePresentation
from .xi import XiElement, lambda_class, power_monomial

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<range>\.\.)"
    r"|(?P<op>[()^*+,;=-]))")


class _Tokens:
    """Peekable token stream over a literal; each token is (kind, text)."""

    def __init__(self, text: str):
        self.text = text
        self.toks: List[Tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip():
                    raise ParseError(f"cannot tokenize {text[pos:]!r} in {text!r}")
                break
            pos = m.end()
            for kind in ("num", "name", "range", "op"):
                if m.group(kind) is not None:
                    self.toks.append((kind, m.group(kind)))
                    break
        self.i = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[1] == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != text:
            got = tok[1] if tok else "end of input"
            raise ParseError(f"expected {text!r}, got {got!r} in {self.text!r}")
        self.i += 1

    def done(self) -> bool:
        return self.i >= len(self.toks)


def parse_rational(text: str) -> Fraction:
    """Parse "7", "-7", or "5/2" into an exact rational."""
    t = text.strip()
    m = re.fullmatch(r"(-?\d+)\s*(?:/\s*(\d+))?", t)
    if m is None:
        raise ParseError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def _signed_rational(toks: _Tokens) -> Fraction:
    sign = -1 if toks.accept("-") else 1
    kind, text = toks.next()
    if kind != "num":
        raise ParseError(f"expected a rational, got {text!r} in {toks.text!r}")
    return sign * parse_rational(text)


def _int_exponent(toks: _Tokens) -> int:
    kind, text = toks.next()
    if kind != "num" or "/" in text:
        raise ParseError(f"expected an integer exponent, got {text!r}")
    return int(text)


# ---------------------------------------------------------------------------
# series literals


def _series_factor(toks: _Tokens, prec: int,
                   params: Dict[str, Fraction]) -> TruncSeries:
    if toks.accept("("):
        value = _series_expr(toks, prec, params)
        toks.expect(")")
        return value
    kind, text = toks.next()
    if kind == "num":
        return TruncSeries.constant(parse_rational(text), prec)
    if kind == "name":
        if text == "b":
            e = _int_exponent(toks) if toks.accept("^") else 1
            if e < 0:
                raise ParseError("negative powers of b are not series")
            if e >= prec:
                return TruncSeries.zero(prec)
            return TruncSeries.monomial(1, e, prec)
        if text in params:
            return TruncSeries.constant(params[text], prec)
        raise ParseError(f"unknown parameter {text!r} in {toks.text!r}")
    raise ParseError(f"unexpected {text!r} in {toks.text!r}")


def _series_term(toks: _Tokens, prec: int,
                 params: Dict[str, Fraction]) -> TruncSeries:
    value = _series_factor(toks, prec, params)
    while toks.accept("*"):
        value = value * _series_factor(toks, prec, params)
    return value


def _series_expr(toks: _Tokens, prec: int,
                 params: Dict[str, Fraction]) -> TruncSeries:
    negative = toks.accept("-")
    if not negative:
        toks.accept("+")
    value = _series_term(toks, prec, params)
    if negative:
        value = -value
    while True:
        if toks.accept("+"):
            value = value + _series_term(toks, prec, params)
        elif toks.accept("-"):
            value = value - _series_term(toks, prec, params)
        else:
            return value


def parse_series(text: str, prec: int = DEFAULT_PREC,
                 params: Optional[Dict[str, Rational]] = None) -> TruncSeries:
    """Parse a series literal like "1 + 2*b + 5/2*b^2 - gamma*b^3".

    Named parameters are substituted from params; monomials at or above
    prec are truncated away, matching the series semantics.
    """
    fixed = {k: as_rational(v) for k, v in (params or {}).items()}
    toks = _Tokens(text)
    value = _series_expr(toks, prec, fixed)
    if not toks.done():
        raise ParseError(f"trailing input {toks.peek()[1]!r} in {text!r}")
    return value


# ---------------------------------------------------------------------------
# generator expressions in the log-expansion model


def _xi_term(toks: _Tokens, prec: int, params: Dict[str, Fraction]
             ) -> Tuple[Fraction, int, TruncSeries]:
    """One product term: returns (s-exponent, log degree, series coefficient)."""
    exponent = Fraction(0)
    logdeg = 0
    coeff = TruncSeries.constant(1, prec)
    while True:
        tok = toks.peek()
        if tok is not None and tok[1] == "log":
            toks.next()
            toks.expect("(")
            toks.expect("s")
            toks.expect(")")
            logdeg += _int_exponent(toks) if toks.accept("^") else 1
        elif tok is not None and tok[1] == "s":
            toks.next()
            toks.expect("^")
            toks.expect("(")
            exponent += _signed_rational(toks)
            toks.expect(")")
        else:
            coeff = coeff * _series_factor(toks, prec, params)
        if not toks.accept("*"):
            return exponent, logdeg, coeff


def parse_generator(text: str, prec: int = DEFAULT_PREC,
                    params: Optional[Dict[str, Rational]] = None) -> XiElement:
    """Parse a generator literal like "log(s)*s^(1/2) + (z + b)*s^(-1/2)".

    Every term must carry the same eigenvalue class; the log depth of the
    result is the largest log degree that occurs.
    """
    fixed = {k: as_rational(v) for k, v in (params or {}).items()}
    toks = _Tokens(text)
    terms: List[Tuple[Fraction, int, TruncSeries]] = []
    negative = toks.accept("-")
    if not negative:
        toks.accept("+")
    e, j, c = _xi_term(toks, prec, fixed)
    terms.append((e, j, -c if negative else c))
    while not toks.done():
        if toks.accept("+"):
            terms.append(_xi_term(toks, prec, fixed))
        elif toks.accept("-"):
            e, j, c = _xi_term(toks, prec, fixed)
            terms.append((e, j, -c))
        else:
            raise ParseError(f"trailing input {toks.peek()[1]!r} in {text!r}")

    lam = None
    N = 0
    for e, j, _ in terms:
        cls, shift = lambda_class(e + 1)
        if shift < 0:
            raise ParseError(
                f"exponent {e} lies below the principal branch of its class")
        if lam is None:
            lam = cls
        elif cls != lam:
            raise ParseError(
                f"mixed eigenvalue classes {lam} and {cls} in {text!r}")
        N = max(N, j)
    out = XiElement.zero(lam, N, prec)
    for e, j, c in terms:
        mono = power_monomial(e + 1, j, N, prec).scale(math.factorial(j))
        out = out + mono.mul_series(c)
    return out


# ---------------------------------------------------------------------------
# parameter grids


def parse_grid(text: str) -> List[Dict[str, Fraction]]:
    """Parse "z = -2..2 step 1/2; w = 0, 1, 5" into a list of grid points.

    Each clause is a range with a positive step or an explicit value list;
    the grid is the cartesian product of the clauses.
    """
    toks = _Tokens(text)
    names: List[str] = []
    axes: List[List[Fraction]] = []
    while True:
        kind, name = toks.next()
        if kind != "name":
            raise ParseError(f"expected a parameter name, got {name!r}")
        if name in names:
            raise ParseError(f"duplicate grid parameter {name!r}")
        toks.expect("=")
        first = _signed_rational(toks)
        values = [first]
        if toks.accept(".."):
            stop = _signed_rational(toks)
            if not toks.accept("step"):
                raise ParseError(f"range for {name!r} needs a step")
            step = _signed_rational(toks)
            if step <= 0:
                raise ParseError(f"step for {name!r} must be positive")
            if stop < first:
                raise ParseError(f"empty range for {name!r}")
            v = first + step
            while v <= stop:
                values.append(v)
                v += step
        else:
            while toks.accept(","):
                values.append(_signed_rational(toks))
        names.append(name)
        axes.append(values)
        if toks.done():
            break
        toks.expect(";")
    return [dict(zip(names, combo)) for combo in product(*axes)]


# ---------------------------------------------------------------------------
# TOML documents


@dataclass
class ThemeDocument:
    """A theme presentation spec, possibly parametrized over a grid."""

    lambda1: Fraction
    p: Tuple[int, ...]
    S: Tuple[str, ...]
    prec: int
    kind: str = "theme"
    params: Dict[str, Fraction] = field(default_factory=dict)
    grid: Optional[str] = None

    def presentation(self, point: Optional[Dict[str, Fraction]] = None
                     ) -> ThemePresentation:
        values = dict(self.params)
        if point:
            values.update(point)
        relations = [parse_series(s, self.prec, values) for s in self.S]
        return ThemePresentation(self.lambda1, list(self.p), relations, self.prec)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "lambda1": str(self.lambda1),
               "p": list(self.p), "S": list(self.S), "prec": self.prec}
        if self.params:
            out["params"] = {k: str(v) for k, v in sorted(self.params.items())}
        if self.grid is not None:
            out["grid"] = self.grid
        return out


@dataclass
class GeneratorDocument:
    """A generator spec in the log-expansion model, usually with a grid."""

    expr: str
    prec: int
    kind: str = "xi"
    params: Dict[str, Fraction] = field(default_factory=dict)
    grid: Optional[str] = None

    def element(self, point: Optional[Dict[str, Fraction]] = None) -> XiElement:
        values = dict(self.params)
        if point:
            values.update(point)
        return parse_generator(self.expr, self.prec, values)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "expr": self.expr, "prec": self.prec}
        if self.params:
            out["params"] = {k: str(v) for k, v in sorted(self.params.items())}
        if self.grid is not None:
            out["grid"] = self.grid
        return out


Document = Union[ThemeDocument, GeneratorDocument]


def _rational_field(data: dict, key: str) -> Fraction:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"field {key!r} must be an integer or a rational string")
    return parse_rational(str(value))


def document_from_dict(data: dict) -> Document:
    """Validate a decoded document; shared by the TOML and JSON loaders."""
    if not isinstance(data, dict):
        raise ParseError("document root must be a table")
    kind = data.get("kind", "theme")
    prec = data.get("prec", DEFAULT_PREC)
    if not isinstance(prec, int) or prec < 4:
        raise ParseError("prec must be an integer >= 4")
    params: Dict[str, Fraction] = {}
    raw_params = data.get("params", {})
    if not isinstance(raw_params, dict):
        raise ParseError("params must be a table of rationals")
    for name, value in raw_params.items():
        params[name] = _rational_field(raw_params, name)
    grid = data.get("grid")
    if grid is not None and not isinstance(grid, str):
        raise ParseError("grid must be a string")

    if kind == "xi":
        expr = data.get("expr")
        if not isinstance(expr, str):
            raise ParseError("a generator document needs an expr string")
        return GeneratorDocument(expr=expr, prec=prec, params=params, grid=grid)
    if kind in ("theme", "canonical"):
        for key in ("lambda1", "p", "S"):
            if key not in data:
                raise ParseError(f"a theme document needs the {key!r} field")
        lambda1 = _rational_field(data, "lambda1")
        p = data["p"]
        if (not isinstance(p, list)
                or any(not isinstance(x, int) or x < 0 for x in p)):
            raise ParseError("p must be a list of non-negative integers")
        S = data["S"]
        if not isinstance(S, list) or any(not isinstance(s, str) for s in S):
            raise ParseError("S must be a list of series literals")
        if len(S) != len(p):
            raise ParseError(f"got {len(S)} relation series for {len(p)} offsets")
        return ThemeDocument(lambda1=lambda1, p=tuple(p), S=tuple(S),
                             prec=prec, kind=kind, params=params, grid=grid)
    raise ParseError(f"unknown document kind {kind!r}")


def load_document(path: str, prec_override: Optional[int] = None) -> Document:
    """Load and validate a TOML document describing a theme or a generator."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML in {path}: {exc}") from exc
    doc = document_from_dict(data)
    if prec_override is not None:
        doc.prec = prec_override
    return doc


def grid_points(doc: Document, grid_override: Optional[str] = None
                ) -> List[Dict[str, Fraction]]:
    """The document's grid points; a document without a grid is a single point."""
    text = grid_override if grid_override is not None else doc.grid
    if text is None:
        return [{}]
    return parse_grid(text)
