"""Affine forms in named scalar unknowns, and series built from them.

The isomorphism and invariance searches reduce to exact linear algebra on
series coefficients: every coefficient is an affine expression in a handful
of scalar unknowns (slot values of b-ODE solves, entries of an unknown basis
change).  LinExpr is such an expression, LinearSystem performs online
Gaussian elimination as relations appear, and LinSeries is a truncated
series whose coefficients are LinExprs.

Pivoting convention: a relation eliminates its most recently created
unknown.  Substitutions are kept fully back-substituted, so reducing an
expression is a single pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .series import Rational, TruncSeries, as_rational

_ZERO = Fraction(0)


class LinExpr:
    """const + sum of coeff * unknown, with exact rational coefficients."""

    __slots__ = ("const", "terms")

    def __init__(self, const: Rational = 0, terms: Optional[Dict[int, Fraction]] = None):
        self.const = as_rational(const)
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def constant(cls, c: Rational) -> "LinExpr":
        return cls(as_rational(c))

    @classmethod
    def of_unknown(cls, uid: int) -> "LinExpr":
        return cls(0, {uid: Fraction(1)})

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        return self.const == 0 and not self.terms

    def __add__(self, other: "LinExpr") -> "LinExpr":
        if not isinstance(other, LinExpr):
            other = LinExpr.constant(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, _ZERO) + v
        return LinExpr(self.const + other.const, terms)

    __radd__ = __add__

    def __neg__(self) -> "LinExpr":
        return LinExpr(-self.const, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        if not isinstance(other, LinExpr):
            other = LinExpr.constant(other)
        return self + (-other)

    def scale(self, c: Rational) -> "LinExpr":
        c = as_rational(c)
        if c == 0:
            return LinExpr(0)
        return LinExpr(self.const * c, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, c: Rational) -> "LinExpr":
        return self.scale(c)

    __rmul__ = __mul__

    def coeff(self, uid: int) -> Fraction:
        return self.terms.get(uid, _ZERO)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LinExpr):
            return self.const == other.const and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.const == other
        return NotImplemented

    __hash__ = None  # mutable-ish container semantics

    def __repr__(self) -> str:
        return f"LinExpr({self.const!r}, {self.terms!r})"


@dataclass
class Relation:
    """One recorded event of the elimination: a relation or a value snapshot.

    raw is the expression as it was assembled (before substitution), reduced
    is the same expression modulo the relations known at the time.  status is
    one of "determined", "redundant", "inconsistent" for relations and
    "value" for snapshots.
    """

    label: str
    raw: LinExpr
    reduced: LinExpr
    status: str
    pivot: Optional[int] = None
    rendered: str = ""

    def __str__(self) -> str:
        return f"{self.label}: {self.rendered}"


class LinearSystem:
    """Online Gaussian elimination over the rationals.

    Unknowns are created in order; each relation eliminates its latest
    unknown.  Substitution values are stored fully reduced (in terms of the
    currently free unknowns only).
    """

    def __init__(self) -> None:
        self.names: List[str] = []
        self.subs: Dict[int, LinExpr] = {}
        self.events: List[Relation] = []
        self.conflict: Optional[Relation] = None

    def new_unknown(self, name: str) -> LinExpr:
        uid = len(self.names)
        self.names.append(name)
        return LinExpr.of_unknown(uid)

    def reduce(self, expr: LinExpr) -> LinExpr:
        out = LinExpr(expr.const)
        for uid, c in expr.terms.items():
            sub = self.subs.get(uid)
            if sub is None:
                out = out + LinExpr(0, {uid: c})
            else:
                out = out + sub.scale(c)
        return out

    def add_relation(self, expr: LinExpr, label: str) -> Relation:
        reduced = self.reduce(expr)
        if reduced.is_constant:
            status = "redundant" if reduced.const == 0 else "inconsistent"
            event = Relation(label, expr, reduced, status, None, self.render(expr) + " = 0")
            self.events.append(event)
            if status == "inconsistent" and self.conflict is None:
                self.conflict = event
            return event
        pivot = max(reduced.terms)
        c = reduced.terms[pivot]
        rest = reduced - LinExpr(0, {pivot: c})
        value = rest.scale(Fraction(-1) / c)
        # keep every stored substitution expressed in free unknowns only
        for uid, sub in list(self.subs.items()):
            w = sub.coeff(pivot)
            if w != 0:
                self.subs[uid] = (sub - LinExpr(0, {pivot: w})) + value.scale(w)
        self.subs[pivot] = value
        event = Relation(label, expr, reduced, "determined", pivot, self.render(expr) + " = 0")
        self.events.append(event)
        return event

    def record_value(self, label: str, expr: LinExpr) -> Relation:
        event = Relation(label, expr, self.reduce(expr), "value", None,
                         f"{label} = {self.render(expr)}")
        self.events.append(event)
        return event

    def free_unknowns(self) -> List[int]:
        return [uid for uid in range(len(self.names)) if uid not in self.subs]

    def resolve(self, expr: LinExpr) -> LinExpr:
        """expr modulo all relations collected so far."""
        return self.reduce(expr)

    def evaluate(self, expr: LinExpr, values: Optional[Dict[int, Fraction]] = None) -> Fraction:
        reduced = self.reduce(expr)
        out = reduced.const
        for uid, c in reduced.terms.items():
            out += c * (values or {}).get(uid, _ZERO)
        return out

    def assignment_for(self, target: LinExpr, aim: Rational = 1) -> Optional[Dict[int, Fraction]]:
        """Free-unknown values making target == aim, remaining frees 0.

        Returns None when target reduces to a constant != aim (or == aim with
        an empty assignment when it already matches).
        """
        reduced = self.reduce(target)
        aim = as_rational(aim)
        if reduced.is_constant:
            return {} if reduced.const == aim else None
        uid = max(reduced.terms)
        values = {u: _ZERO for u in reduced.terms}
        values[uid] = (aim - reduced.const) / reduced.terms[uid]
        return values

    def render(self, expr: LinExpr) -> str:
        parts: List[str] = []
        for uid in sorted(expr.terms):
            c = expr.terms[uid]
            name = self.names[uid]
            if c == 1:
                term = name
            elif c == -1:
                term = f"-{name}"
            else:
                term = f"{c}*{name}"
            if not parts:
                parts.append(term)
            elif term.startswith("-"):
                parts.append(f"- {term[1:]}")
            else:
                parts.append(f"+ {term}")
        if expr.const != 0 or not parts:
            c = expr.const
            if not parts:
                parts.append(str(c))
            elif c < 0:
                parts.append(f"- {-c}")
            else:
                parts.append(f"+ {c}")
        return " ".join(parts)


class LinSeries:
    """Truncated series whose coefficients are LinExprs.

    Mirrors the TruncSeries conventions: coefficients b^0..b^(prec-1) are
    tracked, equality and products propagate the minimum precision.
    """

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs: Sequence[LinExpr], prec: int):
        if prec < 1:
            raise ValueError("precision must be at least 1")
        cs = list(coeffs)
        if len(cs) > prec:
            raise ValueError("more coefficients than the precision allows")
        cs += [LinExpr(0)] * (prec - len(cs))
        self.coeffs = cs
        self.prec = prec

    @classmethod
    def zero(cls, prec: int) -> "LinSeries":
        return cls([], prec)

    @classmethod
    def from_series(cls, s: TruncSeries) -> "LinSeries":
        return cls([LinExpr.constant(c) for c in s.coeffs()], s.prec)

    @classmethod
    def unknown(cls, system: LinearSystem, name: str, prec: int) -> "LinSeries":
        return cls([system.new_unknown(f"{name}[{m}]") for m in range(prec)], prec)

    def coefficient(self, m: int) -> LinExpr:
        if m < 0:
            return LinExpr(0)
        if m >= self.prec:
            raise IndexError("coefficient beyond tracked precision")
        return self.coeffs[m]

    def _align(self, other: "LinSeries") -> int:
        return min(self.prec, other.prec)

    def __add__(self, other: "LinSeries") -> "LinSeries":
        p = self._align(other)
        return LinSeries([self.coeffs[i] + other.coeffs[i] for i in range(p)], p)

    def __sub__(self, other: "LinSeries") -> "LinSeries":
        p = self._align(other)
        return LinSeries([self.coeffs[i] - other.coeffs[i] for i in range(p)], p)

    def __neg__(self) -> "LinSeries":
        return LinSeries([-c for c in self.coeffs], self.prec)

    def scale(self, c: Rational) -> "LinSeries":
        return LinSeries([x.scale(c) for x in self.coeffs], self.prec)

    def mul_known(self, s: TruncSeries) -> "LinSeries":
        """Product with a fully known series."""
        p = min(self.prec, s.prec)
        known = s.coeffs()
        out = []
        for m in range(p):
            acc = LinExpr(0)
            for i in range(m + 1):
                c = known[i]
                if c != 0:
                    acc = acc + self.coeffs[m - i].scale(c)
            out.append(acc)
        return LinSeries(out, p)

    def shift_up(self, m: int = 1) -> "LinSeries":
        # multiply by b^m; the top m coefficients fall off the window
        return LinSeries([LinExpr(0)] * m + self.coeffs[: self.prec - m], self.prec)

    def shift_down(self, m: int = 1) -> "LinSeries":
        """Drop the first m coefficients (the caller must have imposed that
        they vanish via relations)."""
        if self.prec <= m:
            raise ValueError("not enough precision to shift down")
        return LinSeries(self.coeffs[m:], self.prec - m)

    def derivative(self) -> "LinSeries":
        if self.prec < 2:
            raise ValueError("derivative needs precision at least 2")
        return LinSeries([self.coeffs[i].scale(i) for i in range(1, self.prec)], self.prec - 1)

    def truncate(self, prec: int) -> "LinSeries":
        if prec >= self.prec:
            return self
        return LinSeries(self.coeffs[:prec], prec)

    def materialize(self, system: LinearSystem, values: Dict[int, Fraction]) -> TruncSeries:
        return TruncSeries([system.evaluate(c, values) for c in self.coeffs], self.prec)

    def __repr__(self) -> str:
        return f"LinSeries(prec={self.prec})"


def lin_b_ode(system: LinearSystem, c: int, rhs: LinSeries, slot_name: str,
              label: str, constant_label: Optional[str] = None) -> LinSeries:
    """Solve b*T' - c*T = rhs with LinExpr coefficients.

    Coefficient m of T is rhs_m / (m - c) away from m = c.  At m = c the
    right-hand side coefficient becomes a relation and the T coefficient a
    fresh unknown (the slot).  Slot and relation only exist when the slot
    index falls inside the precision window.  When constant_label is given
    and the constant coefficient is determined (c != 0), its value is
    recorded as a snapshot event before any later relation fires.
    """
    out: List[LinExpr] = []
    for m in range(rhs.prec):
        if m == c:
            system.add_relation(rhs.coefficient(m), f"{label}, coefficient of b^{m}")
            out.append(system.new_unknown(slot_name))
        else:
            expr = rhs.coefficient(m).scale(Fraction(1, m - c))
            if m == 0 and constant_label is not None:
                system.record_value(constant_label, expr)
            out.append(expr)
    return LinSeries(out, rhs.prec)
