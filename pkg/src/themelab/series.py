"""Truncated power series in b with exact rational coefficients.

A ``TruncSeries`` knows its coefficients for b^0 .. b^(prec-1) exactly and
nothing beyond: indices >= prec are *unknown*, not zero.  Every operation
propagates the weakest precision of its operands, so a result's ``prec`` is
always a certificate of how far its coefficients can be trusted.

Conventions fixed here and relied on everywhere else:

* add/sub/mul: result prec = min of operand precs;
* derivative: prec drops by 1 (needs prec >= 2);
* multiplication by b (``shift_up``) keeps prec and forgets the top term;
* exact division by b^m (``shift_down``) needs m known-zero leading
  coefficients and yields prec - m;
* inversion needs a nonzero constant term (``NotAUnit``) and keeps prec;
* equality compares up to the smaller prec.
"""

from fractions import Fraction

from ._backend import kernel as _K
from .errors import (
    NotAUnit,
    NotDivisible,
    PrecisionError,
    PrecisionExceeded,
)

DEFAULT_PREC = 32

Rational = Fraction


def as_rational(value):
    """Coerce an int, Fraction, or literal like '3/2' to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


class TruncSeries:
    __slots__ = ("_n", "_d", "_prec")

    def __init__(self, coeffs=(), prec=DEFAULT_PREC):
        if prec < 1:
            raise PrecisionError(f"prec must be >= 1, got {prec}")
        vals = [as_rational(c) for c in coeffs]
        if len(vals) > prec:
            raise ValueError(f"{len(vals)} coefficients exceed prec {prec}")
        vals.extend([Fraction(0)] * (prec - len(vals)))
        self._n = tuple(c.numerator for c in vals)
        self._d = tuple(c.denominator for c in vals)
        self._prec = prec

    @classmethod
    def _raw(cls, nums, dens, prec):
        obj = cls.__new__(cls)
        obj._n = tuple(nums)
        obj._d = tuple(dens)
        obj._prec = prec
        return obj

    @classmethod
    def zero(cls, prec=DEFAULT_PREC):
        return cls((), prec)

    @classmethod
    def one(cls, prec=DEFAULT_PREC):
        return cls((1,), prec)

    @classmethod
    def constant(cls, c, prec=DEFAULT_PREC):
        return cls((c,), prec)

    @classmethod
    def monomial(cls, c, m, prec=DEFAULT_PREC):
        """The series c * b^m."""
        if not 0 <= m < prec:
            raise PrecisionError(f"monomial degree {m} outside prec {prec}")
        coeffs = [Fraction(0)] * m + [as_rational(c)]
        return cls(coeffs, prec)

    @classmethod
    def b(cls, prec=DEFAULT_PREC):
        return cls.monomial(1, 1, prec)

    @property
    def prec(self):
        return self._prec

    def coefficient(self, m):
        if m < 0:
            return Fraction(0)
        if m >= self._prec:
            raise PrecisionExceeded(
                f"coefficient of b^{m} unknown at prec {self._prec}"
            )
        return Fraction(self._n[m], self._d[m])

    def coeffs(self):
        return tuple(Fraction(n, d) for n, d in zip(self._n, self._d))

    def constant_term(self):
        return Fraction(self._n[0], self._d[0])

    def valuation(self):
        """Index of the first nonzero known coefficient, None if zero to prec."""
        for m, n in enumerate(self._n):
            if n:
                return m
        return None

    def is_zero(self):
        return self.valuation() is None

    def is_unit(self):
        return self._n[0] != 0

    def truncate(self, n):
        if n > self._prec:
            raise PrecisionExceeded(f"cannot extend prec {self._prec} to {n}")
        if n == self._prec:
            return self
        return TruncSeries._raw(self._n[:n], self._d[:n], n)

    def _align(self, other):
        p = min(self._prec, other._prec)
        return self.truncate(p), other.truncate(p), p

    def __add__(self, other):
        if isinstance(other, TruncSeries):
            a, b, p = self._align(other)
            n, d = _K.v_add(a._n, a._d, b._n, b._d)
            return TruncSeries._raw(n, d, p)
        c = as_rational(other)
        return self + TruncSeries.constant(c, self._prec)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TruncSeries):
            a, b, p = self._align(other)
            n, d = _K.v_sub(a._n, a._d, b._n, b._d)
            return TruncSeries._raw(n, d, p)
        return self + (-as_rational(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        n, d = _K.v_neg(self._n, self._d)
        return TruncSeries._raw(n, d, self._prec)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            a, b, p = self._align(other)
            n, d = _K.v_mul(a._n, a._d, b._n, b._d, p)
            return TruncSeries._raw(n, d, p)
        c = as_rational(other)
        n, d = _K.v_scale(self._n, self._d, c.numerator, c.denominator)
        return TruncSeries._raw(n, d, self._prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            v = other.valuation()
            if v is None:
                raise NotAUnit("division by a series that is zero to prec")
            if v == 0:
                return self * other.invert()
            return self.shift_down(v) * other.shift_down(v).invert()
        c = as_rational(other)
        if c == 0:
            raise ZeroDivisionError("division by zero rational")
        return self * (Fraction(1) / c)

    def shift_up(self, m=1):
        """Multiply by b^m; prec is preserved, the top m terms are forgotten."""
        if m < 0:
            raise ValueError("shift_up needs m >= 0")
        if m == 0:
            return self
        keep = max(self._prec - m, 0)
        n = (0,) * min(m, self._prec) + self._n[:keep]
        d = (1,) * min(m, self._prec) + self._d[:keep]
        return TruncSeries._raw(n, d, self._prec)

    def shift_down(self, m=1):
        """Exact division by b^m; requires m known-zero leading coefficients."""
        if m < 0:
            raise ValueError("shift_down needs m >= 0")
        if m == 0:
            return self
        if m >= self._prec:
            raise PrecisionError(f"cannot divide by b^{m} at prec {self._prec}")
        if any(self._n[:m]):
            raise NotDivisible(f"valuation below {m}")
        return TruncSeries._raw(self._n[m:], self._d[m:], self._prec - m)

    def derivative(self):
        if self._prec < 2:
            raise PrecisionError("derivative needs prec >= 2")
        n, d = _K.v_deriv(self._n, self._d)
        return TruncSeries._raw(n, d, self._prec - 1)

    def invert(self):
        if self._n[0] == 0:
            raise NotAUnit("constant term is zero")
        n, d = _K.v_invert(self._n, self._d, self._prec)
        return TruncSeries._raw(n, d, self._prec)

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            p = min(self._prec, other._prec)
            return (
                self._n[:p] == other._n[:p] and self._d[:p] == other._d[:p]
            )
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self == TruncSeries.constant(c, self._prec)

    __hash__ = None

    def to_literal(self, var="b"):
        """Render like '1 - 3/2*b + b^4'; '0' when zero to prec."""
        parts = []
        for m, (n, d) in enumerate(zip(self._n, self._d)):
            if n == 0:
                continue
            c = Fraction(n, d)
            mag = -c if c < 0 else c
            if m == 0:
                body = str(mag)
            else:
                power = var if m == 1 else f"{var}^{m}"
                body = power if mag == 1 else f"{mag}*{power}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"

    def __str__(self):
        return f"{self.to_literal()} + O(b^{self._prec})"

    def __repr__(self):
        return f"TruncSeries({self})"
