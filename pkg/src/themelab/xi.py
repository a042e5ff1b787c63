"""Logarithmic model spaces for a fixed exponent class.

``XiElement`` represents sum_j c_j(b) * e_j where e_j stands for the germ
s^(lam-1) * (Log s)^j / j! and lam is the class representative in (0, 1].
The a-action is

    a(c e_j) = (lam*b*c + b^2*c') e_j + b*c e_(j-1),

so a raises the s-power by one and costs one unit of series precision.  The
b-action multiplies every component by b.  Elements keep one uniform
precision across components.

``solve_shifted_inverse`` inverts a - (lam+q)*b on right-hand sides with all
components of valuation >= 1.  The solution acquires one more log level; the
coefficient of b^q in each level is not determined by the equation at that
level but by the level below, leaving exactly one free slot overall:

* ``normalization="kernel"`` pins the free slot at log level 0 to zero and is
  total on valuation >= 1 inputs;
* ``normalization="hyperplane"`` instead pins the slot at the input's top log
  level to zero, which is only possible when the forced value there vanishes
  (``NotSolvable`` otherwise).
"""

import math
from fractions import Fraction

from .errors import NotSolvable, PrecisionError, PrecisionExhausted
from .series import TruncSeries, as_rational


def lambda_class(mu):
    """Split mu = lam + m with lam in (0, 1] and m a nonnegative-free integer."""
    mu = as_rational(mu)
    m = math.ceil(mu - 1)
    return mu - m, m


class XiElement:
    __slots__ = ("lam", "comps")

    def __init__(self, lam, comps):
        self.lam = as_rational(lam)
        comps = tuple(comps)
        if not comps:
            raise ValueError("element needs at least one log level")
        p = min(c.prec for c in comps)
        self.comps = tuple(c.truncate(p) for c in comps)

    @classmethod
    def zero(cls, lam, N, prec):
        return cls(lam, tuple(TruncSeries.zero(prec) for _ in range(N + 1)))

    @classmethod
    def basis(cls, lam, j, N, prec):
        """The basis germ e_j inside log depth N."""
        if not 0 <= j <= N:
            raise ValueError(f"log level {j} outside 0..{N}")
        comps = [TruncSeries.zero(prec) for _ in range(N + 1)]
        comps[j] = TruncSeries.one(prec)
        return cls(lam, comps)

    @property
    def N(self):
        return len(self.comps) - 1

    @property
    def prec(self):
        return self.comps[0].prec

    def component(self, j):
        if 0 <= j <= self.N:
            return self.comps[j]
        return TruncSeries.zero(self.prec)

    def coefficient(self, j, m):
        return self.component(j).coefficient(m)

    def is_zero(self):
        return all(c.is_zero() for c in self.comps)

    def _same_class(self, other):
        if self.lam != other.lam:
            raise ValueError(
                f"mixed exponent classes {self.lam} and {other.lam}"
            )

    def _padded(self, n, prec):
        pad = (TruncSeries.zero(prec),) * (n - len(self.comps))
        return tuple(c.truncate(prec) for c in self.comps) + pad

    def __add__(self, other):
        self._same_class(other)
        n = max(len(self.comps), len(other.comps))
        p = min(self.prec, other.prec)
        return XiElement(
            self.lam,
            tuple(x + y for x, y in zip(self._padded(n, p), other._padded(n, p))),
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return XiElement(self.lam, tuple(-c for c in self.comps))

    def scale(self, c):
        c = as_rational(c)
        return XiElement(self.lam, tuple(x * c for x in self.comps))

    __mul__ = scale
    __rmul__ = scale

    def mul_series(self, series):
        return XiElement(self.lam, tuple(series * c for c in self.comps))

    def b_mul(self, m=1):
        return XiElement(self.lam, tuple(c.shift_up(m) for c in self.comps))

    def a_apply(self):
        """Multiplication by s; result precision drops by one."""
        if self.prec < 2:
            raise PrecisionError("a-action needs prec >= 2")
        p = self.prec - 1
        out = []
        for i, c in enumerate(self.comps):
            term = (c.shift_up(1) * self.lam + c.derivative().shift_up(2)).truncate(p)
            above = self.component(i + 1)
            if not above.is_zero():
                term = term + above.shift_up(1).truncate(p)
            out.append(term)
        return XiElement(self.lam, out)

    def truncate(self, n):
        return XiElement(self.lam, tuple(c.truncate(n) for c in self.comps))

    def pad_log(self, N):
        """Extend with zero components up to log depth N."""
        if N < self.N:
            raise ValueError("pad_log cannot drop components")
        return XiElement(self.lam, self._padded(N + 1, self.prec))

    def __eq__(self, other):
        if not isinstance(other, XiElement):
            return NotImplemented
        if self.lam != other.lam:
            return False
        n = max(len(self.comps), len(other.comps))
        p = min(self.prec, other.prec)
        return all(
            x == y for x, y in zip(self._padded(n, p), other._padded(n, p))
        )

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"e{j}: {c.to_literal()}" for j, c in enumerate(self.comps))
        return f"XiElement(lam={self.lam}, [{body}], prec={self.prec})"


def power_monomial(mu, j, N, prec):
    """The germ s^(mu-1) * (Log s)^j / j! inside log depth N.

    mu must exceed its class representative by a nonnegative integer; the
    element is produced by applying a to the class-level basis germ, so the
    requested precision is exact.
    """
    lam, m = lambda_class(mu)
    if m < 0:
        raise ValueError(f"exponent {mu} below its class representative")
    x = XiElement.basis(lam, j, N, prec + m)
    for _ in range(m):
        x = x.a_apply()
    return x


def solve_shifted_inverse(y, q, normalization="hyperplane"):
    """Solve (a - (lam+q) b) x = y for x one log level above y.

    y must have every component of valuation >= 1.  q is a nonnegative
    integer offset against the class representative.  The result has
    precision y.prec - 1.
    """
    if normalization not in ("hyperplane", "kernel"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if q < 0 or int(q) != q:
        raise ValueError("shift offset must be a nonnegative integer")
    q = int(q)
    P = y.prec
    if P < 2:
        raise PrecisionError("solve needs prec >= 2")
    if q + 1 >= P:
        raise PrecisionExhausted(
            f"shift offset {q} needs prec > {q + 1}, have {P}"
        )
    for i, c in enumerate(y.comps):
        if c.coefficient(0) != 0:
            raise NotSolvable(
                f"component {i} has nonzero constant term; "
                "right-hand side must lie in b times the model space"
            )
    N = y.N
    yc = [c.coeffs() for c in y.comps]
    out_prec = P - 1
    zero = Fraction(0)

    xs = [[zero] * out_prec for _ in range(N + 2)]
    xs[N + 1][q] = yc[N][q + 1]
    for i in range(N, -1, -1):
        for m in range(out_prec):
            if m == q:
                continue
            xs[i][m] = (yc[i][m + 1] - xs[i + 1][m]) / (m - q)
        if i == 0:
            xs[0][q] = zero
        elif normalization == "hyperplane" and i == N:
            forced = yc[N - 1][q + 1]
            if forced != 0:
                raise NotSolvable(
                    "right-hand side is outside the image of the normalized "
                    f"solver: forced b^{q} coefficient {forced} at top log "
                    "level cannot be zeroed"
                )
            xs[N][q] = zero
        else:
            xs[i][q] = yc[i - 1][q + 1]
    comps = [TruncSeries(row, out_prec) for row in xs]
    return XiElement(y.lam, comps)


def quotient_drop_log0(x):
    """Image in the quotient by the log-free part: drop level 0, reindex."""
    if x.N < 1:
        raise ValueError("quotient needs at least two log levels")
    return XiElement(x.lam, x.comps[1:])
