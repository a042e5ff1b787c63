"""The noncommutative operator algebra generated by a and b.

Elements are kept in normal form sum_i c_i(b) * a^i with the c_i truncated
series.  The single defining relation a*b - b*a = b^2 gives the rewrite rule

    a * c(b) = c(b) * a + b^2 * c'(b),

iterated through theta(c) = b^2 * c', so that

    a^i * c(b) = sum_m binom(i, m) * theta^m(c) * a^(i-m).

Multiplication costs one unit of series precision per a-degree of the left
factor (each theta application differentiates once).

``HomogeneousOperator`` models the graded elements sum_j c_j b^(k-j) a^j with
exact rational c_j.  Writing u = b^(-1) a, such an element is b^k * p(u) with
p in the rising-factorial basis, and a - mu*b = b * (u - mu) with the shift
rule u * b = b * (u + 1).  That turns right division and factorization into
exact polynomial algebra over the rationals.
"""

from fractions import Fraction
from math import comb, isqrt

from .errors import FactorizationFailed
from .series import TruncSeries, as_rational


def theta(series):
    """b^2 * d/db; drops one unit of precision."""
    return series.derivative().shift_up(2)


class OreOperator:
    """Normal-form operator sum_i coeffs[i](b) * a^i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("operator needs at least one coefficient")
        p = min(c.prec for c in coeffs)
        self.coeffs = tuple(c.truncate(p) for c in coeffs)

    @classmethod
    def from_series(cls, series):
        return cls((series,))

    @classmethod
    def identity(cls, prec):
        return cls((TruncSeries.one(prec),))

    @classmethod
    def a(cls, prec):
        return cls((TruncSeries.zero(prec), TruncSeries.one(prec)))

    @classmethod
    def a_minus(cls, mu, prec):
        """The operator a - mu*b."""
        return cls(
            (TruncSeries.monomial(-as_rational(mu), 1, prec), TruncSeries.one(prec))
        )

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def prec(self):
        return self.coeffs[0].prec

    def _padded(self, n):
        p = self.prec
        pad = (TruncSeries.zero(p),) * (n - len(self.coeffs))
        return self.coeffs + pad

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return OreOperator(
            tuple(x + y for x, y in zip(self._padded(n), other._padded(n)))
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return OreOperator(tuple(-c for c in self.coeffs))

    def scale(self, c):
        return OreOperator(tuple(x * c for x in self.coeffs))

    def mul_series_left(self, series):
        """series(b) * self."""
        return OreOperator(tuple(series * c for c in self.coeffs))

    def __mul__(self, other):
        """Operator composition self * other in normal form.

        Result precision is self.prec - self.degree (theta chains), capped
        by other.prec.
        """
        if not isinstance(other, OreOperator):
            return self.scale(other)
        deg_l = self.degree
        out_prec = min(self.prec - deg_l, other.prec)
        n = deg_l + other.degree + 1
        acc = [TruncSeries.zero(out_prec) for _ in range(n)]
        for j, d in enumerate(other.coeffs):
            # theta^m(d) for m = 0..deg_l
            powers = [d]
            for _ in range(deg_l):
                powers.append(theta(powers[-1]))
            for i, c in enumerate(self.coeffs):
                if c.is_zero():
                    continue
                for m in range(i + 1):
                    term = (c * powers[m]).truncate(out_prec)
                    if m > 0:
                        term = term * comb(i, m)
                    k = i - m + j
                    acc[k] = acc[k] + term
        return OreOperator(tuple(acc))

    __rmul__ = scale

    def apply(self, x):
        """Apply to any element exposing a_apply() and mul_series()."""
        acc = None
        pw = x
        for i, c in enumerate(self.coeffs):
            if i:
                pw = pw.a_apply()
            term = pw.mul_series(c)
            acc = term if acc is None else acc + term
        return acc

    def __eq__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(x == y for x, y in zip(self._padded(n), other._padded(n)))

    __hash__ = None

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = c.to_literal()
            if i > 0:
                power = "a" if i == 1 else f"a^{i}"
                body = f"({body})*{power}" if " " in body or body != "1" else power
            parts.append(body)
        core = " + ".join(parts) if parts else "0"
        return f"OreOperator({core}, prec={self.prec})"


def ore_apply(op, x):
    return op.apply(x)


# ---------------------------------------------------------------------------
# exact polynomial helpers over Fraction (monomial coefficient lists, low
# degree first)


def _poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_divlin(p, r):
    """Divide p by (x - r); returns (quotient, remainder)."""
    quot = [Fraction(0)] * (len(p) - 1)
    acc = Fraction(0)
    for i in range(len(p) - 1, 0, -1):
        acc = acc * r + p[i]
        quot[i - 1] = acc
    rem = acc * r + p[0]
    return quot, rem


def _poly_shift(p, s):
    """p(x + s) by binomial expansion."""
    out = [Fraction(0)] * len(p)
    for i, c in enumerate(p):
        if not c:
            continue
        pw = Fraction(1)
        for m in range(i, -1, -1):
            out[m] += c * comb(i, m) * pw
            pw *= s
    return out


def _divisors(n, cap=200000):
    n = abs(n)
    if n == 0:
        return [1]
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            out.append(n // d)
            if len(out) > cap:
                raise FactorizationFailed(
                    "coefficient too composite for rational root search"
                )
    return sorted(set(out))


def _rational_roots(p):
    """All rational roots (with multiplicity) of p over Q, largest first."""
    # clear denominators to an integer polynomial
    from math import lcm

    den = 1
    for c in p:
        den = lcm(den, c.denominator)
    ip = [int(c * den) for c in p]
    low = 0
    while low < len(ip) and ip[low] == 0:
        low += 1
    roots = [Fraction(0)] * low
    ip = ip[low:]
    if len(ip) <= 1:
        return sorted(roots, reverse=True)
    if abs(ip[0]) > 10**15 or abs(ip[-1]) > 10**15:
        raise FactorizationFailed("coefficients exceed the root-search bound")
    cands = set()
    for num in _divisors(ip[0]):
        for den_ in _divisors(ip[-1]):
            cands.add(Fraction(num, den_))
            cands.add(Fraction(-num, den_))
    work = [Fraction(c) for c in ip]
    for r in sorted(cands, reverse=True):
        while len(work) > 1 and _poly_eval(work, r) == 0:
            work, _ = _poly_divlin(work, r)
            roots.append(r)
    return sorted(roots, reverse=True)


class HomogeneousOperator:
    """Graded operator sum_j c_j * b^(k-j) * a^j with exact rational c_j."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = tuple(as_rational(x) for x in c)
        if not self.c or self.c[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self):
        return len(self.c) - 1

    def u_polynomial(self):
        """Monomial coefficients of p(u) with self = b^k * p(u)."""
        out = [Fraction(0)]
        rising = [Fraction(1)]
        for j, cj in enumerate(self.c):
            if j > 0:
                rising = _poly_mul(rising, [Fraction(j - 1), Fraction(1)])
            if cj:
                padded = out + [Fraction(0)] * (len(rising) - len(out))
                for i, r in enumerate(rising):
                    padded[i] += cj * r
                out = padded
        out += [Fraction(0)] * (self.degree + 1 - len(out))
        return out

    @classmethod
    def from_u_polynomial(cls, p):
        """Inverse of u_polynomial: monomial p(u) -> rising-basis coefficients."""
        work = list(p)
        c = []
        j = 0
        while len(work) > 1:
            c.append(_poly_eval(work, Fraction(-j)))
            work[0] -= c[-1]
            work, rem = _poly_divlin(work, Fraction(-j))
            if rem != 0:
                raise ValueError("not exactly divisible in rising basis")
            j += 1
        c.append(work[0])
        return cls(c)

    @classmethod
    def from_exponents(cls, mus):
        """Product (a - mu_1 b)(a - mu_2 b)...(a - mu_k b), left to right."""
        mus = [as_rational(m) for m in mus]
        k = len(mus)
        p = [Fraction(1)]
        for j, mu in enumerate(mus, start=1):
            root = mu - (k - j)
            p = _poly_mul(p, [-root, Fraction(1)])
        return cls.from_u_polynomial(p)

    def to_ore(self, prec):
        k = self.degree
        coeffs = []
        for j, cj in enumerate(self.c):
            coeffs.append(TruncSeries.monomial(cj, k - j, prec) if cj else TruncSeries.zero(prec))
        return OreOperator(tuple(coeffs))

    def right_divide(self, mu):
        """Split self = Q * (a - mu*b) + rem * b^k; returns (Q, rem)."""
        mu = as_rational(mu)
        p = self.u_polynomial()
        rem = _poly_eval(p, mu)
        p = list(p)
        p[0] -= rem
        quot, _ = _poly_divlin(p, mu)
        quot = _poly_shift(quot, Fraction(-1))
        return HomogeneousOperator.from_u_polynomial(quot), rem

    def exponents(self):
        """Factor into (a - mu_1 b)...(a - mu_k b); returns [mu_1..mu_k].

        Peels the rightmost factor first, always taking the largest rational
        root of the current u-polynomial; raises FactorizationFailed when a
        stage has no rational root.
        """
        k = self.degree
        p = self.u_polynomial()
        lead = p[-1]
        if lead != 1:
            p = [x / lead for x in p]
        mus = []
        for _ in range(k):
            roots = _rational_roots(p)
            if not roots:
                raise FactorizationFailed(
                    "no rational first-order factor at this stage"
                )
            mu = roots[0]
            mus.append(mu)
            p[0] -= _poly_eval(p, mu)
            p, _ = _poly_divlin(p, mu)
            p = _poly_shift(p, Fraction(-1))
        mus.reverse()
        return mus

    def __eq__(self, other):
        if not isinstance(other, HomogeneousOperator):
            return NotImplemented
        return self.c == other.c

    __hash__ = None

    def __repr__(self):
        k = self.degree
        parts = []
        for j in range(k, -1, -1):
            cj = self.c[j]
            if cj == 0:
                continue
            factors = []
            if abs(cj) != 1 or (j == 0 and k == 0):
                factors.append(str(abs(cj)))
            if k - j == 1:
                factors.append("b")
            elif k - j > 1:
                factors.append(f"b^{k - j}")
            if j == 1:
                factors.append("a")
            elif j > 1:
                factors.append(f"a^{j}")
            body = "*".join(factors) if factors else "1"
            if not parts:
                parts.append(body if cj > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if cj > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"


def bernstein_polynomial(mus):
    """Monomial coefficients of prod_j (x + mu_j), constant term first."""
    p = [Fraction(1)]
    for mu in mus:
        p = _poly_mul(p, [as_rational(mu), Fraction(1)])
    return tuple(p)
