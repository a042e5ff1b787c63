"""Theme presentations, canonical families, and the bridge to the Xi model.

A rank-k theme is presented by its fundamental invariants (lambda_1 and the
integer offsets p_1..p_{k-1}) together with unit relation series R_j: the
basis e_1..e_k satisfies

    (a - lambda_1*b) e_1 = 0,      (a - lambda_{j+1}*b) e_{j+1} = R_j e_j,

with lambda_{j+1} = lambda_j + p_j - 1.  Presentations make the sub/quotient
towers and operator application exact and cheap; embed_into_xi realizes the
presentation inside the log-expansion model when a generator is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    InvalidCanonicalPoint,
    NotDivisible,
    NotThematic,
    PrecisionExhausted,
    WrongInvariants,
)
from .ore import HomogeneousOperator, OreOperator
from .series import DEFAULT_PREC, Rational, TruncSeries, as_rational
from .xi import XiElement, lambda_class, power_monomial, solve_shifted_inverse


def rising_product(start: Rational, n: int) -> Fraction:
    """start * (start+1) * ... * (start+n-1), exact; 1 for n = 0."""
    acc = Fraction(1)
    s = as_rational(start)
    for i in range(n):
        acc *= s + i
    return acc


def log_free_constant(lambda1: Rational, p: int) -> Fraction:
    """The constant attached to the log-free part of the rank-2 normal form.

    Equals -(1/p) * (lambda1-1) * lambda1 * ... * (lambda1+p-2); requires
    p >= 1.
    """
    if p < 1:
        raise ValueError("the constant is only defined for p >= 1")
    return -rising_product(as_rational(lambda1) - 1, p) / p


@dataclass(frozen=True)
class FundamentalInvariants:
    """(lambda_1, p_1..p_{k-1}) with lambda_{j+1} = lambda_j + p_j - 1."""

    lambda1: Fraction
    p: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambda1", as_rational(self.lambda1))
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if self.lambda1 <= 0:
            raise ValueError("lambda_1 must be positive")
        if any(x < 0 for x in self.p):
            raise ValueError("the offsets p_j must be non-negative")

    @property
    def k(self) -> int:
        return len(self.p) + 1

    @property
    def lambdas(self) -> Tuple[Fraction, ...]:
        out = [self.lambda1]
        for pj in self.p:
            out.append(out[-1] + pj - 1)
        return tuple(out)

    @property
    def lam(self) -> Fraction:
        """Class representative in (0, 1] shared by every lambda_j."""
        return lambda_class(self.lambda1)[0]


@dataclass(frozen=True)
class CanonicalSpace:
    """Coordinate description of the canonical parameter space.

    supports[j-1] lists the allowed b-exponents of S_j, q[j-1] is the extra
    top exponent (None when the tail offsets cannot reach k-j), and the
    space is isomorphic to C^affine_dim x (C*)^torus_dim.
    """

    invariants: FundamentalInvariants
    supports: Tuple[Tuple[int, ...], ...]
    q: Tuple[Optional[int], ...]
    torus_dim: int
    affine_dim: int

    @property
    def shape(self) -> str:
        parts = []
        if self.torus_dim == 1:
            parts.append("C*")
        elif self.torus_dim > 1:
            parts.append(f"(C*)^{self.torus_dim}")
        if self.affine_dim == 1:
            parts.append("C")
        elif self.affine_dim > 1:
            parts.append(f"C^{self.affine_dim}")
        return " x ".join(parts) if parts else "point"


def canonical_space(inv: FundamentalInvariants) -> CanonicalSpace:
    """Exponent supports and product shape of the canonical family's base."""
    k = inv.k
    if inv.lambda1 <= k - 1:
        raise InvalidCanonicalPoint(
            f"lambda_1 = {inv.lambda1} must exceed k - 1 = {k - 1}")
    supports: List[Tuple[int, ...]] = []
    qs: List[Optional[int]] = []
    torus = 0
    affine = 0
    for j in range(1, k):
        pj = inv.p[j - 1]
        support = set(range(k - j))
        q: Optional[int] = None
        acc = 0
        for h in range(j, k):
            acc += inv.p[h - 1]
            if acc >= k - j:
                q = acc
                break
        if q is not None:
            support.add(q)
        support_t = tuple(sorted(support))
        supports.append(support_t)
        qs.append(q)
        free = len(support_t) - 1  # the b^0 coefficient is pinned to 1
        if pj >= 1:
            torus += 1  # the b^{p_j} coordinate must stay non-zero
            affine += free - 1
        else:
            affine += free
    return CanonicalSpace(inv, tuple(supports), tuple(qs), torus, affine)


@dataclass(frozen=True)
class CanonicalPoint:
    """A choice of relation series inside the canonical space.

    coeffs[j-1] maps b-exponents (>= 1) to the coefficients of S_j; the
    constant term is always 1.  Exact data, materialized at any precision.
    """

    invariants: FundamentalInvariants
    coeffs: Tuple[Tuple[Tuple[int, Fraction], ...], ...]

    def series(self, j: int, prec: int) -> TruncSeries:
        data = [Fraction(0)] * prec
        data[0] = Fraction(1)
        for e, c in self.coeffs[j - 1]:
            if e < prec:
                data[e] = c
        return TruncSeries(data, prec)

    def all_series(self, prec: int) -> Tuple[TruncSeries, ...]:
        return tuple(self.series(j, prec) for j in range(1, self.invariants.k))


def canonical_point(inv: FundamentalInvariants,
                    coeffs: Sequence[Dict[int, Rational]]) -> CanonicalPoint:
    """Validate coefficient data against the canonical-space constraints."""
    space = canonical_space(inv)
    k = inv.k
    if len(coeffs) != k - 1:
        raise InvalidCanonicalPoint(f"expected {k - 1} coefficient maps")
    packed = []
    for j in range(1, k):
        data = {int(e): as_rational(c) for e, c in coeffs[j - 1].items()}
        support = set(space.supports[j - 1])
        for e, c in data.items():
            if e == 0:
                raise InvalidCanonicalPoint("the constant term is pinned to 1")
            if c != 0 and e not in support:
                raise InvalidCanonicalPoint(
                    f"S_{j} may not carry b^{e}; allowed exponents {sorted(support)}")
        pj = inv.p[j - 1]
        if pj >= 1 and data.get(pj, Fraction(0)) == 0:
            raise InvalidCanonicalPoint(
                f"the b^{pj} coefficient of S_{j} must be non-zero")
        packed.append(tuple(sorted((e, c) for e, c in data.items() if c != 0)))
    return CanonicalPoint(inv, tuple(packed))


class ThemePresentation:
    """Rank-k theme given by invariants and unit relation series R_1..R_{k-1}."""

    __slots__ = ("lambda1", "p", "relations", "prec")

    def __init__(self, lambda1: Rational, p: Sequence[int],
                 relations: Sequence[TruncSeries], prec: Optional[int] = None):
        self.lambda1 = as_rational(lambda1)
        self.p = tuple(int(x) for x in p)
        if len(relations) != len(self.p):
            raise ValueError("one relation series per offset p_j")
        if relations:
            common = min(r.prec for r in relations)
        else:
            common = prec if prec is not None else DEFAULT_PREC
        if prec is not None:
            common = min(common, prec)
        if common < 2:
            raise ValueError("presentations need precision at least 2")
        rels = tuple(r.truncate(common) for r in relations)
        for i, r in enumerate(rels):
            if r.constant_term() == 0:
                raise ValueError(f"relation series R_{i + 1} must be a unit")
        self.relations = rels
        self.prec = common

    @property
    def k(self) -> int:
        return len(self.p) + 1

    @property
    def invariants(self) -> FundamentalInvariants:
        return FundamentalInvariants(self.lambda1, self.p)

    @property
    def lambdas(self) -> Tuple[Fraction, ...]:
        return self.invariants.lambdas

    @property
    def lam(self) -> Fraction:
        return self.invariants.lam

    def relation(self, j: int) -> TruncSeries:
        """R_j for 1 <= j <= k-1."""
        return self.relations[j - 1]

    def normalized(self) -> "ThemePresentation":
        """Scale each R_j to constant term 1 (an isomorphic presentation)."""
        return ThemePresentation(
            self.lambda1, self.p,
            [r * (Fraction(1) / r.constant_term()) for r in self.relations],
            self.prec)

    def subtheme(self, j: int) -> "ThemePresentation":
        """The normal rank-j sub-theme spanned by e_1..e_j."""
        if not 1 <= j <= self.k:
            raise ValueError("subtheme index out of range")
        return ThemePresentation(self.lambda1, self.p[: j - 1],
                                 self.relations[: j - 1], self.prec)

    def quotient(self, j: int) -> "ThemePresentation":
        """The quotient by the rank-j sub-theme, on classes of e_{j+1}..e_k."""
        if not 0 <= j < self.k:
            raise ValueError("quotient index out of range")
        return ThemePresentation(self.lambdas[j], self.p[j:],
                                 self.relations[j:], self.prec)

    def zero(self, prec: Optional[int] = None) -> "ThemeElement":
        prec = self.prec if prec is None else prec
        return ThemeElement(self, [TruncSeries.zero(prec)] * self.k)

    def basis(self, j: int, prec: Optional[int] = None) -> "ThemeElement":
        """The basis element e_j, 1-indexed."""
        prec = self.prec if prec is None else prec
        comps = [TruncSeries.zero(prec) for _ in range(self.k)]
        comps[j - 1] = TruncSeries.one(prec)
        return ThemeElement(self, comps)

    def element(self, comps: Sequence[TruncSeries]) -> "ThemeElement":
        return ThemeElement(self, comps)

    def annihilator(self) -> OreOperator:
        """P = (a - lambda_1 b) R_1^{-1} ... R_{k-1}^{-1} (a - lambda_k b)."""
        lams = self.lambdas
        op = OreOperator.a_minus(lams[-1], self.prec)
        for j in range(self.k - 1, 0, -1):
            inv_r = self.relations[j - 1].truncate(op.prec).invert()
            op = op.mul_series_left(inv_r)
            op = OreOperator.a_minus(lams[j - 1], op.prec) * op
        return op

    def residual(self, x: "ThemeElement") -> "ThemeElement":
        """Apply the annihilator to x factor by factor."""
        z = x
        lams = self.lambdas
        for j in range(self.k, 1, -1):
            z = z.apply_a_minus(lams[j - 1])
            z = z.mul_series(self.relations[j - 2].truncate(z.prec).invert())
        return z.apply_a_minus(lams[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThemePresentation):
            return NotImplemented
        return (self.lambda1 == other.lambda1 and self.p == other.p
                and all(a == b for a, b in zip(self.relations, other.relations)))

    __hash__ = None

    def __repr__(self) -> str:
        return (f"ThemePresentation(lambda1={self.lambda1}, p={self.p}, "
                f"prec={self.prec})")


class ThemeElement:
    """Element sum_j c_j(b) e_j of a presented theme."""

    __slots__ = ("theme", "comps")

    def __init__(self, theme: ThemePresentation, comps: Sequence[TruncSeries]):
        if len(comps) != theme.k:
            raise ValueError("one coefficient series per basis element")
        prec = min(c.prec for c in comps)
        self.theme = theme
        self.comps = tuple(c.truncate(prec) for c in comps)

    @property
    def prec(self) -> int:
        return self.comps[0].prec

    def component(self, j: int) -> TruncSeries:
        """Coefficient series of e_j, 1-indexed."""
        return self.comps[j - 1]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def _peer(self, other: "ThemeElement") -> None:
        if self.theme is not other.theme and self.theme != other.theme:
            raise ValueError("elements belong to different presentations")

    def __add__(self, other: "ThemeElement") -> "ThemeElement":
        self._peer(other)
        return ThemeElement(self.theme,
                            [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "ThemeElement") -> "ThemeElement":
        self._peer(other)
        return ThemeElement(self.theme,
                            [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "ThemeElement":
        return ThemeElement(self.theme, [-c for c in self.comps])

    def scale(self, c: Rational) -> "ThemeElement":
        c = as_rational(c)
        return ThemeElement(self.theme, [x * c for x in self.comps])

    __mul__ = scale
    __rmul__ = scale

    def mul_series(self, series: TruncSeries) -> "ThemeElement":
        return ThemeElement(self.theme, [c * series for c in self.comps])

    def b_mul(self, m: int = 1) -> "ThemeElement":
        return ThemeElement(self.theme, [c.shift_up(m) for c in self.comps])

    def a_apply(self) -> "ThemeElement":
        """a * (U e_j) = lambda_j b U e_j + b^2 U' e_j + U R_{j-1} e_{j-1}."""
        lams = self.theme.lambdas
        k = self.theme.k
        out = []
        for i in range(k):
            c = self.comps[i]
            term = c.shift_up(1) * lams[i] + c.derivative().shift_up(2)
            if i + 1 < k:
                term = term + self.comps[i + 1] * self.theme.relations[i]
            out.append(term)
        return ThemeElement(self.theme, out)

    def apply_a_minus(self, mu: Rational) -> "ThemeElement":
        applied = self.a_apply()
        shifted = self.b_mul().scale(mu)
        return ThemeElement(self.theme,
                            [a - b for a, b in zip(applied.comps, shifted.comps)])

    def truncate(self, prec: int) -> "ThemeElement":
        return ThemeElement(self.theme, [c.truncate(prec) for c in self.comps])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThemeElement):
            return NotImplemented
        self._peer(other)
        return all(a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def to_literal(self) -> str:
        """Render like "e2 - 5*b*e1"; zero components are omitted."""
        parts: List[Tuple[bool, str]] = []
        for j in range(self.theme.k, 0, -1):
            c = self.comps[j - 1]
            if c.is_zero():
                continue
            nz = [(m, x) for m, x in enumerate(c.coeffs()) if x != 0]
            if len(nz) == 1:
                m, x = nz[0]
                negative = x < 0
                mag = -x if negative else x
                factors = []
                if mag != 1:
                    factors.append(str(mag))
                if m == 1:
                    factors.append("b")
                elif m > 1:
                    factors.append(f"b^{m}")
                factors.append(f"e{j}")
                parts.append((negative, "*".join(factors)))
            else:
                parts.append((False, f"({c.to_literal()})*e{j}"))
        if not parts:
            return "0"
        out = []
        for i, (negative, text) in enumerate(parts):
            if i == 0:
                out.append(f"-{text}" if negative else text)
            else:
                out.append(f"- {text}" if negative else f"+ {text}")
        return " ".join(out)

    def __repr__(self) -> str:
        return f"ThemeElement({self.to_literal()!r}, prec={self.prec})"


def build_theme(sigma: CanonicalPoint, prec: int = DEFAULT_PREC) -> ThemePresentation:
    """Presentation of the canonical theme at a point of the parameter space."""
    inv = sigma.invariants
    return ThemePresentation(inv.lambda1, inv.p, sigma.all_series(prec), prec)


def transform_rank2(E: ThemePresentation, u: Rational, v: Rational,
                    W: TruncSeries) -> ThemePresentation:
    """Rebase a rank-2 presentation along eps_2 = u e_2 + W e_1, eps_1 = v e_1.

    The new relation series is (u S + b^2 W' - (p-1) b W) / v; u and v must
    be non-zero scalars.
    """
    if E.k != 2:
        raise ValueError("transform_rank2 expects a rank-2 presentation")
    u = as_rational(u)
    v = as_rational(v)
    if u == 0 or v == 0:
        raise ValueError("the diagonal scalars must be non-zero")
    p = E.p[0]
    S = E.relations[0]
    S2 = (S * u + W.derivative().shift_up(2) - W.shift_up(1) * (p - 1)) * (Fraction(1) / v)
    return ThemePresentation(E.lambda1, E.p, [S2])


def embed_into_xi(E: ThemePresentation) -> XiElement:
    """A generator of a copy of E inside the log-expansion model.

    Stage construction: seed with the pure power germ for lambda_1, then for
    each relation multiply by R_j and solve the shifted-inverse problem at
    q_j = lambda_{j+1} - lam.  Each stage costs one order of precision; the
    kernel normalization makes the output deterministic (the new top
    coefficient equals the incoming b^{q_j+1} coefficient of the data).

    Output precision is E.prec - (k - 1).
    """
    inv = E.invariants
    lam = inv.lam
    lams = E.lambdas
    k = E.k
    phi = power_monomial(lams[0], 0, 0, E.prec)
    rho = rising_product(lam, int(lams[0] - lam))
    for j in range(1, k):
        q = lams[j] - lam
        if q != int(q) or q < 0:
            raise WrongInvariants(
                f"lambda_{j + 1} = {lams[j]} does not sit above the class {lam}")
        q = int(q)
        y = phi.mul_series(E.relations[j - 1].truncate(phi.prec))
        phi = solve_shifted_inverse(y, q, normalization="kernel")
        if q >= phi.prec:
            raise PrecisionExhausted(
                f"stage {j} top coefficient b^{q} lies beyond precision {phi.prec}")
        rho = rho * E.relations[j - 1].coefficient(E.p[j - 1])
        if phi.coefficient(j, q) != rho:
            raise WrongInvariants(
                f"stage {j} produced top coefficient {phi.coefficient(j, q)}, "
                f"expected {rho}")
        if rho == 0:
            raise WrongInvariants(
                f"relation series R_{j} kills the b^{E.p[j - 1]} coefficient; "
                "the declared invariants are wrong")
    return phi


def xi_residual(E: ThemePresentation, phi: XiElement) -> XiElement:
    """Apply E's annihilator to an element of the log-expansion model."""
    lams = E.lambdas
    z = phi
    for j in range(E.k, 1, -1):
        z = z.a_apply() - z.b_mul().truncate(z.prec - 1).scale(lams[j - 1])
        z = z.mul_series(E.relations[j - 2].truncate(z.prec).invert())
    return z.a_apply() - z.b_mul().truncate(z.prec - 1).scale(lams[0])


def _det(rows: List[List[TruncSeries]]) -> TruncSeries:
    n = len(rows)
    prec = min(s.prec for row in rows for s in row)
    acc = TruncSeries.zero(prec)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n)
                         if perm[i] > perm[j])
        term = TruncSeries.one(prec)
        for i in range(n):
            term = term * rows[i][perm[i]]
        acc = acc + (term if inversions % 2 == 0 else -term)
    return acc


def bernstein_from_generator(phi: XiElement, k: int
                             ) -> Tuple[List[TruncSeries], HomogeneousOperator]:
    """Relation series and Bernstein element of the module generated by phi.

    Solves a^k phi = sum_j S_j a^j phi by Cramer over the series ring: picks
    the k log levels whose minor has the smallest valuation, divides exactly,
    verifies every remaining row, and extracts sigma_j = S_j[k-j].
    """
    if k < 1:
        raise ValueError("rank must be at least 1")
    if phi.prec <= k + 1:
        raise PrecisionExhausted("not enough precision to form the iterates")
    iterates = [phi]
    for _ in range(k):
        iterates.append(iterates[-1].a_apply())
    prec = phi.prec - k
    rows = phi.N + 1
    if rows < k:
        raise NotThematic(
            f"an element of log order {phi.N} generates rank at most {rows}")
    M = [[iterates[j].component(n).truncate(prec) for j in range(k)]
         for n in range(rows)]
    rhs = [iterates[k].component(n).truncate(prec) for n in range(rows)]

    best: Optional[Tuple[int, Tuple[int, ...], TruncSeries]] = None
    for subset in combinations(range(rows), k):
        d = _det([M[n] for n in subset])
        v = d.valuation()
        if v is not None and (best is None or v < best[0]):
            best = (v, subset, d)
    if best is None:
        raise NotThematic("the iterate matrix is singular to working precision")
    _, subset, det0 = best

    S: List[TruncSeries] = []
    for j in range(k):
        cols = [[rhs[n] if jj == j else M[n][jj] for jj in range(k)]
                for n in subset]
        try:
            S.append(_det(cols) / det0)
        except NotDivisible as exc:
            raise NotThematic("the Cramer solve is inconsistent") from exc

    # every log level must satisfy the relation, not just the chosen ones
    check_prec = min(s.prec for s in S)
    for n in range(rows):
        acc = TruncSeries.zero(check_prec)
        for j in range(k):
            acc = acc + S[j].truncate(check_prec) * M[n][j]
        if acc != rhs[n].truncate(check_prec):
            raise NotThematic(f"log level {n} violates the rank-{k} relation")

    sigma = []
    for j in range(k):
        if k - j >= S[j].prec:
            raise PrecisionExhausted(
                f"coefficient b^{k - j} of S_{j} lies beyond precision")
        sigma.append(S[j].coefficient(k - j))
    return S, HomogeneousOperator([-s for s in sigma] + [Fraction(1)])


def invariants_from_bernstein(op: HomogeneousOperator,
                              lam: Rational) -> FundamentalInvariants:
    """Read (lambda_1, p_j) off the factor exponents of a Bernstein element."""
    from .errors import FactorizationFailed

    lam = as_rational(lam)
    mus = op.exponents()
    for mu in mus:
        if lambda_class(mu)[0] != lam:
            raise FactorizationFailed(
                f"exponent {mu} is not in the class of {lam}")
    p = []
    for j in range(len(mus) - 1):
        step = mus[j + 1] - mus[j] + 1
        p.append(int(step))
    return FundamentalInvariants(mus[0], tuple(p))
