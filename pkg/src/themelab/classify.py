"""Decision procedures: rank certificates, rank-2 reduction, isomorphism,
invariance, and family stratification.

Everything reduces to exact linear algebra on series coefficients.  The
isomorphism and invariance searches keep their scalar unknowns symbolic
(linforms) so that a failed search carries the actual chain of relations
that blocked it, not just a boolean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    Inconclusive,
    NotThematic,
    Obstruction,
    PrecisionError,
    PrecisionExhausted,
    ThemeLabError,
    WrongInvariants,
)
from .linforms import LinearSystem, LinExpr, LinSeries, Relation, lin_b_ode
from .series import Rational, TruncSeries, as_rational
from .themes import (
    FundamentalInvariants,
    ThemeElement,
    ThemePresentation,
    bernstein_from_generator,
    embed_into_xi,
    invariants_from_bernstein,
    rising_product,
)
from .xi import XiElement, lambda_class, power_monomial


# ---------------------------------------------------------------------------
# rank certificates


@dataclass(frozen=True)
class RankCertificate:
    """Certified lower / precision-relative upper bounds for thematic rank.

    minor_valuations[r-1] is the smallest valuation of an r x r minor of the
    iterate matrix, or None when every such minor vanishes to precision.  A
    finite valuation certifies the bound below it; vanishing to precision
    does not certify anything above.
    """

    lower: int
    upper: int
    prec: int
    minor_valuations: Tuple[Optional[int], ...]


def _minor_det(rows: List[List[TruncSeries]]) -> TruncSeries:
    # cofactor expansion along the first row; sizes here never exceed 4
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = None
    for j in range(n):
        sub = [[rows[i][jj] for jj in range(n) if jj != j] for i in range(1, n)]
        term = rows[0][j] * _minor_det(sub)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def thematic_rank(x: XiElement, bound: int) -> RankCertificate:
    """Certificate for the rank of the span of x, a*x, ..., a^(bound-1)*x."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    cols = min(bound, x.prec)
    iterates = [x]
    for _ in range(cols - 1):
        iterates.append(iterates[-1].a_apply())
    prec = x.prec - (cols - 1)
    rows = x.N + 1
    M = [[iterates[j].component(n).truncate(prec) for j in range(cols)]
         for n in range(rows)]
    vals: List[Optional[int]] = []
    lower = 0
    for r in range(1, min(rows, cols) + 1):
        best: Optional[int] = None
        for rsub in combinations(range(rows), r):
            for csub in combinations(range(cols), r):
                d = _minor_det([[M[i][j] for j in csub] for i in rsub])
                v = d.valuation()
                if v is not None and (best is None or v < best):
                    best = v
        vals.append(best)
        if best is not None:
            lower = r
    upper = min(rows, bound)
    return RankCertificate(lower, upper, prec, tuple(vals))


def is_k_thematic(x: XiElement, k: int
                  ) -> Tuple[bool, Optional[List[TruncSeries]]]:
    """Whether x, a*x, ..., a^(k-1)*x freely generate the module of x.

    Returns (True, relation series) on success, (False, None) when the rank
    is certifiably wrong; raises Inconclusive when precision cannot separate
    rank k from k-1.
    """
    cert = thematic_rank(x, k)
    if cert.upper < k:
        return False, None
    if cert.lower < k:
        raise Inconclusive(
            f"precision {cert.prec} cannot separate rank {k} from {k - 1}",
            certificate=cert)
    try:
        S, _ = bernstein_from_generator(x, k)
    except NotThematic:
        return False, None
    return True, S


# ---------------------------------------------------------------------------
# the scalar b-ODE


def solve_b_ode(c: int, rhs: TruncSeries, slot: Rational = 0) -> TruncSeries:
    """Solve b*T' - c*T = rhs coefficientwise.

    T_m = rhs_m / (m - c) away from m = c; solvable iff rhs_c = 0, and the
    b^c coefficient of T is free (the slot argument, default 0).
    """
    c = as_rational(c)
    out = []
    for m in range(rhs.prec):
        if m == c:
            v = rhs.coefficient(m)
            if v != 0:
                raise Obstruction(m, v)
            out.append(as_rational(slot))
        else:
            out.append(rhs.coefficient(m) / (m - c))
    return TruncSeries(out, rhs.prec)


# ---------------------------------------------------------------------------
# rank-2 canonical reduction


def rank2_reduce(phi: XiElement, lambda1: Rational, p: int
                 ) -> Tuple[Optional[Fraction], XiElement]:
    """Parameter and canonical generator of the rank-2 theme generated by phi.

    For p >= 1 the canonical generator has the log-free normal form: it
    satisfies (a - (lambda_1+p-1)b) psi = (1 + alpha b^p) s^(lambda_1 - 1)
    with the constant of the log-free part pinned.  For p = 0 there is no
    parameter and the generator is the unique constant model.
    """
    lambda1 = as_rational(lambda1)
    lam, m = lambda_class(lambda1)
    if p == 0:
        psi = power_monomial(lambda1 - 1, 1, 1, phi.prec).scale(lambda1 - 1)
        return None, psi
    if p < 0:
        raise WrongInvariants("the offset p must be non-negative")
    if m < 1:
        raise WrongInvariants("the rank-2 reduction needs lambda_1 > 1")
    q1 = m + p - 1
    phi1 = phi.component(1)
    if phi1.valuation() != q1:
        raise WrongInvariants(
            f"leading log coefficient has valuation {phi1.valuation()}, "
            f"expected b^{q1} for invariants ({lambda1}, {p})")
    gamma_top = rising_product(lam, q1)
    unit = phi1.shift_down(q1) * (Fraction(1) / gamma_top)
    hphi = phi.mul_series(unit.invert())

    # subtract the pure log term and divide by the rank-1 monomial
    g = power_monomial(lambda1 + p - 1, 1, 1, hphi.prec)
    diff = hphi.component(0) - g.component(0)
    gprime = rising_product(lam, m - 1)
    try:
        sigma = diff.shift_down(m - 1) * (Fraction(1) / gprime)
    except ThemeLabError as exc:
        raise WrongInvariants(
            "the log-free part does not sit above the expected order") from exc

    gamma = rising_product(lambda1 - 1, p)
    S = (sigma.derivative().shift_up(1) - sigma.truncate(sigma.prec - 1) * p
         + TruncSeries.monomial(gamma, p, sigma.prec - 1)) \
        * (Fraction(1) / (lambda1 - 1))
    S0 = S.constant_term()
    if S0 == 0:
        raise WrongInvariants("degenerate reduction: constant term of S vanishes")
    Sp = S.coefficient(p)
    tilde = (S - TruncSeries.constant(S0, S.prec)
             - TruncSeries.monomial(Sp, p, S.prec)).shift_down(1)
    T = solve_b_ode(p - 1, tilde)
    psi = hphi - power_monomial(lambda1, 0, 1, hphi.prec).mul_series(T)
    alpha = Sp / S0
    return alpha, psi.scale(Fraction(1) / S0)


def parameter_of_rank2(E: ThemePresentation) -> Fraction:
    """The b^(p_1) coefficient of the normalized relation series."""
    if E.k != 2:
        raise ValueError("parameter_of_rank2 expects a rank-2 presentation")
    S = E.relation(1)
    if S.constant_term() != 1:
        from .errors import NotNormalized
        raise NotNormalized("the relation series must have constant term 1")
    return S.coefficient(E.p[0])


# ---------------------------------------------------------------------------
# invariance: staged solve of the tail operator


_GREEK = ("rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega")


def _greek(n: int) -> str:
    return _GREEK[n] if n < len(_GREEK) else f"slot{n}"


def _series_letter(n: int) -> str:
    letters = "TUVWXYZ"
    return letters[n] if n < len(letters) else f"T{n}"


def invariance_test(E: ThemePresentation) -> ThemeElement:
    """Witness x in F_(k-1) \\ F_(k-2) annihilated by the defining operator.

    Solves the tail of the annihilator (all factors except the leftmost)
    against x stage by stage; each stage is a triangular system of b-ODEs
    whose resonant coefficients become relations between the slot scalars.
    Free slots default to 0 apart from the top one, which is scaled to 1.
    Raises Obstruction with the full relation chain when no witness exists.
    """
    k = E.k
    if k < 2:
        raise ValueError("invariance needs rank at least 2")
    lams = E.lambdas
    prec = E.prec
    system = LinearSystem()
    greek_count = 0
    series_count = 0

    def top_series(ps: int, name: str) -> LinSeries:
        if not 0 <= ps - 1 < prec:
            raise PrecisionExhausted(
                f"slot exponent b^{ps - 1} lies outside precision {prec}")
        coeffs = [LinExpr(0)] * (ps - 1) + [system.new_unknown(name)]
        return LinSeries(coeffs, prec)

    if E.p[0] == 0:
        raise Obstruction(
            None, None,
            message="no invariance witness: p_1 = 0 leaves stage 1 empty",
            relations=())
    top_name = _greek(greek_count)
    greek_count += 1
    comps: Dict[int, LinSeries] = {1: top_series(E.p[0], top_name)}
    labels: Dict[int, str] = {1: top_name}

    for s in range(2, k):
        new_comps: Dict[int, LinSeries] = {}
        new_labels: Dict[int, str] = {}
        if E.p[s - 1] == 0:
            raise Obstruction(
                None, None,
                message=f"no invariance witness: p_{s} = 0 kills the stage-{s} "
                        "top coefficient",
                relations=tuple(system.events))
        name = _greek(greek_count)
        greek_count += 1
        new_comps[s] = top_series(E.p[s - 1], name)
        new_labels[s] = name
        S_s = E.relations[s - 1]
        for i in range(s - 1, 0, -1):
            rhs = comps[i].mul_known(S_s) if i in comps else None
            upper = new_comps[i + 1].mul_known(E.relations[i - 1])
            data = rhs - upper if rhs is not None else -upper
            const = data.coefficient(0)
            if not const.is_zero():
                label = f"{labels.get(i, '0')}(0) = {new_labels[i + 1]}(0)"
                system.add_relation(const, label)
            letter = _series_letter(series_count)
            series_count += 1
            c = int(lams[s] - lams[i - 1])
            new_comps[i] = lin_b_ode(
                system, c, data.shift_down(1), f"{letter}[{c}]",
                f"stage {s}, e_{i} equation", constant_label=f"{letter}(0)")
            new_labels[i] = letter
        comps = new_comps
        labels = new_labels

    top_expr = comps[k - 1].coefficient(E.p[k - 2] - 1)
    values = system.assignment_for(top_expr, 1)
    if values is None:
        blocking = None
        for ev in system.events:
            if (ev.status == "determined" and ev.reduced.const == 0
                    and len(ev.reduced.terms) == 1):
                blocking = ev
                break
        detail = f" ({blocking.label}: {blocking.rendered})" if blocking else ""
        raise Obstruction(
            None, None,
            message="no invariance witness: the top slot is forced to zero"
                    + detail,
            relations=tuple(system.events))
    parts = [comps[i].materialize(system, values) if i in comps
             else TruncSeries.zero(prec) for i in range(1, k)]
    low = min(s.prec for s in parts)
    witness = ThemeElement(
        E, [s.truncate(low) for s in parts] + [TruncSeries.zero(low)])
    if not E.residual(witness).is_zero():
        raise ThemeLabError("internal error: invariance witness failed "
                            "its residual check")
    return witness


# ---------------------------------------------------------------------------
# isomorphism: triangular basis change with unit diagonal


@dataclass(frozen=True)
class Distinguisher:
    """Concrete reason two presentations are not isomorphic."""

    reason: str
    relation: Optional[Relation] = None

    def __str__(self) -> str:
        if self.relation is None:
            return self.reason
        return f"{self.reason}: {self.relation}"


@dataclass(frozen=True)
class BasisChange:
    """Triangular basis eps_1..eps_k of source satisfying target's relations."""

    source: ThemePresentation
    target: ThemePresentation
    eps: Tuple[ThemeElement, ...]
    events: Tuple[Relation, ...] = ()

    def top_entry(self, i: int) -> TruncSeries:
        """The e_i coefficient of eps_k (the searched top row)."""
        return self.eps[-1].component(i)

    def verify(self) -> bool:
        E, Ep = self.source, self.target
        lams = E.lambdas
        for j in range(E.k, 1, -1):
            lhs = self.eps[j - 1].apply_a_minus(lams[j - 1])
            rhs = self.eps[j - 2].mul_series(
                Ep.relations[j - 2].truncate(lhs.prec))
            if not lhs == rhs:
                return False
        return self.eps[0].apply_a_minus(lams[0]).is_zero()


def _lin_a_minus(E: ThemePresentation, comps: List[LinSeries],
                 mu: Fraction) -> List[LinSeries]:
    """Components of (a - mu*b) x for x with LinSeries components over E."""
    lams = E.lambdas
    out = []
    for i in range(len(comps)):
        term = comps[i].shift_up(1).scale(lams[i] - mu) \
            + comps[i].derivative().shift_up(2)
        if i + 1 < len(comps):
            term = term + comps[i + 1].truncate(term.prec).mul_known(
                E.relations[i].truncate(term.prec))
        out.append(term)
    return out


def isomorphism_test(E: ThemePresentation, Ep: ThemePresentation
                     ) -> Union[BasisChange, Distinguisher]:
    """Search a triangular unit-diagonal basis change carrying E onto Ep.

    The top column eps_k = e_k + sum W_i e_i has unknown series entries; the
    lower columns are forced by Ep's relations, and the requirement that
    each diagonal entry be constant is an exact linear system.  Returns the
    first inconsistent relation as a Distinguisher, raises Inconclusive when
    the precision window cannot cover the relation supports.
    """
    if E.invariants != Ep.invariants:
        return Distinguisher("fundamental invariants differ")
    k = E.k
    prec = min(E.prec, Ep.prec)
    if k == 1:
        return BasisChange(E, Ep, (E.basis(1, prec),))

    def entry_name(i: int) -> str:
        off = k - 1 - i
        return "UVW"[off] if off < 3 else f"W{i}"

    system = LinearSystem()
    entries: Dict[int, LinSeries] = {}
    for i in range(1, k):
        entries[i] = LinSeries.unknown(system, entry_name(i), prec)
    comps = [entries[i] for i in range(1, k)] \
        + [LinSeries.from_series(TruncSeries.one(prec))]

    chain: List[List[LinSeries]] = [comps]
    for j in range(k, 1, -1):
        derived = _lin_a_minus(E, chain[-1][:j], E.lambdas[j - 1])
        inv_rel = Ep.relations[j - 2].truncate(derived[0].prec).invert()
        derived = [c.mul_known(inv_rel) for c in derived[:j - 1]]
        diag = derived[j - 2]
        for m in range(1, diag.prec):
            expr = diag.coefficient(m)
            if expr.is_zero():
                continue
            system.add_relation(
                expr, f"coefficient of b^{m} of the e_{j - 1} entry of "
                      f"eps_{j - 1}")
            if system.conflict is not None:
                return Distinguisher(
                    "inconsistent coefficient relation", system.conflict)
        chain.append(derived)
    final = _lin_a_minus(E, chain[-1][:1], E.lambdas[0])[0]
    for m in range(final.prec):
        expr = final.coefficient(m)
        if expr.is_zero():
            continue
        system.add_relation(
            expr, f"coefficient of b^{m} of (a - lambda_1 b) eps_1")
        if system.conflict is not None:
            return Distinguisher(
                "inconsistent coefficient relation", system.conflict)

    values: Dict[int, Fraction] = {}
    eps_elements = []
    for idx, comps_j in enumerate(chain):
        j = k - idx
        mats = [c.materialize(system, values) for c in comps_j[:j]]
        low = min(s.prec for s in mats)
        eps_elements.append(ThemeElement(
            E, [s.truncate(low) for s in mats]
            + [TruncSeries.zero(low)] * (k - j)))
    eps_elements.reverse()
    witness = BasisChange(E, Ep, tuple(eps_elements), tuple(system.events))
    if not witness.verify():
        raise ThemeLabError("internal error: basis change failed verification")

    support = 0
    for series in E.relations + Ep.relations:
        for m, cval in enumerate(series.coeffs()):
            if cval != 0:
                support = max(support, m)
    if chain[-1][0].prec < support + 2:
        raise Inconclusive(
            "relation supports extend beyond the derivable window",
            certificate=witness)
    return witness


# ---------------------------------------------------------------------------
# family scans


@dataclass
class ScanPoint:
    point: Dict[str, Fraction]
    rank: Optional[RankCertificate]
    bernstein: Optional[Tuple[Fraction, ...]]
    invariants: Optional[FundamentalInvariants]
    flags: List[str] = field(default_factory=list)
    error: Optional[str] = None


@dataclass
class Stratum:
    bernstein: Optional[Tuple[Fraction, ...]]
    invariants: Optional[FundamentalInvariants]
    points: List[Dict[str, Fraction]] = field(default_factory=list)


@dataclass
class ScanReport:
    points: List[ScanPoint]
    strata: List[Stratum]
    has_jump: bool


def scan_family(entries: Sequence[Tuple[Dict[str, Rational],
                                        Union[XiElement, ThemePresentation]]],
                *, invariance: bool = False) -> ScanReport:
    """Classify a family over a rational grid and stratify the results.

    entries pairs each grid point (a name -> rational mapping) with the
    family member at that point, either an element of the log-expansion
    model or a theme presentation.  Points are reported in lexicographic
    order; per-point failures are collected, never fatal.
    """
    if not entries:
        return ScanReport([], [], False)
    names = sorted(entries[0][0])
    for point, _ in entries:
        if sorted(point) != names:
            raise ValueError("all grid points must share the same coordinates")
    ordered = sorted(
        entries, key=lambda e: tuple(as_rational(e[0][n]) for n in names))

    points: List[ScanPoint] = []
    for point, payload in ordered:
        coords = {n: as_rational(point[n]) for n in names}
        flags: List[str] = []
        try:
            if isinstance(payload, ThemePresentation):
                phi = embed_into_xi(payload)
                k = payload.k
                cert = thematic_rank(phi, k)
            else:
                phi = payload
                cert = thematic_rank(phi, phi.N + 1)
                k = cert.upper
            if cert.lower != k or k == 0:
                flags.append("rank-inconclusive")
                points.append(ScanPoint(coords, cert, None, None, flags))
                continue
            try:
                _, op = bernstein_from_generator(phi, k)
            except NotThematic as exc:
                # rank k is certified, so the singularity is a precision
                # artifact of the Cramer solve
                flags.append("precision")
                points.append(ScanPoint(coords, cert, None, None, flags,
                                        str(exc)))
                continue
            mus = tuple(op.exponents())
            inv = invariants_from_bernstein(op, payload.lam)
            if invariance and isinstance(payload, ThemePresentation):
                try:
                    invariance_test(payload)
                    flags.append("invariant")
                except Obstruction:
                    flags.append("not-invariant")
                except ThemeLabError:
                    flags.append("invariance-error")
            points.append(ScanPoint(coords, cert, mus, inv, flags))
        except Inconclusive as exc:
            flags.append("inconclusive")
            points.append(ScanPoint(coords, None, None, None, flags, str(exc)))
        except PrecisionError as exc:
            flags.append("precision")
            points.append(ScanPoint(coords, None, None, None, flags, str(exc)))
        except ThemeLabError as exc:
            flags.append("error")
            points.append(ScanPoint(coords, None, None, None, flags, str(exc)))

    strata: List[Stratum] = []
    for sp in points:
        if sp.bernstein is None:
            continue
        for st in strata:
            if st.bernstein == sp.bernstein:
                st.points.append(sp.point)
                break
        else:
            strata.append(Stratum(sp.bernstein, sp.invariants, [sp.point]))
    has_jump = len(strata) > 1
    if has_jump:
        majority = max(strata, key=lambda st: len(st.points))
        minority_keys = {st.bernstein for st in strata if st is not majority}
        for sp in points:
            if sp.bernstein in minority_keys:
                sp.flags.append("bernstein-jump")
    return ScanReport(points, strata, has_jump)
