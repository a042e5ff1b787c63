"""Theme presentations and the canonical family: defining relations,
sub/quotient towers, the model embedding, and operator extraction."""

from fractions import Fraction

import pytest

from themelab import (
    FactorizationFailed,
    InvalidCanonicalPoint,
    NotNormalized,
    TruncSeries,
)
from themelab.classify import parameter_of_rank2, thematic_rank
from themelab.ore import bernstein_polynomial, _poly_mul
from themelab.themes import (
    FundamentalInvariants,
    ThemePresentation,
    bernstein_from_generator,
    build_theme,
    canonical_point,
    canonical_space,
    embed_into_xi,
    invariants_from_bernstein,
    log_free_constant,
    rising_product,
    transform_rank2,
    xi_residual,
)
from themelab.xi import power_monomial


def rank3_example(prec=20):
    S1 = TruncSeries([1, 2, 5], prec)
    S2 = TruncSeries([1, 2], prec)
    return ThemePresentation(3, [1, 1], [S1, S2])


# ---------------------------------------------------------------------------
# invariants and scalar helpers


def test_invariants_ladder():
    inv = FundamentalInvariants(Fraction(7, 2), (3, 2, 2))
    assert inv.k == 4
    assert inv.lambdas == (Fraction(7, 2), Fraction(11, 2), Fraction(13, 2),
                           Fraction(15, 2))
    assert inv.lam == Fraction(1, 2)
    with pytest.raises(ValueError):
        FundamentalInvariants(0, ())
    with pytest.raises(ValueError):
        FundamentalInvariants(3, (-1,))


def test_rising_product_oracle():
    # independent product evaluation
    for start, n in [(Fraction(3, 2), 4), (Fraction(2), 3), (Fraction(1), 0)]:
        acc = Fraction(1)
        for i in range(n):
            acc *= start + i
        assert rising_product(start, n) == acc


def test_log_free_constants_frozen():
    assert log_free_constant(3, 1) == -2
    assert log_free_constant(3, 2) == -3
    assert log_free_constant(Fraction(5, 2), 3) == Fraction(-35, 8)
    with pytest.raises(ValueError):
        log_free_constant(3, 0)


# ---------------------------------------------------------------------------
# canonical spaces and points


def test_canonical_space_shapes():
    point = canonical_space(FundamentalInvariants(Fraction(5, 2), ()))
    assert point.shape == "point" and point.supports == ()

    line = canonical_space(FundamentalInvariants(3, (2,)))
    assert line.shape == "C*"
    assert line.supports == ((0, 2),) and line.q == (2,)

    plane = canonical_space(FundamentalInvariants(3, (1, 1)))
    assert plane.shape == "(C*)^2 x C"
    assert plane.supports == ((0, 1, 2), (0, 1))
    assert plane.q == (2, 1)

    degenerate = canonical_space(FundamentalInvariants(3, (0,)))
    assert degenerate.shape == "point" and degenerate.q == (None,)


def test_canonical_space_needs_large_lambda1():
    with pytest.raises(InvalidCanonicalPoint):
        canonical_space(FundamentalInvariants(2, (1, 1, 1)))


def test_canonical_point_constraints():
    inv = FundamentalInvariants(3, (1, 1))
    ok = canonical_point(inv, [{1: 2, 2: 5}, {1: 2}])
    assert ok.series(1, 6) == TruncSeries([1, 2, 5], 6)
    with pytest.raises(InvalidCanonicalPoint):
        canonical_point(inv, [{1: 2}])  # one map per relation
    with pytest.raises(InvalidCanonicalPoint):
        canonical_point(inv, [{0: 3, 1: 1}, {1: 1}])  # constant pinned
    with pytest.raises(InvalidCanonicalPoint):
        canonical_point(inv, [{1: 0, 2: 5}, {1: 1}])  # torus coordinate
    with pytest.raises(InvalidCanonicalPoint):
        canonical_point(inv, [{1: 1, 3: 1}, {1: 1}])  # off support


def test_build_theme_matches_point():
    inv = FundamentalInvariants(3, (1, 1))
    sigma = canonical_point(inv, [{1: 2, 2: 5}, {1: 2}])
    E = build_theme(sigma, prec=20)
    assert E == rank3_example(20)
    assert E.invariants == inv


# ---------------------------------------------------------------------------
# presentations: relations, towers, annihilator


def test_defining_relations_hold():
    E = rank3_example()
    lams = E.lambdas
    for j in (1, 2):
        lhs = E.basis(j + 1).apply_a_minus(lams[j])
        rhs = E.basis(j).mul_series(E.relation(j))
        assert lhs == rhs
    assert E.basis(1).apply_a_minus(lams[0]).is_zero()


def test_annihilator_kills_the_generator():
    for E in (rank3_example(),
              ThemePresentation(Fraction(7, 2), [2], [TruncSeries([1, 0, 3], 16)])):
        assert E.residual(E.basis(E.k)).is_zero()
        assert E.annihilator().apply(E.basis(E.k)).is_zero()


def test_normalization():
    S = TruncSeries([2, 4], 8)
    E = ThemePresentation(3, [1], [S])
    with pytest.raises(NotNormalized):
        parameter_of_rank2(E)
    En = E.normalized()
    assert En.relation(1).constant_term() == 1
    assert parameter_of_rank2(En) == 2


def test_presentation_validation():
    with pytest.raises(ValueError):
        ThemePresentation(3, [1, 1], [TruncSeries.one(8)])
    with pytest.raises(ValueError):
        ThemePresentation(3, [1], [TruncSeries.b(8)])  # not a unit


def test_tower_invariants():
    E = ThemePresentation(
        Fraction(7, 2), [3, 2],
        [TruncSeries([1, 1, 0, 4], 24), TruncSeries([1, 0, 3], 24)])
    sub = E.subtheme(2)
    quot = E.quotient(2)
    assert sub.invariants == FundamentalInvariants(Fraction(7, 2), (3,))
    assert quot.invariants == FundamentalInvariants(Fraction(13, 2), ())
    assert E.quotient(0) == E and E.subtheme(E.k) == E


# ---------------------------------------------------------------------------
# embedding into the model and operator extraction


def embedded_exponents(E):
    phi = embed_into_xi(E)
    _, op = bernstein_from_generator(phi, E.k)
    return phi, op


def test_embed_satisfies_the_annihilator():
    E = rank3_example()
    phi, op = embedded_exponents(E)
    assert thematic_rank(phi, E.k).lower == E.k
    assert xi_residual(E, phi).is_zero()
    assert invariants_from_bernstein(op, E.lam) == E.invariants


def test_bernstein_composes_along_the_tower():
    E = ThemePresentation(
        Fraction(7, 2), [3, 2],
        [TruncSeries([1, 1, 0, 4], 28), TruncSeries([1, 0, 3], 28)])
    _, full = embedded_exponents(E)
    _, sub = embedded_exponents(E.subtheme(2))
    _, quot = embedded_exponents(E.quotient(2))
    lhs = bernstein_polynomial(full.exponents())
    rhs = _poly_mul(list(bernstein_polynomial(sub.exponents())),
                    list(bernstein_polynomial(quot.exponents())))
    assert list(lhs) == rhs


def test_bernstein_jump_pair():
    # the one-parameter family with a jump at z = 0
    prec = 18
    for z, expect in [(1, [Fraction(3, 2), Fraction(3, 2)]),
                      (-1, [Fraction(3, 2), Fraction(3, 2)]),
                      (0, [Fraction(5, 2), Fraction(3, 2)])]:
        psi = power_monomial(Fraction(3, 2), 1, 1, prec) \
            + power_monomial(Fraction(1, 2), 0, 1, prec) \
            .mul_series(TruncSeries([z, 1], prec))
        _, op = bernstein_from_generator(psi, 2)
        assert op.exponents() == expect


def test_invariants_from_bernstein_checks_class():
    E = rank3_example()
    _, op = embedded_exponents(E)
    with pytest.raises(FactorizationFailed):
        invariants_from_bernstein(op, Fraction(1, 2))


def test_rank2_parameter_survives_basis_change():
    S = TruncSeries([1, 0, 7], 20)  # alpha = 7 at p = 2
    E = ThemePresentation(Fraction(5, 2), [2], [S])
    moved = transform_rank2(E, Fraction(3), Fraction(2),
                            TruncSeries([0, 1, 4], 20))
    assert moved.invariants == E.invariants
    assert parameter_of_rank2(moved.normalized()) == 7


def test_unit_scaling_keeps_invariants():
    # multiplying a relation by a unit moves inside the same stratum
    E = rank3_example()
    unit = TruncSeries([1, 3, 3], 20)
    scaled = ThemePresentation(3, [1, 1],
                               [E.relation(1) * unit, E.relation(2)])
    _, op = embedded_exponents(scaled)
    _, base = embedded_exponents(E)
    assert op.exponents() == base.exponents()
