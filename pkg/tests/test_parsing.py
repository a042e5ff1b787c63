"""Input layer: series and generator literals, grids, and TOML documents."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from themelab import ParseError, TruncSeries
from themelab.parsing import (
    GeneratorDocument,
    ThemeDocument,
    document_from_dict,
    grid_points,
    load_document,
    parse_generator,
    parse_grid,
    parse_rational,
    parse_series,
)
from themelab.xi import power_monomial

# ---------------------------------------------------------------------------
# rationals and series literals


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == -2
    assert parse_rational(" 5 ") == 5
    for bad in ("", "a", "1/", "1/0", "1.5"):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_parse_series_literals():
    assert parse_series("1 + 2*b + 5/2*b^2", 6) \
        == TruncSeries([1, 2, Fraction(5, 2)], 6)
    assert parse_series("-b", 4) == TruncSeries([0, -1], 4)
    assert parse_series("(1 + b)*(1 - b)", 6) == TruncSeries([1, 0, -1], 6)
    assert parse_series("2*(3 + b^2) - 5", 6) == TruncSeries([1, 0, 2], 6)
    assert parse_series("0", 4).is_zero()
    # monomials at or above prec truncate away
    assert parse_series("1 + b^9", 4) == TruncSeries.one(4)


def test_parse_series_params():
    got = parse_series("1 + gamma*b^2", 5, {"gamma": Fraction(5)})
    assert got == TruncSeries([1, 0, 5], 5)
    with pytest.raises(ParseError):
        parse_series("1 + gamma*b", 5)  # unbound name
    with pytest.raises(ParseError):
        parse_series("1 + + b", 5)
    with pytest.raises(ParseError):
        parse_series("(1 + b", 5)
    with pytest.raises(ParseError):
        parse_series("1 + b) ", 5)


coeffs = st.lists(
    st.fractions(min_value=-9, max_value=9, max_denominator=12),
    min_size=0, max_size=8)


@given(coeffs)
@settings(max_examples=60, deadline=None)
def test_series_literal_roundtrip(cs):
    s = TruncSeries(cs, 10)
    assert parse_series(s.to_literal(), 10) == s


# ---------------------------------------------------------------------------
# generator expressions


def test_parse_generator_matches_power_monomials():
    prec = 12
    got = parse_generator("log(s)*s^(1/2) + (z + b)*s^(-1/2)", prec,
                          {"z": Fraction(2)})
    want = power_monomial(Fraction(3, 2), 1, 1, prec) \
        + power_monomial(Fraction(1, 2), 0, 1, prec) \
        .mul_series(TruncSeries([2, 1], prec))
    assert got == want


def test_parse_generator_log_powers():
    prec = 10
    got = parse_generator("log(s)^2 * s^(1/2)", prec)
    # the e_j basis absorbs 1/j!, the literal does not
    assert got == power_monomial(Fraction(3, 2), 2, 2, prec).scale(2)
    assert got.N == 2


def test_parse_generator_plain_series_is_class_one():
    got = parse_generator("1 + 3*b", 8)
    assert got.lam == 1
    assert got.component(0) == TruncSeries([1, 3], 8)


def test_parse_generator_rejects_mixed_classes():
    with pytest.raises(ParseError):
        parse_generator("s^(1/2) + s^(1/3)", 8)
    with pytest.raises(ParseError):
        parse_generator("s^(-3/2)", 8)  # below the principal branch
    with pytest.raises(ParseError):
        parse_generator("log(b)", 8)


# ---------------------------------------------------------------------------
# grids


def test_parse_grid_product():
    pts = parse_grid("z = -2..2 step 1/2; w = 0, 1, 5")
    assert len(pts) == 9 * 3
    assert pts[0] == {"z": Fraction(-2), "w": Fraction(0)}
    assert pts[-1] == {"z": Fraction(2), "w": Fraction(5)}
    zs = sorted({p["z"] for p in pts})
    assert zs[1] - zs[0] == Fraction(1, 2)


def test_parse_grid_single_value():
    assert parse_grid("alpha = 5/3") == [{"alpha": Fraction(5, 3)}]


def test_parse_grid_errors():
    for bad in ("z = 1..0 step 1", "z = 1..2", "z = 1..2 step 0",
                "z = 1; z = 2", "5 = 1", "z = 1..2 step -1"):
        with pytest.raises(ParseError):
            parse_grid(bad)


# ---------------------------------------------------------------------------
# documents


def theme_dict(**extra):
    data = {"lambda1": "3", "p": [1, 1], "S": ["1 + 2*b + 5*b^2", "1 + 2*b"],
            "prec": 16}
    data.update(extra)
    return data


def test_theme_document_roundtrip():
    doc = document_from_dict(theme_dict())
    assert isinstance(doc, ThemeDocument)
    E = doc.presentation()
    assert E.k == 3 and E.prec == 16
    assert doc.to_dict()["lambda1"] == "3"
    assert grid_points(doc) == [{}]


def test_xi_document():
    doc = document_from_dict({
        "kind": "xi", "expr": "log(s)*s^(1/2) + (z + b)*s^(-1/2)",
        "grid": "z = -1..1 step 1", "prec": 12})
    assert isinstance(doc, GeneratorDocument)
    pts = grid_points(doc)
    assert len(pts) == 3
    x = doc.element(pts[0])
    assert x.component(0).constant_term() == -1


def test_params_merge_with_grid_point():
    doc = document_from_dict(theme_dict(
        S=["1 + beta*b + gamma*b^2", "1 + alpha*b"],
        params={"beta": "2", "gamma": "5"}, kind="canonical"))
    E = doc.presentation({"alpha": Fraction(3)})
    assert E.relation(2) == TruncSeries([1, 3], 16)
    assert E.relation(1) == TruncSeries([1, 2, 5], 16)


def test_document_validation_errors():
    cases = [
        theme_dict(prec=3),
        theme_dict(p=[1]),  # len(S) != len(p)
        theme_dict(p=[1, -1]),
        theme_dict(kind="mystery"),
        theme_dict(grid=7),
        theme_dict(params={"a": True}),
        {"kind": "xi", "prec": 8},  # missing expr
        {"p": [1], "S": ["1"], "prec": 8},  # missing lambda1
        [],
    ]
    for data in cases:
        with pytest.raises(ParseError):
            document_from_dict(data)


def test_load_document_and_override(tmp_path):
    path = tmp_path / "doc.toml"
    path.write_text(
        'lambda1 = "5/2"\np = [2]\nS = ["1 + b^2"]\nprec = 12\n')
    doc = load_document(str(path))
    assert doc.lambda1 == Fraction(5, 2) and doc.prec == 12
    assert load_document(str(path), prec_override=20).prec == 20
    with pytest.raises(ParseError):
        load_document(str(tmp_path / "missing.toml"))
    bad = tmp_path / "bad.toml"
    bad.write_text("= nonsense =")
    with pytest.raises(ParseError):
        load_document(str(bad))
