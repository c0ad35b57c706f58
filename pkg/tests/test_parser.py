import pytest
from hypothesis import given
from hypothesis import strategies as st

from epc.coeff import Chart, CoeffFn, GaussianRational, ModelError, Torus
from epc.frontend.parser import ParseError, parse_expr, print_expr

from strategies import coeffs, models

GQ = GaussianRational
C1, C2, T1, T2 = Chart(1), Chart(2), Torus(1), Torus(2)


def test_examples():
    z, zb = CoeffFn.var(C1, 0), CoeffFn.var(C1, 0, bar=True)
    assert parse_expr("z1*zb1", C1) == z * zb
    assert parse_expr("(1/2+3/4i)*z1^2", C1) == (z * z).scale(GQ(GQ(1) / 2 + GQ(0, 1) * GQ(3) / 4))
    assert parse_expr("e[1;0]", T1) == CoeffFn.character(T1, [1], [0])


def test_whitespace_and_precedence():
    a = parse_expr(" 2 * ( z1 - zb2 ) ^ 2 ", C2)
    b = parse_expr("2*z1^2 - 4*z1*zb2 + 2*zb2^2", C2)
    assert a == b
    assert parse_expr("-i*e[1,2;0,-1] + 1/3", T2) == CoeffFn.character(T2, [1, 2], [0, -1]).scale(
        GQ(0, -1)
    ) + CoeffFn.constant(T2, GQ(1) / 3)
    assert parse_expr("2^3", C1) == CoeffFn.constant(C1, 8)
    assert parse_expr("3i", C1) == CoeffFn.constant(C1, GQ(0, 3))


@pytest.mark.parametrize(
    "text, offset",
    [("z1+", 3), ("", 0), ("(z1", 3), ("1/0", 3), ("z1 ^ -1", 5), ("z1 ** 2", 4), ("é", 0)],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_expr(text, C1)
    assert info.value.offset == offset


def test_offsets_are_in_bytes():
    with pytest.raises(ParseError) as info:
        parse_expr("é+", C1)
    assert info.value.offset == 0
    with pytest.raises(ParseError) as info:
        parse_expr("(z1 é", C1)
    assert info.value.offset == 4


def test_model_and_index_errors():
    with pytest.raises(ModelError):
        parse_expr("e[1;0]", C1)
    with pytest.raises(ModelError):
        parse_expr("z1", T1)
    with pytest.raises(ParseError):
        parse_expr("z3", C2)
    with pytest.raises(ParseError):
        parse_expr("e[1;0,1]", T1)


@given(st.data())
def test_round_trip(data):
    model = data.draw(models)
    f = data.draw(coeffs(model))
    text = print_expr(f)
    assert parse_expr(text, model) == f
    assert print_expr(parse_expr(text, model)) == text
