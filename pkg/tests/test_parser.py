"""Grammar coverage and printer/parser round trips."""

import random
from fractions import Fraction

import pytest

from superarc.fields import (FieldPoly, FreeFieldContext, format_poly,
                             normal_order, virasoro_boson)
from superarc.parser import ParseError, parse_field, parse_poly


@pytest.fixture(scope="module")
def ctx():
    return FreeFieldContext(2, 2)


def test_simple_product(ctx):
    p = parse_poly(":beta_1 gamma_1:", ctx)
    assert p.weight() == 1
    assert p == normal_order(FieldPoly.generator(ctx, "beta", 1),
                             FieldPoly.generator(ctx, "gamma", 1))


def test_virasoro_expression():
    s1 = FreeFieldContext(1, 1)
    src = "1/2 :beta_1 d^1 gamma_1: + -1/2 :d^1 beta_1 gamma_1:"
    assert parse_poly(src, s1) == virasoro_boson(s1)


def test_unbalanced_colon(ctx):
    with pytest.raises(ParseError) as err:
        parse_poly(":beta_1 gamma_2", ctx)
    assert err.value.line == 1 and err.value.col == 1


def test_unknown_symbol_position(ctx):
    with pytest.raises(ParseError) as err:
        parse_poly("beta_1 + \n  ?", ctx)
    assert err.value.line == 2 and err.value.col == 3


def test_index_out_of_range(ctx):
    with pytest.raises(ParseError):
        parse_poly("beta_3", ctx)
    with pytest.raises(ParseError):
        parse_poly("c_5", ctx)


def test_gamma_alias(ctx):
    assert parse_poly("g_2", ctx) == FieldPoly.generator(ctx, "gamma", 2)


def test_multi_factor_folds_left_nested(ctx):
    b1 = FieldPoly.generator(ctx, "b", 1)
    c1 = FieldPoly.generator(ctx, "c", 1)
    beta = FieldPoly.generator(ctx, "beta", 1)
    expect = normal_order(beta, normal_order(b1, c1))
    assert parse_poly(":beta_1 b_1 c_1:", ctx) == expect
    assert parse_poly(":beta_1 :b_1 c_1::", ctx) == expect


def test_scalars_and_sums(ctx):
    beta = FieldPoly.generator(ctx, "beta", 1)
    assert parse_poly("3 beta_1", ctx) == 3 * beta
    assert parse_poly("-2/3 beta_1 + beta_1", ctx) == Fraction(1, 3) * beta
    assert parse_poly("1", ctx) == FieldPoly.identity(ctx)
    assert parse_poly("0", ctx) == FieldPoly.zero(ctx)
    # minus binds to the scalar of the following term
    assert parse_poly("beta_1 -1 beta_1", ctx).is_zero()


def test_derivative_prefix(ctx):
    beta = FieldPoly.generator(ctx, "beta", 1)
    assert parse_poly("d^2 beta_1", ctx) == beta.derivative(2)
    gamma = FieldPoly.generator(ctx, "gamma", 1)
    assert parse_poly("d^1 :beta_1 gamma_1:", ctx) == \
        normal_order(beta, gamma).derivative()


def test_whitespace_insensitive(ctx):
    a = parse_poly("1/2   :beta_1\n d^1 gamma_1:", ctx)
    b = parse_poly("1/2 :beta_1 d^1 gamma_1:", ctx)
    assert a == b


def test_empty_and_trailing_errors(ctx):
    with pytest.raises(ParseError):
        parse_poly("", ctx)
    with pytest.raises(ParseError):
        parse_poly("beta_1 +", ctx)
    with pytest.raises(ParseError):
        parse_poly(":beta_1:", ctx)


def _random_poly(ctx, rng):
    from superarc.fock import enumerate_basis, field_of_state
    w2 = rng.randint(1, 6)
    basis = enumerate_basis(ctx, w2).monomials[w2]
    picks = rng.sample(basis, min(rng.randint(1, 4), len(basis)))
    vec = {m: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for m in picks}
    return field_of_state(ctx, vec)


def test_round_trip_randomized(ctx):
    rng = random.Random(314159)
    for _ in range(40):
        p = _random_poly(ctx, rng)
        assert parse_poly(format_poly(p), ctx) == p


def test_ast_round_trip_structure(ctx):
    ast = parse_field(":beta_1 d^1 gamma_1:", ctx)
    assert ast.to_poly(ctx) == parse_poly(":beta_1 d^1 gamma_1:", ctx)
