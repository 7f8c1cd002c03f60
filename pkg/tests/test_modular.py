from fractions import Fraction

import pytest

from anomalycert.algebra import Rational
from anomalycert.chern import GeometrySpec
from anomalycert.modular import (
    ModularError,
    basis,
    coefficient_relation,
    dimension,
    divisor_power_sum,
    eisenstein,
    weight_of,
)

import oracles


def test_eisenstein_printed_values():
    assert eisenstein(4, 3).coefficients == (1, 240, 2160, 6720)
    assert eisenstein(6, 3).coefficients == (1, -504, -16632, -122976)


def test_eisenstein_against_divisor_oracle():
    for w in (4, 6):
        assert list(eisenstein(w, 10).coefficients) == oracles.eisenstein(w, 10)


def test_divisor_power_sum():
    assert divisor_power_sum(12, 1) == 28
    assert divisor_power_sum(6, 3) == 1 + 8 + 27 + 216


def test_dimensions():
    assert [dimension(w) for w in range(0, 28, 2)] == [1, 0, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 3, 2]


def test_basis_pairs():
    assert basis(12, 3).pairs == ((3, 0), (0, 2))
    assert basis(14, 3).pairs == ((2, 1),)
    with pytest.raises(ModularError):
        basis(7, 3)


def test_weight8_relation():
    rel = coefficient_relation(8, 3)
    assert rel.size == 1
    assert rel.constants() == [480, 61920, 1050240]
    e4sq = oracles.mul(oracles.eisenstein(4, 3), oracles.eisenstein(4, 3), 3)
    assert rel.constants() == e4sq[1:]


def test_weight10_and_14_relations():
    assert coefficient_relation(10, 3).constants()[0] == -264
    assert coefficient_relation(14, 3).constants()[0] == -24
    e4, e6 = oracles.eisenstein(4, 3), oracles.eisenstein(6, 3)
    assert coefficient_relation(10, 3).constants() == oracles.mul(e4, e6, 3)[1:]
    assert coefficient_relation(14, 3).constants() == oracles.mul(oracles.mul(e4, e4, 3), e6, 3)[1:]


def test_weight12_relation_against_cramer_oracle():
    rel = coefficient_relation(12, 3)
    assert rel.size == 2
    e4, e6 = oracles.eisenstein(4, 3), oracles.eisenstein(6, 3)
    b1 = oracles.mul(oracles.mul(e4, e4, 3), e4, 3)
    b2 = oracles.mul(e6, e6, 3)
    # a_2 = A a_0 + B a_1 on both basis forms
    A, B = oracles.cramer2(b1[0], b1[1], b2[0], b2[1], b1[2], b2[2])
    assert (A, B) == (196560, -24)
    assert [Fraction(int(x.numerator), int(x.denominator)) for x in rel.rows[0]] == [A, B]
    # the q^3 row also fits both basis forms
    A3, B3 = rel.rows[1]
    for b in (b1, b2):
        assert b[3] == A3 * b[0] + B3 * b[1]


def test_relation_residuals_vanish_on_modular_forms():
    rel = coefficient_relation(16, 4)
    e4 = oracles.eisenstein(4, 4)
    f = oracles.mul(oracles.mul(e4, e4, 4), oracles.mul(e4, e4, 4), 4)
    g = oracles.mul(e4, oracles.mul(oracles.eisenstein(6, 4), oracles.eisenstein(6, 4), 4), 4)
    mix = [Rational(3) * a - Rational(5) * b for a, b in zip(f, g)]
    assert all(r == 0 for r in rel.residuals(mix))
    broken = list(mix)
    broken[3] += 1
    assert rel.residuals(broken)[-2] != 0


def test_relation_errors():
    with pytest.raises(ModularError):
        coefficient_relation(2, 3)
    with pytest.raises(ModularError):
        coefficient_relation(24, 2)


def test_weight_of_variants():
    assert weight_of(GeometrySpec(8, 1, "Q-even")) == 8
    assert weight_of(GeometrySpec(12, 2, "Q-even")) == 14
    assert weight_of(GeometrySpec(12, 1, "Q-two-bundle")) == 14
    assert weight_of(GeometrySpec(10, 1, "Q1-even")) == 8
    assert weight_of(GeometrySpec(7, 1, "Q-odd")) == 8
    assert weight_of(GeometrySpec(9, 1, "Q1-odd")) == 8
    assert weight_of(GeometrySpec(13, 1, "Q1-two-bundle-odd")) == 14
