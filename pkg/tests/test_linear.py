from fractions import Fraction

import pytest

from stratan.linear import EQ, FALSE, GE, TRUE, AffExpr, LinConstraint, parse_constraint
from stratan.numfmt import fmt_rational


class TestAffExpr:
    def test_zero_coefficients_dropped(self):
        e = AffExpr.make({"i": 0, "j": 2}, 1)
        assert e.coeffs == {"j": 2}

    def test_arithmetic(self):
        e = AffExpr.var("i") + AffExpr.var("j").scale(2) - AffExpr.const(3)
        assert e.evaluate({"i": 1, "j": 2}) == 2

    def test_cancellation_is_constant(self):
        e = AffExpr.var("i") - AffExpr.var("i")
        assert e.is_constant()


class TestLinConstraint:
    def test_normalized_by_content(self):
        assert LinConstraint.make({"i": 2, "j": -4}, 6) == LinConstraint.make({"i": 1, "j": -2}, 3)

    def test_rational_coefficients_integerized(self):
        c = LinConstraint.make({"i": Fraction(1, 2)}, Fraction(1, 3))
        assert c.coeffs == {"i": 3} and c.bound == 2

    def test_equality_sign_canonical(self):
        assert LinConstraint.make({"i": -1, "j": 1}, 1, EQ) == LinConstraint.make({"i": 1, "j": -1}, -1, EQ)

    def test_trivial_constants(self):
        assert LinConstraint.make({}, 0) == TRUE
        assert LinConstraint.make({}, 1) == FALSE

    def test_golden_text(self):
        assert str(parse_constraint("-i + j >= -1")) == "-1*i + 1*j >= -1"

    def test_parse_le_flips(self):
        assert parse_constraint("i <= 5") == LinConstraint.make({"i": -1}, -5, GE)

    def test_halves_of_equality(self):
        lo, hi = parse_constraint("i - j = 1").halves()
        assert lo.holds({"i": 2, "j": 1}) and hi.holds({"i": 2, "j": 1})
        assert not lo.holds({"i": 0, "j": 0}) or not hi.holds({"i": 0, "j": 0})

    def test_negate_is_integer_complement(self):
        (neg,) = parse_constraint("i >= 3").negate()
        assert neg == parse_constraint("i <= 2")

    def test_parse_without_relation(self):
        with pytest.raises(ValueError):
            parse_constraint("i + j")


class TestRationalFormat:
    def test_fraction_mode(self, monkeypatch):
        monkeypatch.delenv("STRATAN_RATIONAL", raising=False)
        assert fmt_rational(Fraction(7, 2)) == "7/2"

    def test_decimal_mode(self, monkeypatch):
        monkeypatch.setenv("STRATAN_RATIONAL", "decimal")
        assert fmt_rational(Fraction(7, 2)) == "3.5"
