from fractions import Fraction

import pytest

from tamedyn.berkovich import BerkPoint
from tamedyn.errors import BudgetExhausted, NotInBasin
from tamedyn.escape import (
    Bounded,
    Classification,
    Escaping,
    Unknown,
    boettcher_modulus,
    classification_report,
    classify_critical,
    julia_in_affine,
)
from tamedyn.polynomial import MarkedPolynomial
from tamedyn.valued_field import PAdic, SeriesT, Val

Q3 = PAdic(3)


def F(*args):
    return Fraction(*args)


def quad(b_num, b_den=1, backend=Q3):
    return MarkedPolynomial.from_critical_data(
        [(backend.scalar(0), 2)], backend.scalar(F(b_num, b_den))
    )


def julia_cubic():
    """z^3 - 3t^-2 z + (2t^-3 - 2t^-1) over SeriesT.

    The critical point 1/t maps onto the repelling fixed point -2/t, so
    its filled-Julia component is a single point; the critical point
    -1/t escapes at the first step.
    """
    qt = SeriesT(precision=16)
    c1 = qt.scalar(terms=[(-1, 1)])
    c2 = qt.scalar(terms=[(-1, -1)])
    b = qt.scalar(terms=[(-3, 2), (-1, -2)])
    return MarkedPolynomial.from_critical_data([(c1, 2), (c2, 2)], b)


class TestClassifyCritical:
    def test_escaping(self):
        f = quad(-1, 3)
        rec = classify_critical(f, f.marks[0])
        # |f(0)| = 3 > R_f = 3^(1/2)
        assert rec == Escaping(1)

    def test_fixed_superattracting(self):
        f = quad(0)
        rec = classify_critical(f, f.marks[0])
        assert isinstance(rec, Bounded)
        assert rec.kind == "disk"
        assert rec.diam_exp == 0

    def test_two_cycle(self):
        f = quad(-1)
        rec = classify_critical(f, f.marks[0])
        assert rec == Bounded("disk", diam_exp=F(0), preperiod=0, period=2)

    def test_strict_subdisk_component(self):
        # z^4 - (2/9)z^2: the component of the fixed critical point 0 is
        # D(0, 3^-2): preimage exponents 1/2, 5/4, 13/8, ... -> 2
        f = MarkedPolynomial.from_critical_data(
            [
                (Q3.scalar(0), 2),
                (Q3.scalar(F(1, 3)), 2),
                (Q3.scalar(F(-1, 3)), 2),
            ],
            Q3.scalar(0),
        )
        rec = classify_critical(f, f.marks[0])
        assert rec == Bounded("disk", diam_exp=F(2), preperiod=0, period=1)

    def test_point_component(self):
        f = julia_cubic()
        rec1 = classify_critical(f, f.marks[0])
        rec2 = classify_critical(f, f.marks[1])
        assert rec1 == Bounded("point", preperiod=1, period=1)
        assert rec2 == Escaping(1)

    def test_invariant_unit_disk_certificate(self):
        # orbit of 0 under z^2 + 3 never cycles exactly, but the unit disk
        # is the filled Julia set (base exponent 0), certifying boundedness
        f = quad(3)
        rec = classify_critical(f, f.marks[0], budget=12)
        assert rec == Bounded("disk", diam_exp=F(0))

    def test_unknown_without_cycle(self):
        # orbit of 0: valuations lock at 2 (no escape), values never
        # cycle, and the base exponent is -1 so no structural certificate
        f = MarkedPolynomial.from_critical_data(
            [
                (Q3.scalar(0), 2),
                (Q3.scalar(F(1, 3)), 2),
                (Q3.scalar(F(-1, 3)), 2),
            ],
            Q3.scalar(9),
        )
        rec = classify_critical(f, f.marks[0], budget=12)
        assert isinstance(rec, Unknown)

    def test_escape_stable_under_budget(self):
        f = quad(-1, 3)
        assert classify_critical(f, f.marks[0], budget=8) == classify_critical(
            f, f.marks[0], budget=128
        )


class TestBoettcherModulus:
    def test_at_escaping_critical(self):
        f = quad(-1, 3)
        assert boettcher_modulus(f, Q3.scalar(0)) == Val(F(-1, 2))

    def test_equals_modulus_outside(self):
        f = quad(0)
        x = BerkPoint(Q3.scalar(0), -2)
        assert boettcher_modulus(f, x) == Val(-2)

    def test_functional_equation(self):
        f = quad(-1, 3)
        pts = [Q3.scalar(F(1, 3)), Q3.scalar(F(2, 9)), Q3.scalar(5)]
        for z in pts:
            lhs = boettcher_modulus(f, f(z))
            rhs = boettcher_modulus(f, z)
            assert lhs.finite == rhs.finite * f.degree

    def test_base_identity_for_nonsimple(self):
        # base exponent = min over escaping marks of the modulus exponent
        f = quad(-1, 3)
        exps = [
            boettcher_modulus(f, m.point).finite
            for m in f.marks
            if isinstance(classify_critical(f, m), Escaping)
        ]
        assert min(exps) == f.base_radius_exp

    def test_not_in_basin(self):
        f = quad(0)
        with pytest.raises(NotInBasin):
            boettcher_modulus(f, Q3.scalar(0))

    def test_budget_exhausted(self):
        f = MarkedPolynomial.from_critical_data(
            [
                (Q3.scalar(0), 2),
                (Q3.scalar(F(1, 3)), 2),
                (Q3.scalar(F(-1, 3)), 2),
            ],
            Q3.scalar(9),
        )
        with pytest.raises(BudgetExhausted):
            boettcher_modulus(f, Q3.scalar(0), budget=10)


class TestClassificationSuite:
    def test_tame_shift_locus(self):
        assert julia_in_affine(quad(-1, 3)) is Classification.TAME_SHIFT_LOCUS

    def test_simple(self):
        assert julia_in_affine(quad(0)) is Classification.SIMPLE

    def test_has_bounded_fatou(self):
        assert julia_in_affine(quad(-1)) is Classification.HAS_BOUNDED_FATOU

    def test_julia_in_affine(self):
        assert julia_in_affine(julia_cubic()) is Classification.JULIA_IN_AFFINE

    def test_certified_invariant_disk_classifies(self):
        # not a fixed critical point, so the disk verdict wins
        assert julia_in_affine(quad(3), budget=12) is Classification.HAS_BOUNDED_FATOU

    def test_unknown(self):
        f = MarkedPolynomial.from_critical_data(
            [
                (Q3.scalar(0), 2),
                (Q3.scalar(F(1, 3)), 2),
                (Q3.scalar(F(-1, 3)), 2),
            ],
            Q3.scalar(9),
        )
        assert julia_in_affine(f, budget=12) is Classification.UNKNOWN

    def test_report_contains_records(self):
        cls, records = classification_report(quad(-1, 3))
        assert cls is Classification.TAME_SHIFT_LOCUS
        assert records == [Escaping(1)]
