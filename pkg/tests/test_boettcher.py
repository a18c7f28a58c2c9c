from fractions import Fraction

import pytest

from tamedyn.boettcher import RhoBound, phi_eval, rho_closeness
from tamedyn.errors import NotComparable, NotOutsideBaseDisk, NotTame
from tamedyn.polynomial import MarkedPolynomial
from tamedyn.valued_field import PAdic, SeriesT, Val


def F(*args):
    return Fraction(*args)


Q3 = PAdic(3)


def quad(b):
    return MarkedPolynomial.from_critical_data([(Q3.scalar(0), 2)], Q3.scalar(b))


QUAD = quad(F(-1, 3))


class TestPhiEval:
    def test_monomial_identity(self):
        qt = SeriesT(precision=12)
        f = MarkedPolynomial.from_critical_data([(qt.scalar(0), 2)], qt.scalar(0))
        z = qt.scalar(terms=[(-1, 1)])  # 1/t
        assert phi_eval(f, z, 10) == z

    def test_monomial_identity_padic(self):
        f = quad(0)
        z = Q3.scalar(F(1, 9))
        assert phi_eval(f, z, 30) == z

    def test_functional_equation_residual(self):
        # the residual vanishes for the true values; computing both sides
        # at precision P + (d-1)|v(z)| certifies it at valuation P
        f = QUAD
        for z in (Q3.scalar(F(1, 3)), Q3.scalar(F(2, 3)), Q3.scalar(F(1, 27))):
            prec = 20 + (f.degree - 1) * max(0, -z.valuation().finite)
            lhs = phi_eval(f, f(z), prec)
            rhs = phi_eval(f, z, prec)
            assert (lhs - rhs * rhs).valuation() >= Val(20)

    def test_modulus_agreement(self):
        f = QUAD
        for z in (Q3.scalar(F(1, 3)), Q3.scalar(F(5, 9))):
            assert phi_eval(f, z, 25).valuation() == z.valuation()

    def test_asymptotic_to_identity(self):
        f = QUAD
        for z in (Q3.scalar(F(1, 3)), Q3.scalar(F(2, 9))):
            phi = phi_eval(f, z, 25)
            assert (phi / z - Q3.one).valuation() > Val(0)

    def test_precision_scaling(self):
        f = QUAD
        z = Q3.scalar(F(1, 3))
        lo = phi_eval(f, z, 10)
        hi = phi_eval(f, z, 40)
        assert (lo - hi).valuation() >= Val(10)

    def test_requires_outside_base_disk(self):
        with pytest.raises(NotOutsideBaseDisk):
            phi_eval(QUAD, Q3.scalar(1), 10)  # |1| = 1 < 3^(1/2)

    def test_wild_degree_rejected(self):
        # p | d forces p | deg at the base point, so tameness fails first;
        # the dedicated root check is unreachable for valid inputs
        Q2 = PAdic(2)
        f = MarkedPolynomial.from_critical_data([(Q2.scalar(0), 2)], Q2.scalar(F(1, 2)))
        with pytest.raises(NotTame):
            phi_eval(f, Q2.scalar(F(1, 4)), 10)

    def test_series_backend(self):
        qt = SeriesT(precision=14)
        f = MarkedPolynomial.from_critical_data(
            [(qt.scalar(0), 2)], qt.scalar(terms=[(-1, -1)])
        )  # z^2 - 1/t
        z = qt.scalar(terms=[(-1, 1)])
        phi = phi_eval(f, z, 10)
        lhs = phi_eval(f, f(z), 10)
        assert (lhs - phi * phi).valuation() >= Val(10)


class TestRhoCloseness:
    def test_identical(self):
        rb = rho_closeness(QUAD, QUAD, precision=20)
        assert rb.is_infinite

    def test_perturbed_pair(self):
        g = quad(F(-1, 3) + 3 ** 5)
        rb = rho_closeness(QUAD, g, precision=20)
        # frozen from the oracle run: the coordinates differ at valuation
        # gap 6 relative to the first-exit value (v = -1, diff at v = 5)
        assert rb.rho_exp == Val(6)

    def test_zero_rho_for_direction_mismatch(self):
        g = quad(F(-2, 3))
        rb = rho_closeness(QUAD, g, precision=20)
        assert rb.rho_exp == Val(0)

    def test_base_point_mismatch(self):
        with pytest.raises(NotComparable):
            rho_closeness(QUAD, quad(0), precision=20)

    def test_escape_pattern_mismatch(self):
        qt = SeriesT(precision=16)
        c1 = qt.scalar(terms=[(-1, 1)])
        c2 = qt.scalar(terms=[(-1, -1)])
        marks = [(c1, 2), (c2, 2)]
        # first critical point bounded (lands on a repelling fixed point)
        f = MarkedPolynomial.from_critical_data(
            marks, qt.scalar(terms=[(-3, 2), (-1, -2)])
        )
        # both critical points escape at the first step, same base exponent
        g = MarkedPolynomial.from_critical_data(
            marks, qt.scalar(terms=[(-3, 4)])
        )
        assert f.base_radius_exp == g.base_radius_exp
        with pytest.raises(NotComparable):
            rho_closeness(f, g, precision=10)

    def test_refinement_under_precision(self):
        g = quad(F(-1, 3) + 3 ** 5)
        lo = rho_closeness(QUAD, g, precision=12)
        hi = rho_closeness(QUAD, g, precision=30)
        assert lo.rho_exp == hi.rho_exp == Val(6)

    def test_no_escaping_marks_is_infinite(self):
        f, g = quad(0), quad(-1)
        # no escaping critical points on either side: nothing to compare
        assert rho_closeness(f, quad(0), precision=10).is_infinite
        rb = rho_closeness(f, g, precision=10)
        assert rb.is_infinite
