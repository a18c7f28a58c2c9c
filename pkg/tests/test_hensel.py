from fractions import Fraction

import pytest

from tamedyn.errors import HypothesisViolated, MaxIterExceeded
from tamedyn.hensel import LiftParams, lift
from tamedyn.polynomial import poly_eval
from tamedyn.valued_field import PAdic, SeriesT, Val

Q3 = PAdic(3)


def F(*args):
    return Fraction(*args)


def poly(*coeffs, backend=Q3):
    return [backend.scalar(c) for c in coeffs]


class TestLift:
    def test_identity_when_equal(self):
        f = poly(0, 1, 1)  # z^2 + z
        res = lift(f, f, Q3.scalar(0), target=20)
        assert res.value == Q3.scalar(0)
        assert res.iterations == ()
        assert res.certified_valuation.is_infinite

    def test_spec_perturbation(self):
        f = poly(0, 1, 1)
        g = poly(27, 1, 1)  # f + 3^3
        res = lift(f, g, Q3.scalar(0), target=20)
        # first step is w_0 = -(f(0)-g(0))/f'(0) = 3^3
        assert res.iterations[0].w_valuation == Val(3)
        assert res.certified_valuation >= Val(20)
        assert res.displacement_valuation >= Val(3)
        # certify independently
        fz = poly_eval(f, res.value, Q3.zero)
        gx = poly_eval(g, Q3.scalar(0), Q3.zero)
        assert (fz - gx).valuation() >= Val(20)

    def test_per_step_quadratic_law(self):
        f = poly(0, 1, 1)
        g = poly(27, 1, 1)
        res = lift(f, g, Q3.scalar(0), target=40)
        ws = [st.w_valuation.finite for st in res.iterations]
        for a, b in zip(ws, ws[1:]):
            assert b >= 2 * a  # unit derivative: exact doubling or better

    def test_trace_contractions(self):
        f = poly(1, 2, 0, 1)  # z^3 + 2z + 1, f' = 3z^2 + 2 unit at 0
        g = poly(1 + 81, 2, 0, 1)
        res = lift(f, g, Q3.scalar(0), target=36)
        mu = res.params.mu
        rs = [st.residual_valuation.finite for st in res.iterations]
        for a, b in zip(rs, rs[1:]):
            assert b > a + mu
        assert res.certified_valuation >= Val(36)

    def test_at_nonzero_points(self):
        f = poly(0, 1, 1)
        g = poly(27, 1, 1)
        for xval in (3, 9, F(1, 2)):  # f'(x) = 2x+1 is a unit at these
            res = lift(f, g, Q3.scalar(xval), target=24)
            assert res.certified_valuation >= Val(24)
            assert res.displacement_valuation > Val(0)

    def test_hypothesis_reduction_mismatch(self):
        f = poly(0, 1, 1)
        g = poly(1, 1, 1)  # constant differs by a unit
        with pytest.raises(HypothesisViolated) as e:
            lift(f, g, Q3.scalar(0), target=10)
        assert e.value.clause == 2

    def test_hypothesis_gauss_not_fixed(self):
        f = poly(0, F(1, 3), 1)
        with pytest.raises(HypothesisViolated) as e:
            lift(f, f, Q3.scalar(0), target=10)
        assert e.value.clause == 1

    def test_hypothesis_bad_derivative(self):
        f = poly(0, 3, 1)  # f' = 2z + 3: v(f'(0)) = 1
        g = poly(27, 3, 1)
        with pytest.raises(HypothesisViolated) as e:
            lift(f, g, Q3.scalar(0), target=10)
        assert e.value.clause == 3

    def test_max_iter(self):
        f = poly(0, 1, 1)
        g = poly(27, 1, 1)
        params = LiftParams.auto(F(3), 2, max_iter=1)
        with pytest.raises(MaxIterExceeded):
            lift(f, g, Q3.scalar(0), target=1000, params=params)

    def test_series_backend(self):
        qt = SeriesT(precision=24)
        f = [qt.scalar(0), qt.scalar(1), qt.scalar(1)]
        g = [qt.scalar(terms=[(3, 1)]), qt.scalar(1), qt.scalar(1)]
        res = lift(f, g, qt.scalar(0), target=20)
        assert res.certified_valuation >= Val(20)

    def test_determinism(self):
        f = poly(0, 1, 1)
        g = poly(27, 1, 1)
        r1 = lift(f, g, Q3.scalar(0), target=20)
        r2 = lift(f, g, Q3.scalar(0), target=20)
        assert r1.value == r2.value and r1.iterations == r2.iterations
