"""Newton lifting of one polynomial to another near the Gauss point.

Given f and g fixing the Gauss point with equal reductions, and a point
x of the unit region where f has unit derivative, the scheme

    z_0 = x,   w_n = -(f(z_n) - g(x)) / f'(z_n),   z_{n+1} = z_n + w_n

converges quadratically to the value h(x) of the conjugating map with
f(h(x)) = g(x).  Both displayed contraction inequalities are checked on
every step of the trace, in exact valuation form; the returned residual
valuation is certified by direct evaluation.

Inputs may be marked polynomials or raw coefficient sequences; the
construction never needs critical data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from tamedyn.errors import ContractionFailed, HypothesisViolated, MaxIterExceeded
from tamedyn.polynomial import MarkedPolynomial, poly_derivative, poly_eval
from tamedyn.valued_field import INF, PAdic, Scalar, Val

DEFAULT_MAX_ITER = 32
REDUCE_MARGIN = 8


@dataclass(frozen=True)
class LiftParams:
    """Valuation-form region parameters.

    s: lower bound for v(f - g) on the unit region (Gauss valuation of
    the coefficient difference); mu: contraction gap, 0 < mu < s;
    r_exp: negative exponent of the working region radius.  The proof's
    inequalities read mu + d*r_exp > 0 and s + d*r_exp > mu.
    """

    s: Fraction
    mu: Fraction
    r_exp: Fraction
    max_iter: int = DEFAULT_MAX_ITER

    def validate(self, degree: int):
        if not (0 < self.mu < self.s):
            raise HypothesisViolated("need 0 < mu < s", clause="params")
        if not (self.mu + degree * self.r_exp > 0):
            raise HypothesisViolated("mu + d*r_exp must be positive", clause="params")
        if not (self.s + degree * self.r_exp > self.mu):
            raise HypothesisViolated("s + d*r_exp must exceed mu", clause="params")

    @classmethod
    def auto(cls, s: Fraction, degree: int, max_iter: int = DEFAULT_MAX_ITER) -> "LiftParams":
        mu = s / 2
        r_exp = -s / (4 * degree)
        return cls(s=s, mu=mu, r_exp=r_exp, max_iter=max_iter)


@dataclass(frozen=True)
class LiftStep:
    index: int
    w_valuation: Val
    residual_valuation: Val


@dataclass(frozen=True)
class LiftResult:
    value: Scalar
    iterations: tuple[LiftStep, ...]
    certified_valuation: Val
    displacement_valuation: Val  # v(h(x) - x)
    params: LiftParams


def _coefficients(poly) -> list[Scalar]:
    if isinstance(poly, MarkedPolynomial):
        return list(poly.coeffs)
    return list(poly)


def _check_gauss_fixed(coeffs: list[Scalar], name: str):
    kmin = None
    for k, c in enumerate(coeffs):
        v = c.valuation()
        if v < Val(0):
            raise HypothesisViolated(
                f"{name} does not preserve the unit disk: v(coeff {k}) < 0", clause=1
            )
        if k >= 1 and v == Val(0):
            kmin = k
    if kmin is None:
        raise HypothesisViolated(
            f"{name} does not fix the Gauss point: no unit coefficient of degree >= 1",
            clause=1,
        )


def lift(f, g, x: Scalar, target, params: LiftParams | None = None) -> LiftResult:
    """Solve f(h(x)) = g(x) for h(x) near x, with certified residual.

    Hypotheses checked: (1) both polynomials fix the Gauss point,
    (2) their reductions agree (coefficientwise positive valuation of
    the difference), (3) unit derivative at x; plus unit-region
    membership v(x) >= 0.
    """
    target = Fraction(target)
    fc = _coefficients(f)
    gc = _coefficients(g)
    backend = fc[0].backend
    zero = backend.zero
    degree = len(fc) - 1
    _check_gauss_fixed(fc, "f")
    _check_gauss_fixed(gc, "g")
    width = max(len(fc), len(gc))
    fpad = fc + [zero] * (width - len(fc))
    gpad = gc + [zero] * (width - len(gc))
    s = INF
    for cf, cg in zip(fpad, gpad):
        s = min(s, (cf - cg).valuation())
    if not (s > Val(0)):
        raise HypothesisViolated("reductions of f and g differ", clause=2)
    if x.valuation() < Val(0):
        raise HypothesisViolated("x lies outside the unit region", clause="region")
    fprime = poly_derivative(fc)

    if params is None:
        s_val = target if s.is_infinite else s.finite
        params = LiftParams.auto(s_val, degree)
    params.validate(degree)

    reduce_exp = None
    if isinstance(backend, PAdic):
        reduce_exp = int(target.__ceil__()) + REDUCE_MARGIN

    gx = poly_eval(gc, x, zero)
    z = x
    steps: list[LiftStep] = []
    prev_w: Val | None = None
    prev_res: Val | None = None
    for n in range(params.max_iter + 1):
        residual = poly_eval(fc, z, zero) - gx
        res_v = residual.valuation()
        if prev_res is not None and not res_v.is_infinite:
            if not (res_v > prev_res + params.mu):
                raise ContractionFailed(
                    f"residual stalled at step {n}: {res_v} vs {prev_res} + {params.mu}"
                )
        if res_v >= Val(target):
            displacement = (z - x).valuation()
            return LiftResult(z, tuple(steps), res_v, displacement, params)
        deriv = poly_eval(fprime, z, zero)
        if deriv.valuation() != Val(0):
            raise HypothesisViolated(
                f"derivative is not a unit at iterate {n}", clause=3
            )
        w = -residual / deriv
        w_v = w.valuation()
        if prev_w is not None and not w_v.is_infinite:
            if not (w_v > prev_w + params.mu):
                raise ContractionFailed(
                    f"step size stalled at step {n}: {w_v} vs {prev_w} + {params.mu}"
                )
        steps.append(LiftStep(n, w_v, res_v))
        z = z + w
        if reduce_exp is not None:
            z = z.mod_reduce(reduce_exp)
        prev_w, prev_res = w_v, res_v
    raise MaxIterExceeded(f"no convergence to valuation {target} in {params.max_iter} steps")
