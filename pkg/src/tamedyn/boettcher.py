"""Pointwise evaluation of the coordinate conjugating f to z^d near infinity.

phi(z) is computed as the convergent product

    z * prod_{n >= 0} ( f^(n+1)(z) / f^n(z)^d )^(1/d^(n+1))

where every factor is a 1-unit rooted by the canonical branch (the root
congruent to 1), which pins the normalization phi(z)/z -> 1.  With
v(z) = v0 strictly below the base exponent, factor n is a 1-unit of
valuation at least 2*(base - d^n*v0), so finitely many factors reach any
requested precision; the count is chosen from that exact tail bound.

The closeness comparator evaluates both coordinates at each critical
point's first-exit orbit value and reports the minimal valuation gap,
relative to the value's own modulus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from tamedyn.errors import (
    BudgetExhausted,
    NotComparable,
    NotOutsideBaseDisk,
    PrecisionExhausted,
    RootUnavailable,
)
from tamedyn.escape import Escaping, Unknown, classify_critical
from tamedyn.polynomial import MarkedPolynomial
from tamedyn.valued_field import INF, PAdic, Scalar, SeriesT, Val, nth_root_unit

DEFAULT_PRECISION = Fraction(40)
ROOT_MARGIN = 4


def phi_eval(f: MarkedPolynomial, z: Scalar, precision=DEFAULT_PRECISION) -> Scalar:
    """phi(z) to the given absolute valuation precision.

    Requires |z| strictly outside the closed base disk; over PAdic the
    residue characteristic must not divide the degree (root extraction).
    """
    f.require_tame()
    precision = Fraction(precision)
    backend = f.backend
    d = f.degree
    if isinstance(backend, PAdic) and d % backend.p == 0:
        raise RootUnavailable(f"{backend.p} divides the degree {d}")
    base = f.base_radius_exp
    v0 = z.valuation()
    if not (v0 < Val(base)):
        raise NotOutsideBaseDisk("phi is only evaluated strictly outside the base disk")
    v0 = v0.finite
    if isinstance(backend, SeriesT) and precision > backend.precision:
        raise PrecisionExhausted(
            f"requested precision {precision} exceeds the series cutoff"
        )
    rel_target = precision - v0
    phi = z
    w = z
    n = 0
    while 2 * (base - d ** n * v0) < rel_target:
        fw = f(w)
        u = fw / (w ** d)
        root = nth_root_unit(u, d ** (n + 1), precision=rel_target + ROOT_MARGIN)
        phi = phi * root
        w = fw
        n += 1
    return phi


@dataclass(frozen=True)
class RhoBound:
    """Lower bound on the valuation gap between the two coordinates along
    first-exit critical values, relative to their modulus.

    rho_exp = INF means no difference was detected at the working
    precision (the spec's operational reading of equal coordinates)."""

    rho_exp: Val
    precision: Fraction

    @property
    def is_infinite(self) -> bool:
        return self.rho_exp.is_infinite


def _first_exits(f: MarkedPolynomial, budget: int):
    out = []
    for mark in f.marks:
        rec = classify_critical(f, mark, budget)
        if isinstance(rec, Unknown):
            raise BudgetExhausted(
                f"critical mark at {mark.point!r} unresolved within budget"
            )
        out.append(rec.first_exit if isinstance(rec, Escaping) else None)
    return out


def rho_closeness(f: MarkedPolynomial, g: MarkedPolynomial,
                  precision=DEFAULT_PRECISION, budget: int = 64) -> RhoBound:
    """Compare the two coordinates along index-aligned escaping marks.

    Preconditions: equal degree, equal base exponent, index-aligned mark
    multiplicities, and matching escape patterns (same escaping indices
    with the same first-exit times); otherwise NotComparable.  Only the
    first-exit iterates are evaluated; beyond them the comparison is
    propagated by the degree-d isometry off the axis.
    """
    precision = Fraction(precision)
    f.require_tame()
    g.require_tame()
    if f.backend != g.backend:
        raise NotComparable("different backends")
    if f.degree != g.degree:
        raise NotComparable("different degrees")
    if len(f.marks) != len(g.marks) or any(
        mf.multiplicity != mg.multiplicity for mf, mg in zip(f.marks, g.marks)
    ):
        raise NotComparable("marks are not index-aligned")
    if f.base_radius_exp != g.base_radius_exp:
        raise NotComparable("base points differ")
    exits_f = _first_exits(f, budget)
    exits_g = _first_exits(g, budget)
    if exits_f != exits_g:
        raise NotComparable(
            f"escape patterns differ: {exits_f} vs {exits_g}"
        )
    rho: Val = INF
    for mark_f, mark_g, m in zip(f.marks, g.marks, exits_f):
        if m is None:
            continue
        wf = mark_f.point
        for _ in range(m):
            wf = f(wf)
        wg = mark_g.point
        for _ in range(m):
            wg = g(wg)
        pf = phi_eval(f, wf, precision)
        pg = phi_eval(g, wg, precision)
        diff_v = (pf - pg).valuation()
        if diff_v >= Val(precision):
            continue  # indistinguishable at this precision
        rho = min(rho, diff_v - wf.valuation())
    return RhoBound(rho, precision)
