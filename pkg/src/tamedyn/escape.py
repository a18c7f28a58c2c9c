"""Orbit classification of critical points and the basin-of-infinity tests.

Escape is decided by exact iteration: the orbit leaves the base disk or
it does not within the budget.  Non-escape is only ever certified
structurally, from an exact cycle of orbit values; the kind of the
bounded component is then resolved by pulling the base point back along
the orbit with exact piecewise-linear inversions.

For an eventually periodic orbit the pullback over one period is a
single convex increasing piecewise-linear map W (a max of finitely many
affine maps with slopes 1/k, computed exactly by composing the inverted
ray maps).  Iterating W from the base exponent is decidable in closed
form: on each affine piece the iteration either fixes, converges to the
piece's affine fixed point (geometric sum, exact), or crosses into the
next piece after an exactly computed number of steps.  A finite limit
exponent means the critical point sits in a closed-disk component of
that diameter; divergence means the component is the point itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from tamedyn.berkovich import BerkPoint
from tamedyn.errors import BudgetExhausted, NotInBasin
from tamedyn.polynomial import CriticalMark, MarkedPolynomial, PiecewiseMonomial
from tamedyn.valued_field import Scalar, Val

DEFAULT_BUDGET = 64
DEFAULT_DESCENT_DEPTH = 32
MAX_HEIGHT_BITS = 100_000


@dataclass(frozen=True)
class Escaping:
    first_exit: int


@dataclass(frozen=True)
class Bounded:
    kind: str  # "disk" | "point" | "undetermined"
    diam_exp: Fraction | None = None
    preperiod: int = 0
    period: int = 0


@dataclass(frozen=True)
class Unknown:
    budget_spent: int


EscapeRecord = Union[Escaping, Bounded, Unknown]


class Classification(Enum):
    SIMPLE = "Simple"
    TAME_SHIFT_LOCUS = "TameShiftLocus"
    JULIA_IN_AFFINE = "JuliaInAffine"
    HAS_BOUNDED_FATOU = "HasBoundedFatou"
    UNKNOWN = "Unknown"


def _height_bits(x: Scalar) -> int:
    if x._rat is not None:
        q = x._rat
        return q.numerator.bit_length() + q.denominator.bit_length()
    total = 0
    for _, c in x.terms:
        total += c.numerator.bit_length() + c.denominator.bit_length()
    return total


# -- convex increasing piecewise-linear maps (max of affine) ------------


class MaxAffine:
    """max_i (s_i x + b_i) with positive rational slopes; exact."""

    __slots__ = ("lines",)

    def __init__(self, lines):
        # group by slope, keep maximal intercept, then prune to the
        # upper envelope
        by_slope: dict[Fraction, Fraction] = {}
        for s, b in lines:
            if s not in by_slope or b > by_slope[s]:
                by_slope[s] = b
        cand = sorted(by_slope.items())
        hull: list[tuple[Fraction, Fraction]] = []
        xs: list[Fraction] = []
        for s, b in cand:
            while hull:
                s0, b0 = hull[-1]
                x = Fraction(b0 - b, s - s0)  # crossing with last hull line
                if xs and x <= xs[-1]:
                    hull.pop()
                    xs.pop()
                else:
                    hull.append((s, b))
                    xs.append(x)
                    break
            else:
                hull.append((s, b))
        self.lines = tuple(hull)

    def __call__(self, x: Fraction) -> Fraction:
        return max(s * x + b for s, b in self.lines)

    def compose(self, inner: "MaxAffine") -> "MaxAffine":
        """self(inner(x)); valid since all slopes are positive."""
        lines = []
        for s1, b1 in self.lines:
            for s2, b2 in inner.lines:
                lines.append((s1 * s2, s1 * b2 + b1))
        return MaxAffine(lines)

    def pieces(self):
        """(lo, hi, slope, intercept) from left; None bounds are infinite."""
        lines = self.lines
        if len(lines) == 1:
            s, b = lines[0]
            return [(None, None, s, b)]
        bounds: list[Fraction] = []
        for (s0, b0), (s1, b1) in zip(lines, lines[1:]):
            bounds.append(Fraction(b0 - b1, s1 - s0))
        out = []
        for i, (s, b) in enumerate(lines):
            lo = bounds[i - 1] if i > 0 else None
            hi = bounds[i] if i < len(bounds) else None
            out.append((lo, hi, s, b))
        return out


def _pullback_of(seg: PiecewiseMonomial) -> MaxAffine:
    """Inverse of the ray map as a max-affine form."""
    return MaxAffine([(Fraction(1, k), Fraction(-v, k)) for k, v in seg.lines])


def iterate_pl_to_limit(W: MaxAffine, start: Fraction):
    """Limit of r -> W(r) from start, requiring W(start) >= start.

    Returns ("fixed", limit) or ("diverges", None).  Exact and total:
    each affine piece is resolved in closed form.
    """
    pieces = W.pieces()
    r = start
    for _ in range(len(pieces) + 2):
        w = W(r)
        if w == r:
            return "fixed", r
        if w < r:
            raise AssertionError("pullback iteration must be nondecreasing")
        # piece carrying the forward motion at r (highest slope attaining)
        idx = max(i for i, (lo, hi, s, b) in enumerate(pieces)
                  if (lo is None or r >= lo) and s * r + b == w)
        lo, hi, s, b = pieces[idx]
        if s == 1:
            if hi is None:
                return "diverges", None
            step = w - r
            n = -((r - hi) // step)  # ceil((hi - r)/step)
            r = r + n * step
        else:
            # s < 1 strictly on pullbacks; affine fixed point of the piece
            fix = b / (1 - s)
            if hi is None or fix <= hi:
                return "fixed", fix
            # cross hi after exactly n steps: (fix - r) s^n <= fix - hi
            gap = fix - r
            target = fix - hi
            n = 0
            while gap > target:
                gap *= s
                n += 1
            r = fix - gap
    raise AssertionError("piece-jumping failed to settle")


def _orbit_until_exit(f: MarkedPolynomial, start: Scalar, budget: int):
    """("escape", m, values) on first exit, ("cycle", (preperiod, period),
    values), or ("unknown", n, values)."""
    base = Val(f.base_radius_exp)
    values = [start]
    if start.valuation() < base:
        return "escape", 0, values
    seen = {start: 0}
    z = start
    for n in range(1, budget + 1):
        z = f(z)
        if z.valuation() < base:
            values.append(z)
            return "escape", n, values
        if z in seen:
            return "cycle", (seen[z], n - seen[z]), values
        if _height_bits(z) > MAX_HEIGHT_BITS:
            return "unknown", n, values
        seen[z] = n
        values.append(z)
    return "unknown", budget, values


def _resolve_bounded(f: MarkedPolynomial, values, preperiod: int, period: int) -> Bounded:
    base = f.base_radius_exp
    maps = [f.segment_dynamics(values[j]) for j in range(preperiod + period)]
    # pullback of one period at orbit position `preperiod`:
    # apply the inverses of maps preperiod+period-1, ..., preperiod
    W = _pullback_of(maps[preperiod])
    for j in range(preperiod + 1, preperiod + period):
        W = W.compose(_pullback_of(maps[j]))
    status, limit = iterate_pl_to_limit(W, base)
    if status == "diverges":
        return Bounded("point", preperiod=preperiod, period=period)
    # pull the cycle limit back through the preperiod
    q = limit
    for j in reversed(range(preperiod)):
        q = maps[j].invert(q)
    return Bounded("disk", diam_exp=q, preperiod=preperiod, period=period)


def classify_critical(f: MarkedPolynomial, mark: CriticalMark,
                      budget: int = DEFAULT_BUDGET,
                      descent_depth: int = DEFAULT_DESCENT_DEPTH) -> EscapeRecord:
    """EscapeRecord of a marked critical point under exact iteration.

    descent_depth is accepted for API stability; the bounded-kind
    resolution is closed-form and does not need it.
    """
    f.require_tame()
    status, data, values = _orbit_until_exit(f, mark.point, budget)
    if status == "escape":
        return Escaping(data)
    if status == "unknown":
        if f.base_radius_exp == 0:
            # base exponent 0 forces integral coefficients, so the unit
            # disk maps into itself and equals the filled Julia set: the
            # mark is bounded with the full disk as its component
            return Bounded("disk", diam_exp=Fraction(0))
        return Unknown(data)
    preperiod, period = data
    return _resolve_bounded(f, values, preperiod, period)


def boettcher_modulus(f: MarkedPolynomial, x, budget: int = DEFAULT_BUDGET) -> Val:
    """Exact exponent of the extended coordinate modulus at x.

    Iterates until the point leaves the base disk, then divides the exit
    exponent by the accumulated degree power; exact rational.
    """
    if isinstance(x, Scalar):
        x = BerkPoint.classical(x)
    base = Val(f.base_radius_exp)
    d = f.degree
    if f.base_radius_exp == 0 and x.modulus_exp() >= base:
        raise NotInBasin("the unit disk is the filled Julia set here")
    cur = x
    seen = []
    for n in range(budget + 1):
        e = cur.modulus_exp()
        if e < base:
            return Val(e.finite / d ** n)
        for old in seen:
            if old == cur:
                raise NotInBasin("orbit is periodic inside the base disk")
        seen.append(cur)
        if _height_bits(cur.center) > MAX_HEIGHT_BITS:
            raise BudgetExhausted("orbit values exceeded the height guard")
        img, _ = f.image_point(cur)
        cur = img
    raise BudgetExhausted(f"no exit from the base disk within {budget} iterations")


def classification_report(f: MarkedPolynomial, budget: int = DEFAULT_BUDGET,
                          descent_depth: int = DEFAULT_DESCENT_DEPTH):
    """Per-mark EscapeRecords plus the aggregate classification.

    Aggregation order: all escaping -> TameShiftLocus; all bounded at a
    fixed critical point filling the base disk -> Simple; any witnessed
    disk component -> HasBoundedFatou; escaping/point components only ->
    JuliaInAffine; anything unresolved -> Unknown.
    """
    f.require_tame()
    records = [classify_critical(f, m, budget, descent_depth) for m in f.marks]
    base = f.base_radius_exp

    def is_fixed_full_disk(mark, rec):
        return (
            isinstance(rec, Bounded)
            and rec.kind == "disk"
            and rec.diam_exp == base
            and f(mark.point) == mark.point
        )

    if all(isinstance(r, Escaping) for r in records):
        return Classification.TAME_SHIFT_LOCUS, records
    if all(is_fixed_full_disk(m, r) for m, r in zip(f.marks, records)):
        return Classification.SIMPLE, records
    if any(isinstance(r, Bounded) and r.kind == "disk" for r in records):
        return Classification.HAS_BOUNDED_FATOU, records
    if all(
        isinstance(r, Escaping) or (isinstance(r, Bounded) and r.kind == "point")
        for r in records
    ):
        return Classification.JULIA_IN_AFFINE, records
    return Classification.UNKNOWN, records


def julia_in_affine(f: MarkedPolynomial, budget: int = DEFAULT_BUDGET) -> Classification:
    classification, _ = classification_report(f, budget)
    return classification
