"""JSON encoding of scalars, points, polynomials and reports.

Every numeric field is an exact rational string ("a/b", "inf"); series
scalars are sorted (exponent, coefficient) pair lists.  Encoders keep a
stable field order so reports are byte-identical across runs.
"""

from __future__ import annotations

from fractions import Fraction

from tamedyn.berkovich import BerkPoint
from tamedyn.errors import TamedynError
from tamedyn.polynomial import CriticalMark, MarkedPolynomial
from tamedyn.valued_field import INF, PAdic, Scalar, SeriesT, Val


class InputError(TamedynError):
    """Malformed input file or inconsistent backends."""


def val_str(v: Val) -> str:
    return "inf" if v.is_infinite else str(v.finite)


def val_from_str(s: str) -> Val:
    if s == "inf":
        return INF
    return Val(Fraction(s))


def backend_to_json(backend) -> dict:
    if isinstance(backend, PAdic):
        return {"kind": "padic", "p": backend.p}
    return {
        "kind": "series",
        "precision": str(backend.precision),
        "ram_den": backend.ram_den,
    }


def backend_from_json(data: dict):
    try:
        kind = data["kind"]
        if kind == "padic":
            return PAdic(int(data["p"]))
        if kind == "series":
            return SeriesT(Fraction(data["precision"]), int(data.get("ram_den", 1)))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad backend spec: {exc}") from exc
    raise InputError(f"unknown backend kind: {kind!r}")


def scalar_to_json(x: Scalar):
    if x._rat is not None:
        return str(x._rat)
    return [[str(e), str(c)] for e, c in x.terms]


def scalar_from_json(backend, data) -> Scalar:
    try:
        if isinstance(data, (str, int)):
            value = Fraction(data)
            if isinstance(backend, PAdic):
                return backend.scalar(value)
            return backend.scalar(value)
        if isinstance(data, list):
            if isinstance(backend, PAdic):
                raise InputError("series literal for a p-adic backend")
            return backend.scalar(terms=[(Fraction(e), Fraction(c)) for e, c in data])
    except InputError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad scalar literal {data!r}: {exc}") from exc
    raise InputError(f"bad scalar literal {data!r}")


def point_to_json(x: BerkPoint) -> dict:
    return {"center": scalar_to_json(x.center), "radius_exp": val_str(x.radius_exp)}


def point_from_json(backend, data) -> BerkPoint:
    return BerkPoint(
        scalar_from_json(backend, data["center"]), val_from_str(data["radius_exp"])
    )


def polynomial_to_json(f: MarkedPolynomial) -> dict:
    return {
        "backend": backend_to_json(f.backend),
        "degree": f.degree,
        "marks": [
            {"c": scalar_to_json(m.point), "mult": m.multiplicity} for m in f.marks
        ],
        "b": scalar_to_json(f.coeffs[0]),
    }


def polynomial_from_json(data: dict) -> MarkedPolynomial:
    """Accepts {"backend", "marks", "b"} or {"backend", "coeffs", "marks"}."""
    backend = backend_from_json(data.get("backend", {}))
    try:
        marks = [
            CriticalMark(scalar_from_json(backend, m["c"]), int(m["mult"]))
            for m in data["marks"]
        ]
        if "coeffs" in data:
            coeffs = [scalar_from_json(backend, c) for c in data["coeffs"]]
            f = MarkedPolynomial.from_coefficients(coeffs, marks)
        else:
            b = scalar_from_json(backend, data["b"])
            f = MarkedPolynomial.from_critical_data(marks, b)
    except KeyError as exc:
        raise InputError(f"missing polynomial field: {exc}") from exc
    if "degree" in data and int(data["degree"]) != f.degree:
        raise InputError(
            f"declared degree {data['degree']} does not match computed {f.degree}"
        )
    return f


def raw_coefficients_from_json(data: dict) -> list[Scalar]:
    """Coefficient list for operations that need no critical data."""
    backend = backend_from_json(data.get("backend", {}))
    if "coeffs" not in data:
        raise InputError("raw polynomial input needs a coeffs list")
    return [scalar_from_json(backend, c) for c in data["coeffs"]]
