"""Family specifier strings and their fixed default radii.

    leroy:r=<complex>
    bessel:alpha=<real>
    counterexample:R=<real>
    exppoly:k=<complex>;P=<a0,a1,...>
    file:<path>
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .exact import parse_exact, parse_rational
from .series_core import CoefficientStream, load_jsonl_file
from .special_functions import (
    BesselParams,
    ExpPolyModel,
    LeRoyParams,
    bessel_reduced_coeffs,
    counterexample_coeffs,
    exp_poly_stream,
    le_roy_coeffs,
)


@dataclass(frozen=True)
class Family:
    spec: str
    kind: str
    stream: CoefficientStream
    default_radii: Tuple[float, ...]
    params: object = None
    model: Optional[ExpPolyModel] = None


def _fields(body: str, names) -> dict:
    out = {}
    for part in body.split(";"):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {part!r}")
        key = key.strip()
        if key not in names:
            raise ValueError(f"unknown parameter {key!r}; expected one of {', '.join(names)}")
        out[key] = value.strip()
    missing = [n for n in names if n not in out]
    if missing:
        raise ValueError(f"missing parameter(s): {', '.join(missing)}")
    return out


def parse_family(spec: str) -> Family:
    kind, sep, body = spec.partition(":")
    if not sep:
        raise ValueError(f"family specifier {spec!r} must look like <kind>:<params>")
    kind = kind.strip().lower()
    if kind == "leroy":
        p = LeRoyParams(parse_exact(_fields(body, ("r",))["r"]))
        return Family(spec, kind, le_roy_coeffs(p), (2.0, 10.0, 20.0), params=p)
    if kind == "bessel":
        p = BesselParams(parse_rational(_fields(body, ("alpha",))["alpha"]))
        return Family(spec, kind, bessel_reduced_coeffs(p), (10.0, 40.0, 100.0), params=p)
    if kind == "counterexample":
        R = parse_rational(_fields(body, ("R",))["R"])
        if R <= 0:
            raise ValueError("R must be positive")
        r = float(R)
        return Family(spec, kind, counterexample_coeffs(R), (r, 10 * r, 50 * r), params=R)
    if kind == "exppoly":
        f = _fields(body, ("k", "P"))
        P = tuple(parse_exact(a) for a in f["P"].split(",") if a.strip())
        model = ExpPolyModel(parse_exact(f["k"]), P)
        return Family(spec, kind, exp_poly_stream(model), (1.0, 2.0, 5.0), model=model)
    if kind == "file":
        path = body.strip()
        if not path:
            raise ValueError("file: specifier needs a path")
        return Family(spec, kind, load_jsonl_file(path), (1.0, 2.0, 5.0))
    raise ValueError(f"unknown family kind {kind!r}")
