"""Argument-principle zero counting and localization in disks.

An evaluator is any callable ``f(z, eps) -> EvalResult`` returning a value
with a certified error bound; :class:`~zeroscope.series_core.CertifiedSeries`
is the usual one.  If it also has ``derivative(z, eps)``, Newton polishing
uses it, otherwise a central difference is taken.

The winding number is accumulated from principal-value phase increments
between adaptively refined samples on the circle.  An arc is accepted only
when its phase step is below pi/2 and

    min(|f(a)|, |f(b)|) - max(err(a), err(b)) - |f(b) - f(a)| / 2 > 0,

the last term being the first-order (Lipschitz) allowance for the modulus
between the two samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence

from .errors import ContourNearZero, PrecisionExhausted, SubdivisionStall, Unresolvable, ZeroscopeError
from .precision import ctx, working_precision
from .series_core import CertifiedSeries, stream_from_list

DEFAULT_EVAL_EPS = 1e-25
INITIAL_SAMPLES = 32
MAX_SAMPLES = 2**20
PERTURBATIONS = (1.001, 0.999, 1.002, 0.998, 1.003, 0.997, 1.004, 0.996)
CHILD_SCALE = 0.75
NEWTON_MAX_ITER = 80
NEWTON_HALVINGS = 30
MAX_EVAL_BITS = 4096
REACH_FACTOR = 2


@dataclass(frozen=True)
class Disk:
    center: object
    radius: object

    def __post_init__(self):
        object.__setattr__(self, "center", ctx.mpc(self.center))
        object.__setattr__(self, "radius", ctx.mpf(self.radius))
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")

    def point(self, t):
        """Boundary point at turn fraction ``t``."""
        return self.center + self.radius * ctx.expjpi(2 * t)

    def contains(self, z, margin=0) -> bool:
        return abs(ctx.convert(z) - self.center) < self.radius - margin

    def scaled(self, factor) -> "Disk":
        return Disk(self.center, self.radius * factor)

    def children(self) -> List["Disk"]:
        """Four overlapping disks of radius 0.75 r that cover this disk."""
        off = self.radius / 2
        return [
            Disk(self.center + off * ctx.expjpi(ctx.mpf(2 * j + 1) / 4), self.radius * CHILD_SCALE)
            for j in range(4)
        ]


class WindingResult(NamedTuple):
    count: int
    disk: Disk
    min_modulus: object
    samples: int


@dataclass(frozen=True)
class LocatedZero:
    location: object
    error_radius: object
    multiplicity: int
    residual: object = None
    eval_error: object = None
    stalled: bool = False


@dataclass
class ZeroReport:
    count: int
    zeros: List[LocatedZero]
    contour_min_modulus: object
    samples_used: int
    disk: Disk = None
    diagnostics: List[str] = field(default_factory=list)


def polynomial_evaluator(coeffs: Sequence, label: str = "poly") -> CertifiedSeries:
    """Evaluator for ``sum coeffs[i] z^i`` (exact or floating coefficients)."""
    return CertifiedSeries(stream_from_list(list(coeffs), label))


def _eval_once(f, z, eps):
    """``f(z, eps)``, retried once at the suggested precision on :class:`PrecisionExhausted`."""
    try:
        return f(z, eps)
    except PrecisionExhausted as exc:
        bits = exc.suggested_bits
        if bits is None or bits > MAX_EVAL_BITS:
            raise
        with working_precision(max(bits + 32, ctx.prec)):
            return f(z, eps)


def _eval(f, z, eps):
    """Evaluate, tightening ``eps`` while the value does not clear its error bound."""
    res = _eval_once(f, z, eps)
    floor = ctx.ldexp(ctx.one, -int(ctx.prec * 0.8))
    while abs(res.value) <= 2 * res.error_bound and eps > floor:
        eps = max(floor, eps * ctx.mpf(10) ** -12)
        try:
            res = _eval_once(f, z, eps)
        except PrecisionExhausted:
            break
    return res


def winding_detail(f, d: Disk, eps=DEFAULT_EVAL_EPS, *, max_samples: int = MAX_SAMPLES) -> WindingResult:
    """Number of zeros of ``f`` inside ``d`` (with multiplicity) by the argument principle."""
    eps = ctx.convert(eps)
    half_pi = math.pi / 2
    min_width = ctx.ldexp(ctx.one, -int(ctx.prec * 0.6))

    def sample(t):
        res = _eval(f, d.point(t), eps)
        if abs(res.value) <= res.error_bound:
            raise ContourNearZero(f"|f| not certified nonzero at {ctx.nstr(d.point(t), 8)} on radius {ctx.nstr(d.radius, 8)}")
        # first-order zero-free radius around the sample; f' only needs relative accuracy
        df = _derivative_bound(f, d.point(t), abs(res.value) * ctx.mpf(10) ** -3)
        return res, (abs(res.value) / df if df else ctx.inf)

    ts = [ctx.mpf(j) / INITIAL_SAMPLES for j in range(INITIAL_SAMPLES)]
    first = [sample(t) for t in ts]
    samples = len(first)
    stack = []
    for j in range(INITIAL_SAMPLES - 1, -1, -1):
        t_b = ts[j + 1] if j + 1 < INITIAL_SAMPLES else ctx.one
        stack.append((ts[j], first[j], t_b, first[(j + 1) % INITIAL_SAMPLES]))

    total = 0.0
    min_mod = None
    while stack:
        ta, (a, reach_a), tb, (b, reach_b) = stack.pop()
        step = float(ctx.arg(b.value / a.value))
        lower = min(abs(a.value), abs(b.value)) - max(a.error_bound, b.error_bound) - abs(b.value - a.value) / 2
        covered = reach_a + reach_b > REACH_FACTOR * abs(d.point(tb) - d.point(ta))
        if abs(step) < half_pi and lower > 0 and covered:
            total += step
            min_mod = lower if min_mod is None else min(min_mod, lower)
            continue
        if samples >= max_samples or tb - ta < min_width:
            raise ContourNearZero(
                f"contour of radius {ctx.nstr(d.radius, 8)} passes too close to a zero "
                f"(samples={samples}, arc={ctx.nstr(tb - ta, 3)})"
            )
        tm = (ta + tb) / 2
        m = sample(tm)
        samples += 1
        stack.append((tm, m, tb, (b, reach_b)))
        stack.append((ta, (a, reach_a), tm, m))

    turns = total / (2 * math.pi)
    count = round(turns)
    if abs(turns - count) > 1e-3:
        raise ContourNearZero(f"accumulated phase {turns:.6f} turns is not an integer")
    return WindingResult(int(count), d, min_mod, samples)


def winding_number(f, d: Disk, eps=DEFAULT_EVAL_EPS, **kw) -> int:
    return winding_detail(f, d, eps, **kw).count


def count_zeros_detail(f, d: Disk, eps=DEFAULT_EVAL_EPS, **kw) -> WindingResult:
    """Winding number with up to eight radius perturbations on :class:`ContourNearZero`."""
    try:
        return winding_detail(f, d, eps, **kw)
    except ContourNearZero as exc:
        last = exc
    for factor in PERTURBATIONS:
        try:
            return winding_detail(f, d.scaled(ctx.mpf(factor)), eps, **kw)
        except ContourNearZero as exc:
            last = exc
    raise Unresolvable(f"every perturbed contour around {d} hit a near-zero: {last}")


def count_zeros_in_disk(f, d: Disk, eps=DEFAULT_EVAL_EPS, **kw) -> int:
    return count_zeros_detail(f, d, eps, **kw).count


def zero_count_growth(f, radii: Sequence, center=0, eps=DEFAULT_EVAL_EPS) -> List[int]:
    radii = [ctx.mpf(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    counts = [count_zeros_in_disk(f, Disk(center, r), eps) for r in radii]
    if any(b < a for a, b in zip(counts, counts[1:])):
        raise ZeroscopeError(f"zero counts {counts} decrease with radius")
    return counts


# ---------------------------------------------------------------------------
# localization
# ---------------------------------------------------------------------------


def _derivative_bound(f, z, eps):
    """Upper bound on ``|f'(z)|`` to absolute accuracy ``eps``."""
    if hasattr(f, "derivative"):
        res = _eval_once(f.derivative, z, eps)
        return abs(res.value) + res.error_bound
    return abs(_derivative(f, z, eps))


def _derivative(f, z, eps):
    if hasattr(f, "derivative"):
        return _eval_once(f.derivative, z, eps).value
    h = ctx.ldexp(ctx.one, -ctx.prec // 4) * (1 + abs(z))
    return (f(z + h, eps).value - f(z - h, eps).value) / (2 * h)


def newton_polish(f, z0, multiplicity: int, eps=DEFAULT_EVAL_EPS, cell: Disk = None):
    """Damped modified Newton ``z - m f/f'``; None if it stalls or leaves ``cell``."""
    z = ctx.mpc(z0)
    res = _eval(f, z, eps)
    tol = ctx.ldexp(ctx.one, -ctx.prec // 2)
    for _ in range(NEWTON_MAX_ITER):
        if abs(res.value) <= res.error_bound:
            return z
        df = _derivative(f, z, eps)
        if df == 0:
            return None
        step = multiplicity * res.value / df
        for _ in range(NEWTON_HALVINGS):
            cand = z - step
            cand_res = _eval(f, cand, eps)
            if abs(cand_res.value) < abs(res.value):
                break
            step = step / 2
        else:
            # no decrease at any damping: either converged to the noise floor or stuck
            return z if abs(step) < tol * (1 + abs(z)) else None
        z, res = cand, cand_res
        if cell is not None and not cell.contains(z):
            return None
        if abs(step) < tol * (1 + abs(z)):
            return z
    return None


def localize_zeros(f, d: Disk, eps=1e-10, *, eval_eps=DEFAULT_EVAL_EPS) -> ZeroReport:
    """Locate all zeros inside ``d`` to within ``eps`` by covering subdivision + Newton."""
    eps = ctx.mpf(eps)
    top = count_zeros_detail(f, d, eval_eps)
    query = top.disk
    found: List[LocatedZero] = []
    diagnostics: List[str] = []
    samples = top.samples
    min_mod = top.min_modulus

    def known_inside(cell: Disk) -> int:
        return sum(z.multiplicity for z in found if cell.contains(z.location, z.error_radius))

    def total_inside_query() -> int:
        return sum(z.multiplicity for z in found if query.contains(z.location))

    def add(zero: LocatedZero):
        for other in found:
            if abs(other.location - zero.location) <= other.error_radius + zero.error_radius:
                return
        found.append(zero)

    def try_polish(cell: Disk, n: int) -> bool:
        nonlocal samples
        z = newton_polish(f, cell.center, n, eval_eps, cell)
        if z is None:
            return False
        rho = min(eps, cell.radius)
        room = query.radius - abs(z - query.center)
        if 0 < room <= rho:
            rho = room / 2
        try:
            check = count_zeros_detail(f, Disk(z, rho), eval_eps)
        except Unresolvable:
            return False
        samples += check.samples
        if check.count != n:
            return False
        res = _eval(f, z, eval_eps)
        add(LocatedZero(z, check.disk.radius, n, abs(res.value), res.error_bound))
        return True

    def search(cell: Disk, n: int):
        nonlocal samples
        if n == 0 or total_inside_query() >= top.count:
            return
        if known_inside(cell) >= n:
            return
        if try_polish(cell, n):
            return
        if cell.radius < eps / 2:
            diagnostics.append(f"subdivision stalled at {ctx.nstr(cell.center, 12)}: {n} zeros within {ctx.nstr(cell.radius, 3)}")
            add(LocatedZero(cell.center, cell.radius, n, stalled=True))
            return
        for child in cell.children():
            if abs(child.center - query.center) >= query.radius + child.radius:
                continue
            try:
                res = count_zeros_detail(f, child, eval_eps)
            except Unresolvable as exc:
                raise SubdivisionStall(str(exc)) from exc
            samples += res.samples
            search(res.disk, res.count)

    search(query, top.count)
    inside = [z for z in found if query.contains(z.location)]
    inside.sort(key=lambda z: (float(z.location.real), float(z.location.imag)))
    if sum(z.multiplicity for z in inside) != top.count:
        diagnostics.append(
            f"localized multiplicities {sum(z.multiplicity for z in inside)} differ from contour count {top.count}"
        )
    return ZeroReport(top.count, inside, min_mod, samples, query, diagnostics)
