"""Classification of coefficient streams and zero-count corroboration.

``classify`` applies the entire-weighted-series criterion: if ``sum n! c_n z^n``
is entire and ``c_n`` does not terminate, ``sum c_n z^n`` has infinitely many
zeros.  Both hypotheses are only checked up to the horizon ``n_max``, so a
positive verdict means "hypotheses verified to the horizon", never more.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .errors import BranchCut, IndecisiveEstimate, NoDecayObserved, ZeroscopeError
from .exact import is_exact, to_mp
from .precision import ctx
from .series_core import (
    AppearsTerminating,
    CertifiedSeries,
    CoefficientStream,
    GrowthProfile,
    TerminationStatus,
    factorial_weight,
    is_nonterminating_up_to,
    make_tail_certificate,
    radius_of_convergence,
)
from .special_functions import BesselParams, bessel_eval, principal_sqrt
from .zero_counter import DEFAULT_EVAL_EPS, Disk, ZeroReport, count_zeros_in_disk, localize_zeros

GUARANTEED = "GuaranteedInfiniteZeros"
COUNTEREXAMPLE = "CounterexampleRegime"
RADIUS_ZERO = "RadiusZero"
TERMINATING = "AppearsTerminating"
INDECISIVE = "Indecisive"

CERT_PROBE = 128


@dataclass(frozen=True)
class TheoremVerdict:
    classification: str
    horizon: int
    termination: TerminationStatus
    profile: Optional[GrowthProfile] = None
    radius_estimate: Optional[float] = None
    last_index: Optional[int] = None
    diagnostics: tuple = ()

    @property
    def horizon_limited(self) -> bool:
        return True

    def describe(self) -> str:
        if self.classification == COUNTEREXAMPLE:
            return f"{COUNTEREXAMPLE}({self.radius_estimate:.6g})"
        if self.classification == TERMINATING:
            return f"{TERMINATING}({self.last_index})"
        return self.classification


def classify(s: CoefficientStream, n_max: int = 128) -> TheoremVerdict:
    if n_max < 16:
        raise ValueError("n_max must be at least 16")
    status = is_nonterminating_up_to(s, n_max)
    if isinstance(status, AppearsTerminating):
        return TheoremVerdict(TERMINATING, n_max, status, last_index=status.last_index)
    try:
        profile = radius_of_convergence(factorial_weight(s), n_max)
    except IndecisiveEstimate as exc:
        return TheoremVerdict(INDECISIVE, n_max, status, diagnostics=(str(exc),))
    if profile.classification == "infinite":
        return TheoremVerdict(GUARANTEED, n_max, status, profile)
    if profile.classification == "zero":
        return TheoremVerdict(RADIUS_ZERO, n_max, status, profile, radius_estimate=0.0)
    return TheoremVerdict(COUNTEREXAMPLE, n_max, status, profile, radius_estimate=profile.radius)


@dataclass
class CorroborationReport:
    family: str
    verdict: TheoremVerdict
    radii: List[float]
    counts: List[Optional[int]]
    consistent: bool
    delta: Optional[float] = None
    M: Optional[float] = None
    zeros: Optional[ZeroReport] = None
    diagnostics: List[str] = field(default_factory=list)


def certificate_delta(verdict: TheoremVerdict):
    if verdict.classification == COUNTEREXAMPLE and verdict.radius_estimate:
        return min(ctx.one, ctx.mpf(verdict.radius_estimate) / 4)
    return ctx.one


def certified_evaluator(s: CoefficientStream, verdict: TheoremVerdict):
    if s.degree is not None:
        return CertifiedSeries(s), None
    cert = make_tail_certificate(s, certificate_delta(verdict), CERT_PROBE)
    return CertifiedSeries(s, cert), cert


def corroborate(
    s: CoefficientStream,
    v: TheoremVerdict,
    radii: Sequence,
    *,
    localize_radius=None,
    localize_eps=1e-10,
    eval_eps=DEFAULT_EVAL_EPS,
) -> CorroborationReport:
    """Count zeros on growing disks and compare with what the verdict predicts.

    A GuaranteedInfiniteZeros verdict expects the count to strictly increase
    somewhere along ``radii``.  Other regimes permit any nondecreasing counts;
    when the stream has a closed form, sampled contour values are checked
    against it.
    """
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    report = CorroborationReport(s.label, v, radii, [None] * len(radii), False)
    try:
        f, cert = certified_evaluator(s, v)
    except (NoDecayObserved, ValueError) as exc:
        report.diagnostics.append(f"certificate refused: {exc}")
        return report
    if cert is not None:
        report.delta, report.M = float(cert.delta), float(cert.M)
        report.diagnostics.append(
            f"tail certificate delta={ctx.nstr(cert.delta, 6)} M={ctx.nstr(cert.M, 6)}"
            + (" (heuristic)" if cert.heuristic else "")
        )

    for i, r in enumerate(radii):
        try:
            report.counts[i] = count_zeros_in_disk(f, Disk(0, r), eval_eps)
        except ZeroscopeError as exc:
            report.diagnostics.append(f"radius {r:g}: {type(exc).__name__}: {exc}")

    if localize_radius is not None:
        try:
            report.zeros = localize_zeros(f, Disk(0, localize_radius), localize_eps, eval_eps=eval_eps)
        except ZeroscopeError as exc:
            report.diagnostics.append(f"localization: {type(exc).__name__}: {exc}")

    counts = [c for c in report.counts if c is not None]
    ok = len(counts) == len(radii) and all(b >= a for a, b in zip(counts, counts[1:]))
    if v.classification == GUARANTEED:
        ok = ok and any(b > a for a, b in zip(counts, counts[1:]))
    elif v.classification == TERMINATING:
        ok = ok and (not counts or counts[-1] <= max(v.last_index, 0))
    if s.closed_form is not None and ok:
        ok = _closed_form_agrees(s, f, radii, eval_eps, report.diagnostics)
    report.consistent = ok
    return report


def _closed_form_agrees(s, f, radii, eps, diagnostics, points: int = 8) -> bool:
    for r in radii:
        for j in range(points):
            z = r * ctx.expjpi(ctx.mpf(2 * j) / points)
            res = f(z, eps)
            ref = s.closed_form(z)
            tol = res.error_bound + abs(ref) * ctx.ldexp(ctx.one, -ctx.prec // 2)
            if abs(res.value - ref) > tol:
                diagnostics.append(f"closed form mismatch at z={ctx.nstr(z, 8)}")
                return False
    diagnostics.append("closed form agrees on all contour samples")
    return True


@dataclass(frozen=True)
class TransferredZero:
    g_zero: object
    location: object
    residual: object = None
    bound: object = None
    verified: bool = False
    flag: Optional[str] = None


def bessel_zero_transfer(p: BesselParams, report: ZeroReport, eps=1e-30) -> List[TransferredZero]:
    """Map zeros ``w`` of the reduced series to zeros ``sqrt(w)`` of ``J_alpha``."""
    alpha = to_mp(p.alpha) if is_exact(p.alpha) else ctx.convert(p.alpha)
    integer = alpha == ctx.floor(alpha)
    out = []
    for zero in report.zeros:
        w = ctx.mpc(zero.location)
        z = principal_sqrt(w)
        on_cut = w.real < 0 and abs(w.imag) <= zero.error_radius
        if on_cut and not integer:
            out.append(TransferredZero(w, z, flag=f"{BranchCut.__name__}: g-zero on the negative real axis"))
            continue
        res = bessel_eval(p, z, eps)
        scale = abs(ctx.power(z / 2, alpha)) if z != 0 else ctx.one
        slack = 10 * (res.error_bound + scale * (zero.residual or 0) + scale * (zero.eval_error or 0))
        out.append(TransferredZero(w, z, abs(res.value), slack, abs(res.value) <= slack))
    return out
