"""Coefficient streams, growth estimation and certified series evaluation.

A :class:`CoefficientStream` is a lazily evaluated map ``n -> c_n``.  Exact
streams return :class:`~fractions.Fraction` / :class:`ComplexRational`
values; floating streams return mpmath numbers in the package context,
whose unbounded exponent range keeps ``n!`` and ``1/n!`` free of overflow.

Truncation errors are controlled by a :class:`TailCertificate` ``(delta, M)``
with ``|n! c_n (delta/2)^n| <= M``, which gives

    |c_n z^n| <= M (2|z|/delta)^n / n!

so every tail of the series is dominated by a tail of ``M exp(2|z|/delta)``.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import IndecisiveEstimate, NoDecayObserved, NotEntire, PrecisionExhausted
from .exact import ComplexRational, as_exact, imag_part, is_exact, parse_rational, real_part, to_mp
from .precision import ctx

INF = math.inf

# classification cutoffs for the slope of the log-ratio sequence against log n
ENTIRE_SLOPE = 0.25
FINITE_SLOPE = 0.12
OSCILLATION_TOL = 0.05

M_FLOOR_BITS = 64
MAX_TERMS = 200_000


class CoefficientStream:
    """Deterministic, memoized coefficient map ``n -> c_n``.

    ``func`` must be a pure function of ``n``.  ``degree`` may be given when
    the stream is known to vanish beyond that index; evaluation then sums the
    finite support exactly instead of relying on a tail certificate.
    ``closed_form`` optionally maps ``z`` to the sum of the series.
    """

    def __init__(
        self,
        func: Callable[[int], object],
        exact: bool,
        label: str,
        *,
        degree: Optional[int] = None,
        closed_form: Optional[Callable] = None,
    ):
        self._func = func
        self.exact = exact
        self.label = label
        self.degree = degree
        self.closed_form = closed_form
        self._memo: dict = {}
        self._mp_memo: dict = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"CoefficientStream({self.label!r}, exact={self.exact})"

    def coeff(self, n: int):
        if n < 0:
            raise IndexError("coefficient index must be non-negative")
        try:
            return self._memo[n]
        except KeyError:
            pass
        if self.degree is not None and n > self.degree:
            value = Fraction(0) if self.exact else ctx.zero
        else:
            value = self._func(n)
            value = as_exact(value) if self.exact else ctx.convert(value)
        with self._lock:
            return self._memo.setdefault(n, value)

    def coeff_mp(self, n: int):
        key = (ctx.prec, n)
        try:
            return self._mp_memo[key]
        except KeyError:
            pass
        c = self.coeff(n)
        value = to_mp(c) if self.exact else +c
        with self._lock:
            return self._mp_memo.setdefault(key, value)

    def coeffs(self, n_max: int) -> list:
        return [self.coeff(n) for n in range(n_max + 1)]

    def is_zero_at(self, n: int) -> bool:
        return not self.coeff(n)

    def log_abs(self, n: int) -> Optional[float]:
        """``log|c_n|`` as a float, or None for an exact zero."""
        c = self.coeff(n)
        if not c:
            return None
        return float(ctx.log(abs(to_mp(c) if self.exact else c)))


def stream_from_list(values: Sequence, label: str = "list", exact: Optional[bool] = None) -> CoefficientStream:
    """A finitely supported stream with the given leading coefficients."""
    if exact is None:
        exact = all(is_exact(v) for v in values)
    vals = [as_exact(v) for v in values] if exact else [ctx.convert(v) for v in values]
    zero = Fraction(0) if exact else ctx.zero
    return CoefficientStream(
        lambda n: vals[n] if n < len(vals) else zero,
        exact,
        label,
        degree=max(len(vals) - 1, 0),
    )


def zero_stream() -> CoefficientStream:
    return CoefficientStream(lambda n: Fraction(0), True, "zero", degree=0)


def exp_stream() -> CoefficientStream:
    return CoefficientStream(
        lambda n: Fraction(1, math.factorial(n)), True, "exp", closed_form=ctx.exp
    )


def geometric_stream(a) -> CoefficientStream:
    """``c_n = a^n``; sum ``1/(1 - a z)`` for ``|z| < 1/|a|``."""
    if is_exact(a):
        a_exact = as_exact(a)
        func, exact = (lambda n: a_exact**n), True
        a_mp = lambda: to_mp(a_exact)
    else:
        a_float = ctx.convert(a)
        func, exact = (lambda n: a_float**n), False
        a_mp = lambda: a_float
    return CoefficientStream(func, exact, f"geometric:a={a}", closed_form=lambda z: 1 / (1 - a_mp() * z))


def factorial_weight(s: CoefficientStream) -> CoefficientStream:
    """The stream ``n! c_n``."""
    if s.exact:
        func = lambda n: math.factorial(n) * s.coeff(n)
    else:
        func = lambda n: ctx.factorial(n) * s.coeff(n)
    return CoefficientStream(func, s.exact, f"n!*({s.label})", degree=s.degree)


def inverse_factorial_weight(s: CoefficientStream) -> CoefficientStream:
    """The stream ``c_n / n!``."""
    if s.exact:
        func = lambda n: s.coeff(n) / math.factorial(n)
    else:
        func = lambda n: s.coeff(n) / ctx.factorial(n)
    return CoefficientStream(func, s.exact, f"({s.label})/n!", degree=s.degree)


# ---------------------------------------------------------------------------
# growth estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthProfile:
    classification: str  # "finite", "infinite" or "zero"
    radius: float
    radius_low: float
    radius_high: float
    order: float
    n_window: tuple
    method: str = "ratio"
    slope: float = 0.0
    window: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def relative_uncertainty(self) -> float:
        if self.classification != "finite":
            return 0.0
        return max(self.radius_high - self.radius, self.radius - self.radius_low) / self.radius


def _lstsq(x, y, basis):
    A = np.column_stack([b(x) for b in basis])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    rms = float(np.sqrt(np.mean(resid**2))) if len(y) else 0.0
    return coef, rms


def _window_sequences(s: CoefficientStream, n_max: int):
    lo = n_max // 2
    logs = {n: s.log_abs(n) for n in range(lo, n_max + 1)}
    nonzero = [n for n in range(lo, n_max + 1) if logs[n] is not None]
    ratio_x, ratio_y = [], []
    for a, b in zip(nonzero, nonzero[1:]):
        ratio_x.append((a + b) / 2)
        ratio_y.append((logs[a] - logs[b]) / (b - a))
    root_x = [float(n) for n in nonzero if n > 0]
    root_y = [-logs[n] / n for n in nonzero if n > 0]
    return lo, nonzero, (np.array(ratio_x), np.array(ratio_y)), (np.array(root_x), np.array(root_y))


def radius_of_convergence(s: CoefficientStream, n_max: int, *, oscillation_tol: float = OSCILLATION_TOL) -> GrowthProfile:
    """Estimate the radius of convergence of ``sum c_n z^n`` from ``c_0..c_{n_max}``.

    Both the ratio sequence ``log|c_n/c_{n+1}|`` (consecutive nonzero
    coefficients, gaps normalised) and the root sequence ``-log|c_n|/n`` are
    formed over the trailing half window.  Their slope against ``log n``
    separates the three regimes: it tends to ``1/order`` for entire series, to
    zero for a finite radius and is negative when the radius is zero.  A
    finite radius is extrapolated to ``n -> inf`` with a ``1/n`` correction,
    which removes the polynomial-prefactor bias of the plain ratio test.
    """
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    lo, nonzero, (rx, ry), (qx, qy) = _window_sequences(s, n_max)
    window = {"n_lo": lo, "n_hi": n_max, "ratio_x": rx.tolist(), "ratio_y": ry.tolist(),
              "root_x": qx.tolist(), "root_y": qy.tolist()}
    n_window = (lo, n_max)

    if len(nonzero) < 4:
        # at most a few stray coefficients in the window: treat as a polynomial tail
        if len(nonzero) == 0:
            return GrowthProfile("infinite", INF, INF, INF, 0.0, n_window, "support", 0.0, window)
        raise IndecisiveEstimate("too few nonzero coefficients in the trailing window", window)

    log = np.log
    width = n_max - lo + 1
    if len(rx) >= max(4, width // 2 - 1):
        method, x, y = "ratio", rx, ry
        finite_basis = (lambda t: np.ones_like(t), lambda t: 1 / t, lambda t: 1 / t**2)
    else:
        method, x, y = "root", qx, qy
        finite_basis = (lambda t: np.ones_like(t), lambda t: log(t) / t, lambda t: 1 / t)
    trend_basis = (lambda t: np.ones_like(t), log, lambda t: 1 / t)
    coef, rms = _lstsq(x, y, trend_basis)
    slope = float(coef[1])
    scale = 1.0 + float(np.max(np.abs(y)))
    window.update({"method": method, "slope": slope, "rms": rms})
    if rms > oscillation_tol * scale:
        raise IndecisiveEstimate(f"trailing-window {method} estimates oscillate (rms {rms:.3g})", window)

    if slope > ENTIRE_SLOPE:
        return GrowthProfile("infinite", INF, INF, INF, _order_from_root(qx, qy), n_window, method, slope, window)
    if slope < -ENTIRE_SLOPE:
        return GrowthProfile("zero", 0.0, 0.0, 0.0, INF, n_window, method, slope, window)
    if abs(slope) > FINITE_SLOPE:
        raise IndecisiveEstimate(f"slope {slope:.3g} between finite and entire regimes", window)

    fcoef, _ = _lstsq(x, y, finite_basis)
    radius = math.exp(float(fcoef[0]))
    candidates = [radius, math.exp(float(y[-1]))]
    if len(qy):
        candidates.append(math.exp(float(qy[-1])))
    return GrowthProfile(
        "finite", radius, min(candidates), max(candidates), INF, n_window, method, slope, window
    )


def _order_from_root(qx, qy) -> float:
    if len(qx) < 4:
        return 0.0
    # -log|c_n|/n = (log n)/order + const + O(log n / n)
    coef, _ = _lstsq(qx, qy, (lambda t: np.ones_like(t), np.log, lambda t: np.log(t) / t, lambda t: 1 / t))
    b = float(coef[1])
    if b <= 0:
        return INF
    return 1.0 / b


def order_estimate(s: CoefficientStream, n_max: int) -> float:
    """Order of growth of an entire series from its coefficients.

    The order is the reciprocal of the asymptotic slope of ``-log|c_n|/n``
    against ``log n``; fitting the slope (instead of evaluating
    ``n log n / -log|c_n|`` at one index) cancels the type-dependent constant
    that otherwise biases the estimate upward at any finite ``n``.
    """
    profile = radius_of_convergence(s, n_max)
    if profile.classification != "infinite":
        raise NotEntire(f"radius classified as {profile.classification}, not +infinity")
    _, nonzero, _, (qx, qy) = _window_sequences(s, n_max)
    if len(nonzero) < 4:
        return 0.0
    return _order_from_root(qx, qy)


# ---------------------------------------------------------------------------
# termination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonterminatingWitness:
    index: int
    horizon: int
    nonterminating = True


@dataclass(frozen=True)
class AppearsTerminating:
    last_index: int  # -1 for a stream that is zero up to the horizon
    horizon: int
    nonterminating = False


TerminationStatus = Union[NonterminatingWitness, AppearsTerminating]


def is_nonterminating_up_to(s: CoefficientStream, n_max: int) -> TerminationStatus:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    last = -1
    for n in range(n_max, -1, -1):
        if not s.is_zero_at(n):
            last = n
            break
    if last > n_max / 2:
        return NonterminatingWitness(last, n_max)
    return AppearsTerminating(last, n_max)


# ---------------------------------------------------------------------------
# certified evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailCertificate:
    delta: object
    M: object
    n_probe: int = 0
    heuristic: bool = False


@dataclass(frozen=True)
class GeometricMajorant:
    """``|c_n| <= M / rho^n`` for every ``n``; certifies evaluation inside ``|z| < rho``.

    This covers streams with a finite radius (geometric series), for which no
    factorial-weighted certificate exists.
    """

    rho: object
    M: object


@dataclass(frozen=True)
class EvalResult:
    value: object
    error_bound: object
    terms_used: int


def make_tail_certificate(
    s: CoefficientStream, delta, n_probe: int = 128, *, safety: float = 1.0
) -> TailCertificate:
    """Witness ``M >= |n! c_n (delta/2)^n|`` by scanning ``n <= n_probe``.

    The weighted terms must be visibly decaying at the end of the scan;
    otherwise :class:`NoDecayObserved` is raised.  A certificate whose
    maximum sits in the second half of the scan is marked heuristic.
    """
    delta = ctx.convert(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n_probe < 8:
        raise ValueError("n_probe must be at least 8")
    floor = ctx.ldexp(ctx.one, -M_FLOOR_BITS)
    half = delta / 2
    terms = []
    for n in range(n_probe + 1):
        c = s.coeff_mp(n)
        terms.append(abs(c) * ctx.factorial(n) * half**n if c else ctx.zero)
    peak = max(terms)
    if peak == 0:
        return TailCertificate(delta, floor, n_probe, False)
    argmax = terms.index(peak)
    q = max(n_probe // 4, 2)
    tail = max(terms[n_probe - q + 1:])
    before = max(terms[n_probe - 2 * q + 1:n_probe - q + 1])
    if tail > 0 and (tail >= peak or tail > before):
        raise NoDecayObserved(
            f"weighted terms |n! c_n (delta/2)^n| not decreasing near n={n_probe} (delta={ctx.nstr(delta, 6)})"
        )
    M = max(peak * ctx.convert(safety), floor)
    return TailCertificate(delta, M, n_probe, argmax > n_probe // 2)


def _exp_tail_index(x, budget, shift: int = 0):
    """Smallest T with ``sum_{m > T - shift} x^m/m! <= budget``; returns (T, bound).

    Uses ``sum_{m>K} x^m/m! <= x^(K+1)/(K+1)! / (1 - x/(K+2))`` for ``K+2 > x``.
    That bound decreases in K, so K is found by bisection on its logarithm,
    computed at 64 bits with an absolute slack covering the rounding.
    """
    prec = ctx.prec
    with ctx.workprec(64):
        x = +ctx.convert(x)
        log_budget = ctx.log(ctx.convert(budget)) if budget > 0 else -ctx.inf
        log_x = ctx.log(x) if x > 0 else -ctx.inf

        def log_bound(K):
            if x == 0:
                return -ctx.inf
            val = (K + 1) * log_x - ctx.loggamma(K + 2) - ctx.log(1 - x / (K + 2))
            return val + ctx.ldexp(abs(val) + K + 8, -50)

        lo = max(0, int(ctx.floor(x)) - 1)  # smallest K with K + 2 > x
        if log_bound(MAX_TERMS) > log_budget:
            raise PrecisionExhausted("tail bound needs more than %d terms" % MAX_TERMS)
        hi = MAX_TERMS
        while lo < hi:
            mid = (lo + hi) // 2
            if log_bound(mid) <= log_budget:
                hi = mid
            else:
                lo = mid + 1
        bound = ctx.exp(log_bound(lo))
    with ctx.workprec(prec):
        return lo + shift, +bound


def geometric_majorant(a) -> GeometricMajorant:
    """Exact majorant ``|a^n| = |a|^n`` for :func:`geometric_stream`."""
    mod = abs(to_mp(as_exact(a)) if is_exact(a) else ctx.convert(a))
    if mod == 0:
        raise ValueError("a must be nonzero")
    return GeometricMajorant(1 / mod, ctx.one)


def _geometric_tail_index(q, budget, derivative: int):
    """Smallest T with ``sum_{n>T} n^d q^n <= budget`` (d = 0 or 1); returns (T, bound)."""
    power = q  # q^(T+1)
    T = 0
    while True:
        if derivative == 0:
            bound = power / (1 - q)
        else:
            bound = power * ((T + 1) * (1 - q) + q) / (1 - q) ** 2
        if bound <= budget:
            return T, bound
        T += 1
        power = power * q
        if T > MAX_TERMS:
            raise PrecisionExhausted("tail bound needs more than %d terms" % MAX_TERMS)


def _horner(coeffs, z):
    acc = ctx.zero
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _representable(c) -> bool:
    for q in (real_part(c), imag_part(c)):
        den = q.denominator
        if den & (den - 1) or q.numerator.bit_length() > ctx.prec:
            return False
    return True


def _magnitude(c):
    if isinstance(c, ctx.mpc):
        return abs(c.real) + abs(c.imag)
    return abs(c)


def evaluate(s: CoefficientStream, z, eps, cert=None, *, derivative: int = 0) -> EvalResult:
    """Certified partial sum of ``sum c_n z^n`` (or its first derivative).

    The truncation index is the smallest ``T`` whose tail bound from the
    certificate is at most ``eps/2``; rounding error of the partial sum is
    bounded separately and must also fit in ``eps/2``.
    """
    if derivative not in (0, 1):
        raise ValueError("only derivative orders 0 and 1 are supported")
    z = ctx.convert(z)
    eps = ctx.convert(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    u = ctx.ldexp(ctx.one, -ctx.prec)

    if z == 0:
        value = s.coeff_mp(derivative)
        exact_value = not s.exact or _representable(s.coeff(derivative))
        return EvalResult(value, ctx.zero if exact_value else _magnitude(value) * u, 1)

    r = abs(z)
    if s.degree is not None:
        T, tail = s.degree, ctx.zero
    elif cert is None:
        raise ValueError(f"stream {s.label!r} has no finite support; a tail certificate is required")
    elif isinstance(cert, GeometricMajorant):
        q = r / cert.rho
        if q >= 1:
            raise ValueError(f"|z|={ctx.nstr(r, 8)} is outside the certified disk of radius {ctx.nstr(cert.rho, 8)}")
        # derivative terms n c_n z^(n-1) are bounded by (M / r) n q^n
        scale = cert.M / r if derivative else cert.M
        T, tail = _geometric_tail_index(q, eps / (2 * scale), derivative)
        tail = tail * scale
    else:
        x = 2 * r / cert.delta
        if derivative == 0:
            T, tail = _exp_tail_index(x, eps / (2 * cert.M))
            tail = tail * cert.M
        else:
            scale = 2 * cert.M / cert.delta
            T, tail = _exp_tail_index(x, eps / (2 * scale), shift=1)
            tail = tail * scale

    if derivative == 0:
        coeffs = [s.coeff_mp(n) for n in range(T + 1)]
    else:
        coeffs = [n * s.coeff_mp(n) for n in range(1, T + 1)]
    if not coeffs:
        return EvalResult(ctx.zero, tail, 0)
    value = _horner(coeffs, z)
    mags = [_magnitude(c) for c in coeffs]
    absolute = _horner(mags, r)
    rounding = (4 * len(coeffs) + 16) * u * absolute
    if rounding > eps / 2:
        need = int(ctx.ceil(ctx.log(absolute * (4 * len(coeffs) + 16) * 2 / eps, 2))) + 8
        raise PrecisionExhausted(
            f"rounding error {ctx.nstr(rounding, 3)} exceeds eps/2 at {ctx.prec} bits", suggested_bits=need
        )
    return EvalResult(value, tail + rounding, len(coeffs))


class CertifiedSeries:
    """Callable evaluator ``(z, eps) -> EvalResult`` bound to a stream and certificate."""

    def __init__(self, stream: CoefficientStream, cert: Optional[TailCertificate] = None):
        if stream.degree is None and cert is None:
            raise ValueError("a tail certificate is required for streams without finite support")
        self.stream = stream
        self.cert = cert

    def __call__(self, z, eps) -> EvalResult:
        return evaluate(self.stream, z, eps, self.cert)

    def derivative(self, z, eps) -> EvalResult:
        return evaluate(self.stream, z, eps, self.cert, derivative=1)

    def __repr__(self):
        return f"CertifiedSeries({self.stream.label!r})"


class GrowthCheck(NamedTuple):
    ok: bool
    worst_ratio: float
    violations: int


def growth_bound_check(s: CoefficientStream, cert: TailCertificate, zs, eps=1e-20) -> GrowthCheck:
    """Check ``|f(z)| <= M exp(2|z|/delta)`` (plus evaluation error) at every sample."""
    worst = 0.0
    violations = 0
    for z in zs:
        z = ctx.convert(z)
        res = evaluate(s, z, eps, cert)
        bound = cert.M * ctx.exp(2 * abs(z) / cert.delta)
        mod = abs(res.value)
        if mod > bound + res.error_bound:
            violations += 1
        worst = max(worst, float(mod / bound))
    return GrowthCheck(violations == 0, worst, violations)


# ---------------------------------------------------------------------------
# exact serialization (JSON lines)
# ---------------------------------------------------------------------------


def dump_jsonl(s: CoefficientStream, n_max: int, fp) -> None:
    """Write nonzero coefficients ``c_0..c_{n_max}`` of an exact stream as JSON lines."""
    if not s.exact:
        raise ValueError("only exact streams can be serialized losslessly")
    for n in range(n_max + 1):
        c = s.coeff(n)
        if not c:
            continue
        rec = {"n": n, "re": str(real_part(c)), "im": str(imag_part(c))}
        fp.write(json.dumps(rec) + "\n")


def load_jsonl(lines, label: str = "file") -> CoefficientStream:
    """Parse the exact coefficient format; absent indices are zero, ``n`` must increase."""
    values: dict = {}
    last = -1
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            n = rec["n"]
            re_part = parse_rational(str(rec.get("re", "0")))
            im_part = parse_rational(str(rec.get("im", "0")))
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"line {lineno}: malformed coefficient record ({exc})") from None
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ValueError(f"line {lineno}: index must be a non-negative integer")
        if n <= last:
            raise ValueError(f"line {lineno}: indices must be strictly increasing (got {n} after {last})")
        last = n
        values[n] = as_exact(ComplexRational(re_part, im_part))
    degree = max(values) if values else 0
    return CoefficientStream(lambda n: values.get(n, Fraction(0)), True, label, degree=degree)


def load_jsonl_file(path: str) -> CoefficientStream:
    with open(path, encoding="utf-8") as fp:
        return load_jsonl(fp, label=f"file:{path}")
