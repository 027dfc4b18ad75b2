"""Built-in coefficient families: Le Roy, reduced Bessel, e^{z/R}, e^{kz}P(z)."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction

from .errors import BranchPoint
from .exact import as_exact, format_exact, imag_part, is_exact, real_part, to_mp
from .precision import ctx
from .series_core import (
    CoefficientStream,
    EvalResult,
    TailCertificate,
    evaluate,
    make_tail_certificate,
)


@dataclass(frozen=True)
class LeRoyParams:
    r: object  # exact scalar or anything mpmath can convert

    @property
    def theorem_applies(self) -> bool:
        return float(real_part(self.r) if is_exact(self.r) else ctx.convert(self.r).real) > 1


@dataclass(frozen=True)
class BesselParams:
    alpha: object  # real; exact Fraction/int or float


@dataclass(frozen=True)
class ExpPolyModel:
    """``f(z) = exp(k z) P(z)`` with exact ``k != 0`` and ``P = a_0 + ... + a_N z^N``, ``a_N != 0``."""

    k: object
    P: tuple

    def __post_init__(self):
        k = as_exact(self.k)
        P = tuple(as_exact(a) for a in self.P)
        while len(P) > 1 and not P[-1]:
            P = P[:-1]
        if not k:
            raise ValueError("k must be nonzero")
        if not P or not P[-1]:
            raise ValueError("P must be a nonzero polynomial")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "P", P)

    @property
    def N(self) -> int:
        return len(self.P) - 1

    def describe(self) -> str:
        return f"k={format_exact(self.k)};P={','.join(format_exact(a) for a in self.P)}"


def _positive_int(x):
    if is_exact(x) and imag_part(x) == 0 and real_part(x).denominator == 1 and real_part(x) > 0:
        return int(real_part(x))
    return None


def le_roy_coeffs(p: LeRoyParams) -> CoefficientStream:
    """``c_n = (n!)^(-r)``, exact when ``r`` is a positive integer."""
    r_int = _positive_int(p.r)
    label = f"leroy:r={format_exact(p.r) if is_exact(p.r) else p.r}"
    if r_int is not None:
        stream = CoefficientStream(lambda n: Fraction(1, math.factorial(n) ** r_int), True, label)
        if r_int == 1:
            stream.closed_form = ctx.exp
        return stream

    def coeff(n):
        r = to_mp(p.r) if is_exact(p.r) else ctx.convert(p.r)
        # loggamma is real on positive integers, so the branch is unambiguous
        return ctx.exp(-r * ctx.loggamma(n + 1))

    return CoefficientStream(coeff, False, label)


def bessel_reduced_coeffs(p: BesselParams) -> CoefficientStream:
    """``c_m = (-1)^m / (m! Gamma(m+alpha+1) 4^m)``, via 1/Gamma so poles give exact zeros."""
    alpha = p.alpha
    label = f"bessel:alpha={format_exact(alpha) if is_exact(alpha) else alpha}"
    if is_exact(alpha) and real_part(alpha).denominator == 1:
        a = int(real_part(alpha))

        def exact_coeff(m):
            shift = m + a  # Gamma(m + a + 1) = shift!
            if shift < 0:
                return Fraction(0)
            return Fraction((-1) ** m, math.factorial(m) * math.factorial(shift) * 4**m)

        return CoefficientStream(exact_coeff, True, label)

    def coeff(m):
        a = to_mp(alpha) if is_exact(alpha) else ctx.convert(alpha)
        return (-1) ** m * ctx.rgamma(m + a + 1) / (ctx.factorial(m) * ctx.mpf(4) ** m)

    return CoefficientStream(coeff, False, label)


def _is_integer(alpha) -> bool:
    if is_exact(alpha):
        return real_part(alpha).denominator == 1
    a = ctx.convert(alpha)
    return a == ctx.floor(a)


def bessel_eval(p: BesselParams, z, eps, cert: TailCertificate = None) -> EvalResult:
    """``J_alpha(z) = (z/2)^alpha g(z^2)`` on the principal branch, ``g`` the reduced series."""
    z = ctx.convert(z)
    alpha_mp = to_mp(p.alpha) if is_exact(p.alpha) else ctx.convert(p.alpha)
    integer = _is_integer(p.alpha)
    if z == 0:
        if alpha_mp == 0:
            return EvalResult(ctx.one, ctx.zero, 1)
        if alpha_mp > 0 or integer:
            return EvalResult(ctx.zero, ctx.zero, 1)
        raise BranchPoint(f"J_alpha has a branch point at z=0 for alpha={p.alpha}")
    g, default_cert = _bessel_bundle(p, ctx.prec)
    cert = cert or default_cert
    prefactor = ctx.power(z / 2, alpha_mp)
    scale = abs(prefactor)
    inner_eps = ctx.convert(eps) / scale if scale > 0 else ctx.convert(eps)
    res = evaluate(g, z * z, inner_eps, cert)
    return EvalResult(prefactor * res.value, scale * res.error_bound, res.terms_used)


@lru_cache(maxsize=64)
def _bessel_bundle(p: BesselParams, prec: int):
    g = bessel_reduced_coeffs(p)
    return g, make_tail_certificate(g, 1, 128)


def counterexample_coeffs(R) -> CoefficientStream:
    """``c_n = 1/(n! R^n)``: ``sum c_n z^n = exp(z/R)`` while ``sum n! c_n z^n`` has radius ``R``."""
    if is_exact(R):
        R_exact = as_exact(R)
        if imag_part(R_exact) != 0 or R_exact <= 0:
            raise ValueError("R must be a positive real number")
        func = lambda n: 1 / (math.factorial(n) * R_exact**n)
        closed = lambda z: ctx.exp(z / to_mp(R_exact))
        return CoefficientStream(func, True, f"counterexample:R={format_exact(R_exact)}", closed_form=closed)
    R_mp = ctx.convert(R)
    if R_mp <= 0:
        raise ValueError("R must be a positive real number")
    return CoefficientStream(
        lambda n: 1 / (ctx.factorial(n) * R_mp**n), False, f"counterexample:R={R}",
        closed_form=lambda z: ctx.exp(z / R_mp),
    )


def exp_poly_stream(m: ExpPolyModel) -> CoefficientStream:
    """Maclaurin coefficients ``f^(n)(0)/n!`` of ``exp(kz) P(z)``, exact."""
    from .hadamard_probe import leibniz_derivative

    def coeff(n):
        return leibniz_derivative(m, n) / math.factorial(n)

    def closed(z):
        poly = ctx.zero
        for a in reversed(m.P):
            poly = poly * z + to_mp(a)
        return ctx.exp(to_mp(m.k) * z) * poly

    return CoefficientStream(coeff, True, f"exppoly:{m.describe()}", closed_form=closed)


def principal_sqrt(w):
    """``|w|^(1/2) exp(i Arg(w)/2)`` with ``Arg`` in ``(-pi, pi]``."""
    w = ctx.convert(w)
    if w == 0:
        return ctx.mpc(0)
    if isinstance(w, ctx.mpf) or w.imag == 0:
        x = ctx.mpf(w.real)
        return ctx.mpc(ctx.sqrt(x), 0) if x >= 0 else ctx.mpc(0, ctx.sqrt(-x))
    return ctx.sqrt(abs(w)) * ctx.expj(ctx.arg(w) / 2)
