"""Exact rational and Gaussian-rational scalars.

Real exact values are plain :class:`fractions.Fraction`.  Values with a
nonzero imaginary part are :class:`ComplexRational`; arithmetic collapses
back to ``Fraction`` whenever the imaginary part cancels, so the real case
never pays for the complex one.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

from .precision import ctx


class ComplexRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexRational is immutable")

    def __repr__(self):
        return f"ComplexRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_exact(self)

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __add__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return _norm(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return _norm(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return _norm(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return _norm(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        return _norm(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return ComplexRational(o.re, o.im) / self

    def __neg__(self):
        return _norm(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self**-n)
        result, base = Fraction(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return _norm(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im


Exact = Union[Fraction, ComplexRational]


def _lift(x):
    if isinstance(x, ComplexRational):
        return x
    if isinstance(x, (int, Rational)):
        return ComplexRational(x, 0)
    return NotImplemented


def _norm(re: Fraction, im: Fraction) -> Exact:
    if im == 0:
        return re
    return ComplexRational(re, im)


def as_exact(x) -> Exact:
    """Coerce ints, Fractions and ComplexRationals to canonical exact form."""
    if isinstance(x, ComplexRational):
        return _norm(x.re, x.im)
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Rational, ComplexRational))


def real_part(x) -> Fraction:
    return x.re if isinstance(x, ComplexRational) else Fraction(x)


def imag_part(x) -> Fraction:
    return x.im if isinstance(x, ComplexRational) else Fraction(0)


def abs_upper(x) -> Fraction:
    """A rational upper bound on |x| (|re| + |im|); exact for real x."""
    return abs(real_part(x)) + abs(imag_part(x))


def to_mp(x):
    """Convert an exact scalar (or number) to an mpmath value in the package context."""
    if isinstance(x, ComplexRational):
        return ctx.mpc(_frac_to_mpf(x.re), _frac_to_mpf(x.im))
    if isinstance(x, Rational):
        return _frac_to_mpf(Fraction(x))
    if isinstance(x, complex):
        return ctx.mpc(x)
    return ctx.convert(x)


def _frac_to_mpf(q: Fraction):
    if q.denominator == 1:
        return ctx.mpf(q.numerator)
    return ctx.mpf(q.numerator) / q.denominator


def parse_rational(text: str) -> Fraction:
    """Parse ``"3"``, ``"-1/2"``, ``"0.25"`` or ``"1e-3"`` exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a decimal or rational number: {text!r}") from None


def parse_exact(text: str) -> Exact:
    """Parse an exact (possibly complex) scalar such as ``"1/2-3i"`` or ``"2j"``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty number")
    if s[-1] not in "ij":
        return parse_rational(s)
    body = s[:-1]
    # split at the last sign that is not leading and not an exponent sign
    cut = 0
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE":
            cut = i
            break
    re_text, im_text = body[:cut], body[cut:]
    if im_text in ("", "+"):
        im_part = Fraction(1)
    elif im_text == "-":
        im_part = Fraction(-1)
    else:
        im_part = parse_rational(im_text)
    re_part = parse_rational(re_text) if re_text else Fraction(0)
    return _norm(re_part, im_part)


def format_exact(x) -> str:
    """Inverse of :func:`parse_exact`."""
    re_part, im_part = real_part(x), imag_part(x)
    if im_part == 0:
        return str(re_part)
    sign = "+" if im_part >= 0 else "-"
    if re_part == 0:
        return f"{'-' if sign == '-' else ''}{abs(im_part)}i"
    return f"{re_part}{sign}{abs(im_part)}i"
