"""Exact derivative identity for ``f(z) = exp(kz) P(z)``.

With ``P(z) = sum_j a_j z^j`` of degree ``N``, the Leibniz rule gives

    f^(n)(0) = sum_{j <= min(n, N)} C(n, j) k^(n-j) j! a_j = k^n Q(n),
    Q(n)     = sum_{j <= N} (a_j / k^j) n (n-1) ... (n-j+1),

a degree-``N`` polynomial in ``n``.  Everything here is exact rational (or
Gaussian-rational) arithmetic; there is no floating path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .errors import InsufficientData, RangeBelowDegree
from .exact import abs_upper, as_exact, format_exact, imag_part, is_exact, real_part, to_mp
from .precision import ctx
from .series_core import CoefficientStream, GrowthProfile, radius_of_convergence
from .special_functions import ExpPolyModel


@dataclass(frozen=True)
class DerivativeSequence:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_exact(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]


def _poly_mul_linear(poly: list, root) -> list:
    """Multiply a monomial-basis polynomial by ``(n - root)``."""
    out = [Fraction(0)] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i + 1] = out[i + 1] + c
        out[i] = out[i] - root * c
    return out


def _trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    return tuple(as_exact(c) for c in coeffs)


@dataclass(frozen=True)
class QPolynomial:
    """``Q`` held in both the falling-factorial basis and the monomial basis."""

    falling: tuple
    monomial: tuple

    @classmethod
    def from_falling(cls, weights: Sequence) -> "QPolynomial":
        weights = _trim(weights)
        mono = [Fraction(0)]
        basis = [Fraction(1)]
        for j, b in enumerate(weights):
            if j:
                basis = _poly_mul_linear(basis, j - 1)
            mono = [x + y for x, y in _zip_pad(mono, [b * c for c in basis])]
        return cls(weights, _trim(mono))

    @classmethod
    def from_monomial(cls, coeffs: Sequence) -> "QPolynomial":
        coeffs = _trim(coeffs)
        values = [_horner_exact(coeffs, n) for n in range(len(coeffs))]
        # forward differences at 0: b_j = Delta^j Q(0) / j!
        weights = []
        row = values
        for j in range(len(coeffs)):
            weights.append(row[0] / math.factorial(j))
            row = [b - a for a, b in zip(row, row[1:])]
        return cls(_trim(weights), coeffs)

    @property
    def degree(self) -> int:
        return len(self.monomial) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and not self.monomial[0]

    def __call__(self, n):
        return _horner_exact(self.monomial, n)

    def eval_falling(self, n):
        total, ff = Fraction(0), Fraction(1)
        for j, b in enumerate(self.falling):
            if j:
                ff = ff * (n - (j - 1))
            total = total + b * ff
        return total

    def cauchy_bound(self) -> Fraction:
        """Rational upper bound on the modulus of every root of ``Q``."""
        if self.degree == 0:
            return Fraction(0)
        lead = self.monomial[-1]
        lead_low = max(abs(real_part(lead)), abs(imag_part(lead)))
        return 1 + max(abs_upper(c) for c in self.monomial[:-1]) / lead_low

    def first_safe_index(self) -> int:
        """``ceil(root bound) + 1``: past every real part of a root of ``Q``."""
        return math.ceil(self.cauchy_bound()) + 1

    def describe(self) -> str:
        return " + ".join(f"({format_exact(c)})n^{i}" for i, c in enumerate(self.monomial))


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def _horner_exact(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def leibniz_derivative(m: ExpPolyModel, n: int):
    """``f^(n)(0)`` for ``f = exp(kz) P(z)``, exactly."""
    total = Fraction(0)
    for j in range(min(n, m.N) + 1):
        a = m.P[j]
        if a:
            total = total + math.comb(n, j) * m.k ** (n - j) * math.factorial(j) * a
    return total


def leibniz_derivatives(m: ExpPolyModel, n_max: int) -> DerivativeSequence:
    return DerivativeSequence(tuple(leibniz_derivative(m, n) for n in range(n_max + 1)))


def random_model(rng, max_degree: int = 6, max_num: int = 20) -> ExpPolyModel:
    """Seeded random exact model: rational ``k != 0``, ``deg P <= max_degree``."""

    def rational(nonzero=False):
        num = rng.randint(-max_num, max_num)
        while nonzero and num == 0:
            num = rng.randint(-max_num, max_num)
        return Fraction(num, rng.randint(1, max_num))

    N = rng.randint(0, max_degree)
    P = [rational() for _ in range(N)] + [rational(nonzero=True)]
    return ExpPolyModel(rational(nonzero=True), tuple(P))


def q_polynomial(m: ExpPolyModel) -> QPolynomial:
    return QPolynomial.from_falling([a / m.k**j for j, a in enumerate(m.P)])


def verify_lemma(m: ExpPolyModel, n_range: Tuple[int, int]) -> bool:
    """Check ``f^(n)(0) == k^n Q(n)`` exactly for every ``n`` in the closed range."""
    lo, hi = n_range
    if lo <= m.N:
        raise RangeBelowDegree(f"range starts at {lo} but the identity is only asserted for n > N = {m.N}")
    if hi < lo:
        raise ValueError("empty range")
    q = q_polynomial(m)
    return all(leibniz_derivative(m, n) == m.k**n * q(n) for n in range(lo, hi + 1))


def tail_radius(q: QPolynomial, k):
    """Radius of convergence ``1/|k|`` of ``sum Q(n) (kz)^n``."""
    if q.is_zero():
        raise ValueError("Q must not be identically zero")
    k = as_exact(k) if is_exact(k) else k
    if not k:
        raise ValueError("k must be nonzero")
    return 1 / abs(to_mp(k) if is_exact(k) else ctx.convert(k))


def q_geometric_stream(q: QPolynomial, k, *, exact: bool = True) -> CoefficientStream:
    """The stream ``Q(n) k^n``; ``exact=False`` evaluates it in working precision."""
    k = as_exact(k)
    label = f"Q(n)k^n:k={format_exact(k)}"
    if exact:
        return CoefficientStream(lambda n: q(n) * k**n, True, label)
    mono = [to_mp(c) for c in q.monomial]
    k_mp = to_mp(k)

    def coeff(n):
        acc = ctx.zero
        for c in reversed(mono):
            acc = acc * n + c
        return acc * k_mp**n

    return CoefficientStream(coeff, False, label)


def cross_check_tail_radius(q: QPolynomial, k, n_max: Optional[int] = None) -> Tuple[object, GrowthProfile, float]:
    """Compare :func:`tail_radius` with the numeric radius of the stream ``Q(n) k^n``.

    The default horizon puts the trailing window well past every root of ``Q``.
    """
    exact_radius = tail_radius(q, k)
    if n_max is None:
        n_max = max(256, 8 * q.first_safe_index())
    profile = radius_of_convergence(q_geometric_stream(q, k, exact=False), n_max)
    rel = abs(profile.radius - float(exact_radius)) / float(exact_radius)
    return exact_radius, profile, rel


def q_ratio_limit_check(q: QPolynomial, n_max: int) -> float:
    """``max |Q(n+1)/Q(n) - 1|`` over the trailing half of ``[n0, n_max]``."""
    if q.is_zero():
        raise ValueError("Q must not be identically zero")
    n0 = q.first_safe_index()
    if n_max <= n0:
        raise ValueError(f"n_max={n_max} must exceed the first safe index {n0}")
    start = (n0 + n_max) // 2
    worst = ctx.zero
    prev = q(start)
    for n in range(start, n_max):
        nxt = q(n + 1)
        dev = nxt / prev - 1
        worst = max(worst, abs(to_mp(dev)))
        prev = nxt
    return float(worst)


def _solve_exact(A, b):
    """Gaussian elimination over exact scalars; None when singular."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col]), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _interpolate(xs, ys) -> list:
    """Monomial coefficients of the interpolating polynomial (Newton form, exact)."""
    coef = list(ys)
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)]
    for i in range(n - 1, -1, -1):
        poly = _poly_mul_linear(poly, xs[i])
        poly[0] = poly[0] + coef[i]
    return poly


def fit_exponential_polynomial(d: DerivativeSequence, max_degree: int):
    """Recover ``(k, Q)`` with ``d_n = k^n Q(n)`` for all ``n > deg Q``, or None.

    For each candidate degree ``D`` the order-``D+1`` linear recurrence
    satisfied by ``d`` is solved exactly; its characteristic polynomial must
    be ``(x - k)^(D+1)``, which pins ``k`` exactly.  ``Q`` is then interpolated
    from ``d_n / k^n`` and the identity is re-verified on every available index.
    Only exact matches are accepted.
    """
    L = len(d)
    if L < 2 * max_degree + 6:
        raise InsufficientData(f"need at least {2 * max_degree + 6} derivatives, got {L}")
    vals = d.values
    for D in range(max_degree + 1):
        order = D + 1
        s = max(0, min(D + 1, L - 2 * D - 2))
        A = [[vals[n + i] for i in range(order)] for n in range(s, s + order)]
        rhs = [vals[n + order] for n in range(s, s + order)]
        e = _solve_exact(A, rhs)
        if e is None:
            continue
        k = e[-1] / order
        if not k:
            continue
        if any(e[i] != -math.comb(order, i) * (-k) ** (order - i) for i in range(order)):
            continue
        xs = list(range(D + 1, 2 * D + 2))
        q = QPolynomial.from_monomial(_interpolate(xs, [vals[n] / k**n for n in xs]))
        if q.degree != D or q.is_zero():
            continue
        if all(vals[n] == k**n * q(n) for n in range(D + 1, L)):
            return k, q
    return None
