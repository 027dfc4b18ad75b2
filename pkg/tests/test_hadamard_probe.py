import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from zeroscope.errors import InsufficientData, RangeBelowDegree
from zeroscope.exact import ComplexRational, to_mp
from zeroscope.hadamard_probe import (
    DerivativeSequence,
    QPolynomial,
    cross_check_tail_radius,
    fit_exponential_polynomial,
    leibniz_derivatives,
    q_polynomial,
    q_ratio_limit_check,
    random_model,
    tail_radius,
    verify_lemma,
)
from zeroscope.precision import ctx
from zeroscope.special_functions import ExpPolyModel

seeds = st.integers(0, 2**31)


def sympy_derivatives(m, n_max):
    """Independent oracle: differentiate exp(kz) P(z) symbolically."""
    z = sympy.Symbol("z")
    k = sympy.Rational(m.k.numerator, m.k.denominator)
    f = sympy.exp(k * z) * sum(sympy.Rational(a.numerator, a.denominator) * z**j for j, a in enumerate(m.P))
    out = []
    for _ in range(n_max + 1):
        out.append(Fraction(str(sympy.nsimplify(f.subs(z, 0)))))
        f = sympy.diff(f, z)
    return out


# -- derivatives ------------------------------------------------------------------


def test_leibniz_examples():
    assert list(leibniz_derivatives(ExpPolyModel(1, (1,)), 10).values) == [1] * 11
    assert list(leibniz_derivatives(ExpPolyModel(1, (0, 1)), 10).values) == list(range(11))
    assert leibniz_derivatives(ExpPolyModel(2, (-1, 1)), 5)[3] == 4


@pytest.mark.parametrize(
    "model",
    [ExpPolyModel(Fraction(2), (-1, 1)), ExpPolyModel(Fraction(-1, 3), (2, 0, Fraction(5, 2))), ExpPolyModel(3, (-5, 1, 1))],
)
def test_leibniz_against_symbolic_oracle(model):
    assert list(leibniz_derivatives(model, 12).values) == sympy_derivatives(model, 12)


def test_complex_rational_k():
    m = ExpPolyModel(ComplexRational(1, 1), (1, ComplexRational(0, 2)))
    assert verify_lemma(m, (2, 30))
    d = leibniz_derivatives(m, 4)
    # f = e^{(1+i)z}(1 + 2iz): f'(0) = (1+i) + 2i
    assert d[1] == ComplexRational(1, 3)


# -- Q polynomial -------------------------------------------------------------------


def test_q_examples():
    assert q_polynomial(ExpPolyModel(1, (1,))).monomial == (1,)
    q = q_polynomial(ExpPolyModel(2, (-1, 1)))
    assert q.monomial == (-1, Fraction(1, 2))
    assert q(3) == Fraction(1, 2)
    assert q_polynomial(ExpPolyModel(1, (0, 0, 1))).monomial == (0, -1, 1)


def test_from_monomial_inverts_from_falling():
    q = QPolynomial.from_falling([Fraction(1, 3), -2, 0, Fraction(7, 5)])
    back = QPolynomial.from_monomial(q.monomial)
    assert back.falling == q.falling


@settings(max_examples=60)
@given(seeds)
def test_degree_law_and_basis_consistency(seed):
    m = random_model(random.Random(seed))
    q = q_polynomial(m)
    assert q.degree == m.N
    assert all(q(n) == q.eval_falling(n) for n in range(2 * m.N + 3))


# -- verify_lemma ------------------------------------------------------------------------


def test_verify_lemma_examples():
    assert verify_lemma(ExpPolyModel(2, (-1, 1)), (2, 30))
    assert verify_lemma(ExpPolyModel(1, (1,)), (1, 50))
    assert verify_lemma(ExpPolyModel(3, (-5, 1, 1)), (3, 40))


def test_verify_lemma_range_below_degree():
    with pytest.raises(RangeBelowDegree):
        verify_lemma(ExpPolyModel(3, (-5, 1, 1)), (2, 40))


def test_lemma_identity_detects_tampering():
    m = ExpPolyModel(2, (-1, 1))
    q = q_polynomial(m)
    d = leibniz_derivatives(m, 30)
    assert d[10] == 2**10 * q(10)
    assert d[10] + 1 != 2**10 * q(10)


@settings(max_examples=40)
@given(seeds)
def test_round_trip_random_models(seed):
    m = random_model(random.Random(seed))
    assert verify_lemma(m, (m.N + 1, m.N + 40))
    fit = fit_exponential_polynomial(leibniz_derivatives(m, m.N + 40), 6)
    assert fit is not None
    k, q = fit
    assert k == m.k
    assert q.monomial == q_polynomial(m).monomial


# -- tail radius ----------------------------------------------------------------------


def test_tail_radius_examples():
    assert tail_radius(QPolynomial.from_monomial([-2, 1]), 2) == 0.5
    assert tail_radius(QPolynomial.from_monomial([1]), 1) == 1
    assert tail_radius(QPolynomial.from_monomial([0, 0, 1]), Fraction(1, 4)) == 4


def test_tail_radius_numeric_oracle_quarter():
    # root-test oracle on n^2 4^-n at large n
    n = 4000
    root = math.exp(-(2 * math.log(n) - n * math.log(4)) / n)
    assert abs(root - 4) / 4 < 0.01
    exact, prof, rel = cross_check_tail_radius(QPolynomial.from_monomial([0, 0, 1]), Fraction(1, 4))
    assert exact == 4 and rel < 0.02


def test_tail_radius_rejects_zero_q():
    with pytest.raises(ValueError):
        tail_radius(QPolynomial.from_monomial([0]), 1)


@settings(max_examples=25)
@given(seeds)
def test_tail_radius_cross_check(seed):
    m = random_model(random.Random(seed))
    _, _, rel = cross_check_tail_radius(q_polynomial(m), m.k)
    assert rel < 0.02


def test_divergence_witness():
    rng = random.Random(99)
    hits = 0
    for _ in range(50):
        m = random_model(rng, max_degree=4)
        q = q_polynomial(m)
        kz = ctx.mpf(1.1) * ctx.expjpi(ctx.mpf(2 * rng.random()))  # |kz| = 1.1
        total, power, peak = ctx.zero, ctx.one, ctx.zero
        for n in range(201):
            total += to_mp(q(n)) * power
            power *= kz
            peak = max(peak, abs(total))
        hits += peak > 1e6
    assert hits >= 45


# -- ratio limit ----------------------------------------------------------------------


def test_q_ratio_examples():
    assert q_ratio_limit_check(QPolynomial.from_monomial([1]), 100) == 0
    assert q_ratio_limit_check(QPolynomial.from_monomial([0, 1]), 1000) <= 1 / 500
    assert q_ratio_limit_check(QPolynomial.from_monomial([6, -5, 1]), 2000) <= 0.01


@settings(max_examples=25)
@given(seeds)
def test_q_ratio_shrinks_with_horizon(seed):
    q = q_polynomial(random_model(random.Random(seed), max_degree=4))
    n0 = q.first_safe_index()
    a = q_ratio_limit_check(q, max(4 * n0, 200))
    b = q_ratio_limit_check(q, max(16 * n0, 800))
    assert b <= a


# -- inverse fit ------------------------------------------------------------------------


def test_fit_examples():
    k, q = fit_exponential_polynomial(leibniz_derivatives(ExpPolyModel(2, (-1, 1)), 20), 3)
    assert k == 2 and q.monomial == (-1, Fraction(1, 2))
    k, q = fit_exponential_polynomial(DerivativeSequence([1] * 20), 3)
    assert k == 1 and q.monomial == (1,)
    assert fit_exponential_polynomial(DerivativeSequence([math.factorial(n) for n in range(30)]), 6) is None


def test_fit_insufficient_data():
    with pytest.raises(InsufficientData):
        fit_exponential_polynomial(DerivativeSequence([1] * 10), 6)


def test_fit_rejects_near_miss():
    d = list(leibniz_derivatives(ExpPolyModel(3, (1, 2)), 30).values)
    d[25] += Fraction(1, 10**30)
    assert fit_exponential_polynomial(DerivativeSequence(d), 4) is None
