import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zeroscope.errors import BranchPoint
from zeroscope.exact import ComplexRational
from zeroscope.hadamard_probe import q_polynomial
from zeroscope.precision import ctx
from zeroscope.series_core import evaluate, exp_stream, factorial_weight, make_tail_certificate, radius_of_convergence
from zeroscope.special_functions import (
    BesselParams,
    ExpPolyModel,
    LeRoyParams,
    bessel_eval,
    bessel_reduced_coeffs,
    counterexample_coeffs,
    exp_poly_stream,
    le_roy_coeffs,
    principal_sqrt,
)

J0_FIRST_ZERO = "2.404825557695773"  # bisection oracle on the J_0 series


def ref_besselj(alpha, z):
    with mpmath.workprec(ctx.prec + 32):
        return mpmath.besselj(mpmath.mpf(alpha.numerator) / alpha.denominator, mpmath.mpc(z))


# -- Le Roy ----------------------------------------------------------------------


def test_le_roy_r1_is_exp():
    s = le_roy_coeffs(LeRoyParams(1))
    assert all(s.coeff(n) == exp_stream().coeff(n) for n in range(30))
    assert s.exact


def test_le_roy_r2_n3():
    assert le_roy_coeffs(LeRoyParams(2)).coeff(3) == Fraction(1, 36)


def test_le_roy_r_three_halves_n2():
    v = le_roy_coeffs(LeRoyParams(Fraction(3, 2))).coeff_mp(2)
    assert abs(v - 2 ** -1.5) < 1e-15
    assert abs(v - ctx.mpf(2) ** (-ctx.mpf(3) / 2)) < ctx.ldexp(1, -ctx.prec + 8)


def test_le_roy_complex_r():
    s = le_roy_coeffs(LeRoyParams(ComplexRational(2, 1)))
    n = 5
    expected = ctx.exp(-ctx.mpc(2, 1) * ctx.log(ctx.mpf(120)))
    assert abs(s.coeff_mp(n) - expected) < ctx.ldexp(1, -ctx.prec + 16)
    assert LeRoyParams(ComplexRational(2, 1)).theorem_applies
    assert not LeRoyParams(Fraction(1, 2)).theorem_applies


@settings(max_examples=30)
@given(st.fractions(Fraction(21, 20), 4, max_denominator=20), st.floats(0, 30))
def test_le_roy_positive_axis_at_least_one(r, x):
    s = le_roy_coeffs(LeRoyParams(r))
    cert = make_tail_certificate(s, 1)
    res = evaluate(s, x, 1e-20, cert)
    assert res.value >= 1


# -- Bessel reduced series ------------------------------------------------------


def test_bessel_reduced_examples():
    assert bessel_reduced_coeffs(BesselParams(0)).coeff(0) == 1
    assert bessel_reduced_coeffs(BesselParams(0)).coeff(1) == Fraction(-1, 4)
    assert bessel_reduced_coeffs(BesselParams(-1)).coeff(0) == 0


def test_reciprocal_gamma_limit_oracle():
    # 1/Gamma(x) -> 0 as x -> 0, the convention behind c_0 = 0 for alpha = -1
    vals = [abs(mpmath.rgamma(mpmath.mpf(10) ** -k)) for k in (3, 6, 9)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-8


def test_bessel_reduced_noninteger_matches_gamma_formula():
    s = bessel_reduced_coeffs(BesselParams(Fraction(5, 2)))
    for m in range(6):
        ref = (-1) ** m / (math.factorial(m) * math.gamma(m + 3.5) * 4**m)
        assert abs(float(s.coeff_mp(m)) - ref) <= 1e-14 * abs(ref)


def test_bessel_eval_at_origin():
    assert bessel_eval(BesselParams(0), 0, 1e-20).value == 1
    assert bessel_eval(BesselParams(1), 0, 1e-20).value == 0
    assert bessel_eval(BesselParams(-2), 0, 1e-20).value == 0
    with pytest.raises(BranchPoint):
        bessel_eval(BesselParams(Fraction(-1, 2)), 0, 1e-20)


def test_bessel_eval_first_zero_j0():
    res = bessel_eval(BesselParams(0), ctx.mpf(J0_FIRST_ZERO), 1e-30)
    assert abs(res.value) < 1e-8


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1), Fraction(5, 2), Fraction(-1)])
def test_bessel_identity_random_points(alpha):
    rng = random.Random(hash(alpha) & 0xFFFF)
    p = BesselParams(alpha)
    g = bessel_reduced_coeffs(p)
    cert = make_tail_certificate(g, 1)
    a = ctx.mpf(alpha.numerator) / alpha.denominator
    for _ in range(100):
        r = 5 * math.sqrt(rng.random())
        theta = (rng.random() - 0.5) * math.pi * 0.999  # Re(z) > 0
        z = ctx.mpc(r) * ctx.expj(theta)
        direct = bessel_eval(p, z, 1e-30)
        inner = evaluate(g, z * z, 1e-30, cert)
        pre = ctx.power(z / 2, a)
        assert abs(direct.value - pre * inner.value) <= direct.error_bound + abs(pre) * inner.error_bound
        # independent oracle
        assert abs(direct.value - ref_besselj(alpha, z)) <= direct.error_bound + 1e-40


# -- counterexample ------------------------------------------------------------------


def test_counterexample_examples():
    assert counterexample_coeffs(1).coeff(2) == Fraction(1, 2)
    prof = radius_of_convergence(factorial_weight(counterexample_coeffs(2)), 64)
    assert abs(prof.radius - 2) < 0.02
    s = counterexample_coeffs(3)
    assert abs(evaluate(s, 3, 1e-25, make_tail_certificate(s, 1)).value - ctx.e) < 1e-25


def test_counterexample_rejects_bad_radius():
    with pytest.raises(ValueError):
        counterexample_coeffs(0)
    with pytest.raises(ValueError):
        counterexample_coeffs(-1.5)


@pytest.mark.parametrize("R", [Fraction(1, 2), Fraction(1), Fraction(3)])
def test_counterexample_never_vanishes(R):
    rng = random.Random(int(R * 10))
    s = counterexample_coeffs(R)
    cert = make_tail_certificate(s, min(1, R / 4))
    for _ in range(500):
        z = ctx.mpc(20 * float(R) * math.sqrt(rng.random())) * ctx.expjpi(ctx.mpf(2 * rng.random()))
        res = evaluate(s, z, ctx.mpf(10) ** -30 * ctx.exp(-abs(z) / float(R)), cert)
        assert abs(res.value) > res.error_bound


# -- exp-poly ---------------------------------------------------------------------------


def test_exp_poly_examples():
    e = exp_stream()
    s = exp_poly_stream(ExpPolyModel(1, (1,)))
    assert all(s.coeff(n) == e.coeff(n) for n in range(25))
    assert exp_poly_stream(ExpPolyModel(2, (-1, 1))).coeff(0) == -1
    zez = exp_poly_stream(ExpPolyModel(1, (0, 1)))
    assert zez.coeff(0) == 0
    assert all(zez.coeff(n) == Fraction(1, math.factorial(n - 1)) for n in range(1, 25))


def test_exp_poly_matches_cauchy_product():
    m = ExpPolyModel(Fraction(-3, 2), (Fraction(1, 3), 0, 2, Fraction(-5, 7)))
    s = exp_poly_stream(m)
    for n in range(30):
        conv = sum(m.P[j] * m.k ** (n - j) / math.factorial(n - j) for j in range(min(n, m.N) + 1))
        assert s.coeff(n) == conv


def test_exp_poly_model_validation():
    with pytest.raises(ValueError):
        ExpPolyModel(0, (1,))
    with pytest.raises(ValueError):
        ExpPolyModel(1, (0,))
    assert ExpPolyModel(1, (1, 2, 0, 0)).N == 1


@settings(max_examples=40)
@given(st.integers(0, 2**31))
def test_exp_poly_weighted_equals_leibniz_q(seed):
    r = random.Random(seed)
    N = r.randint(0, 5)
    P = tuple(Fraction(r.randint(-9, 9), r.randint(1, 9)) for _ in range(N)) + (Fraction(r.randint(1, 9), r.randint(1, 9)),)
    k = Fraction(r.choice([-1, 1]) * r.randint(1, 9), r.randint(1, 9))
    m = ExpPolyModel(k, P)
    q = q_polynomial(m)
    w = factorial_weight(exp_poly_stream(m))
    assert all(w.coeff(n) == k**n * q(n) for n in range(N + 1, N + 30))


# -- principal square root --------------------------------------------------------------


def test_principal_sqrt_examples():
    assert principal_sqrt(4) == 2
    assert principal_sqrt(-1) == ctx.mpc(0, 1)
    assert principal_sqrt(-4) == ctx.mpc(0, 2)
    assert principal_sqrt(0) == 0


def test_principal_sqrt_random():
    rng = random.Random(2)
    tol = ctx.ldexp(1, -(ctx.prec - 8))
    for _ in range(1000):
        w = ctx.mpc(rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3))
        s = principal_sqrt(w)
        assert abs(s * s - w) <= tol * abs(w)
        assert -ctx.pi / 2 < ctx.arg(s) <= ctx.pi / 2
