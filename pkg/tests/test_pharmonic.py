"""Tests for src/ghlab/pharmonic.py."""

from __future__ import annotations

import cmath
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghlab.eigenfamilies import EigenFamily
from ghlab.errors import AmbiguousCaseWarning, BothZeroError, InvalidRangeError, LogPowerOverflowError
from ghlab.lie_core import LieAlgebraBasis
from ghlab.matrix_poly import coefficient_function
from ghlab.pharmonic import (
    MAX_LOG_POWER,
    ComposedFunction,
    EigenSpec,
    LogPolynomial,
    apply_L,
    build_phi_p,
    classify_case,
    numeric_crosscheck,
    verify_proper_pharmonic,
)
from ghlab.sampling import Sampling
from ghlab.tension_engine import estimate_eigenvalues, full_context, tau_at

coefficients = st.builds(
    complex,
    st.floats(min_value=-2, max_value=2, allow_nan=False),
    st.floats(min_value=-2, max_value=2, allow_nan=False),
)
terms = st.lists(
    st.tuples(st.tuples(st.integers(min_value=-3, max_value=3), st.integers(min_value=0, max_value=3)), coefficients),
    max_size=4,
)
specs = st.sampled_from([EigenSpec(-3, -1), EigenSpec(-2, 0), EigenSpec(-1, -1), EigenSpec(2.5, 0.5)])

POINT = 1.3 + 0.4j


# ── LogPolynomial ─────────────────────────────────────────────────────────────


def test_monomial_evaluates_on_principal_branch() -> None:
    """z^(1/2) at -4 is 2i on the principal branch."""
    assert LogPolynomial.monomial(0.5, 0).evaluate(-4) == pytest.approx(2j)
    assert LogPolynomial.monomial(0, 2).evaluate(cmath.e) == pytest.approx(1)


def test_terms_merge_and_order() -> None:
    """Equal keys merge, zeros drop, higher log powers come first."""
    f = LogPolynomial.from_terms([((1, 0), 2), ((0, 3), 1), ((1, 0), -2), ((2, 1), 1)])
    assert list(f.terms) == [(0j, 3), (2 + 0j, 1)]
    assert f.max_log_power() == 3


def test_derivative_of_z_squared_log() -> None:
    """d/dz (z^2 log z) = 2 z log z + z."""
    derivative = LogPolynomial.monomial(2, 1).derivative()
    expected = 2 * POINT * cmath.log(POINT) + POINT
    assert derivative.evaluate(POINT) == pytest.approx(expected)


def test_log_power_bounds() -> None:
    with pytest.raises(LogPowerOverflowError):
        LogPolynomial.monomial(0, MAX_LOG_POWER + 1)
    with pytest.raises(InvalidRangeError):
        LogPolynomial.monomial(0, -1)


def test_text_form() -> None:
    assert LogPolynomial.monomial(0, 1).to_text() == "(1+0j) * z^(0j) * log^1(z)"
    assert LogPolynomial().to_text() == "0"


# ── Operator L ────────────────────────────────────────────────────────────────


def test_apply_L_on_monomial() -> None:
    """L(z^a log^b) follows the closed form term by term."""
    lam, mu, a, b = -3.0, -1.0, 2.0, 2
    result = apply_L(LogPolynomial.monomial(a, b), EigenSpec(lam, mu))
    log_z = cmath.log(POINT)
    expected = POINT**a * (
        (mu * a * (a - 1) + lam * a) * log_z**b
        + b * (mu * (2 * a - 1) + lam) * log_z ** (b - 1)
        + mu * b * (b - 1) * log_z ** (b - 2)
    )
    assert result.evaluate(POINT) == pytest.approx(expected)


def test_apply_L_matches_differential_form() -> None:
    """L f = mu z^2 f'' + lambda z f'."""
    f = LogPolynomial.from_terms([((-1, 1), 1), ((0, 2), 3j)])
    spec = EigenSpec(-2, -1)
    first = f.derivative()
    expected = spec.mu * POINT**2 * first.derivative().evaluate(POINT) + spec.lam * POINT * first.evaluate(POINT)
    assert apply_L(f, spec).evaluate(POINT) == pytest.approx(expected)


@settings(max_examples=50, deadline=None)
@given(terms, terms, coefficients, specs)
def test_apply_L_is_linear(first: list, second: list, alpha: complex, spec: EigenSpec) -> None:
    """L(alpha f + g) = alpha L f + L g."""
    f, g = LogPolynomial.from_terms(first), LogPolynomial.from_terms(second)
    left = apply_L(f.scale(alpha) + g, spec).evaluate(POINT)
    right = alpha * apply_L(f, spec).evaluate(POINT) + apply_L(g, spec).evaluate(POINT)
    assert left == pytest.approx(right, abs=1e-8)


def test_eigen_spec_rejects_both_zero() -> None:
    with pytest.raises(BothZeroError):
        EigenSpec(0, 0)
    assert EigenSpec(-3, -1).flipped() == EigenSpec(3, 1)


# ── Profiles ──────────────────────────────────────────────────────────────────


def test_classify_cases() -> None:
    assert classify_case(EigenSpec(-3, 0)) == "mu-zero"
    assert classify_case(EigenSpec(-1, -1)) == "lambda-equals-mu"
    assert classify_case(EigenSpec(-2, -1)) == "generic"


def test_near_equal_constants_warn() -> None:
    with pytest.warns(AmbiguousCaseWarning):
        assert classify_case(EigenSpec(-1, -1 + 1e-14)) == "lambda-equals-mu"


def test_exactly_equal_constants_do_not_warn() -> None:
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        classify_case(EigenSpec(-1, -1))


def test_generic_profile_shape() -> None:
    """p = 2, (lambda, mu) = (-2, -1): z^-1 log z + log z."""
    profile = build_phi_p(2, EigenSpec(-2, -1))
    assert profile.terms == {(-1 + 0j, 1): 1, (0j, 1): 1}


def test_equal_case_profile_shape() -> None:
    """p = 2, lambda = mu: log^3 + log^2."""
    profile = build_phi_p(2, EigenSpec(-1, -1), c1=2, c2=3)
    assert profile.terms == {(0j, 3): 2, (0j, 2): 3}


def test_mu_zero_profile_shape() -> None:
    assert build_phi_p(3, EigenSpec(-3, 0)).terms == {(0j, 2): 1}


def test_build_phi_p_rejects_order_zero() -> None:
    with pytest.raises(InvalidRangeError):
        build_phi_p(0, EigenSpec(-3, -1))


@pytest.mark.parametrize("spec", [EigenSpec(-3, 0), EigenSpec(-1, -1), EigenSpec(-2, -1), EigenSpec(-6, -2)])
@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_profiles_are_proper_pharmonic(spec: EigenSpec, p: int) -> None:
    """L^p Phi_p = 0 and L^(p-1) Phi_p != 0; no smaller order vanishes."""
    profile = build_phi_p(p, spec)
    verdict = verify_proper_pharmonic(profile, p, spec)
    assert verdict.passed
    assert verdict.vanishing_step == p
    assert len(verdict.chain) == p + 1
    for lower in range(1, p):
        assert not verify_proper_pharmonic(profile, lower, spec).passed


def test_flipped_constants_keep_the_profile_proper() -> None:
    """Profiles built for (-lambda, -mu) are proper for the flipped operator."""
    flipped = EigenSpec(-3, -1).flipped()
    assert verify_proper_pharmonic(build_phi_p(3, flipped), 3, flipped).passed


# ── Composition with eigenfunctions ───────────────────────────────────────────


def test_composed_tension_equals_L_profile(complex_12: EigenFamily, sampling: Sampling) -> None:
    """tau(f o phi) = (L f)(phi) exactly through chain-rule jets."""
    ctx = full_context(complex_12.basis())
    phi = complex_12.polynomials[0]
    spec = EigenSpec(-3, -1)
    profile = build_phi_p(2, spec)
    composed = ComposedFunction(profile, phi)
    g = ctx.sample_point(sampling, 0)
    assert tau_at(composed, g, ctx) == pytest.approx(apply_L(profile, spec).evaluate(phi.evaluate(g)), rel=1e-8)


def test_numeric_crosscheck_agrees_with_symbolic(complex_12: EigenFamily, sampling: Sampling) -> None:
    """Finite differences reproduce (L f)(phi); the iterated tension is near zero."""
    ctx = full_context(complex_12.basis())
    phi = complex_12.polynomials[0]
    measured = estimate_eigenvalues([phi], ctx, sampling)
    spec = EigenSpec(measured.lambda_mean, measured.mu_mean, source="measured")
    report = numeric_crosscheck(build_phi_p(2, spec), phi, ctx, sampling, spec, modulus_floor=0.5)
    assert report.max_deviation < 1e-4
    assert report.iterated_deviation < 1e-2
    assert report.samples == sampling.samples


def test_numeric_crosscheck_detects_wrong_constants(complex_12: EigenFamily, sampling: Sampling) -> None:
    ctx = full_context(complex_12.basis())
    phi = complex_12.polynomials[0]
    wrong = EigenSpec(-1, -1)
    report = numeric_crosscheck(build_phi_p(2, wrong), phi, ctx, sampling, wrong, nested=False, modulus_floor=0.5)
    assert report.max_deviation > 1e-2
    assert report.iterated_max == 0.0


# ── Degree law and filtration ─────────────────────────────────────────────────


def _log_power_bound(f: LogPolynomial, spec: EigenSpec) -> int:
    """b where mu a(a-1) + lambda a != 0, b - 1 otherwise."""
    return max(
        (b if spec.mu * a * (a - 1) + spec.lam * a != 0 else b - 1 for a, b in f.terms),
        default=-1,
    )


@settings(max_examples=50, deadline=None)
@given(terms, specs)
def test_log_power_never_grows(raw: list, spec: EigenSpec) -> None:
    f = LogPolynomial.from_terms(raw)
    assert apply_L(f, spec).max_log_power() <= _log_power_bound(f, spec)


@pytest.mark.parametrize("spec", [EigenSpec(-3, 0), EigenSpec(-1, -1), EigenSpec(-2, -1), EigenSpec(2.5, 0.5)])
@pytest.mark.parametrize("p", [2, 3, 4])
def test_profile_chain_strictly_descends(spec: EigenSpec, p: int) -> None:
    """Each L step lowers the top log-power of a profile until it vanishes."""
    chain = [g for g in verify_proper_pharmonic(build_phi_p(p, spec), p, spec).chain if not g.is_zero]
    powers = [g.max_log_power() for g in chain]
    assert all(later < earlier for earlier, later in zip(powers, powers[1:]))


@pytest.mark.parametrize("spec", [EigenSpec(-2, -1), EigenSpec(-6, -2), EigenSpec(2.5, 0.5)])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_generic_span_is_a_filtration(spec: EigenSpec, k: int) -> None:
    """L maps z^c log^k and log^k into the span of z^c log^j, log^j with j < k."""
    c = 1 - spec.lam / spec.mu
    for exponent in (c, 0):
        image = apply_L(LogPolynomial.monomial(exponent, k), spec)
        for a, b in image.terms:
            assert b < k
            assert min(abs(a - c), abs(a)) < 1e-12


def test_log_polynomials_hash_by_value() -> None:
    f = build_phi_p(2, EigenSpec(-2, -1))
    assert hash(f) == hash(LogPolynomial.from_terms(dict(f.terms)))
    assert len({f, build_phi_p(2, EigenSpec(-2, -1)), LogPolynomial()}) == 2


# ── Random profiles on U(2) ───────────────────────────────────────────────────


@pytest.mark.parametrize("seed", range(20))
def test_random_profiles_match_finite_differences(u2: LieAlgebraBasis, sampling: Sampling, seed: int) -> None:
    """tau(f o z11) from central differences agrees with (L f)(z11)."""
    rng = np.random.default_rng(seed)
    count = int(rng.integers(1, 4))
    raw = [
        ((int(rng.integers(-3, 4)), int(rng.integers(0, 4))), complex(rng.standard_normal(), rng.standard_normal()))
        for _ in range(count)
    ]
    spec = EigenSpec(-2, -1)
    phi = coefficient_function((2, 2), 1, 1)
    report = numeric_crosscheck(
        LogPolynomial.from_terms(raw),
        phi,
        full_context(u2),
        sampling.with_samples(4),
        spec,
        nested=False,
        modulus_floor=0.5,
    )
    assert report.max_deviation < 1e-4
