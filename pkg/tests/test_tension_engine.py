"""Tests for src/ghlab/tension_engine.py."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghlab.compositions import RationalMap
from ghlab.eigenfamilies import EigenFamily, complex_family
from ghlab.errors import InvalidRangeError, NotInvariantError
from ghlab.lie_core import LieAlgebraBasis, SymmetricPair, build_symmetric_pair, build_unitary_basis, sample_group_point
from ghlab.matrix_poly import MatrixPolynomial, coefficient_function
from ghlab.sampling import Sampling
from ghlab.tension_engine import (
    compare_full_vs_horizontal,
    dual_context,
    estimate_eigenvalues,
    full_context,
    horizontal_context,
    isotropy_context,
    kappa_at,
    tau_at,
)


# ── Coefficient lemmas ────────────────────────────────────────────────────────


def test_tau_of_coefficient_is_minus_n(u3: LieAlgebraBasis) -> None:
    """tau(z_ja) = -n z_ja on U(n)."""
    ctx = full_context(u3)
    g = sample_group_point(u3, 4, 0)
    for j in (1, 2, 3):
        for a in (1, 2, 3):
            f = coefficient_function((3, 3), j, a)
            assert tau_at(f, g, ctx) == pytest.approx(-3 * g[j - 1, a - 1], abs=1e-12)


def test_kappa_of_coefficients_swaps_columns(u3: LieAlgebraBasis) -> None:
    """kappa(z_ja, z_kb) = -z_jb z_ka on U(n)."""
    ctx = full_context(u3)
    g = sample_group_point(u3, 4, 1)
    f = coefficient_function((3, 3), 1, 2)
    h = coefficient_function((3, 3), 3, 1)
    assert kappa_at(f, h, g, ctx) == pytest.approx(-g[0, 0] * g[2, 1], abs=1e-12)


def test_sp_tau_of_coefficient(sp2: LieAlgebraBasis) -> None:
    """tau(q_ja) = -(2n+1)/2 q_ja on Sp(n)."""
    ctx = full_context(sp2)
    g = sample_group_point(sp2, 4, 2)
    f = coefficient_function((4, 4), 2, 3)
    assert tau_at(f, g, ctx) == pytest.approx(-2.5 * g[1, 2], abs=1e-12)


def test_sp_kappa_upper_rows(sp2: LieAlgebraBasis) -> None:
    """kappa(q_ja, q_kb) = -1/2 q_jb q_ka for rows within the upper half."""
    ctx = full_context(sp2)
    g = sample_group_point(sp2, 4, 3)
    f = coefficient_function((4, 4), 1, 4)
    h = coefficient_function((4, 4), 2, 1)
    assert kappa_at(f, h, g, ctx) == pytest.approx(-0.5 * g[0, 0] * g[1, 3], abs=1e-12)


# ── Eigen estimation ──────────────────────────────────────────────────────────


@pytest.mark.parametrize(("p", "q"), [(1, 1), (1, 2), (2, 2)])
def test_complex_minors_full_constants(p: int, q: int, sampling: Sampling) -> None:
    """Minors with fixed columns 1..p have (lambda, mu) = (-p(q+1), -p)."""
    family = complex_family(p, q)
    estimate = estimate_eigenvalues(family.polynomials, full_context(family.basis()), sampling)
    assert estimate.is_eigen(1e-8)
    assert estimate.matches(-p * (q + 1), -p, 1e-8)
    assert estimate.samples == sampling.samples


def test_complex_minors_horizontal_constants(complex_12: EigenFamily, sampling: Sampling) -> None:
    """Over m the constants are (-pq, 0)."""
    pair = build_symmetric_pair(complex_12.basis(), (1, 2))
    estimate = estimate_eigenvalues(complex_12.polynomials, horizontal_context(pair), sampling)
    assert estimate.matches(-2, 0, 1e-8)


def test_estimate_rejects_empty_and_constant(u2: LieAlgebraBasis, sampling: Sampling) -> None:
    ctx = full_context(u2)
    with pytest.raises(InvalidRangeError):
        estimate_eigenvalues([], ctx, sampling)
    with pytest.raises(InvalidRangeError):
        estimate_eigenvalues([MatrixPolynomial.constant((2, 2), 1)], ctx, sampling)


def test_non_eigen_function_detected(u2: LieAlgebraBasis, sampling: Sampling) -> None:
    """z11 + z11^2 mixes two eigenvalues, so its ratio is not constant."""
    z = coefficient_function((2, 2), 1, 1)
    estimate = estimate_eigenvalues([z + z * z], full_context(u2), sampling)
    assert not estimate.is_eigen(1e-6)


def test_estimate_is_deterministic(complex_12: EigenFamily) -> None:
    ctx = full_context(complex_12.basis())
    first = estimate_eigenvalues(complex_12.polynomials, ctx, Sampling(seed=3, samples=8, workers=1))
    second = estimate_eigenvalues(complex_12.polynomials, ctx, Sampling(seed=3, samples=8, workers=3))
    assert first == second


# ── Contexts ──────────────────────────────────────────────────────────────────


def test_context_labels(grassmann_12: SymmetricPair) -> None:
    assert horizontal_context(grassmann_12).label == "horizontal"
    assert horizontal_context(grassmann_12, unimodular=True).dim == 4 + 2
    assert isotropy_context(grassmann_12).dim == 5
    assert dual_context(grassmann_12).label == "dual"
    flag = build_symmetric_pair(build_unitary_basis(4), (1, 1, 2))
    assert horizontal_context(flag).label == "flag-horizontal"


def test_dual_context_samples_dual_points(grassmann_12: SymmetricPair, sampling: Sampling) -> None:
    ctx = dual_context(grassmann_12)
    z = ctx.sample_point(sampling, 0)
    assert not np.allclose(z @ z.conj().T, np.eye(3))


# ── Full versus horizontal ────────────────────────────────────────────────────


def test_minor_gap_is_minus_p_under_full_isotropy(complex_12: EigenFamily, sampling: Sampling) -> None:
    """tau_full - tau_m = -p f for a minor; it is not K-invariant."""
    pair = build_symmetric_pair(complex_12.basis(), (1, 2))
    comparison = compare_full_vs_horizontal(complex_12.polynomials[0], pair, sampling)
    assert not comparison.invariant
    assert comparison.gap_ratio == pytest.approx(-1, abs=1e-8)
    with pytest.raises(NotInvariantError):
        comparison.require_invariant()


def test_minor_descends_for_unimodular_isotropy(complex_12: EigenFamily, sampling: Sampling) -> None:
    """With K_0 = S(U(p) x U(q)) the minor is invariant and the gap closes."""
    pair = build_symmetric_pair(complex_12.basis(), (1, 2))
    comparison = compare_full_vs_horizontal(complex_12.polynomials[0], pair, sampling, unimodular=True)
    assert comparison.invariant
    assert comparison.max_gap < 1e-9
    comparison.require_invariant()


def test_degree_zero_ratio_descends_to_flag(sampling: Sampling) -> None:
    """z11 / z21 is invariant under U(1) x U(1) x U(2) on the flag (1, 1, 2)."""
    family = complex_family(1, 3)
    pair = build_symmetric_pair(family.basis(), (1, 1, 2))
    top, bottom = family.polynomials[0], family.polynomials[1]
    comparison = compare_full_vs_horizontal(
        RationalMap(top, bottom), pair, sampling, accept=lambda g: abs(bottom.evaluate(g)) > 1e-3
    )
    assert comparison.label == "flag-horizontal"
    assert comparison.invariant
    assert comparison.max_gap < 1e-9


# ── Operator identities ───────────────────────────────────────────────────────

U2_CONTEXT = full_context(build_unitary_basis(2))
finite = st.floats(min_value=-2, max_value=2, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
entries = st.tuples(st.integers(min_value=1, max_value=2), st.integers(min_value=1, max_value=2))
polynomials = st.lists(
    st.tuples(st.lists(entries, min_size=1, max_size=2), complexes), min_size=1, max_size=4
).map(lambda terms: MatrixPolynomial.from_terms((2, 2), terms))
indices = st.integers(min_value=0, max_value=1000)


@settings(max_examples=40, deadline=None)
@given(polynomials, polynomials, indices)
def test_product_rule(f: MatrixPolynomial, h: MatrixPolynomial, index: int) -> None:
    """tau(f h) = tau(f) h + 2 kappa(f, h) + f tau(h)."""
    g = sample_group_point(U2_CONTEXT.ambient, 9, index)
    left = tau_at(f * h, g, U2_CONTEXT)
    right = (
        tau_at(f, g, U2_CONTEXT) * h.evaluate(g)
        + 2 * kappa_at(f, h, g, U2_CONTEXT)
        + f.evaluate(g) * tau_at(h, g, U2_CONTEXT)
    )
    assert left == pytest.approx(right, rel=1e-10, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(polynomials, polynomials, indices)
def test_kappa_is_symmetric(f: MatrixPolynomial, h: MatrixPolynomial, index: int) -> None:
    g = sample_group_point(U2_CONTEXT.ambient, 9, index)
    assert kappa_at(f, h, g, U2_CONTEXT) == kappa_at(h, f, g, U2_CONTEXT)


@settings(max_examples=40, deadline=None)
@given(polynomials, polynomials, polynomials, complexes, indices)
def test_kappa_bilinear_and_tau_linear(
    f: MatrixPolynomial, h: MatrixPolynomial, k: MatrixPolynomial, alpha: complex, index: int
) -> None:
    """Over complex scalars: kappa(alpha f + h, k) and tau(alpha f + h) split."""
    g = sample_group_point(U2_CONTEXT.ambient, 9, index)
    mixed = f.scale(alpha) + h
    kappa = alpha * kappa_at(f, k, g, U2_CONTEXT) + kappa_at(h, k, g, U2_CONTEXT)
    tau = alpha * tau_at(f, g, U2_CONTEXT) + tau_at(h, g, U2_CONTEXT)
    assert kappa_at(mixed, k, g, U2_CONTEXT) == pytest.approx(kappa, rel=1e-12, abs=1e-12)
    assert tau_at(mixed, g, U2_CONTEXT) == pytest.approx(tau, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(polynomials, indices)
def test_chain_rule_for_square(phi: MatrixPolynomial, index: int) -> None:
    """tau(phi^2) = 2 kappa(phi, phi) + 2 phi tau(phi)."""
    g = sample_group_point(U2_CONTEXT.ambient, 9, index)
    expected = 2 * kappa_at(phi, phi, g, U2_CONTEXT) + 2 * phi.evaluate(g) * tau_at(phi, g, U2_CONTEXT)
    assert tau_at(phi * phi, g, U2_CONTEXT) == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_singletons_share_the_family_lambda(complex_12: EigenFamily, sampling: Sampling) -> None:
    """Every member alone reproduces the lambda of the whole family."""
    ctx = full_context(complex_12.basis())
    family = estimate_eigenvalues(complex_12.polynomials, ctx, sampling)
    for member in complex_12.polynomials:
        single = estimate_eigenvalues([member], ctx, sampling)
        assert single.lambda_mean == pytest.approx(family.lambda_mean, abs=1e-9)
        assert single.mu_mean == pytest.approx(family.mu_mean, abs=1e-9)
