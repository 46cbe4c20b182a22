"""Compact / non-compact duality at dual points ``exp(k) exp(i m)``.

A polynomial eigenfunction extends verbatim to the complexified group. At
dual points, summing over the directions ``i M`` flips the sign of both eigen
constants measured over ``M``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from ghlab.lie_core import ComplexMatrix, SymmetricPair
from ghlab.matrix_poly import MatrixPolynomial
from ghlab.pharmonic import (
    CrosscheckReport,
    EigenSpec,
    PHarmonicVerdict,
    build_phi_p,
    numeric_crosscheck,
    verify_proper_pharmonic,
)
from ghlab.sampling import Sampling, admissible_points, indexed_map
from ghlab.tension_engine import (
    EigenEstimate,
    OperatorContext,
    dual_context,
    estimate_eigenvalues,
    horizontal_context,
    isotropy_context,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DualContext:
    """Dual directions of a pair together with the compact-side constants.

    Attributes:
        pair: The isotropy split.
        operator: Context with directions ``i * M`` sampled at dual points.
        compact_spec: Constants measured (or claimed) over m on the compact side.
    """

    pair: SymmetricPair
    operator: OperatorContext
    compact_spec: EigenSpec

    @property
    def dual_directions(self) -> tuple[ComplexMatrix, ...]:
        return self.operator.directions


def build_dual_context(pair: SymmetricPair, compact_spec: EigenSpec) -> DualContext:
    return DualContext(pair, dual_context(pair), compact_spec)


def measured_dual_context(f: MatrixPolynomial, pair: SymmetricPair, sampling: Sampling) -> DualContext:
    """Measure ``f`` over m on the compact side and wrap the result as the compact spec."""
    estimate = estimate_eigenvalues([f], horizontal_context(pair), sampling)
    spec = EigenSpec(estimate.lambda_mean, estimate.mu_mean, source="measured")
    return build_dual_context(pair, spec)


@dataclass(frozen=True)
class DualEstimate:
    """Dual-side eigen estimate against the sign-flipped compact constants.

    Attributes:
        estimate: Ratios at dual points over ``i m``.
        expected_lambda, expected_mu: ``-compact_spec``.
        deviation: Max of the two mean deviations from the expectation.
    """

    estimate: EigenEstimate
    expected_lambda: complex
    expected_mu: complex
    deviation: float

    def passed(self, tol: float) -> bool:
        return self.deviation < tol and self.estimate.is_eigen(tol)


def dual_estimate(
    family: MatrixPolynomial | list[MatrixPolynomial], dual: DualContext, sampling: Sampling
) -> DualEstimate:
    """Estimate ``(lambda*, mu*)`` at dual points and compare with ``-compact_spec``."""
    members = [family] if isinstance(family, MatrixPolynomial) else family
    estimate = estimate_eigenvalues(members, dual.operator, sampling)
    flipped = dual.compact_spec.flipped()
    deviation = max(abs(estimate.lambda_mean - flipped.lam), abs(estimate.mu_mean - flipped.mu))
    logger.debug(
        "Dual estimate",
        extra={"blocks": dual.pair.block_sizes, "lambda": estimate.lambda_mean, "mu": estimate.mu_mean},
    )
    return DualEstimate(estimate, flipped.lam, flipped.mu, deviation)


def radius_independence(
    family: list[MatrixPolynomial],
    dual: DualContext,
    sampling: Sampling,
    radii: tuple[float, float] = (0.25, 0.5),
) -> float:
    """Max difference of the dual constants measured at two dual radii."""
    first, second = (
        estimate_eigenvalues(family, dual.operator, replace(sampling, dual_radius=r)) for r in radii
    )
    return max(abs(first.lambda_mean - second.lambda_mean), abs(first.mu_mean - second.mu_mean))


def dual_isotropy_residual(
    f: MatrixPolynomial, pair: SymmetricPair, sampling: Sampling, unimodular: bool = False
) -> float:
    """Max ``|d1(f, z, K)| / max(1, |f(z)|)`` over dual points and isotropy directions."""
    operator = dual_context(pair)
    isotropy = isotropy_context(pair, unimodular)
    points = admissible_points(
        lambda index: operator.sample_point(sampling, index), lambda z: True, sampling, what="dual point"
    )

    def residual(z: ComplexMatrix) -> float:
        scale = max(1.0, abs(f.evaluate(z)))
        return max((abs(j.d1) for j in f.jets(z, isotropy.directions)), default=0.0) / scale

    return max(indexed_map(residual, points, sampling.workers))


@dataclass(frozen=True)
class DualPHarmonicVerdict:
    """Symbolic and numeric legs of a dual p-harmonic check.

    Attributes:
        spec: The flipped constants the profile was built from.
        symbolic: Exact L-chain verdict.
        numeric: Finite-difference cross-check at dual points.
        passed: Symbolic PASS and numeric deviation within tolerance.
    """

    spec: EigenSpec
    symbolic: PHarmonicVerdict
    numeric: CrosscheckReport
    passed: bool


def dual_pharmonic_verify(
    p: int,
    dual: DualContext,
    phi: MatrixPolynomial,
    sampling: Sampling,
    tol: float = 1e-4,
    spec: EigenSpec | None = None,
    modulus_floor: float = 1e-3,
) -> DualPHarmonicVerdict:
    """Build the profile from the flipped compact constants and verify it on the dual side.

    ``spec`` overrides the flipped constants; passing the unflipped compact
    constants gives the negative control.
    """
    flipped = spec or dual.compact_spec.flipped()
    profile = build_phi_p(p, flipped)
    symbolic = verify_proper_pharmonic(profile, p, flipped)
    numeric = numeric_crosscheck(
        profile, phi, dual.operator, sampling, flipped, nested=False, modulus_floor=modulus_floor
    )
    passed = symbolic.passed and numeric.max_deviation < tol
    return DualPHarmonicVerdict(flipped, symbolic, numeric, passed)
