"""Homogeneous composites of an eigenfamily and rational harmonic morphisms.

A generator is a polynomial in the base members, written as a map from a
multiset of member positions to a coefficient: ``{(0, 0): 1, (0, 1): 2}`` is
``phi_0^2 + 2 phi_0 phi_1``.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ghlab.eigenfamilies import EigenFamily
from ghlab.errors import (
    DegreeMismatchError,
    DependentPairError,
    IndexOutOfRangeError,
    InvalidRangeError,
    NotHomogeneousError,
)
from ghlab.lie_core import ComplexMatrix, sample_group_point
from ghlab.matrix_poly import Jet2, MatrixPolynomial
from ghlab.sampling import Sampling, admissible_points, indexed_map
from ghlab.tension_engine import (
    Jettable,
    OperatorContext,
    conformality_from_jets,
    tension_from_jets,
)

logger = logging.getLogger(__name__)

Generator = Mapping[tuple[int, ...], complex]
ConstantsMode = Literal["claimed", "measured"]


def composite_constants(lam: complex, mu: complex, d: int) -> tuple[complex, complex]:
    """Return ``(d lam + d(d-1) mu, d^2 mu)``."""
    return d * lam + d * (d - 1) * mu, d * d * mu


def monomial_generators(members: int, d: int) -> list[Generator]:
    """All degree-d monomials in the first ``members`` base members."""
    return [{combo: 1} for combo in itertools.combinations_with_replacement(range(members), d)]


def _generator_degree(generator: Generator, members: int) -> int:
    degrees = {len(key) for key in generator}
    if len(degrees) != 1:
        raise NotHomogeneousError(f"generator mixes degrees {sorted(degrees)}")
    for key in generator:
        if any(not 0 <= i < members for i in key):
            raise IndexOutOfRangeError(f"generator refers to member {key} of a {members}-member family")
    return degrees.pop()


def expand_generator(generator: Generator, base: Sequence[MatrixPolynomial]) -> MatrixPolynomial:
    """Substitute the base members into the generator."""
    shape = base[0].shape
    result = MatrixPolynomial(shape, {})
    for key, coefficient in generator.items():
        term = MatrixPolynomial.constant(shape, coefficient)
        for position in key:
            term = term * base[position]
        result = result + term
    return result


def evaluate_generator(generator: Generator, values: Sequence[complex]) -> complex:
    """Evaluate the generator at given base values."""
    return sum(
        (c * np.prod([values[i] for i in key], dtype=np.complex128) for key, c in generator.items()),
        start=0j,
    )


@dataclass(frozen=True)
class CompositeFamily:
    """Degree-d composites of a base family with the derived eigen constants.

    Attributes:
        base: The base eigenfamily.
        degree: Homogeneous degree d in the base members.
        generators: One generator per member.
        members: Expanded polynomials.
        derived_lambda, derived_mu: ``composite_constants`` of the base constants.
        mode: Whether the base constants were the claims or measurements.
    """

    base: EigenFamily
    degree: int
    generators: tuple[Generator, ...]
    members: tuple[MatrixPolynomial, ...]
    derived_lambda: complex
    derived_mu: complex
    mode: ConstantsMode = "claimed"


def build_composites(
    base: EigenFamily,
    d: int,
    generators: Sequence[Generator],
    base_constants: tuple[complex, complex] | None = None,
) -> CompositeFamily:
    """Expand degree-d generators over ``base`` and attach derived constants.

    Args:
        base: Base family.
        d: Degree, at least 1.
        generators: Polynomials in the base members, each homogeneous of degree d.
        base_constants: Measured ``(lambda, mu)`` of the base; the claims when omitted.

    Raises:
        InvalidRangeError: If d < 1 or no generators are given.
        NotHomogeneousError: If a generator is not homogeneous of degree d.
    """
    if d < 1 or not generators:
        raise InvalidRangeError(f"need d >= 1 and at least one generator, got d={d}")
    members = base.polynomials
    for generator in generators:
        if _generator_degree(generator, len(members)) != d:
            raise NotHomogeneousError(f"generator {dict(generator)} is not of degree {d}")
    mode: ConstantsMode = "claimed" if base_constants is None else "measured"
    lam, mu = base_constants or (base.claimed_lambda, base.claimed_mu)
    derived_lambda, derived_mu = composite_constants(lam, mu, d)
    return CompositeFamily(
        base=base,
        degree=d,
        generators=tuple(dict(g) for g in generators),
        members=tuple(expand_generator(g, members) for g in generators),
        derived_lambda=derived_lambda,
        derived_mu=derived_mu,
        mode=mode,
    )


@dataclass(frozen=True)
class RationalMap:
    """Quotient ``P / Q`` of two homogeneous polynomials of equal degree."""

    numerator: MatrixPolynomial
    denominator: MatrixPolynomial

    @property
    def degree(self) -> int:
        return self.numerator.degree()

    def evaluate(self, g: ComplexMatrix) -> complex:
        return self.numerator.evaluate(g) / self.denominator.evaluate(g)

    def jet2(self, g: ComplexMatrix, x: ComplexMatrix) -> Jet2:
        return self.numerator.jet2(g, x) / self.denominator.jet2(g, x)

    def jets(self, g: ComplexMatrix, directions: Sequence[ComplexMatrix]) -> list[Jet2]:
        tops = self.numerator.jets(g, directions)
        bottoms = self.denominator.jets(g, directions)
        return [top / bottom for top, bottom in zip(tops, bottoms, strict=True)]

    def mobius(self, a: complex, b: complex, c: complex, d: complex) -> RationalMap:
        """Return ``(a F + b) / (c F + d)`` as ``(a P + b Q) / (c P + d Q)``.

        Raises:
            InvalidRangeError: If ``ad - bc = 0``.
        """
        if a * d - b * c == 0:
            raise InvalidRangeError("Moebius coefficients must satisfy ad - bc != 0")
        top = self.numerator.scale(a) + self.denominator.scale(b)
        bottom = self.numerator.scale(c) + self.denominator.scale(d)
        return RationalMap(top, bottom)

    def to_dict(self) -> dict[str, object]:
        return {
            "numerator": self.numerator.to_text(),
            "denominator": self.denominator.to_text(),
            "shape": list(self.numerator.shape),
            "degree": self.degree,
        }


def build_rational_morphism(
    base: EigenFamily,
    numerator: MatrixPolynomial,
    denominator: MatrixPolynomial,
    sampling: Sampling | None = None,
    slack: float = 1e-10,
) -> RationalMap:
    """Build ``P / Q`` after checking degrees and numerical independence.

    Independence means the ratio ``P(g) / Q(g)`` is not constant over the
    seeded group points of the base family.

    Raises:
        NotHomogeneousError: If P or Q is not homogeneous.
        DegreeMismatchError: If the degrees differ.
        DependentPairError: If the ratio is constant within ``slack``.
    """
    if not (numerator.homogeneous() and denominator.homogeneous()):
        raise NotHomogeneousError("numerator and denominator must be homogeneous")
    if numerator.degree() != denominator.degree():
        raise DegreeMismatchError(f"degrees differ: {numerator.degree()} vs {denominator.degree()}")
    sampling = sampling or Sampling()
    basis = base.basis()
    points = admissible_points(
        lambda index: sample_group_point(basis, sampling.seed, index),
        lambda g: abs(denominator.evaluate(g)) > sampling.denominator_floor,
        sampling,
        what="independence point",
    )
    ratios = np.array([numerator.evaluate(g) / denominator.evaluate(g) for g in points])
    spread = float(np.max(np.abs(ratios - ratios[0])))
    if spread <= slack * max(1.0, float(np.abs(ratios[0]))):
        raise DependentPairError(f"P / Q is constant ({ratios[0]:.6g}) across {len(points)} samples")
    return RationalMap(numerator, denominator)


@dataclass(frozen=True)
class MorphismReport:
    """Harmonic-morphism residuals ``|tau(F)|`` and ``|kappa(F, F)|`` normalized by ``max(1, |F|^2)``."""

    tau_residual: float
    kappa_residual: float
    samples: int

    def passed(self, tol: float) -> bool:
        return self.tau_residual < tol and self.kappa_residual < tol


def verify_harmonic_morphism(
    candidate: RationalMap | Jettable,
    ctx: OperatorContext,
    sampling: Sampling,
) -> MorphismReport:
    """Measure tension and self-conformality of ``candidate`` at seeded points.

    Quotient jets come from the jets of P and Q by truncated series division.
    Rational candidates are only sampled where ``|Q| > sampling.denominator_floor``.
    """
    if isinstance(candidate, RationalMap):
        denominator = candidate.denominator

        def accept(g: ComplexMatrix) -> bool:
            return abs(denominator.evaluate(g)) > sampling.denominator_floor
    else:

        def accept(g: ComplexMatrix) -> bool:
            return True

    points = admissible_points(
        lambda index: ctx.sample_point(sampling, index), accept, sampling, what="morphism point"
    )

    def residuals(g: ComplexMatrix) -> tuple[float, float]:
        jets = candidate.jets(g, ctx.directions)
        scale = max(1.0, abs(candidate.evaluate(g)) ** 2)
        return abs(tension_from_jets(jets)) / scale, abs(conformality_from_jets(jets, jets)) / scale

    measured = indexed_map(residuals, points, sampling.workers)
    return MorphismReport(
        tau_residual=max(m[0] for m in measured),
        kappa_residual=max(m[1] for m in measured),
        samples=len(points),
    )
