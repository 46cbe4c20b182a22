"""Tension field and conformality operator as basis sums of exact jets.

For left-invariant fields on a compact group with a bi-invariant metric the
covariant term ``nabla_Z Z`` vanishes, so

    tau(f)      = sum_Z Z^2 f       = sum_Z 2 * d2(f, g, Z)
    kappa(f, h) = sum_Z Z(f) Z(h)   = sum_Z d1(f, g, Z) * d1(h, g, Z)

The same sums over horizontal, isotropy or dual directions give the
corresponding partial operators.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal, Protocol

import numpy as np

from ghlab.errors import InvalidRangeError, NotInvariantError
from ghlab.lie_core import (
    ComplexMatrix,
    LieAlgebraBasis,
    SymmetricPair,
    sample_dual_point,
    sample_group_point,
)
from ghlab.matrix_poly import Jet2, MatrixPolynomial
from ghlab.sampling import Sampling, admissible_points, indexed_map

logger = logging.getLogger(__name__)

ContextLabel = Literal["full", "horizontal", "flag-horizontal", "isotropy", "dual"]


class Jettable(Protocol):
    """Anything with a value and exact order-2 jets at matrix arguments."""

    def evaluate(self, g: ComplexMatrix) -> complex: ...

    def jets(self, g: ComplexMatrix, directions: Sequence[ComplexMatrix]) -> list[Jet2]: ...


@dataclass(frozen=True, eq=False)
class OperatorContext:
    """Directions summed over, plus where sample points come from.

    Attributes:
        directions: Orthonormal directions (``i * m`` for the dual context).
        label: Which operator the sums realize.
        ambient: Basis used to draw compact group points.
        pair: Isotropy split; required for dual points.
    """

    directions: tuple[ComplexMatrix, ...]
    label: ContextLabel
    ambient: LieAlgebraBasis
    pair: SymmetricPair | None = None

    @property
    def dim(self) -> int:
        return len(self.directions)

    def sample_point(self, sampling: Sampling, index: int) -> ComplexMatrix:
        if self.label == "dual":
            assert self.pair is not None
            return sample_dual_point(self.pair, sampling.seed, index, sampling.dual_radius)
        return sample_group_point(self.ambient, sampling.seed, index)


def full_context(basis: LieAlgebraBasis) -> OperatorContext:
    return OperatorContext(basis.elements, "full", basis)


def horizontal_context(pair: SymmetricPair, unimodular: bool = False) -> OperatorContext:
    """Directions of m, extended by the block centres when the isotropy is unimodular."""
    directions = pair.m_basis + (pair.centre_basis() if unimodular else ())
    label: ContextLabel = "horizontal" if pair.is_symmetric else "flag-horizontal"
    return OperatorContext(directions, label, pair.ambient, pair)


def isotropy_context(pair: SymmetricPair, unimodular: bool = False) -> OperatorContext:
    directions = pair.unimodular_k_basis() if unimodular else pair.k_basis
    return OperatorContext(tuple(directions), "isotropy", pair.ambient, pair)


def dual_context(pair: SymmetricPair) -> OperatorContext:
    """Directions ``i * M`` for M in m, sampled at dual points."""
    directions = tuple(1j * m for m in pair.m_basis)
    return OperatorContext(directions, "dual", pair.ambient, pair)


def tension_from_jets(jets: Sequence[Jet2]) -> complex:
    return sum((2 * jet.d2 for jet in jets), start=0j)


def conformality_from_jets(left: Sequence[Jet2], right: Sequence[Jet2]) -> complex:
    return sum((a.d1 * b.d1 for a, b in zip(left, right, strict=True)), start=0j)


def tau_at(f: Jettable, g: ComplexMatrix, ctx: OperatorContext) -> complex:
    """Return ``sum_X 2 d2(f, g, X)`` over the context directions."""
    return tension_from_jets(f.jets(g, ctx.directions))


def kappa_at(f: Jettable, h: Jettable, g: ComplexMatrix, ctx: OperatorContext) -> complex:
    """Return ``sum_X d1(f, g, X) d1(h, g, X)`` over the context directions."""
    return conformality_from_jets(f.jets(g, ctx.directions), h.jets(g, ctx.directions))


@dataclass(frozen=True)
class EigenEstimate:
    """Pointwise-ratio estimate of the eigen constants.

    Attributes:
        lambda_mean: Mean of ``tau(f) / f``.
        lambda_max_dev: Max deviation of a ratio from ``lambda_mean``.
        mu_mean: Mean of ``kappa(f, h) / (f h)`` over all pairs including f = h.
        mu_max_dev: Max deviation of a ratio from ``mu_mean``.
        samples: Accepted sample points.
    """

    lambda_mean: complex
    lambda_max_dev: float
    mu_mean: complex
    mu_max_dev: float
    samples: int

    def is_eigen(self, tol: float) -> bool:
        return self.lambda_max_dev < tol and self.mu_max_dev < tol

    def matches(self, lam: complex, mu: complex, tol: float) -> bool:
        return abs(self.lambda_mean - lam) < tol and abs(self.mu_mean - mu) < tol


def _pointwise_ratios(
    family: Sequence[Jettable], g: ComplexMatrix, ctx: OperatorContext
) -> tuple[list[complex], list[complex]]:
    values = [f.evaluate(g) for f in family]
    jets = [f.jets(g, ctx.directions) for f in family]
    lam = [tension_from_jets(j) / v for j, v in zip(jets, values, strict=True)]
    mu = [
        conformality_from_jets(jets[a], jets[b]) / (values[a] * values[b])
        for a in range(len(family))
        for b in range(a, len(family))
    ]
    return lam, mu


def _mean_and_spread(ratios: Sequence[complex]) -> tuple[complex, float]:
    arr = np.asarray(ratios, dtype=np.complex128)
    mean = complex(arr.mean())
    return mean, float(np.max(np.abs(arr - mean)))


def estimate_eigenvalues(
    family: Sequence[Jettable],
    ctx: OperatorContext,
    sampling: Sampling,
) -> EigenEstimate:
    """Estimate ``(lambda, mu)`` from pointwise ratios at seeded points.

    Points where some member has modulus at most ``sampling.value_floor`` are
    skipped.

    Raises:
        InvalidRangeError: If the family is empty or has a constant member.
        DegenerateSampleError: If the resampling budget runs out.
    """
    members = list(family)
    if not members:
        raise InvalidRangeError("cannot estimate eigen constants of an empty family")
    if any(isinstance(f, MatrixPolynomial) and f.degree() == 0 for f in members):
        raise InvalidRangeError("constant functions have no pointwise eigen ratio")

    points = admissible_points(
        lambda index: ctx.sample_point(sampling, index),
        lambda g: all(abs(f.evaluate(g)) > sampling.value_floor for f in members),
        sampling,
        what=f"{ctx.label} point",
    )
    per_point = indexed_map(lambda g: _pointwise_ratios(members, g, ctx), points, sampling.workers)
    lam_ratios = [r for lam, _ in per_point for r in lam]
    mu_ratios = [r for _, mu in per_point for r in mu]
    lambda_mean, lambda_dev = _mean_and_spread(lam_ratios)
    mu_mean, mu_dev = _mean_and_spread(mu_ratios)
    logger.debug(
        "Estimated eigen constants",
        extra={"context": ctx.label, "members": len(members), "lambda": lambda_mean, "mu": mu_mean},
    )
    return EigenEstimate(lambda_mean, lambda_dev, mu_mean, mu_dev, len(points))


@dataclass(frozen=True)
class QuotientComparison:
    """Full versus horizontal tension of a function on a quotient.

    Values are normalized by ``max(1, |f(g)|)`` before taking maxima.

    Attributes:
        label: Context label of the horizontal side.
        unimodular: Whether the isotropy was the determinant-one subgroup.
        max_gap: Max of ``|tau_full - tau_horizontal|``.
        isotropy_residual: Max of ``|d1(f, g, K)|`` over isotropy directions.
        gap_ratio: Mean of ``(tau_full - tau_horizontal) / f`` where f is not small.
        invariant: Whether ``isotropy_residual`` is within tolerance.
        samples: Accepted sample points.
    """

    label: ContextLabel
    unimodular: bool
    max_gap: float
    isotropy_residual: float
    gap_ratio: complex
    invariant: bool
    samples: int

    def require_invariant(self) -> None:
        """Raise when the function does not descend to the quotient."""
        if not self.invariant:
            raise NotInvariantError(
                f"isotropy derivative residual {self.isotropy_residual:.3e} exceeds tolerance"
            )


def compare_full_vs_horizontal(
    f: Jettable,
    pair: SymmetricPair,
    sampling: Sampling,
    tol: float = 1e-9,
    unimodular: bool = False,
    accept: Callable[[ComplexMatrix], bool] | None = None,
) -> QuotientComparison:
    """Compare the group tension with the horizontal tension over ``pair``.

    With ``unimodular`` the isotropy is the trace-free part of k and the block
    centres join the horizontal directions. A non-invariant function yields a
    report with ``invariant=False``; call :meth:`QuotientComparison.require_invariant`
    to escalate.
    """
    full = full_context(pair.ambient)
    horizontal = horizontal_context(pair, unimodular)
    isotropy = isotropy_context(pair, unimodular)

    points = admissible_points(
        lambda index: sample_group_point(pair.ambient, sampling.seed, index),
        accept or (lambda g: True),
        sampling,
        what="quotient point",
    )

    def measure(g: ComplexMatrix) -> tuple[float, float, complex | None]:
        value = f.evaluate(g)
        scale = max(1.0, abs(value))
        gap = tau_at(f, g, full) - tau_at(f, g, horizontal)
        residual = max((abs(j.d1) for j in f.jets(g, isotropy.directions)), default=0.0)
        ratio = gap / value if abs(value) > sampling.value_floor else None
        return abs(gap) / scale, residual / scale, ratio

    measured = indexed_map(measure, points, sampling.workers)
    ratios = [r for _, _, r in measured if r is not None]
    comparison = QuotientComparison(
        label=horizontal.label,
        unimodular=unimodular,
        max_gap=max(m[0] for m in measured),
        isotropy_residual=max(m[1] for m in measured),
        gap_ratio=complex(np.mean(ratios)) if ratios else 0j,
        invariant=max(m[1] for m in measured) < tol,
        samples=len(points),
    )
    if not comparison.invariant:
        logger.info(
            "Function does not descend",
            extra={"blocks": pair.block_sizes, "unimodular": unimodular, "residual": comparison.isotropy_residual},
        )
    return comparison
