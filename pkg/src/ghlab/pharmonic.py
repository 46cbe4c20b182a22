"""Log-polynomial profiles, the reduced operator L and proper p-harmonic checks.

A profile ``f`` composed with an eigenfunction ``phi`` with constants
``(lambda, mu)`` has tension

    tau(f o phi) = f''(phi) kappa(phi, phi) + f'(phi) tau(phi) = (L f)(phi),
    L f = mu z^2 f'' + lambda z f'.

On the span of ``z^a log^b z`` the operator acts term by term:

    L(z^a log^b) = z^a [ (mu a(a-1) + lambda a) log^b
                         + b (mu (2a-1) + lambda) log^(b-1)
                         + mu b(b-1) log^(b-2) ]

Powers and logarithms use the principal branch, cut along (-inf, 0].
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ghlab.errors import (
    AmbiguousCaseWarning,
    BothZeroError,
    InvalidRangeError,
    LogPowerOverflowError,
)
from ghlab.lie_core import ComplexMatrix, matrix_exp
from ghlab.matrix_poly import Jet2, MatrixPolynomial
from ghlab.sampling import Sampling, admissible_points, indexed_map
from ghlab.tension_engine import OperatorContext, tau_at

logger = logging.getLogger(__name__)

MAX_LOG_POWER = 64
EXPONENT_TOL = 1e-12
SWEEP_TOL = 1e-14
FIRST_STEP = 1e-4
NESTED_STEP = 1e-3
BRANCH_MARGIN = 0.1
MODULUS_RANGE = (1e-3, 1e3)

TermKey = tuple[complex, int]


def _merge_terms(terms: Iterable[tuple[TermKey, complex]], sweep: float = 0.0) -> dict[TermKey, complex]:
    merged: dict[TermKey, complex] = {}
    for (a, b), coefficient in terms:
        a, b = complex(a), int(b)
        if b < 0:
            raise InvalidRangeError(f"log power must be non-negative, got {b}")
        if b > MAX_LOG_POWER:
            raise LogPowerOverflowError(f"log power {b} exceeds {MAX_LOG_POWER}")
        key = next((k for k in merged if k[1] == b and abs(k[0] - a) < EXPONENT_TOL), (a, b))
        merged[key] = merged.get(key, 0j) + complex(coefficient)
    kept = {k: c for k, c in merged.items() if abs(c) > sweep}
    return dict(sorted(kept.items(), key=lambda item: (-item[0][1], item[0][0].real, item[0][0].imag)))


@dataclass(frozen=True)
class LogPolynomial:
    """Finite sum of ``c * z^a * log^b z`` with complex a and integer b >= 0.

    Keys are canonical: exponents within 1e-12 are merged, zero coefficients
    are dropped, and terms are ordered by b descending then a by (re, im).
    """

    terms: Mapping[TermKey, complex] = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    @classmethod
    def from_terms(cls, terms: Mapping[TermKey, complex] | Iterable[tuple[TermKey, complex]]) -> LogPolynomial:
        items = terms.items() if isinstance(terms, Mapping) else terms
        return cls(_merge_terms(items))

    @classmethod
    def monomial(cls, a: complex = 0, b: int = 0, coefficient: complex = 1) -> LogPolynomial:
        return cls.from_terms({(a, b): coefficient})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def max_log_power(self) -> int:
        return max((b for _, b in self.terms), default=-1)

    def __add__(self, other: LogPolynomial) -> LogPolynomial:
        return LogPolynomial(_merge_terms([*self.terms.items(), *other.terms.items()]))

    def __sub__(self, other: LogPolynomial) -> LogPolynomial:
        return self + other.scale(-1)

    def scale(self, factor: complex) -> LogPolynomial:
        return LogPolynomial(_merge_terms((k, c * factor) for k, c in self.terms.items()))

    __mul__ = scale
    __rmul__ = scale

    def evaluate(self, z: complex) -> complex:
        """Evaluate on the principal branch."""
        log_z = cmath.log(z)
        return sum(
            (c * cmath.exp(a * log_z) * log_z**b for (a, b), c in self.terms.items()),
            start=0j,
        )

    def derivative(self) -> LogPolynomial:
        """``d/dz (z^a log^b) = z^(a-1) (a log^b + b log^(b-1))``."""
        out: list[tuple[TermKey, complex]] = []
        for (a, b), c in self.terms.items():
            out.append(((a - 1, b), c * a))
            if b:
                out.append(((a - 1, b - 1), c * b))
        return LogPolynomial(_merge_terms(out))

    def to_text(self) -> str:
        """Render as ``c * z^(a) * log^b(z)`` terms joined by ``+``."""
        if not self.terms:
            return "0"
        return " + ".join(f"{c!r} * z^({a!r}) * log^{b}(z)" for (a, b), c in self.terms.items())

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class EigenSpec:
    """Eigen constants ``(lambda, mu)`` of the inner function, with their provenance."""

    lam: complex
    mu: complex
    source: Literal["claimed", "measured"] = "claimed"

    def __post_init__(self) -> None:
        if self.lam == 0 and self.mu == 0:
            raise BothZeroError("eigen constants (lambda, mu) must not both vanish")

    def flipped(self) -> EigenSpec:
        return EigenSpec(-self.lam, -self.mu, self.source)


def _snap(x: complex, y: complex) -> complex:
    """Return x + y, or exactly 0 when the sum cancels to rounding level."""
    total = x + y
    if abs(total) < EXPONENT_TOL * max(1.0, abs(x) + abs(y)):
        return 0j
    return total


def apply_L(f: LogPolynomial, spec: EigenSpec) -> LogPolynomial:  # noqa: N802
    """Apply ``L = mu z^2 d^2/dz^2 + lambda z d/dz`` term by term."""
    lam, mu = spec.lam, spec.mu
    out: list[tuple[TermKey, complex]] = []
    for (a, b), c in f.terms.items():
        leading = _snap(mu * a * (a - 1), lam * a)
        out.append(((a, b), c * leading))
        if b >= 1:
            out.append(((a, b - 1), c * b * _snap(mu * (2 * a - 1), lam)))
        if b >= 2:
            out.append(((a, b - 2), c * mu * b * (b - 1)))
    return LogPolynomial(_merge_terms(out, sweep=SWEEP_TOL))


PhiCase = Literal["mu-zero", "lambda-equals-mu", "generic"]


def classify_case(spec: EigenSpec) -> PhiCase:
    """Select the profile case; near-equal constants are treated as equal."""
    if abs(spec.mu) < EXPONENT_TOL:
        return "mu-zero"
    if abs(spec.lam - spec.mu) < EXPONENT_TOL:
        if spec.lam != spec.mu:
            logger.warning("lambda and mu agree within tolerance", extra={"lambda": spec.lam, "mu": spec.mu})
            warnings.warn(
                f"lambda={spec.lam} and mu={spec.mu} treated as equal", AmbiguousCaseWarning, stacklevel=3
            )
        return "lambda-equals-mu"
    return "generic"


def build_phi_p(p: int, spec: EigenSpec, c1: complex = 1, c2: complex = 1) -> LogPolynomial:
    """Return the proper p-harmonic profile for ``spec``.

    * mu = 0:           ``c1 log^(p-1)``
    * lambda = mu:      ``c1 log^(2p-1) + c2 log^(2p-2)``
    * otherwise:        ``c1 z^(1 - lambda/mu) log^(p-1) + c2 log^(p-1)``

    Raises:
        InvalidRangeError: If p < 1.
        BothZeroError: If lambda = mu = 0.
    """
    if p < 1:
        raise InvalidRangeError(f"p must be at least 1, got {p}")
    if spec.lam == 0 and spec.mu == 0:
        raise BothZeroError("eigen constants (lambda, mu) must not both vanish")
    case = classify_case(spec)
    if case == "mu-zero":
        return LogPolynomial.monomial(0, p - 1, c1)
    if case == "lambda-equals-mu":
        return LogPolynomial.from_terms([((0, 2 * p - 1), c1), ((0, 2 * p - 2), c2)])
    exponent = 1 - spec.lam / spec.mu
    return LogPolynomial.from_terms([((exponent, p - 1), c1), ((0, p - 1), c2)])


@dataclass(frozen=True)
class PHarmonicVerdict:
    """Outcome of iterating L.

    Attributes:
        p: Order tested.
        chain: ``f, L f, ..., L^p f``.
        passed: ``L^p f = 0`` and ``L^(p-1) f != 0``.
    """

    p: int
    chain: tuple[LogPolynomial, ...]
    passed: bool

    @property
    def vanishing_step(self) -> int | None:
        """First k with ``L^k f = 0`` within the chain."""
        return next((k for k, g in enumerate(self.chain) if g.is_zero), None)


def verify_proper_pharmonic(f: LogPolynomial, p: int, spec: EigenSpec) -> PHarmonicVerdict:
    """Check that ``f`` is proper p-harmonic for ``spec`` by exact iteration."""
    if p < 1:
        raise InvalidRangeError(f"p must be at least 1, got {p}")
    chain = [f]
    for _ in range(p):
        chain.append(apply_L(chain[-1], spec))
    passed = chain[p].is_zero and not chain[p - 1].is_zero
    return PHarmonicVerdict(p, tuple(chain), passed)


@dataclass(frozen=True, eq=False)
class ComposedFunction:
    """``g -> f(phi(g))`` for a log-polynomial profile and a matrix polynomial."""

    profile: LogPolynomial
    inner: MatrixPolynomial

    def evaluate(self, g: ComplexMatrix) -> complex:
        return self.profile.evaluate(self.inner.evaluate(g))

    def jets(self, g: ComplexMatrix, directions: Sequence[ComplexMatrix]) -> list[Jet2]:
        inner_jets = self.inner.jets(g, directions)
        w = self.inner.evaluate(g)
        first = self.profile.derivative()
        f0, f1, f2 = self.profile.evaluate(w), first.evaluate(w), first.derivative().evaluate(w)
        return [jet.compose(f0, f1, f2) for jet in inner_jets]


def _second_difference(
    function: Callable[[ComplexMatrix], complex],
    g: ComplexMatrix,
    directions: Sequence[ComplexMatrix],
    h: float,
) -> complex:
    centre = function(g)
    total = 0j
    for x in directions:
        step = matrix_exp(h * x)
        back = matrix_exp(-h * x)
        total += (function(g @ step) - 2 * centre + function(g @ back)) / (h * h)
    return total


@dataclass(frozen=True)
class CrosscheckReport:
    """Finite-difference tension of ``f o phi`` against ``(L f)(phi)``.

    Attributes:
        max_deviation: Max of ``|numeric - symbolic| / max(1, |symbolic|)``.
        iterated_max: Max ``|tau^2 (f o phi)|`` by an outer difference of the exact tension.
        iterated_deviation: Max deviation of that value from ``(L^2 f)(phi)``.
        samples: Accepted sample points.
        steps: Difference steps used (first level, nested).
    """

    max_deviation: float
    iterated_max: float
    iterated_deviation: float
    samples: int
    steps: tuple[float, float] = (FIRST_STEP, NESTED_STEP)


def _branch_safe(w: complex, floor: float = MODULUS_RANGE[0]) -> bool:
    modulus = abs(w)
    return floor <= modulus <= MODULUS_RANGE[1] and abs(cmath.phase(w)) < math.pi - BRANCH_MARGIN


def numeric_crosscheck(
    f: LogPolynomial,
    phi: MatrixPolynomial,
    ctx: OperatorContext,
    sampling: Sampling,
    spec: EigenSpec,
    nested: bool = True,
    modulus_floor: float = MODULUS_RANGE[0],
) -> CrosscheckReport:
    """Compare a finite-difference tension of ``f o phi`` with ``(L f)(phi)``.

    Samples keep ``phi(g)`` away from the branch cut and inside
    ``[modulus_floor, 1e3]`` in modulus. The iterated tension is an outer central
    difference (step 1e-3) of the exact jet tension.
    """
    composed = ComposedFunction(f, phi)
    once = apply_L(f, spec)
    twice = apply_L(once, spec)
    points = admissible_points(
        lambda index: ctx.sample_point(sampling, index),
        lambda g: _branch_safe(phi.evaluate(g), modulus_floor),
        sampling,
        what="branch-safe point",
    )

    def exact_tension(g: ComplexMatrix) -> complex:
        return tau_at(composed, g, ctx)

    def measure(g: ComplexMatrix) -> tuple[float, float, float]:
        w = phi.evaluate(g)
        symbolic = once.evaluate(w)
        numeric = _second_difference(composed.evaluate, g, ctx.directions, FIRST_STEP)
        deviation = abs(numeric - symbolic) / max(1.0, abs(symbolic))
        if not nested:
            return deviation, 0.0, 0.0
        iterated = _second_difference(exact_tension, g, ctx.directions, NESTED_STEP)
        expected = twice.evaluate(w)
        return deviation, abs(iterated), abs(iterated - expected) / max(1.0, abs(expected))

    measured = indexed_map(measure, points, sampling.workers)
    report = CrosscheckReport(
        max_deviation=float(np.max([m[0] for m in measured])),
        iterated_max=float(np.max([m[1] for m in measured])),
        iterated_deviation=float(np.max([m[2] for m in measured])),
        samples=len(points),
    )
    logger.debug("Numeric cross-check", extra={"context": ctx.label, "deviation": report.max_deviation})
    return report
