"""Minor eigenfamilies on U(p+q) and Sp(p+q) and subgroup invariance probes.

Complex members fix columns 1..p and take rows from an index tuple; quaternionic
members fix rows 1..p and take columns from an index tuple over 1..2(p+q).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ghlab.errors import InvalidRangeError
from ghlab.lie_core import (
    ComplexMatrix,
    GroupKind,
    LieAlgebraBasis,
    SymmetricPair,
    build_basis,
    combination,
    matrix_exp,
    sample_group_point,
    seeded_rng,
)
from ghlab.matrix_poly import MatrixPolynomial, minor
from ghlab.sampling import Sampling, indexed_map

logger = logging.getLogger(__name__)

FamilyKind = Literal["complex-grassmannian", "quaternionic-grassmannian"]


@dataclass(frozen=True, order=True)
class PermutationIndex:
    """Strictly increasing index tuple ``r_1 < ... < r_p`` within ``1..upper_bound``."""

    indices: tuple[int, ...]
    upper_bound: int

    def __post_init__(self) -> None:
        if not self.indices:
            raise InvalidRangeError("index tuple must not be empty")
        if self.indices[0] < 1 or self.indices[-1] > self.upper_bound:
            raise InvalidRangeError(f"indices {self.indices} outside 1..{self.upper_bound}")
        if any(b <= a for a, b in itertools.pairwise(self.indices)):
            raise InvalidRangeError(f"indices {self.indices} are not strictly increasing")

    @property
    def label(self) -> str:
        return "(" + ",".join(str(i) for i in self.indices) + ")"


def _check_pq(p: int, q: int) -> None:
    if not 1 <= p <= q:
        raise InvalidRangeError(f"need 1 <= p <= q, got p={p}, q={q}")


def enumerate_pi(p: int, q: int, bound: int) -> list[PermutationIndex]:
    """All strictly increasing p-tuples in ``1..bound`` in lexicographic order.

    Raises:
        InvalidRangeError: Unless 1 <= p <= q and bound is p+q or 2(p+q).
    """
    _check_pq(p, q)
    if bound not in (p + q, 2 * (p + q)):
        raise InvalidRangeError(f"bound must be {p + q} or {2 * (p + q)}, got {bound}")
    return [PermutationIndex(c, bound) for c in itertools.combinations(range(1, bound + 1), p)]


@dataclass(frozen=True)
class EigenFamily:
    """A family of minors with the constants claimed for it.

    Attributes:
        kind: Complex or quaternionic Grassmannian family.
        p, q: Block sizes.
        members: Minor per index tuple, in lexicographic order.
        claimed_lambda, claimed_mu: Constants asserted for the family.
        predicted_lambda, predicted_mu: Constants predicted by the coefficient
            lemma of the same group; equal to the claims for the complex family.
    """

    kind: FamilyKind
    p: int
    q: int
    members: dict[PermutationIndex, MatrixPolynomial] = field(hash=False)
    claimed_lambda: complex
    claimed_mu: complex
    predicted_lambda: complex
    predicted_mu: complex

    @property
    def group_kind(self) -> GroupKind:
        return "unitary" if self.kind == "complex-grassmannian" else "quaternionic-unitary"

    @property
    def n(self) -> int:
        return self.p + self.q

    def basis(self) -> LieAlgebraBasis:
        return build_basis(self.group_kind, self.n)

    @property
    def polynomials(self) -> list[MatrixPolynomial]:
        return list(self.members.values())

    @property
    def labels(self) -> list[str]:
        return [index.label for index in self.members]

    def member(self, indices: tuple[int, ...]) -> MatrixPolynomial:
        for index, polynomial in self.members.items():
            if index.indices == tuple(indices):
                return polynomial
        raise KeyError(indices)


def complex_family(p: int, q: int) -> EigenFamily:
    """Minors of U(p+q) with rows from an index tuple and columns 1..p."""
    _check_pq(p, q)
    n = p + q
    columns = tuple(range(1, p + 1))
    members = {index: minor((n, n), index.indices, columns) for index in enumerate_pi(p, q, n)}
    lam, mu = -p * (q + 1), -p
    return EigenFamily("complex-grassmannian", p, q, members, lam, mu, lam, mu)


def quaternionic_family(p: int, q: int) -> EigenFamily:
    """Minors of Sp(p+q) with rows 1..p and columns from an index tuple over 1..2(p+q).

    The claimed constants are ``(-2pq, -p)``. The constants predicted by the
    coefficient lemma (Casimir ``-(2n+1)/2``, pairing ``-1/2``) are
    ``(-p(p+2q+2)/2, -p/2)``; the two agree in lambda only when p = 2q - 2.
    """
    _check_pq(p, q)
    n = p + q
    rows = tuple(range(1, p + 1))
    members = {index: minor((2 * n, 2 * n), rows, index.indices) for index in enumerate_pi(p, q, 2 * n)}
    return EigenFamily(
        "quaternionic-grassmannian",
        p,
        q,
        members,
        claimed_lambda=-2 * p * q,
        claimed_mu=-p,
        predicted_lambda=-p * (p + 2 * q + 2) / 2,
        predicted_mu=-p / 2,
    )


def build_family(group_kind: GroupKind, p: int, q: int) -> EigenFamily:
    if group_kind == "unitary":
        return complex_family(p, q)
    return quaternionic_family(p, q)


PROBES = (
    "left",
    "right",
    "left_modulus",
    "right_modulus",
    "left_unimodular",
    "right_unimodular",
    "left_unimodular_modulus",
    "right_unimodular_modulus",
)


@dataclass(frozen=True)
class InvarianceReport:
    """Max residuals of candidate invariances of f under the isotropy subgroup.

    Attributes:
        residuals: Residual per probe name in :data:`PROBES`.
        invariances: Probes whose residual is within tolerance.
        samples: Number of (k, g) pairs probed.
    """

    residuals: dict[str, float] = field(hash=False)
    invariances: tuple[str, ...]
    samples: int

    def holds(self, probe: str) -> bool:
        return probe in self.invariances


RIGHT_CHARACTER_PROBES = ("right_modulus", "right_unimodular", "right_unimodular_modulus")


def expected_invariances(family: EigenFamily, pair: SymmetricPair) -> tuple[str, ...] | None:
    """Invariances forced on the complex minors by the right determinant character.

    When columns 1..p are a union of leading blocks, ``f(g k) = det(k_p) f(g)``
    with ``|det(k_p)| = 1`` and ``det(k_p) = 1`` on K_0. Returns None when no
    invariance is predicted (quaternionic families, misaligned blocks).
    """
    if family.kind != "complex-grassmannian" or pair.ambient.n != family.n:
        return None
    if family.p not in itertools.accumulate(pair.block_sizes):
        return None
    return RIGHT_CHARACTER_PROBES


def _subgroup_element(
    directions: tuple[ComplexMatrix, ...], size: int, seed: int, index: int, scale: float
) -> ComplexMatrix:
    coefficients = seeded_rng(seed, index, stream=2).uniform(-1.0, 1.0, size=len(directions))
    return matrix_exp(scale * combination(directions, coefficients, size))


def invariance_probe(
    f: MatrixPolynomial,
    pair: SymmetricPair,
    sampling: Sampling,
    tol: float = 1e-10,
    subgroup_scale: float = 1.0,
) -> InvarianceReport:
    """Probe left/right invariance of ``f``, exactly and in modulus, under K and K_0.

    K is generated by ``pair.k_basis``; K_0 by its trace-free part. With
    ``subgroup_scale = 0`` the subgroup element is the identity.
    """
    size = pair.ambient.matrix_size
    k_full = pair.k_basis
    k_unimodular = pair.unimodular_k_basis()

    def probe(index: int) -> dict[str, float]:
        g = sample_group_point(pair.ambient, sampling.seed, index)
        base = f.evaluate(g)
        out: dict[str, float] = {}
        for suffix, directions in (("", k_full), ("_unimodular", k_unimodular)):
            k = _subgroup_element(directions, size, sampling.seed, index, subgroup_scale)
            for side, moved in (("left", f.evaluate(k @ g)), ("right", f.evaluate(g @ k))):
                out[f"{side}{suffix}"] = abs(moved - base)
                out[f"{side}{suffix}_modulus"] = abs(abs(moved) - abs(base))
        return out

    per_sample = indexed_map(probe, range(sampling.samples), sampling.workers)
    residuals = {name: float(np.max([s[name] for s in per_sample])) for name in PROBES}
    invariances = tuple(name for name in PROBES if residuals[name] < tol)
    logger.debug("Invariance probe", extra={"blocks": pair.block_sizes, "invariances": invariances})
    return InvarianceReport(residuals, invariances, sampling.samples)
