"""Sparse polynomials in the entries of a matrix argument and their exact order-2 jets.

A monomial is a sorted tuple of 1-based entry indices ``(j, a)``; repeated
entries encode powers, so ``z[1,1]^2 * z[2,2]`` is ``((1, 1), (1, 1), (2, 2))``.
Polynomials are holomorphic in the entries: no conjugated entries occur.

Jets are the t^0, t^1, t^2 coefficients of ``f(g (I + tX + t^2 X^2 / 2))``.
They agree with the Taylor coefficients of ``f(g exp(tX))`` up to order two,
so ``2 * d2`` is the second derivative along the one-parameter subgroup.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from math import prod

import numpy as np

from ghlab.errors import DuplicateIndexError, IndexOutOfRangeError, ShapeMismatchError
from ghlab.lie_core import ComplexMatrix

logger = logging.getLogger(__name__)

Shape = tuple[int, int]
Entry = tuple[int, int]
Monomial = tuple[Entry, ...]


@dataclass(frozen=True)
class Jet2:
    """Truncated power series ``value + d1 t + d2 t^2``.

    Supports the ring operations and division, truncated at order two, so that
    jets of products, quotients and compositions are exact.
    """

    value: complex
    d1: complex = 0j
    d2: complex = 0j

    @classmethod
    def constant(cls, value: complex) -> Jet2:
        return cls(complex(value), 0j, 0j)

    @property
    def second_derivative(self) -> complex:
        return 2 * self.d2

    def __add__(self, other: Jet2 | complex) -> Jet2:
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.d1, self.d2)
        return Jet2(self.value + other.value, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __neg__(self) -> Jet2:
        return Jet2(-self.value, -self.d1, -self.d2)

    def __sub__(self, other: Jet2 | complex) -> Jet2:
        return self + (-other)

    def __rsub__(self, other: complex) -> Jet2:
        return (-self) + other

    def __mul__(self, other: Jet2 | complex) -> Jet2:
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.d1 * other, self.d2 * other)
        return Jet2(
            self.value * other.value,
            self.value * other.d1 + self.d1 * other.value,
            self.value * other.d2 + self.d1 * other.d1 + self.d2 * other.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Jet2 | complex) -> Jet2:
        if not isinstance(other, Jet2):
            return Jet2(self.value / other, self.d1 / other, self.d2 / other)
        # Solve (self / other) * other = self order by order.
        f0 = self.value / other.value
        f1 = (self.d1 - f0 * other.d1) / other.value
        f2 = (self.d2 - f1 * other.d1 - f0 * other.d2) / other.value
        return Jet2(f0, f1, f2)

    def __rtruediv__(self, other: complex) -> Jet2:
        return Jet2.constant(other) / self

    def compose(self, f0: complex, f1: complex, f2: complex) -> Jet2:
        """Jet of ``F(self)`` from ``F, F', F''`` evaluated at ``self.value``."""
        return Jet2(f0, f1 * self.d1, f1 * self.d2 + 0.5 * f2 * self.d1 * self.d1)


def _check_entry(shape: Shape, entry: Entry) -> Entry:
    j, a = int(entry[0]), int(entry[1])
    if not (1 <= j <= shape[0] and 1 <= a <= shape[1]):
        raise IndexOutOfRangeError(f"entry ({j}, {a}) outside shape {shape}")
    return (j, a)


def _canonical(shape: Shape, terms: Iterable[tuple[Iterable[Entry], complex]]) -> dict[Monomial, complex]:
    merged: dict[Monomial, complex] = {}
    for monomial, coefficient in terms:
        key = tuple(sorted(_check_entry(shape, e) for e in monomial))
        merged[key] = merged.get(key, 0j) + complex(coefficient)
    return {k: merged[k] for k in sorted(merged, key=lambda m: (len(m), m)) if merged[k] != 0}


@dataclass(frozen=True)
class MatrixPolynomial:
    """Sparse polynomial in the entries of a ``rows x cols`` matrix.

    Attributes:
        shape: ``(rows, cols)`` of the matrix argument.
        terms: Canonical map from monomial to non-zero coefficient.
    """

    shape: Shape
    terms: Mapping[Monomial, complex] = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self.terms.items())))

    @classmethod
    def from_terms(cls, shape: Shape, terms: Mapping[Monomial, complex] | Iterable[tuple[Monomial, complex]]) -> MatrixPolynomial:
        """Build a polynomial, merging repeated monomials and dropping zeros."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        shape = (int(shape[0]), int(shape[1]))
        return cls(shape, _canonical(shape, items))

    @classmethod
    def constant(cls, shape: Shape, value: complex) -> MatrixPolynomial:
        return cls.from_terms(shape, {(): value})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Largest monomial size; 0 for constants and the zero polynomial."""
        return max((len(m) for m in self.terms), default=0)

    def homogeneous(self) -> bool:
        return len({len(m) for m in self.terms}) <= 1

    def _require_shape(self, other: MatrixPolynomial) -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"polynomial shapes differ: {self.shape} vs {other.shape}")

    def _require_matrix(self, g: ComplexMatrix) -> None:
        if tuple(np.shape(g)) != self.shape:
            raise ShapeMismatchError(f"matrix of shape {np.shape(g)} for polynomial of shape {self.shape}")

    # ── ring operations ──────────────────────────────────────────────────────

    def __add__(self, other: MatrixPolynomial | complex) -> MatrixPolynomial:
        if not isinstance(other, MatrixPolynomial):
            other = MatrixPolynomial.constant(self.shape, other)
        self._require_shape(other)
        return MatrixPolynomial.from_terms(self.shape, [*self.terms.items(), *other.terms.items()])

    __radd__ = __add__

    def __neg__(self) -> MatrixPolynomial:
        return self.scale(-1)

    def __sub__(self, other: MatrixPolynomial | complex) -> MatrixPolynomial:
        return self + (-other)

    def scale(self, factor: complex) -> MatrixPolynomial:
        return MatrixPolynomial.from_terms(self.shape, [(m, c * factor) for m, c in self.terms.items()])

    def __mul__(self, other: MatrixPolynomial | complex) -> MatrixPolynomial:
        if not isinstance(other, MatrixPolynomial):
            return self.scale(other)
        self._require_shape(other)
        return MatrixPolynomial.from_terms(
            self.shape,
            [(m1 + m2, c1 * c2) for m1, c1 in self.terms.items() for m2, c2 in other.terms.items()],
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> MatrixPolynomial:
        result = MatrixPolynomial.constant(self.shape, 1)
        for _ in range(exponent):
            result = result * self
        return result

    # ── evaluation ───────────────────────────────────────────────────────────

    def evaluate(self, g: ComplexMatrix) -> complex:
        """Evaluate the polynomial at the matrix ``g``."""
        self._require_matrix(g)
        entries = np.asarray(g, dtype=np.complex128).tolist()
        return sum(
            (c * prod((entries[j - 1][a - 1] for j, a in m), start=1 + 0j) for m, c in self.terms.items()),
            start=0j,
        )

    def _jet_from(self, v: list[list[complex]], w: list[list[complex]], u: list[list[complex]]) -> Jet2:
        value = d1 = d2 = 0j
        for monomial, coefficient in self.terms.items():
            m0, m1, m2 = coefficient, 0j, 0j
            for j, a in monomial:
                e0, e1, e2 = v[j - 1][a - 1], w[j - 1][a - 1], u[j - 1][a - 1]
                m0, m1, m2 = m0 * e0, m0 * e1 + m1 * e0, m0 * e2 + m1 * e1 + m2 * e0
            value += m0
            d1 += m1
            d2 += m2
        return Jet2(value, d1, d2)

    def jet2(self, g: ComplexMatrix, x: ComplexMatrix) -> Jet2:
        """Exact jet of ``t -> f(g (I + tX + t^2 X^2 / 2))`` at t = 0."""
        self._require_matrix(g)
        gx = g @ x
        return self._jet_from(
            np.asarray(g, dtype=np.complex128).tolist(), gx.tolist(), (0.5 * gx @ x).tolist()
        )

    def jets(self, g: ComplexMatrix, directions: Sequence[ComplexMatrix]) -> list[Jet2]:
        """Jets along every direction, sharing the value factors."""
        self._require_matrix(g)
        v = np.asarray(g, dtype=np.complex128).tolist()
        out = []
        for x in directions:
            gx = g @ x
            out.append(self._jet_from(v, gx.tolist(), (0.5 * gx @ x).tolist()))
        return out

    # ── text form ────────────────────────────────────────────────────────────

    def to_text(self) -> str:
        """Render as ``c * z[j,a]*z[k,b] + ...`` in canonical order."""
        if not self.terms:
            return "0"
        parts = []
        for monomial, coefficient in self.terms.items():
            if monomial:
                factors = "*".join(f"z[{j},{a}]" for j, a in monomial)
                parts.append(f"{coefficient!r} * {factors}")
            else:
                parts.append(repr(coefficient))
        return " + ".join(parts)

    @classmethod
    def from_text(cls, shape: Shape, text: str) -> MatrixPolynomial:
        """Parse the output of :meth:`to_text`."""
        text = text.strip()
        if text == "0":
            return cls(shape, {})
        terms: list[tuple[Monomial, complex]] = []
        for part in text.split(" + "):
            coefficient_text, _, factors = part.partition(" * ")
            monomial: list[Entry] = []
            for factor in filter(None, factors.split("*")):
                j, a = factor.strip()[2:-1].split(",")
                monomial.append((int(j), int(a)))
            terms.append((tuple(monomial), complex(coefficient_text)))
        return cls.from_terms(shape, terms)

    def __str__(self) -> str:
        return self.to_text()


def coefficient_function(shape: Shape, j: int, a: int) -> MatrixPolynomial:
    """Return the matrix coefficient ``z -> z[j, a]`` (1-based)."""
    return MatrixPolynomial.from_terms(shape, {((j, a),): 1})


def _strictly_increasing(indices: Sequence[int], bound: int, axis: str) -> tuple[int, ...]:
    values = tuple(int(i) for i in indices)
    if any(not 1 <= i <= bound for i in values):
        raise IndexOutOfRangeError(f"{axis} indices {values} outside 1..{bound}")
    if any(b <= a for a, b in itertools.pairwise(values)):
        raise DuplicateIndexError(f"{axis} indices {values} are not strictly increasing")
    return values


def _permutation_sign(permutation: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(permutation)), 2) if permutation[i] > permutation[j])
    return -1 if inversions % 2 else 1


def minor(shape: Shape, rows: Sequence[int], cols: Sequence[int]) -> MatrixPolynomial:
    """Return the determinant of the submatrix on ``rows`` x ``cols`` (1-based).

    Raises:
        IndexOutOfRangeError: If an index is out of range or the sizes differ.
        DuplicateIndexError: If rows or columns are not strictly increasing.
    """
    r = _strictly_increasing(rows, shape[0], "row")
    c = _strictly_increasing(cols, shape[1], "column")
    if len(r) != len(c) or not r:
        raise IndexOutOfRangeError(f"minor needs equally many rows and columns, got {len(r)} and {len(c)}")
    terms = [
        (tuple((r[i], c[sigma[i]]) for i in range(len(r))), _permutation_sign(sigma))
        for sigma in itertools.permutations(range(len(r)))
    ]
    return MatrixPolynomial.from_terms(shape, terms)


def evaluate(f: MatrixPolynomial, g: ComplexMatrix) -> complex:
    """Evaluate ``f`` at ``g``."""
    return f.evaluate(g)


def jet2(f: MatrixPolynomial, g: ComplexMatrix, x: ComplexMatrix) -> Jet2:
    """Return the exact order-2 jet of ``f`` at ``g`` along ``x``."""
    return f.jet2(g, x)


def add(f: MatrixPolynomial, h: MatrixPolynomial) -> MatrixPolynomial:
    return f + h


def scale(f: MatrixPolynomial, factor: complex) -> MatrixPolynomial:
    return f.scale(factor)


def multiply(f: MatrixPolynomial, h: MatrixPolynomial) -> MatrixPolynomial:
    return f * h
