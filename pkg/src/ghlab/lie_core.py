"""Matrix Lie algebras u(n) and sp(n), isotropy splits and deterministic group points.

All matrices are dense ``complex128`` numpy arrays in the defining representation:
n x n for U(n) and 2n x 2n for Sp(n), the latter in the block form
``[[A, B], [-conj(B), conj(A)]]``. The metric is ``<X, Y> = Re trace(X* Y)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm

from ghlab.errors import BlockMismatchError

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]
GroupKind = Literal["unitary", "quaternionic-unitary"]

METRIC_NAME = "re-trace"
_SQRT2 = np.sqrt(2.0)


def _frozen(matrix: NDArray) -> ComplexMatrix:
    """Return a read-only complex copy of ``matrix``."""
    out = np.array(matrix, dtype=np.complex128)
    out.setflags(write=False)
    return out


def inner(x: ComplexMatrix, y: ComplexMatrix) -> float:
    """Return the metric pairing ``Re trace(X* Y)``."""
    return float(np.real(np.vdot(x, y)))


def symplectic_form(n: int) -> ComplexMatrix:
    """Return ``J = [[0, I_n], [-I_n, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return _frozen(np.block([[zero, eye], [-eye, zero]]))


def is_unitary(g: ComplexMatrix, tol: float = 1e-12) -> bool:
    """Check ``||g g* - I||_F < tol``."""
    return unitarity_residual(g) < tol


def unitarity_residual(g: ComplexMatrix) -> float:
    """Return ``||g g* - I||_F``."""
    return float(np.linalg.norm(g @ g.conj().T - np.eye(g.shape[0])))


def symplectic_residual(g: ComplexMatrix) -> float:
    """Return ``||g^T J g - J||_F`` for a 2n x 2n matrix."""
    j = symplectic_form(g.shape[0] // 2)
    return float(np.linalg.norm(g.T @ j @ g - j))


def _unit(n: int, a: int, b: int) -> NDArray:
    m = np.zeros((n, n), dtype=np.complex128)
    m[a, b] = 1.0
    return m


def _orthonormal_span(matrices: list[ComplexMatrix], tol: float = 1e-10) -> tuple[ComplexMatrix, ...]:
    """Return an orthonormal basis (real metric) of the real span of ``matrices``."""
    if not matrices:
        return ()
    size = matrices[0].shape[0]
    rows = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in matrices])
    _, singular, vh = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(singular > tol))
    half = size * size
    return tuple(
        _frozen((v[:half] + 1j * v[half:]).reshape(size, size)) for v in vh[:rank]
    )


def _project(elements: tuple[ComplexMatrix, ...], y: ComplexMatrix) -> ComplexMatrix:
    """Orthogonal projection of ``y`` onto the span of orthonormal ``elements``."""
    if not elements:
        return np.zeros_like(y)
    stack = np.array(elements)
    coefficients = np.real(np.einsum("kab,ab->k", stack.conj(), y))
    return np.einsum("k,kab->ab", coefficients, stack)


def _bracket_residual(
    left: tuple[ComplexMatrix, ...],
    right: tuple[ComplexMatrix, ...],
    target: tuple[ComplexMatrix, ...],
) -> float:
    """Max norm of the component of ``[X, Y]`` orthogonal to ``target``."""
    worst = 0.0
    for x in left:
        for y in right:
            bracket = x @ y - y @ x
            residual = bracket - _project(target, bracket)
            worst = max(worst, float(np.linalg.norm(residual)))
    return worst


@dataclass(frozen=True, eq=False)
class LieAlgebraBasis:
    """Orthonormal basis of u(n) or sp(n) in the defining representation.

    Attributes:
        group_kind: ``"unitary"`` for u(n), ``"quaternionic-unitary"`` for sp(n).
        n: Rank parameter; matrices are n x n (unitary) or 2n x 2n.
        elements: Basis matrices, each read-only.
        supports: For every element, the index pair (a, b) in ``range(n)`` it is
            built from; a == b for diagonal elements. Drives block splitting.
        metric_name: Label of the metric the basis is orthonormal for.
    """

    group_kind: GroupKind
    n: int
    elements: tuple[ComplexMatrix, ...]
    supports: tuple[tuple[int, int], ...]
    metric_name: str = METRIC_NAME

    @property
    def dim(self) -> int:
        return len(self.elements)

    @property
    def matrix_size(self) -> int:
        return self.n if self.group_kind == "unitary" else 2 * self.n

    @cached_property
    def casimir(self) -> ComplexMatrix:
        """Return ``sum_i X_i^2``."""
        return _frozen(sum((x @ x for x in self.elements), np.zeros((self.matrix_size,) * 2)))

    @property
    def casimir_constant(self) -> complex:
        """Return the mean diagonal entry of the Casimir matrix."""
        return complex(np.mean(np.diag(self.casimir)))

    def casimir_residual(self) -> float:
        """Max entry deviation of the Casimir matrix from ``c * I``."""
        c = self.casimir_constant
        return float(np.max(np.abs(self.casimir - c * np.eye(self.matrix_size))))

    def gram_residual(self) -> float:
        """Max entry deviation of the Gram matrix from the identity."""
        stack = np.array(self.elements)
        gram = np.real(np.einsum("iab,jab->ij", stack.conj(), stack))
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def skew_residual(self) -> float:
        """Max ``||X* + X||_F`` over the basis."""
        return max(float(np.linalg.norm(x.conj().T + x)) for x in self.elements)

    def quaternionic_residual(self) -> float:
        """Max ``||X + J conj(X) J||_F``; zero for unitary bases."""
        if self.group_kind == "unitary":
            return 0.0
        j = symplectic_form(self.n)
        return max(float(np.linalg.norm(x + j @ x.conj() @ j)) for x in self.elements)

    def bracket_residual(self) -> float:
        """Max distance of ``[X_i, X_j]`` from the span of the basis."""
        return _bracket_residual(self.elements, self.elements, self.elements)

    def index_of(self, position: int) -> int:
        """Map a row/column position of the defining matrix to its index in ``range(n)``."""
        return position % self.n


def build_unitary_basis(n: int) -> LieAlgebraBasis:
    """Build the standard orthonormal basis of u(n).

    The basis is ``{i E_aa}`` followed by ``(E_ab - E_ba)/sqrt2`` and
    ``i (E_ab + E_ba)/sqrt2`` for a < b. Its Casimir is ``-n I``.

    Args:
        n: Matrix size, at least 1.

    Returns:
        The basis with n^2 elements.
    """
    elements: list[ComplexMatrix] = []
    supports: list[tuple[int, int]] = []
    for a in range(n):
        elements.append(_frozen(1j * _unit(n, a, a)))
        supports.append((a, a))
    for a in range(n):
        for b in range(a + 1, n):
            elements.append(_frozen((_unit(n, a, b) - _unit(n, b, a)) / _SQRT2))
            supports.append((a, b))
            elements.append(_frozen(1j * (_unit(n, a, b) + _unit(n, b, a)) / _SQRT2))
            supports.append((a, b))
    return LieAlgebraBasis("unitary", n, tuple(elements), tuple(supports))


def _quaternionic_matrix(a: NDArray, b: NDArray) -> NDArray:
    return np.block([[a, b], [-b.conj(), a.conj()]])


def build_sp_basis(n: int) -> LieAlgebraBasis:
    """Build an orthonormal basis of sp(n) inside u(2n).

    Elements are ``[[A, B], [-conj B, conj A]] / sqrt2`` with A running over the
    u(n) basis (B = 0) and B over the real and imaginary symmetric unit
    matrices (A = 0).

    Args:
        n: Quaternionic rank, at least 1.

    Returns:
        The basis with n(2n+1) elements.
    """
    zero = np.zeros((n, n), dtype=np.complex128)
    unitary = build_unitary_basis(n)
    elements: list[ComplexMatrix] = []
    supports: list[tuple[int, int]] = []
    for a_block, support in zip(unitary.elements, unitary.supports, strict=True):
        elements.append(_frozen(_quaternionic_matrix(np.array(a_block), zero) / _SQRT2))
        supports.append(support)
    for a in range(n):
        for b in range(a, n):
            symmetric = _unit(n, a, a) if a == b else (_unit(n, a, b) + _unit(n, b, a)) / _SQRT2
            for phase in (1.0, 1j):
                elements.append(_frozen(_quaternionic_matrix(zero, phase * symmetric) / _SQRT2))
                supports.append((a, b))
    return LieAlgebraBasis("quaternionic-unitary", n, tuple(elements), tuple(supports))


def build_basis(group_kind: GroupKind, n: int) -> LieAlgebraBasis:
    """Dispatch to :func:`build_unitary_basis` or :func:`build_sp_basis`."""
    if group_kind == "unitary":
        return build_unitary_basis(n)
    return build_sp_basis(n)


@dataclass(frozen=True, eq=False)
class SymmetricPair:
    """Split ``g = k + m`` of an ambient basis along diagonal blocks.

    With two blocks this is the Cartan decomposition of a Grassmannian; with
    more blocks it is the reductive split of a flag manifold.

    Attributes:
        ambient: The ambient basis.
        block_sizes: Block sizes (p, q) or (p, q_1, ..., q_t).
        k_basis: Ambient elements supported inside one block.
        m_basis: Ambient elements coupling two different blocks.
    """

    ambient: LieAlgebraBasis
    block_sizes: tuple[int, ...]
    k_basis: tuple[ComplexMatrix, ...]
    m_basis: tuple[ComplexMatrix, ...]

    @property
    def is_symmetric(self) -> bool:
        return len(self.block_sizes) == 2

    @cached_property
    def block_of(self) -> tuple[int, ...]:
        """Block label of every index in ``range(ambient.n)``."""
        labels: list[int] = []
        for block, size in enumerate(self.block_sizes):
            labels.extend([block] * size)
        return tuple(labels)

    def bracket_residuals(self) -> dict[str, float | None]:
        """Residuals of the bracket relations; ``mm`` is None for flags."""
        residuals: dict[str, float | None] = {
            "kk": _bracket_residual(self.k_basis, self.k_basis, self.k_basis),
            "km": _bracket_residual(self.k_basis, self.m_basis, self.m_basis),
            "mm": None,
        }
        if self.is_symmetric:
            residuals["mm"] = _bracket_residual(self.m_basis, self.m_basis, self.k_basis)
        return residuals

    def block_residual(self) -> float:
        """Max modulus of an off-block entry over ``k_basis``."""
        size = self.ambient.matrix_size
        mask = np.array(
            [
                [
                    self.block_of[self.ambient.index_of(r)] != self.block_of[self.ambient.index_of(c)]
                    for c in range(size)
                ]
                for r in range(size)
            ]
        )
        if not self.k_basis:
            return 0.0
        return max(float(np.max(np.abs(k[mask]), initial=0.0)) for k in self.k_basis)

    def centre_basis(self) -> tuple[ComplexMatrix, ...]:
        """Orthonormal centre of k: ``i * (block projector) / sqrt(size)`` per unitary block."""
        if self.ambient.group_kind != "unitary":
            return ()
        n = self.ambient.n
        centres: list[ComplexMatrix] = []
        for block, size in enumerate(self.block_sizes):
            projector = np.diag([1.0 if self.block_of[a] == block else 0.0 for a in range(n)])
            centres.append(_frozen(1j * projector / np.sqrt(size)))
        return tuple(centres)

    def unimodular_k_basis(self) -> tuple[ComplexMatrix, ...]:
        """Orthonormal basis of the trace-free part of k (determinant-one isotropy)."""
        centres = self.centre_basis()
        if not centres:
            return self.k_basis
        projected = [k - _project(centres, k) for k in self.k_basis]
        return _orthonormal_span(projected)


def build_symmetric_pair(ambient: LieAlgebraBasis, block_sizes: tuple[int, ...] | list[int]) -> SymmetricPair:
    """Split ``ambient`` into isotropy and horizontal parts along diagonal blocks.

    For sp(n) the blocks act on the quaternionic index, so block ``b`` occupies
    rows/columns ``I_b`` and ``n + I_b`` of the 2n x 2n representation.

    Args:
        ambient: Basis of u(n) or sp(n).
        block_sizes: Positive sizes summing to ``ambient.n``.

    Returns:
        The pair.

    Raises:
        BlockMismatchError: If the sizes are not positive or do not sum to n.
    """
    sizes = tuple(int(s) for s in block_sizes)
    if len(sizes) < 2 or any(s < 1 for s in sizes) or sum(sizes) != ambient.n:
        raise BlockMismatchError(
            f"block sizes {sizes} must be at least two positive sizes summing to n={ambient.n}"
        )
    labels: list[int] = []
    for block, size in enumerate(sizes):
        labels.extend([block] * size)
    k_basis: list[ComplexMatrix] = []
    m_basis: list[ComplexMatrix] = []
    for element, (a, b) in zip(ambient.elements, ambient.supports, strict=True):
        (k_basis if labels[a] == labels[b] else m_basis).append(element)
    logger.debug(
        "Built isotropy split",
        extra={"group": ambient.group_kind, "blocks": sizes, "dim_k": len(k_basis), "dim_m": len(m_basis)},
    )
    return SymmetricPair(ambient, sizes, tuple(k_basis), tuple(m_basis))


def matrix_exp(x: ComplexMatrix) -> ComplexMatrix:
    """Matrix exponential by scaling and squaring (Pade)."""
    return expm(np.asarray(x, dtype=np.complex128))


def combination(elements: tuple[ComplexMatrix, ...], coefficients: NDArray, size: int) -> NDArray:
    if not elements:
        return np.zeros((size, size), dtype=np.complex128)
    return np.einsum("k,kab->ab", np.asarray(coefficients, dtype=np.complex128), np.array(elements))


def group_point(basis: LieAlgebraBasis, coefficients: NDArray | list[float]) -> ComplexMatrix:
    """Return ``exp(sum_i c_i X_i)``."""
    return matrix_exp(combination(basis.elements, np.asarray(coefficients), basis.matrix_size))


def seeded_rng(seed: int, index: int, stream: int) -> np.random.Generator:
    # Entropy list keeps (seed, index) streams independent of call order.
    return np.random.default_rng([stream, seed, index])


def sample_group_point(basis: LieAlgebraBasis, seed: int, index: int) -> ComplexMatrix:
    """Return a deterministic group point for ``(seed, index)``.

    Coefficients are uniform in [-1, 1]; equal arguments give bit-identical
    matrices regardless of call order.
    """
    coefficients = seeded_rng(seed, index, stream=0).uniform(-1.0, 1.0, size=basis.dim)
    return group_point(basis, coefficients)


def dual_point(
    pair: SymmetricPair,
    k_coefficients: NDArray | list[float],
    m_coefficients: NDArray | list[float],
) -> ComplexMatrix:
    """Return ``exp(sum a_i K_i) @ exp(sum b_j i M_j)``."""
    size = pair.ambient.matrix_size
    k_part = matrix_exp(combination(pair.k_basis, np.asarray(k_coefficients), size))
    a_part = matrix_exp(1j * combination(pair.m_basis, np.asarray(m_coefficients), size))
    return k_part @ a_part


def sample_dual_point(pair: SymmetricPair, seed: int, index: int, radius: float = 0.5) -> ComplexMatrix:
    """Return a deterministic point of the non-compact dual group.

    The k-coefficients are uniform in [-1, 1]; the i*m coefficient vector is a
    uniform direction rescaled to Euclidean norm ``radius``.
    """
    rng = seeded_rng(seed, index, stream=1)
    k_coefficients = rng.uniform(-1.0, 1.0, size=len(pair.k_basis))
    direction = rng.uniform(-1.0, 1.0, size=len(pair.m_basis))
    norm = float(np.linalg.norm(direction))
    m_coefficients = radius * direction / norm if norm > 0 else direction
    return dual_point(pair, k_coefficients, m_coefficients)


def indefinite_form(pair: SymmetricPair) -> ComplexMatrix:
    """Return ``diag(I_p, -I_q)`` for a two-block unitary pair."""
    p = pair.block_sizes[0]
    return _frozen(np.diag([1.0] * p + [-1.0] * (pair.ambient.n - p)))


def pseudo_unitary_residual(z: ComplexMatrix, pair: SymmetricPair) -> float:
    """Return ``||z* I_pq z - I_pq||_F`` for dual points of a unitary pair."""
    form = indefinite_form(pair)
    return float(np.linalg.norm(z.conj().T @ form @ z - form))
