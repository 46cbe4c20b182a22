"""Tests for src/ghlab/lie_core.py."""

from __future__ import annotations

import numpy as np
import pytest

from ghlab.errors import BlockMismatchError
from ghlab.lie_core import (
    LieAlgebraBasis,
    SymmetricPair,
    build_basis,
    build_sp_basis,
    build_symmetric_pair,
    build_unitary_basis,
    dual_point,
    inner,
    matrix_exp,
    pseudo_unitary_residual,
    sample_dual_point,
    sample_group_point,
    symplectic_residual,
    unitarity_residual,
)
from ghlab.matrix_poly import coefficient_function


# ── Bases ─────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_unitary_basis_dimension_and_casimir(n: int) -> None:
    """u(n) has n^2 orthonormal elements and Casimir -n I."""
    basis = build_unitary_basis(n)
    assert basis.dim == n * n
    assert basis.gram_residual() < 1e-12
    assert basis.skew_residual() < 1e-12
    assert basis.casimir_residual() < 1e-12
    assert basis.casimir_constant == pytest.approx(-n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sp_basis_dimension_and_casimir(n: int) -> None:
    """sp(n) has n(2n+1) quaternionic elements and Casimir -(2n+1)/2 I."""
    basis = build_sp_basis(n)
    assert basis.dim == n * (2 * n + 1)
    assert basis.matrix_size == 2 * n
    assert basis.gram_residual() < 1e-12
    assert basis.quaternionic_residual() < 1e-12
    assert basis.casimir_residual() < 1e-12
    assert basis.casimir_constant == pytest.approx(-(2 * n + 1) / 2)


def test_bases_are_closed_under_bracket(u3: LieAlgebraBasis, sp2: LieAlgebraBasis) -> None:
    """Brackets of basis elements stay in the span."""
    assert u3.bracket_residual() < 1e-10
    assert sp2.bracket_residual() < 1e-10


def test_inner_is_real_trace_metric() -> None:
    """<X, Y> = Re tr(X* Y)."""
    x = np.array([[1j, 0], [0, 0]])
    y = np.array([[2j, 0], [0, 1]])
    assert inner(x, y) == pytest.approx(2.0)


def test_build_basis_dispatches() -> None:
    assert build_basis("unitary", 2).group_kind == "unitary"
    assert build_basis("quaternionic-unitary", 1).dim == 3


# ── Symmetric pairs and flags ─────────────────────────────────────────────────


def test_grassmannian_split_dimensions(grassmann_12: SymmetricPair) -> None:
    """u(1) + u(2) isotropy has dimension 5 and m has 2 p q = 4."""
    assert len(grassmann_12.k_basis) == 5
    assert len(grassmann_12.m_basis) == 4
    assert grassmann_12.is_symmetric


def test_grassmannian_bracket_relations(grassmann_12: SymmetricPair) -> None:
    """[k,k] in k, [k,m] in m, [m,m] in k."""
    residuals = grassmann_12.bracket_residuals()
    assert residuals["kk"] < 1e-10
    assert residuals["km"] < 1e-10
    assert residuals["mm"] is not None and residuals["mm"] < 1e-10
    assert grassmann_12.block_residual() < 1e-12


def test_flag_split_has_no_mm_relation() -> None:
    """Three blocks give a reductive but non-symmetric split."""
    pair = build_symmetric_pair(build_unitary_basis(4), (1, 1, 2))
    residuals = pair.bracket_residuals()
    assert not pair.is_symmetric
    assert residuals["mm"] is None
    assert residuals["km"] < 1e-10
    assert len(pair.k_basis) == 1 + 1 + 4


def test_sp_split_dimensions() -> None:
    """sp(1) + sp(1) inside sp(2): k has dimension 6, m has 4 p q = 4."""
    pair = build_symmetric_pair(build_sp_basis(2), (1, 1))
    assert len(pair.k_basis) == 6
    assert len(pair.m_basis) == 4
    assert pair.bracket_residuals()["mm"] < 1e-10


@pytest.mark.parametrize("blocks", [(1, 1), (2, 2), (0, 3), (3,)])
def test_block_mismatch_rejected(u3: LieAlgebraBasis, blocks: tuple[int, ...]) -> None:
    """Block sizes must be at least two positive numbers summing to n."""
    with pytest.raises(BlockMismatchError):
        build_symmetric_pair(u3, blocks)


def test_unimodular_isotropy_is_trace_free(grassmann_12: SymmetricPair) -> None:
    """The determinant-one isotropy drops both block centres."""
    k0 = grassmann_12.unimodular_k_basis()
    assert len(k0) == len(grassmann_12.k_basis) - 2
    for k in k0:
        assert abs(np.trace(k[:1, :1])) < 1e-12
        assert abs(np.trace(k[1:, 1:])) < 1e-12


def test_sp_pair_has_no_centre() -> None:
    pair = build_symmetric_pair(build_sp_basis(2), (1, 1))
    assert pair.centre_basis() == ()
    assert pair.unimodular_k_basis() == pair.k_basis


# ── Group points ──────────────────────────────────────────────────────────────


def test_sampled_points_are_unitary(u3: LieAlgebraBasis) -> None:
    for index in range(10):
        assert unitarity_residual(sample_group_point(u3, 1, index)) < 1e-12


def test_sampled_sp_points_are_symplectic(sp2: LieAlgebraBasis) -> None:
    for index in range(10):
        g = sample_group_point(sp2, 1, index)
        assert unitarity_residual(g) < 1e-12
        assert symplectic_residual(g) < 1e-12


def test_sampling_is_order_independent(u3: LieAlgebraBasis) -> None:
    """Points depend only on (seed, index)."""
    later = sample_group_point(u3, 5, 9)
    _ = [sample_group_point(u3, 5, i) for i in range(9)]
    assert np.array_equal(later, sample_group_point(u3, 5, 9))
    assert not np.array_equal(later, sample_group_point(u3, 6, 9))


def test_dual_points_preserve_indefinite_form(grassmann_12: SymmetricPair) -> None:
    """exp(k) exp(i m) lies in U(1, 2)."""
    for index in range(5):
        z = sample_dual_point(grassmann_12, 3, index, radius=0.5)
        assert pseudo_unitary_residual(z, grassmann_12) < 1e-12
        assert unitarity_residual(z) > 1e-6


def test_dual_point_at_zero_is_identity(grassmann_12: SymmetricPair) -> None:
    z = dual_point(grassmann_12, np.zeros(5), np.zeros(4))
    assert np.allclose(z, np.eye(3))


def test_pure_m_direction_gives_cosh_sinh_block() -> None:
    """exp(t i M) on U(1, 1) is positive Hermitian with cosh/sinh entries."""
    pair = build_symmetric_pair(build_unitary_basis(2), (1, 1))
    t = 0.8
    for j in range(len(pair.m_basis)):
        coefficients = np.zeros(len(pair.m_basis))
        coefficients[j] = t
        z = dual_point(pair, np.zeros(len(pair.k_basis)), coefficients)
        assert np.allclose(z, z.conj().T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(z) > 0)
        assert z[0, 0].real == pytest.approx(np.cosh(t / np.sqrt(2)), abs=1e-12)
        assert z[1, 1].real == pytest.approx(np.cosh(t / np.sqrt(2)), abs=1e-12)
        assert abs(z[0, 1]) == pytest.approx(np.sinh(t / np.sqrt(2)), abs=1e-12)


# ── Exponential and jets ──────────────────────────────────────────────────────


def test_matrix_exp_matches_spectral_form(u3: LieAlgebraBasis) -> None:
    """exp(X) of a skew-Hermitian X equals V diag(e^{i w}) V*."""
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = sum(c * e for c, e in zip(rng.uniform(-2.0, 2.0, size=u3.dim), u3.elements, strict=True))
        w, v = np.linalg.eigh(-1j * x)
        expected = v @ np.diag(np.exp(1j * w)) @ v.conj().T
        assert np.max(np.abs(matrix_exp(x) - expected)) < 1e-12
        assert np.max(np.abs(matrix_exp(x) @ matrix_exp(-x) - np.eye(3))) < 1e-12


def test_matrix_exp_of_diagonal_is_exact() -> None:
    theta = np.array([0.3, -1.2, 2.5])
    result = matrix_exp(np.diag(1j * theta))
    assert np.allclose(result, np.diag(np.exp(1j * theta)), atol=1e-14)


def test_coefficient_jet_on_circle() -> None:
    """z11 along i at the identity of U(1) has jet (1, i, -1)."""
    u1 = build_unitary_basis(1)
    assert u1.dim == 1
    x = u1.elements[0]
    assert abs(abs(x[0, 0]) - 1.0) < 1e-12
    f = coefficient_function((1, 1), 1, 1)
    jet = f.jet2(np.eye(1, dtype=np.complex128), x)
    assert jet.value == pytest.approx(1.0)
    assert jet.d1 == pytest.approx(x[0, 0])
    assert 2 * jet.d2 == pytest.approx(x[0, 0] ** 2)
    assert 2 * jet.d2 == pytest.approx(-1.0)
