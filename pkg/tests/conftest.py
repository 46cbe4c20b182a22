import os
from unittest.mock import patch

import pytest

from ghlab.config import get_config
from ghlab.eigenfamilies import EigenFamily, complex_family, quaternionic_family
from ghlab.lie_core import LieAlgebraBasis, SymmetricPair, build_sp_basis, build_symmetric_pair, build_unitary_basis
from ghlab.sampling import Sampling


@pytest.fixture
def mock_env():
    env = {
        "GHLAB_SEED": "7",
        "GHLAB_SAMPLES": "12",
        "GHLAB_LOG_LEVEL": "INFO",
    }
    with patch.dict(os.environ, env, clear=True):
        get_config.cache_clear()
        yield env
    get_config.cache_clear()


@pytest.fixture
def sampling() -> Sampling:
    """Small deterministic sample budget for unit tests."""
    return Sampling(seed=7, samples=12)


@pytest.fixture
def u2() -> LieAlgebraBasis:
    return build_unitary_basis(2)


@pytest.fixture
def u3() -> LieAlgebraBasis:
    return build_unitary_basis(3)


@pytest.fixture
def sp2() -> LieAlgebraBasis:
    return build_sp_basis(2)


@pytest.fixture
def grassmann_12(u3: LieAlgebraBasis) -> SymmetricPair:
    """Split of u(3) with blocks (1, 2)."""
    return build_symmetric_pair(u3, (1, 2))


@pytest.fixture
def complex_12() -> EigenFamily:
    return complex_family(1, 2)


@pytest.fixture
def quaternionic_11() -> EigenFamily:
    return quaternionic_family(1, 1)


# ────────────────────────────────────────────────────────────────────────────
# Test Setup Pattern Guide
# ────────────────────────────────────────────────────────────────────────────
#
# Every sampled quantity is a function of (seed, index), so tests that need a
# different point set build their own Sampling instead of mutating the fixture:
#
#   def test_something(sampling: Sampling) -> None:
#       wider = sampling.with_samples(40)
#
# Numbers asserted in tests are derived from the coefficient lemmas
# (tau z = c z, kappa(z_ja, z_kb) = e z_jb z_ka) rather than copied from
# measured output.
