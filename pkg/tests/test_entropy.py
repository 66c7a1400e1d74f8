import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_density
from unext.channels import one_way_locc_examples
from unext.entropy import (
    binary_entropy,
    coherent_information,
    dmin,
    isotropic_coherent_closed,
    von_neumann_entropy,
    werner_coherent_closed,
)
from unext.linalg import DimensionMismatchError, SystemDims, random_unitary
from unext.states import (
    DensityOperator,
    erased_private,
    erased_state,
    isotropic_state,
    max_entangled,
    werner_state,
)


def entropy_by_logm(m):
    """−Tr[ρ log₂ ρ] through a matrix logarithm on the support."""
    from scipy.linalg import logm
    w, v = np.linalg.eigh(m)
    keep = w > 1e-12
    sub = (v[:, keep].conj().T @ m @ v[:, keep])
    return float(-np.trace(sub @ logm(sub)).real / np.log(2))


@pytest.mark.parametrize("d", [2, 3])
def test_entropy_of_maximally_mixed(d):
    assert von_neumann_entropy(np.eye(d) / d) == pytest.approx(math.log2(d))


def test_entropy_of_pure_state():
    assert von_neumann_entropy(max_entangled(3)) == pytest.approx(0.0, abs=1e-12)


def test_entropy_of_werner_half():
    assert von_neumann_entropy(werner_state(0.5, 2)) == pytest.approx(1 + math.log2(3) / 2, abs=1e-12)
    assert von_neumann_entropy(werner_state(0.5, 2)) == pytest.approx(1.79248, abs=1e-5)


def test_entropy_matches_logm(rng):
    m = random_density(5, rng, rank=3)
    assert von_neumann_entropy(m) == pytest.approx(entropy_by_logm(m), abs=1e-9)


@given(st.integers(0, 2**31 - 1))
def test_entropy_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    m = random_density(4, rng)
    u = random_unitary(4, rng)
    assert von_neumann_entropy(u @ m @ u.conj().T) == pytest.approx(von_neumann_entropy(m), abs=1e-10)


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
    assert binary_entropy(0.9) == pytest.approx(0.468996, abs=1e-6)
    with pytest.raises(ValueError):
        binary_entropy(1.1)


class TestDmin:
    def test_self_is_zero(self, rng):
        m = random_density(4, rng, rank=2)
        assert dmin(m, m) == pytest.approx(0.0, abs=1e-12)

    def test_bell_against_mixed(self):
        assert dmin(max_entangled(2), np.eye(4) / 4) == pytest.approx(2.0)

    def test_equal_supports(self):
        gamma = max_entangled(2)
        assert dmin(erased_private(gamma, 0.3), erased_private(gamma, 0.7)) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint_supports_are_infinite(self):
        assert dmin(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            dmin(np.eye(2) / 2, np.eye(3) / 3)

    @given(st.integers(0, 2**31 - 1))
    def test_data_processing(self, seed):
        rng = np.random.default_rng(seed)
        dims = SystemDims.bipartite(2, 2)
        rho = DensityOperator(random_density(4, rng, rank=2), dims)
        sigma = DensityOperator(random_density(4, rng), dims)
        before = dmin(rho, sigma)
        for ch in one_way_locc_examples(dims):
            assert before - dmin(ch(rho), ch(sigma)) >= -1e-8


class TestCoherentInformation:
    def test_bell(self):
        assert coherent_information(max_entangled(2)) == pytest.approx(1.0)

    def test_werner_spot(self):
        assert coherent_information(werner_state(1.0, 2)) == pytest.approx(1 - math.log2(3), abs=1e-10)
        assert werner_coherent_closed(1.0, 2) == pytest.approx(-0.584963, abs=1e-6)
        assert werner_coherent_closed(0.5, 2) == pytest.approx(-0.792481, abs=1e-6)

    def test_erased_state_positive(self):
        assert coherent_information(erased_state(0.75, 2)) > 0.2

    def test_erased_state_sign_change(self):
        # I(A>B) = 2p - 1 for the erased qubit pair
        for p in (0.1, 0.5, 0.9):
            assert coherent_information(erased_state(p, 2)) == pytest.approx(2 * p - 1, abs=1e-10)

    @pytest.mark.parametrize("d", [2, 3])
    def test_werner_closed_form_grid(self, d):
        for p in np.linspace(0, 1, 41):
            assert coherent_information(werner_state(p, d)) == pytest.approx(werner_coherent_closed(p, d), abs=1e-8)

    @pytest.mark.parametrize("d", [2, 3])
    def test_isotropic_closed_form_grid(self, d):
        for f in np.linspace(0, 1, 41):
            assert coherent_information(isotropic_state(f, d)) == pytest.approx(isotropic_coherent_closed(f, d),
                                                                                abs=1e-8)

    def test_isotropic_spots(self):
        assert isotropic_coherent_closed(1.0, 3) == pytest.approx(math.log2(3))
        assert isotropic_coherent_closed(0.9, 2) == pytest.approx(0.372508, abs=1e-6)

    def test_closed_form_domains(self):
        with pytest.raises(ValueError):
            werner_coherent_closed(0.5, 1)
        with pytest.raises(ValueError):
            isotropic_coherent_closed(-0.1, 2)
