import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_density
from unext.channels import (
    CoherenceError,
    KrausChannel,
    failure_randomize,
    flag_copy,
    flag_retrieval,
    identity_channel,
    one_way_locc_examples,
    partial_dephasing,
)
from unext.linalg import DimensionMismatchError, Part, SystemDims, partial_trace
from unext.states import (
    DensityOperator,
    ErasureEmbedding,
    doubly_erased_private,
    erased_state,
    max_entangled,
    random_full_rank,
    werner_state,
)
from unext.unextendible import emin

FLAGGED = SystemDims((Part("A", 2, flag=True, name="XA"), Part("A", 2, name="A'"), Part("B", 2, name="B'")))


def choi_by_definition(ch):
    """Σ_ij |i><j| ⊗ N(|i><j|) from the channel action on matrix units."""
    din, dout = ch.in_dims.total, ch.out_dims.total
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for a in range(din):
        for b in range(din):
            unit = np.zeros((din, din))
            unit[a, b] = 1.0
            j += np.kron(unit, ch.apply_matrix(unit))
    return j


def flagged(q, gamma, sigma):
    return DensityOperator(q * np.kron(np.diag([0, 1]), gamma) + (1 - q) * np.kron(np.diag([1, 0]), sigma),
                           FLAGGED)


def test_identity_leaves_input(rng):
    rho = random_full_rank(2, 3, rng)
    assert np.allclose(identity_channel(rho.dims)(rho).matrix, rho.matrix)


def test_full_dephasing_of_plus_state():
    dims = SystemDims((Part("A", 2),))
    ch = KrausChannel((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), dims, dims)
    plus = DensityOperator(np.full((2, 2), 0.5), dims)
    assert np.allclose(ch(plus).matrix, np.eye(2) / 2)


def test_replacement_channel(rng):
    d = 3
    dims = SystemDims((Part("A", d),))
    ops = [np.outer(np.eye(d)[i], np.eye(d)[j]) / np.sqrt(d) for i in range(d) for j in range(d)]
    rho = DensityOperator(random_density(d, rng), dims)
    assert np.allclose(KrausChannel(tuple(ops), dims, dims)(rho).matrix, np.eye(d) / d, atol=1e-12)


def test_incomplete_kraus_rejected():
    dims = SystemDims((Part("A", 2),))
    with pytest.raises(ValueError, match="complete"):
        KrausChannel((np.diag([1.0, 0.0]),), dims, dims)


def test_apply_checks_dims():
    with pytest.raises(DimensionMismatchError):
        identity_channel(SystemDims.bipartite(2, 2))(erased_state(0.5, 2))


def test_choi_matches_definition():
    eta = doubly_erased_private(max_entangled(2), 0.5)
    for ch in one_way_locc_examples(eta.dims):
        assert np.allclose(ch.choi(), choi_by_definition(ch), atol=1e-12)


class TestPartialDephasing:
    def test_two_kraus_operators(self):
        ch = partial_dephasing(SystemDims.bipartite(3, 3, True, True))
        assert len(ch.kraus_ops) == 2
        e = ErasureEmbedding(2)
        assert np.allclose(ch.kraus_ops[0], np.kron(e.base_projector(), np.eye(3)))
        assert np.allclose(ch.kraus_ops[1], np.kron(e.erased(), np.eye(3)))

    def test_doubly_erased_is_invariant(self):
        eta = doubly_erased_private(max_entangled(2), 0.5)
        assert np.allclose(partial_dephasing(eta.dims)(eta).matrix, eta.matrix)

    def test_kills_cross_sector_blocks(self, rng):
        dims = SystemDims.bipartite(3, 2, True, False)
        rho = DensityOperator(random_density(6, rng), dims)
        out = partial_dephasing(dims)(rho).matrix.reshape(3, 2, 3, 2)
        assert np.allclose(out[:2, :, 2, :], 0) and np.allclose(out[2, :, :2, :], 0)

    @given(st.integers(0, 2**31 - 1))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        dims = SystemDims.bipartite(3, 3, True, True)
        ch = partial_dephasing(dims)
        m = random_density(9, rng)
        assert np.allclose(ch.apply_matrix(ch.apply_matrix(m)), ch.apply_matrix(m), atol=1e-12)

    def test_requires_erasure(self):
        with pytest.raises(ValueError, match="erasure"):
            partial_dephasing(SystemDims.bipartite(2, 2))


class TestFlagRetrieval:
    @pytest.mark.parametrize("p", [0.0, 0.5, 1.0])
    def test_output_form(self, p):
        gamma = max_entangled(2)
        out = flag_retrieval(doubly_erased_private(gamma, p).dims)(doubly_erased_private(gamma, p))
        expected = p * np.kron(np.diag([0, 1]), gamma.matrix) + (1 - p) * np.kron(np.diag([1, 0]), np.eye(4) / 4)
        assert out.dims.dims == (2, 2, 2)
        assert np.allclose(out.matrix, expected, atol=1e-12)

    def test_flag_marginal(self):
        eta = doubly_erased_private(max_entangled(2), 0.5)
        out = flag_retrieval(eta.dims)(eta)
        assert np.allclose(partial_trace(out.matrix, out.dims, [0]), np.eye(2) / 2)

    def test_rejects_cross_sector_coherence(self):
        dims = SystemDims.bipartite(3, 3, True, True)
        v = np.zeros(9)
        v[0] = v[8] = 1 / np.sqrt(2)  # |00> + |ee>
        with pytest.raises(CoherenceError):
            flag_retrieval(dims)(DensityOperator(np.outer(v, v), dims))


class TestFailureRandomize:
    def test_replaces_failure_branch(self, rng):
        sigma = random_full_rank(2, 2, rng).matrix
        gamma = max_entangled(2).matrix
        out = failure_randomize(FLAGGED)(flagged(0.3, gamma, sigma))
        assert np.allclose(out.matrix, flagged(0.3, gamma, np.eye(4) / 4).matrix, atol=1e-12)

    def test_success_branch_untouched(self):
        rho = flagged(1.0, max_entangled(2).matrix, np.eye(4) / 4)
        copy = flag_copy(FLAGGED)
        ch = failure_randomize(copy.out_dims).compose(copy)
        assert np.allclose(ch(rho).matrix, rho.matrix)

    @given(st.integers(0, 2**31 - 1), st.floats(0.0, 1.0))
    def test_idempotent(self, seed, q):
        rng = np.random.default_rng(seed)
        rho = flagged(q, random_density(4, rng), random_density(4, rng))
        ch = failure_randomize(FLAGGED)
        once = ch(rho)
        assert np.allclose(ch(once).matrix, once.matrix, atol=1e-12)

    def test_requires_flag(self):
        with pytest.raises(ValueError, match="flag"):
            failure_randomize(SystemDims.bipartite(2, 2))

    def test_copy_adds_bob_flag(self):
        out = flag_copy(FLAGGED).out_dims
        assert out.flag_index("B") is not None and out.dims == (2, 2, 2, 2)


class TestCatalogue:
    @pytest.mark.parametrize("rho", [max_entangled(2), doubly_erased_private(max_entangled(2), 0.5),
                                     werner_state(0.7, 2), erased_state(0.9, 2)],
                             ids=["phi2", "eta", "werner", "erased"])
    def test_channels_are_cptp(self, rho):
        for ch in one_way_locc_examples(rho.dims):
            assert ch.is_cptp(), ch.name

    def test_flag_protocol_only_for_erasure_inputs(self):
        names = [c.name for c in one_way_locc_examples(SystemDims.bipartite(2, 2))]
        assert "flag_protocol" not in names
        names = [c.name for c in one_way_locc_examples(SystemDims.bipartite(3, 3, True, True))]
        assert "flag_protocol" in names

    def test_local_unitaries_preserve_emin(self):
        phi = max_entangled(2)
        ch = {c.name: c for c in one_way_locc_examples(phi.dims)}["local_unitaries"]
        assert emin(ch(phi)).value_bits == pytest.approx(1.0, abs=1e-6)

    def test_measurement_gives_unextendible_zero(self):
        phi = max_entangled(2)
        ch = {c.name: c for c in one_way_locc_examples(phi.dims)}["measure_and_shift"]
        assert emin(ch(phi)).value_bits == pytest.approx(0.0, abs=1e-6)

    def test_deterministic_under_seed(self):
        dims = SystemDims.bipartite(2, 2)
        a = one_way_locc_examples(dims, seed=3)
        b = one_way_locc_examples(dims, seed=3)
        assert all(np.allclose(x.choi(), y.choi()) for x, y in zip(a, b))
