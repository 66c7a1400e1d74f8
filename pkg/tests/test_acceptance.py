"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line; run with ``-s`` to
see them inline. The lines are also repeated in the terminal summary.
"""

import contextlib
import math
import time

import numpy as np

from unext.channels import failure_randomize, flag_copy, one_way_locc_examples, partial_dephasing
from unext.cli import main, sweep_rows
from unext.entropy import (
    coherent_information,
    isotropic_coherent_closed,
    werner_coherent_closed,
)
from unext.linalg import Part, SystemDims, kron, partial_trace
from unext.states import (
    DensityOperator,
    ErasureEmbedding,
    PrivateStateSpec,
    doubly_erased_private,
    erased_private,
    erased_state,
    isotropic_state,
    max_entangled,
    mixed_shield_private_state,
    private_state,
    random_full_rank,
    tensor,
    werner_state,
)
from unext.unextendible import doubly_erased_bound, emin, find_joint_extension

SEED = 20240611
RESULTS: list[str] = []


@contextlib.contextmanager
def criterion(number: int, label: str):
    ok = False
    try:
        yield
        ok = True
    finally:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {label}"
        RESULTS.append(line)
        print("\n" + line)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_01_maximally_entangled():
    with criterion(1, "emin(Phi^d) = log2 d within 1e-4, d = 2, 3, each solve < 5 s"):
        for d in (2, 3):
            rep, secs = timed(lambda: emin(max_entangled(d)))
            assert abs(rep.value_bits - math.log2(d)) <= 1e-4
            assert secs < 5.0


def test_02_zero_cases():
    with criterion(2, "emin = 0 within 1e-6 on erased, erased-private, random full-rank, Werner, isotropic"):
        rng = np.random.default_rng(SEED)
        states = [erased_state(p, 2) for p in (0.0, 0.25, 0.5, 0.75, 0.99)]
        states.append(erased_private(mixed_shield_private_state(), 0.5))
        for da, db in ((2, 2), (2, 3)):
            states += [random_full_rank(da, db, rng) for _ in range(20)]
        for t in np.linspace(0.05, 0.95, 11):
            states += [werner_state(t, 2), isotropic_state(t, 2)]
        worst = max(abs(emin(rho).value_bits) for rho in states)
        assert worst <= 1e-6


def test_03_doubly_erased_chain():
    with criterion(3, "doubly erased: equality for Phi^2 within 5e-4, bound for mixed-shield gamma"):
        for p in (0.25, 0.5, 0.75):
            value = emin(doubly_erased_private(max_entangled(2), p)).value_bits
            assert abs(value - (-0.5 * math.log2(p / 4 + 1 - p))) <= 5e-4
        gamma = mixed_shield_private_state()
        for p in (0.25, 0.5, 0.75):
            value = emin(doubly_erased_private(gamma, p)).value_bits
            assert value >= doubly_erased_bound(p, 2) - 5e-4


def test_04_privacy_bound():
    with criterion(4, "private state k=2, 2x2 shield, shift twists: emin >= 1 - 1e-4"):
        assert emin(private_state(PrivateStateSpec())).value_bits >= 1 - 1e-4


def test_05_additivity():
    with criterion(5, "additivity within 5e-3 on two or more pairs, each < 120 s"):
        prod = DensityOperator(np.kron(np.diag([0.7, 0.3]), np.full((2, 2), 0.5)),
                               SystemDims.bipartite(2, 2))
        pairs = [(max_entangled(2), max_entangled(2)), (max_entangled(2), prod),
                 (max_entangled(2), erased_state(0.5, 2))]
        for r1, r2 in pairs:
            t0 = time.perf_counter()
            joint = emin(tensor(r1, r2))
            gap = joint.value_bits - emin(r1).value_bits - emin(r2).value_bits
            secs = time.perf_counter() - t0
            assert joint.lifted_dim <= 64
            assert abs(gap) <= 5e-3
            assert secs < 120.0


def test_06_monotonicity():
    with criterion(6, "catalogue one-way LOCC channels do not increase emin beyond 1e-5"):
        for rho in (max_entangled(2), doubly_erased_private(max_entangled(2), 0.5), werner_state(0.7, 2)):
            before = emin(rho).value_bits
            for ch in one_way_locc_examples(rho.dims):
                assert emin(ch(rho)).value_bits <= before + 1e-5, ch.name


def test_07_closed_forms():
    with criterion(7, "Werner and isotropic coherent information match closed forms within 1e-8"):
        for d in (2, 3):
            for p in np.linspace(0, 1, 11):
                assert abs(coherent_information(werner_state(p, d)) - werner_coherent_closed(p, d)) <= 1e-8
        assert abs(werner_coherent_closed(1.0, 2) - (-0.584963)) <= 1e-6
        assert abs(coherent_information(werner_state(1.0, 2)) - (1 - math.log2(3))) <= 1e-8
        for f in np.linspace(0, 1, 11):
            assert abs(coherent_information(isotropic_state(f, 2)) - isotropic_coherent_closed(f, 2)) <= 1e-8
        assert abs(coherent_information(isotropic_state(1.0, 2)) - 1.0) <= 1e-8


def test_08_gap_row():
    with criterion(8, "erased(0.75, 2) sweep row: coherent info > 0.2 and emin = 0 within 1e-6"):
        (row,) = sweep_rows("erased", [0.75], d=2)
        assert row["coherent_info_bits"] > 0.2
        assert abs(row["emin_bits"]) <= 1e-6
        assert row["is_2ext_sup"] is True


def _flagged(q, gamma, sigma, dims):
    one, zero = np.diag([0.0, 1.0]), np.diag([1.0, 0.0])
    return DensityOperator(q * kron(one, gamma) + (1 - q) * kron(zero, sigma), dims)


def test_09_flag_normalization():
    with criterion(9, "randomize after copy normalizes 5 seeded flagged inputs within 1e-10"):
        rng = np.random.default_rng(SEED)
        dims = SystemDims((Part("A", 2, flag=True, name="XA"), Part("A", 2, name="A'"),
                           Part("B", 2, name="B'")))
        gamma = max_entangled(2).matrix
        copy = flag_copy(dims)
        channel = failure_randomize(copy.out_dims).compose(copy)
        for _ in range(5):
            q = float(rng.uniform(0.05, 0.95))
            sigma = random_full_rank(2, 2, rng, floor=0.0).matrix
            out = channel(_flagged(q, gamma, sigma, dims)).matrix
            expected = _flagged(q, gamma, np.eye(4) / 4, dims).matrix
            assert np.max(np.abs(out - expected)) <= 1e-10


def test_10_dephased_decomposition():
    with criterion(10, "dephased optimal marginal splits with sigma in the extension set (residual <= 1e-6)"):
        p, gamma = 0.5, max_entangled(2)
        eta = doubly_erased_private(gamma, p)
        da1, db1 = eta.dims.dim_a, eta.dims.dim_b
        da, db = da1 - 1, db1 - 1
        assert np.allclose(partial_dephasing(eta.dims)(eta).matrix, eta.matrix, atol=1e-12)
        omega_ae = partial_trace(emin(eta).optimal_extension, [da1, db1, db1], [0, 2])
        e_a = ErasureEmbedding(da).erased()
        keep = kron(ErasureEmbedding(da).base_projector(), np.eye(db1))
        flag = kron(e_a, np.eye(db1))
        dephased = keep @ omega_ae @ keep + flag @ omega_ae @ flag
        block = dephased.reshape(da1, db1, da1, db1)
        sigma = block[:da, :, :da, :].reshape(da * db1, da * db1) / p
        tau = block[da, :, da, :] / (1 - p)
        inc = kron(np.eye(da1)[:, :da], np.eye(db1))
        recon = p * inc @ sigma @ inc.T + (1 - p) * kron(e_a, tau)
        assert np.max(np.abs(recon - dephased)) <= 1e-9
        assert abs(np.trace(sigma).real - 1) <= 1e-6 and abs(np.trace(tau).real - 1) <= 1e-6
        iso = kron(np.eye(da), ErasureEmbedding(db).isometry())
        gamma_emb = iso @ gamma.grouped() @ iso.conj().T
        feas = find_joint_extension([da, db1, db1], [([0, 1], gamma_emb), ([0, 2], sigma)])
        assert feas.residual <= 1e-6


def test_11_full_verify(capsys):
    with criterion(11, "verify --suites all exits 0 in under 600 s"):
        code, secs = timed(lambda: main(["verify", "--suites", "all"]))
        capsys.readouterr()
        assert code == 0
        assert secs < 600.0
