"""Independent reference implementations used only by the tests."""

import itertools

import cvxpy as cp
import numpy as np


def partial_trace_loops(m, dims, keep):
    """Partial trace by explicit summation over multi-indices."""
    dims = list(dims)
    keep = sorted(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    out = np.zeros((dk, dk), dtype=complex)
    strides = [int(np.prod(dims[i + 1:])) for i in range(len(dims))]

    def flat(idx):
        return sum(i * s for i, s in zip(idx, strides))

    kept_ranges = [range(dims[i]) for i in keep]
    tr_ranges = [range(dims[i]) for i in traced]
    for r_idx, rk in enumerate(itertools.product(*kept_ranges)):
        for c_idx, ck in enumerate(itertools.product(*kept_ranges)):
            total = 0.0
            for t in itertools.product(*tr_ranges):
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, i in enumerate(keep):
                    row[i], col[i] = rk[pos], ck[pos]
                for pos, i in enumerate(traced):
                    row[i] = col[i] = t[pos]
                total += m[flat(row), flat(col)]
            out[r_idx, c_idx] = total
    return out


def support_projector_svd(m, tol=1e-9):
    u, s, _ = np.linalg.svd(m)
    u = u[:, s > tol * s[0]]
    return u @ u.conj().T


def emin_cvxpy(rho_ab, da, db):
    """Optimal overlap and value by a generic conic solver on the full ABB' space."""
    proj = support_projector_svd(rho_ab)
    n = da * db * db
    omega = cp.Variable((n, n), hermitian=True)
    # σ_AB' = Tr_B ω, ordering A, B, B'
    sigma = cp.partial_trace(omega, [da, db, db], axis=1)
    marg = cp.partial_trace(omega, [da, db, db], axis=2)
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(proj @ sigma))), [omega >> 0, marg == rho_ab])
    prob.solve(solver=cp.CLARABEL)
    overlap = min(max(prob.value, 1e-300), 1.0)
    return overlap, -0.5 * np.log2(overlap)


def random_density(n, rng, rank=None):
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real
