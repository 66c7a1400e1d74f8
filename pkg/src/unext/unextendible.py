"""Min-unextendible entanglement and super two-extendibility.

For a state ρ_AB the extension set collects ``σ_AB' = Tr_B[ω_ABB']`` over
states ω whose AB marginal is ρ (B' a copy of B). The quantity computed
here is the smallest ``−½ log₂ Tr[Π^ρ σ]`` over that set, found by the SDP

    maximize  Tr[(Π^ρ_{AB'} ⊗ I_B) ω]   s.t.  Tr_{B'}[ω] = ρ,  ω ⪰ 0.

Any feasible ω is supported on ``supp(ρ) ⊗ H_{B'}``, so the variable is
compressed to that subspace before solving; this keeps rank-deficient
inputs strictly feasible (ρ̃ ⊗ I/d_B is interior) and shrinks the problem.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    dagger,
    hermitian_eig,
    hermitize,
    kron,
    partial_trace,
    permute_systems,
    support_basis,
    support_projector,
)
from .sdp import INFEASIBLE, OPTIMAL, SdpProblem, SdpSolution, SolverOptions, marginal_constraints, solve
from .states import DensityOperator, ErasureEmbedding, erased_private

__all__ = [
    "EminReport",
    "TwoExtSupVerdict",
    "FeasibilityResult",
    "SolverError",
    "DimensionCapError",
    "DEFAULT_MAX_DIM",
    "emin",
    "is_super_two_extendible",
    "doubly_erased_bound",
    "chain_value",
    "erased_private_witness",
    "fullrank_witness",
    "witness_overlap",
    "extension_residual",
    "find_joint_extension",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_DIM = 64


class SolverError(RuntimeError):
    """The SDP did not reach an optimal status."""

    def __init__(self, message: str, solution: SdpSolution | None = None):
        super().__init__(message)
        self.solution = solution


class DimensionCapError(ValueError):
    """Lifted SDP variable exceeds the configured dimension cap."""


@dataclass(frozen=True, eq=False)
class EminReport:
    value_bits: float
    overlap: float
    optimal_extension: np.ndarray = field(repr=False)
    optimal_sigma: DensityOperator = field(repr=False)
    solver_status: str
    iterations: int
    marginal_residual: float
    lifted_dim: int
    chain_value: float | None = None


@dataclass(frozen=True, eq=False)
class TwoExtSupVerdict:
    is_member: bool
    leak: float
    witness: np.ndarray | None = field(default=None, repr=False)
    report: EminReport | None = field(default=None, repr=False)


def _objective(proj: np.ndarray, da: int, db: int) -> np.ndarray:
    """Π on (A, B') with identity on B, in the ordering A, B, B'."""
    return permute_systems(np.kron(proj, np.eye(db)), [da, db, db], [0, 2, 1])


def emin(rho: DensityOperator, options: SolverOptions | None = None, rel_tol: float = 1e-9,
         max_dim: int = DEFAULT_MAX_DIM, with_chain: bool = True) -> EminReport:
    """Min-unextendible entanglement of ``rho`` across its A:B cut, in bits.

    Raises :class:`SolverError` if the SDP does not converge and
    :class:`DimensionCapError` if the compressed variable is larger than
    ``max_dim``. For states built by
    :func:`unext.states.doubly_erased_private` the report also carries the
    value predicted from the private state's own min-unextendible
    entanglement (``chain_value``).
    """
    g = rho.grouped()
    da, db = rho.dims.dim_a, rho.dims.dim_b
    v = support_basis(g, rel_tol)
    r = v.shape[1]
    lifted = r * db
    if lifted > max_dim:
        raise DimensionCapError(f"lifted variable dimension {lifted} exceeds cap {max_dim}")
    proj = v @ dagger(v)
    iso = np.kron(v, np.eye(db))
    rho_r = hermitize(dagger(v) @ g @ v)
    c = hermitize(dagger(iso) @ _objective(proj, da, db) @ iso)
    problem = SdpProblem.from_constraints(c, marginal_constraints([r, db], [0], rho_r))
    sol = solve(problem, options, x0=np.kron(rho_r, np.eye(db) / db))
    if sol.status != OPTIMAL:
        raise SolverError(f"SDP finished with status {sol.status!r} after {sol.iterations} iterations", sol)

    omega = hermitize(iso @ sol.omega @ dagger(iso))
    overlap = float(min(max(sol.primal_value, 1e-300), 1.0))
    value = -0.5 * math.log2(overlap) + 0.0
    sigma_m = partial_trace(omega, [da, db, db], [0, 2])
    sigma_m = sigma_m / np.trace(sigma_m).real
    sigma = DensityOperator(sigma_m, rho.dims.permuted(rho.dims.grouping_perm()), tol=1e-6)
    residual = float(np.max(np.abs(partial_trace(omega, [da, db, db], [0, 1]) - g)))

    chain = None
    origin = rho.origin or {}
    if with_chain and origin.get("family") == "doubly_erased":
        inner = emin(origin["gamma"], options, rel_tol, max_dim)
        chain = chain_value(origin["p"], inner.value_bits)
    log.info("emin=%.10f bits overlap=%.10f iters=%d lifted=%d", value, overlap, sol.iterations, lifted)
    return EminReport(value, overlap, omega, sigma, sol.status, sol.iterations, residual, lifted, chain)


def is_super_two_extendible(rho: DensityOperator, membership_tol: float = 1e-6,
                            options: SolverOptions | None = None,
                            max_dim: int = DEFAULT_MAX_DIM) -> TwoExtSupVerdict:
    """Decide membership by whether the optimal overlap reaches 1."""
    rep = emin(rho, options, max_dim=max_dim, with_chain=False)
    leak = 1.0 - rep.overlap
    member = leak <= membership_tol
    return TwoExtSupVerdict(member, leak, rep.optimal_extension if member else None, rep)


def doubly_erased_bound(p: float, k: int) -> float:
    """−½ log₂(p/k² + 1 − p), the lower bound for a doubly erased private state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    return -0.5 * math.log2(p / k ** 2 + 1.0 - p) + 0.0


def chain_value(p: float, gamma_bits: float) -> float:
    """−½ log₂(p·2^{−2E} + 1 − p) for a private state with value E."""
    return -0.5 * math.log2(p * 2.0 ** (-2.0 * gamma_bits) + 1.0 - p) + 0.0


def witness_overlap(rho: DensityOperator, omega: np.ndarray, rel_tol: float = 1e-9) -> float:
    """Tr[Π^ρ σ] for σ = Tr_B[ω], ω ordered A, B, B'."""
    da, db = rho.dims.dim_a, rho.dims.dim_b
    sigma = partial_trace(omega, [da, db, db], [0, 2])
    return float(np.trace(support_projector(rho.grouped(), rel_tol) @ sigma).real)


def extension_residual(rho: DensityOperator, omega: np.ndarray) -> float:
    """max |Tr_{B'}[ω] − ρ| entrywise."""
    da, db = rho.dims.dim_a, rho.dims.dim_b
    return float(np.max(np.abs(partial_trace(omega, [da, db, db], [0, 1]) - rho.grouped())))


def erased_private_witness(gamma: DensityOperator, p: float, check_tol: float = 1e-10) -> np.ndarray:
    """Explicit extension ω_ABE = p γ_AB ⊗ [e]_E + (1−p) γ_AE ⊗ [e]_B.

    A is γ's A side, B and E are copies of γ's B side with one erasure level
    appended. Verifies that the AB marginal is the erased private state with
    parameter p and the AE marginal the one with 1 − p.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    da, db = gamma.dims.dim_a, gamma.dims.dim_b
    eb = ErasureEmbedding(db)
    iso = np.kron(np.eye(da), eb.isometry())
    g = iso @ gamma.grouped() @ dagger(iso)
    e = eb.erased()
    first = np.kron(g, e)
    second = permute_systems(np.kron(g, e), [da, db + 1, db + 1], [0, 2, 1])
    omega = p * first + (1 - p) * second
    dims3 = [da, db + 1, db + 1]
    ab = partial_trace(omega, dims3, [0, 1])
    ae = partial_trace(omega, dims3, [0, 2])
    err_ab = np.max(np.abs(ab - erased_private(gamma, p).matrix))
    err_ae = np.max(np.abs(ae - erased_private(gamma, 1 - p).matrix))
    if max(err_ab, err_ae) > check_tol:
        raise RuntimeError(f"witness marginals off by {max(err_ab, err_ae):.2e}")
    return omega


def fullrank_witness(rho: DensityOperator, min_eig: float = 1e-12) -> np.ndarray:
    """ρ ⊗ I/d_B as an extension on A, B, B'; requires a full-rank state."""
    lmin = hermitian_eig(rho.matrix).eigenvalues[0]
    if lmin <= min_eig:
        raise ValueError(f"state is rank deficient (minimum eigenvalue {lmin:.3e})")
    db = rho.dims.dim_b
    return kron(rho.grouped(), np.eye(db) / db)


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    omega: np.ndarray = field(repr=False)
    status: str
    residual: float
    iterations: int


def find_joint_extension(dims: Sequence[int],
                         marginals: Sequence[tuple[Sequence[int], np.ndarray]],
                         options: SolverOptions | None = None,
                         rel_tol: float = 1e-9) -> FeasibilityResult:
    """Search for a state on ``dims`` with every prescribed marginal.

    ``marginals`` lists ``(kept part indices, target operator)`` pairs. The
    search space is restricted to the intersection of the lifted supports
    of the targets, which any solution must lie in.
    """
    dims = list(dims)
    n = int(np.prod(dims))
    lifted = np.zeros((n, n), dtype=complex)
    for keep, target in marginals:
        keep = list(keep)
        rest = [i for i in range(len(dims)) if i not in keep]
        dr = int(np.prod([dims[i] for i in rest] or [1]))
        op = np.kron(support_projector(target, rel_tol), np.eye(dr))
        order = keep + rest
        lifted += permute_systems(op, [dims[i] for i in order], list(np.argsort(order)))
    w, vecs = np.linalg.eigh(hermitize(lifted))
    q = vecs[:, w > len(marginals) - 1e-6]
    if q.shape[1] == 0:
        return FeasibilityResult(np.zeros((n, n), dtype=complex), INFEASIBLE, math.inf, 0)
    constraints = []
    for keep, target in marginals:
        for a, b in marginal_constraints(dims, list(keep), target):
            constraints.append((hermitize(dagger(q) @ a @ q), b))
    problem = SdpProblem.from_constraints(np.zeros((q.shape[1], q.shape[1])), constraints)
    sol = solve(problem, options)
    omega = hermitize(q @ sol.omega @ dagger(q))
    residual = max(
        float(np.max(np.abs(partial_trace(omega, dims, keep) - target))) for keep, target in marginals)
    return FeasibilityResult(omega, sol.status, residual, sol.iterations)
