"""Dense primal-dual interior-point solver for small complex Hermitian SDPs.

Problems have the form::

    maximize    Tr[C ω]
    subject to  Tr[A_i ω] = b_i,   i = 1..m
                ω ⪰ 0              (ω Hermitian n×n)

with dual ``minimize bᵀy  s.t.  Σ y_i A_i − C ⪰ 0``.

The iteration is an infeasible-start path-following method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step. The Schur
complement ``M_ij = Tr[A_i W A_j W]`` is factored once per iteration and
reused for both the predictor and the corrector solve. Linearly dependent
constraints are removed up front; an inconsistent dependent pair is
reported as infeasible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg as sla

from .linalg import dagger, hermitian_basis, hermitize, permute_systems

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "SolverOptions",
    "solve",
    "marginal_constraints",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
    "MAX_ITERS",
]

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
MAX_ITERS = "max_iters"


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """Maximize ``Tr[C ω]`` over ``ω ⪰ 0`` subject to ``Tr[A_i ω] = b_i``."""

    objective: np.ndarray
    constraint_ops: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=complex)
        a = np.asarray(self.constraint_ops, dtype=complex)
        b = np.asarray(self.rhs, dtype=float).reshape(-1)
        n = c.shape[0]
        if c.shape != (n, n):
            raise ValueError("objective must be square")
        if a.ndim != 3 or a.shape[1:] != (n, n):
            raise ValueError(f"constraint operators must have shape (m, {n}, {n})")
        if a.shape[0] == 0:
            raise ValueError("at least one equality constraint is required")
        if a.shape[0] != b.shape[0]:
            raise ValueError("one right-hand side per constraint operator")
        scale = max(1.0, np.max(np.abs(c)), np.max(np.abs(a)))
        if np.max(np.abs(c - dagger(c))) > 1e-12 * scale:
            raise ValueError("objective is not Hermitian")
        if np.max(np.abs(a - dagger(a))) > 1e-12 * scale:
            raise ValueError("constraint operators are not Hermitian")
        object.__setattr__(self, "objective", hermitize(c))
        object.__setattr__(self, "constraint_ops", hermitize(a))
        object.__setattr__(self, "rhs", b)

    @classmethod
    def from_constraints(cls, objective, eq_constraints: Iterable[tuple[np.ndarray, float]]):
        pairs = list(eq_constraints)
        ops = np.array([p[0] for p in pairs], dtype=complex)
        rhs = np.array([p[1] for p in pairs], dtype=float)
        return cls(objective, ops, rhs)

    @property
    def var_dim(self) -> int:
        return self.objective.shape[0]

    @property
    def n_constraints(self) -> int:
        return self.rhs.shape[0]

    def apply_constraints(self, omega: np.ndarray) -> np.ndarray:
        """Vector of ``Tr[A_i ω]``."""
        return np.einsum("kab,ba->k", self.constraint_ops, omega).real

    def residual(self, omega: np.ndarray) -> float:
        return float(np.max(np.abs(self.apply_constraints(omega) - self.rhs)))


@dataclass
class SolverOptions:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iters: int = 200
    step_fraction: float = 0.98
    dependency_tol: float = 1e-10
    consistency_tol: float = 1e-7
    trace_file: str | None = None


@dataclass(frozen=True, eq=False)
class SdpSolution:
    omega: np.ndarray
    primal_value: float
    dual_value: float
    status: str
    iterations: int
    dual_vector: np.ndarray = field(repr=False)
    dual_slack: np.ndarray = field(repr=False)
    primal_residual: float = np.nan
    dual_residual: float = np.nan

    @property
    def gap(self) -> float:
        return abs(self.primal_value - self.dual_value)

    @property
    def complementarity(self) -> float:
        return float(np.trace(self.omega @ self.dual_slack).real)


def marginal_constraints(dims: Sequence[int], keep: Sequence[int],
                         target: np.ndarray) -> list[tuple[np.ndarray, float]]:
    """Real-linear constraints equivalent to ``Tr_{not keep}[ω] = target``.

    One constraint ``Tr[(H_k ⊗ I) ω] = Tr[H_k target]`` per element ``H_k`` of
    an orthonormal Hermitian basis of the kept space, so ``(Π_keep d_i)²`` in
    total.
    """
    dims = list(dims)
    keep = list(keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    dr = int(np.prod([dims[i] for i in rest] or [1]))
    target = np.asarray(target, dtype=complex)
    if target.shape != (dk, dk):
        raise ValueError(f"target has shape {target.shape}, kept space is {dk}-dimensional")
    order = keep + rest
    back = list(np.argsort(order))
    ordered_dims = [dims[i] for i in order]
    out = []
    eye = np.eye(dr)
    for h in hermitian_basis(dk):
        op = np.kron(h, eye)
        if order != list(range(len(dims))):
            op = permute_systems(op, ordered_dims, back)
        out.append((op, float(np.trace(h @ target).real)))
    return out


def _reduce_constraints(a: np.ndarray, b: np.ndarray, opts: SolverOptions):
    """Orthonormalize the constraint operators and drop dependent ones.

    Returns (A_red, b_red, T, inconsistency) with ``A_red_k = Σ_i T_ik A_i``.
    """
    gram = np.einsum("iab,jba->ij", a, a).real
    g, u = np.linalg.eigh(0.5 * (gram + gram.T))
    keep = g > opts.dependency_tol * max(g[-1], 1e-300)
    t = u[:, keep] / np.sqrt(g[keep])[None, :]
    a_red = np.einsum("ik,iab->kab", t, a)
    b_red = t.T @ b
    null = u[:, ~keep]
    inconsistency = float(np.linalg.norm(null.T @ b)) if null.size else 0.0
    return a_red, b_red, t, inconsistency


def _chol(m: np.ndarray) -> np.ndarray | None:
    try:
        return np.linalg.cholesky(hermitize(m))
    except np.linalg.LinAlgError:
        return None


def _max_step(chol_factor: np.ndarray, d: np.ndarray) -> float:
    """Largest α ≤ 1 keeping L L† + α d positive semidefinite."""
    li = sla.solve_triangular(chol_factor, d, lower=True)
    s = sla.solve_triangular(chol_factor, dagger(li), lower=True)
    lmin = np.linalg.eigvalsh(hermitize(s))[0]
    return 1.0 if lmin >= 0 else min(1.0, -1.0 / lmin)


def solve(problem: SdpProblem, options: SolverOptions | None = None,
          x0: np.ndarray | None = None) -> SdpSolution:
    """Solve ``problem``; deterministic for fixed inputs and options.

    ``x0`` optionally supplies a positive definite starting primal point.
    """
    opts = options or SolverOptions()
    n = problem.var_dim
    c_max = problem.objective
    cm = -c_max  # internal form minimizes <cm, X>
    a_full, b_full = problem.constraint_ops, problem.rhs
    a, b, t, inconsistency = _reduce_constraints(a_full, b_full, opts)
    m = a.shape[0]
    eye = np.eye(n, dtype=complex)

    def aop(x):
        return np.einsum("kab,ba->k", a, x).real

    def aadj(y):
        return np.einsum("k,kab->ab", y, a)

    def pack(x, y_m, z, status, it, pinf=np.nan, dinf=np.nan):
        x = hermitize(x)
        y = -(t @ y_m)
        return SdpSolution(
            omega=x,
            primal_value=float(np.trace(c_max @ x).real),
            dual_value=float(b_full @ y),
            status=status,
            iterations=it,
            dual_vector=y,
            dual_slack=hermitize(z),
            primal_residual=pinf,
            dual_residual=dinf,
        )

    if inconsistency > opts.consistency_tol * (1.0 + np.linalg.norm(b_full)):
        log.info("linearly dependent constraints with inconsistent right-hand sides")
        return pack(np.zeros((n, n)), np.zeros(m), np.zeros((n, n)), INFEASIBLE, 0)

    norm_b = np.linalg.norm(b)
    norm_c = np.linalg.norm(cm)
    if x0 is not None:
        x = hermitize(np.asarray(x0, dtype=complex))
    else:
        xi = max(10.0, np.sqrt(n), n * np.max((1.0 + np.abs(b)) / 2.0))
        x = xi * eye
    eta = max(10.0, np.sqrt(n), norm_c)
    z = eta * eye
    y = np.zeros(m)

    trace = open(opts.trace_file, "w") if opts.trace_file else None
    status = MAX_ITERS
    it = 0
    pinf = dinf = np.inf
    try:
        for it in range(opts.max_iters + 1):
            rp = b - aop(x)
            rd = cm - z - aadj(y)
            pobj = float(np.trace(cm @ x).real)
            dobj = float(b @ y)
            compl = float(np.trace(x @ z).real)
            mu = compl / n
            pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
            dinf = float(np.linalg.norm(rd)) / (1.0 + norm_c)
            relgap = abs(pobj - dobj) / (1.0 + abs(pobj))
            relcompl = abs(compl) / (1.0 + abs(pobj))
            log.debug("iter %3d pobj % .10e dobj % .10e gap %.2e pinf %.2e dinf %.2e",
                      it, -pobj, -dobj, relgap, pinf, dinf)
            if trace:
                trace.write(f"{it} {-pobj:.15e} {-dobj:.15e} {relgap:.3e} {pinf:.3e} {dinf:.3e} {mu:.3e}\n")
            if max(relgap, relcompl) <= opts.gap_tol and pinf <= opts.feas_tol and dinf <= opts.feas_tol:
                status = OPTIMAL
                break
            if _primal_infeasible(a, b, y, pinf, opts):
                status = INFEASIBLE
                break
            if _dual_infeasible(cm, aop, x, pobj, dinf, opts):
                status = UNBOUNDED
                break
            if it == opts.max_iters:
                break

            lx, lz = _chol(x), _chol(z)
            if lx is None or lz is None:
                log.info("lost positive definiteness at iteration %d", it)
                break
            # Nesterov-Todd scaling: G G† = W, G⁻¹ X G⁻† = G† Z G = diag(s)
            u_, s, vh = np.linalg.svd(dagger(lz) @ lx)
            g = lx @ dagger(vh) / np.sqrt(s)[None, :]
            g_inv = (np.sqrt(s)[:, None] * vh) @ sla.solve_triangular(lx, eye, lower=True)
            w = g @ dagger(g)

            waw = w[None, :, :] @ a @ w[None, :, :]
            schur = np.einsum("iab,jba->ij", a, waw).real
            schur = 0.5 * (schur + schur.T)
            try:
                cf = sla.cho_factor(schur)
            except np.linalg.LinAlgError:
                cf = sla.cho_factor(schur + 1e-12 * np.trace(schur) / m * np.eye(m))
            wrdw = w @ rd @ w
            base_rhs = rp + aop(wrdw)

            def direction(rc):
                dy = sla.cho_solve(cf, base_rhs - aop(rc))
                dz = hermitize(rd - aadj(dy))
                dx = hermitize(rc - w @ dz @ w)
                return dx, dy, dz

            dx, dy, dz = direction(-x)
            ap = _max_step(lx, dx)
            ad = _max_step(lz, dz)
            mu_aff = float(np.trace((x + ap * dx) @ (z + ad * dz)).real) / n
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

            dxs = g_inv @ dx @ dagger(g_inv)
            dzs = dagger(g) @ dz @ g
            rhs = 2.0 * sigma * mu * eye - 2.0 * np.diag(s * s) - (dxs @ dzs + dzs @ dxs)
            rs = rhs / (s[:, None] + s[None, :])
            dx, dy, dz = direction(hermitize(g @ rs @ dagger(g)))

            ap = min(1.0, opts.step_fraction * _max_step(lx, dx))
            ad = min(1.0, opts.step_fraction * _max_step(lz, dz))
            x = hermitize(x + ap * dx)
            y = y + ad * dy
            z = hermitize(z + ad * dz)
    finally:
        if trace:
            trace.close()

    return pack(x, y, z, status, it, pinf, dinf)


def _primal_infeasible(a, b, y_m, pinf, opts) -> bool:
    """Farkas test: bᵀy > 0 with −Σ y_i A_i ⪰ 0 certifies primal infeasibility."""
    by = float(b @ y_m)
    if pinf <= opts.feas_tol or by <= 0 or np.linalg.norm(y_m) < 1e6:
        return False
    s = -np.einsum("k,kab->ab", y_m / by, a)
    lmin = np.linalg.eigvalsh(hermitize(s))[0]
    return lmin >= -1e-8 * max(1.0, np.linalg.norm(s))


def _dual_infeasible(cm, aop, x, pobj, dinf, opts) -> bool:
    """A recession direction X ⪰ 0 with A(X) ≈ 0 and <C, X> < 0."""
    if dinf <= opts.feas_tol or pobj >= 0 or np.trace(x).real < 1e6:
        return False
    xc = x / -pobj
    return float(np.linalg.norm(aop(xc))) <= 1e-8 * max(1.0, np.linalg.norm(xc))
