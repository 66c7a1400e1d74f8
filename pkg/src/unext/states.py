"""Bipartite state families: maximally entangled, private, erased, Werner, isotropic.

Erasure is modelled with one extra basis level per party: a side carrying the
erasure symbol is collapsed to a single part of dimension ``base + 1`` whose
last index is the erased level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .linalg import (
    Part,
    SystemDims,
    as_matrix,
    dagger,
    kron,
    partial_trace,
    permute_systems,
    random_unitary,
    shift_operator,
)

__all__ = [
    "DensityOperator",
    "PrivateStateSpec",
    "ErasureEmbedding",
    "max_entangled",
    "private_state",
    "mixed_shield_private_state",
    "untwist",
    "doubly_erased_private",
    "erased_private",
    "erased_state",
    "swap_operator",
    "symmetric_projector",
    "antisymmetric_projector",
    "werner_state",
    "isotropic_state",
    "product_state",
    "random_full_rank",
    "tensor",
]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A quantum state with its subsystem layout.

    ``origin`` optionally records how the state was built (family name and
    parameters); :func:`unext.unextendible.emin` uses it to report derived
    values for known constructions.
    """

    matrix: np.ndarray
    dims: SystemDims
    origin: Mapping[str, Any] | None = None
    tol: float = 1e-10

    def __post_init__(self):
        m = as_matrix(self.matrix)
        self.dims.check(m)
        if np.max(np.abs(m - dagger(m)), initial=0.0) > max(self.tol, 1e-12):
            raise ValueError("density operator is not Hermitian")
        m = 0.5 * (m + dagger(m))
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.tol:
            raise ValueError(f"density operator has trace {tr:.12g}, expected 1")
        lmin = np.linalg.eigvalsh(m)[0]
        if lmin < -self.tol:
            raise ValueError(f"density operator has negative eigenvalue {lmin:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def grouped(self) -> np.ndarray:
        """Matrix with every A-side part moved before every B-side part."""
        if self.dims.is_grouped:
            return self.matrix
        return permute_systems(self.matrix, self.dims.dims, self.dims.grouping_perm())

    def marginal(self, side: str) -> np.ndarray:
        return partial_trace(self.matrix, self.dims, self.dims.indices(side))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, rel_tol: float = 1e-9) -> int:
        w = self.eigenvalues()
        return int(np.sum(w > rel_tol * w[-1]))


@dataclass(frozen=True)
class PrivateStateSpec:
    """Key dimension, shield layout, twisting unitaries and shield state.

    The twists act on the joint shield ``A1 ⊗ B1``. When ``twist_unitaries``
    is omitted the shifts ``X^i`` on the shield are used; when
    ``shield_state`` is omitted the shield holds a maximally entangled state
    (or ``|00>`` if the two shield dimensions differ).
    """

    k: int = 2
    shield_dims: tuple[int, int] = (2, 2)
    twist_unitaries: Sequence[np.ndarray] | None = None
    shield_state: np.ndarray | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("key dimension k must be at least 2")
        da1, db1 = self.shield_dims
        ds = da1 * db1
        twists = self.twist_unitaries
        if twists is None:
            twists = [shift_operator(ds, i) for i in range(self.k)]
        twists = tuple(as_matrix(u) for u in twists)
        if len(twists) != self.k:
            raise ValueError(f"need exactly k={self.k} twist unitaries, got {len(twists)}")
        for u in twists:
            if u.shape != (ds, ds):
                raise ValueError(f"twist unitary has shape {u.shape}, shield is {ds}-dimensional")
            if np.max(np.abs(dagger(u) @ u - np.eye(ds))) > 1e-10:
                raise ValueError("twist matrix is not unitary")
        object.__setattr__(self, "twist_unitaries", twists)
        omega = self.shield_state
        if omega is None:
            if da1 == db1:
                omega = max_entangled(da1).matrix if da1 > 1 else np.ones((1, 1))
            else:
                omega = np.zeros((ds, ds))
                omega[0, 0] = 1.0
        omega = DensityOperator(as_matrix(omega), SystemDims.bipartite(da1, db1)).matrix
        object.__setattr__(self, "shield_state", omega)


@dataclass(frozen=True)
class ErasureEmbedding:
    """Embedding of a ``base_dim`` space into ``base_dim + 1`` levels."""

    base_dim: int

    @property
    def erased_index(self) -> int:
        return self.base_dim

    @property
    def dim(self) -> int:
        return self.base_dim + 1

    def erased(self) -> np.ndarray:
        e = np.zeros((self.dim, self.dim), dtype=complex)
        e[self.base_dim, self.base_dim] = 1.0
        return e

    def base_projector(self) -> np.ndarray:
        p = np.eye(self.dim, dtype=complex)
        p[self.base_dim, self.base_dim] = 0.0
        return p

    def isometry(self) -> np.ndarray:
        """``dim × base_dim`` inclusion of the base space."""
        return np.eye(self.dim, self.base_dim, dtype=complex)


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def _check_d(d: int) -> int:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def _bipartite_single(dim_a: int, dim_b: int, erasure_a=False, erasure_b=False) -> SystemDims:
    return SystemDims((Part("A", dim_a, erasure_a, name="A"), Part("B", dim_b, erasure_b, name="B")))


def max_entangled(d: int) -> DensityOperator:
    """Projector onto (1/√d) Σ_i |ii>."""
    d = _check_d(d)
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return DensityOperator(np.outer(v, v.conj()), _bipartite_single(d, d),
                           origin={"family": "max_entangled", "d": d})


def private_state(spec: PrivateStateSpec) -> DensityOperator:
    """Twisted maximally correlated key on ``A0 A1 B0 B1``."""
    k = spec.k
    da1, db1 = spec.shield_dims
    omega = spec.shield_state
    u = spec.twist_unitaries
    ds = da1 * db1
    # build on A0 B0 (A1 B1), then reorder to A0 A1 B0 B1
    m = np.zeros((k * k * ds, k * k * ds), dtype=complex)
    for i in range(k):
        for j in range(k):
            key = np.zeros((k * k, k * k), dtype=complex)
            key[i * (k + 1), j * (k + 1)] = 1.0
            m += kron(key, u[i] @ omega @ dagger(u[j])) / k
    m = permute_systems(m, [k, k, da1, db1], [0, 2, 1, 3])
    dims = SystemDims((Part("A", k, name="A0"), Part("A", da1, name="A1"),
                       Part("B", k, name="B0"), Part("B", db1, name="B1")))
    return DensityOperator(m, dims, origin={"family": "private", "k": k, "spec": spec})


def mixed_shield_private_state(weight: float = 0.7) -> DensityOperator:
    """k = 2 private state whose 2⊗2 shield holds weight·Φ + (1 − weight)·|01><01|."""
    weight = _check_prob(weight, "weight")
    shield = weight * max_entangled(2).matrix
    shield[1, 1] += 1.0 - weight
    return private_state(PrivateStateSpec(shield_state=shield))


def untwist(gamma: DensityOperator, spec: PrivateStateSpec) -> np.ndarray:
    """Apply Σ_i [i]_{A0} ⊗ U_i† on the shield; returns a matrix on A0 B0 A1 B1."""
    k = spec.k
    da1, db1 = spec.shield_dims
    m = permute_systems(gamma.matrix, [k, da1, k, db1], [0, 2, 1, 3])
    ctrl = sum(kron(np.diag(np.eye(k)[i]), np.eye(k), dagger(spec.twist_unitaries[i]))
               for i in range(k))
    return ctrl @ m @ dagger(ctrl)


def doubly_erased_private(gamma: DensityOperator, p: float) -> DensityOperator:
    """p γ + (1 − p) [e]_A ⊗ [e]_B on erasure-extended A and B."""
    p = _check_prob(p)
    da, db = gamma.dims.dim_a, gamma.dims.dim_b
    ea, eb = ErasureEmbedding(da), ErasureEmbedding(db)
    iso = kron(ea.isometry(), eb.isometry())
    m = p * iso @ gamma.grouped() @ dagger(iso) + (1 - p) * kron(ea.erased(), eb.erased())
    return DensityOperator(m, _bipartite_single(da + 1, db + 1, True, True),
                           origin={"family": "doubly_erased", "p": p, "gamma": gamma})


def erased_private(gamma: DensityOperator, p: float) -> DensityOperator:
    """p γ + (1 − p) Tr_B[γ] ⊗ [e]_B with only B erasure-extended."""
    p = _check_prob(p)
    da, db = gamma.dims.dim_a, gamma.dims.dim_b
    eb = ErasureEmbedding(db)
    iso = kron(np.eye(da), eb.isometry())
    g = gamma.grouped()
    gamma_a = partial_trace(g, [da, db], [0])
    m = p * iso @ g @ dagger(iso) + (1 - p) * kron(gamma_a, eb.erased())
    return DensityOperator(m, _bipartite_single(da, db + 1, False, True),
                           origin={"family": "erased_private", "p": p, "gamma": gamma})


def erased_state(p: float, d: int) -> DensityOperator:
    """p Φ^d + (1 − p) I/d ⊗ [e]_B."""
    rho = erased_private(max_entangled(d), p)
    return DensityOperator(rho.matrix, rho.dims, origin={"family": "erased", "p": float(p), "d": d})


def swap_operator(d: int) -> np.ndarray:
    """F = Σ_ij |i><j| ⊗ |j><i|."""
    d = _check_d(d)
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def symmetric_projector(d: int) -> np.ndarray:
    return 0.5 * (np.eye(d * d) + swap_operator(d))


def antisymmetric_projector(d: int) -> np.ndarray:
    return 0.5 * (np.eye(d * d) - swap_operator(d))


def werner_state(p: float, d: int) -> DensityOperator:
    """p (I+F)/(d(d+1)) + (1−p)(I−F)/(d(d−1))."""
    p = _check_prob(p)
    d = _check_d(d)
    eye, f = np.eye(d * d), swap_operator(d)
    m = p * (eye + f) / (d * (d + 1)) + (1 - p) * (eye - f) / (d * (d - 1))
    return DensityOperator(m, _bipartite_single(d, d), origin={"family": "werner", "p": p, "d": d})


def isotropic_state(f: float, d: int) -> DensityOperator:
    """F Φ^d + (1−F)(I − Φ^d)/(d²−1)."""
    f = _check_prob(f, "f")
    d = _check_d(d)
    phi = max_entangled(d).matrix
    m = f * phi + (1 - f) * (np.eye(d * d) - phi) / (d * d - 1)
    return DensityOperator(m, _bipartite_single(d, d), origin={"family": "isotropic", "f": f, "d": d})


def product_state(rho_a: np.ndarray, tau_b: np.ndarray) -> DensityOperator:
    rho_a, tau_b = as_matrix(rho_a), as_matrix(tau_b)
    return DensityOperator(kron(rho_a, tau_b), _bipartite_single(rho_a.shape[0], tau_b.shape[0]),
                           origin={"family": "product"})


def random_full_rank(dim_a: int, dim_b: int, rng: np.random.Generator,
                     floor: float = 1e-3) -> DensityOperator:
    """Haar-rotated diagonal state with Dirichlet eigenvalues bounded below by ``floor``."""
    n = dim_a * dim_b
    w = floor + (1.0 - n * floor) * rng.dirichlet(np.ones(n))
    u = random_unitary(n, rng)
    m = (u * w[None, :]) @ dagger(u)
    return DensityOperator(m, _bipartite_single(dim_a, dim_b), origin={"family": "random_full_rank"})


def tensor(rho: DensityOperator, sigma: DensityOperator) -> DensityOperator:
    """ρ ⊗ σ with the cut A1A2 : B1B2."""
    m = kron(rho.grouped(), sigma.grouped())
    da1, db1 = rho.dims.dim_a, rho.dims.dim_b
    da2, db2 = sigma.dims.dim_a, sigma.dims.dim_b
    m = permute_systems(m, [da1, db1, da2, db2], [0, 2, 1, 3])
    dims = SystemDims((Part("A", da1, name="A1"), Part("A", da2, name="A2"),
                       Part("B", db1, name="B1"), Part("B", db2, name="B2")))
    return DensityOperator(m, dims, origin={"family": "tensor", "factors": (rho, sigma)})
