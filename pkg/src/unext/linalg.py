"""Dense complex linear algebra on small composite quantum systems.

Operators are plain ``numpy`` arrays of dtype ``complex128``. Subsystem
structure lives in :class:`SystemDims`, an ordered tuple of :class:`Part`
records, each tagged with the party (``"A"`` or ``"B"``) holding it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Part",
    "SystemDims",
    "HermitianEig",
    "DimensionMismatchError",
    "NotPSDError",
    "as_matrix",
    "kron",
    "dagger",
    "hermitize",
    "hermitian_eig",
    "permute_systems",
    "permutation_matrix",
    "partial_trace",
    "support_projector",
    "support_basis",
    "purify",
    "hermitian_basis",
    "shift_operator",
    "random_unitary",
]


class DimensionMismatchError(ValueError):
    """Operator shape does not agree with the declared subsystem dimensions."""


class NotPSDError(ValueError):
    """Operator has an eigenvalue significantly below zero."""


@dataclass(frozen=True)
class Part:
    """One tensor factor of a composite system.

    ``dim`` always counts the full local dimension. When ``erasure_extended``
    is set, the last basis level (index ``dim - 1``) is the erasure symbol and
    the remaining ``dim - 1`` levels form the base space. ``flag`` marks a
    classical two-level success/failure register.
    """

    side: str
    dim: int
    erasure_extended: bool = False
    flag: bool = False
    name: str = ""

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise ValueError(f"side must be 'A' or 'B', got {self.side!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if self.erasure_extended and self.dim < 2:
            raise ValueError("an erasure-extended part needs at least one base level")
        if self.flag and self.dim != 2:
            raise ValueError("flag registers are two-dimensional")

    @property
    def base_dim(self) -> int:
        return self.dim - 1 if self.erasure_extended else self.dim


@dataclass(frozen=True)
class SystemDims:
    """Ordered subsystem layout of an operator, with the A:B cut marked."""

    parts: tuple[Part, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("SystemDims needs at least one part")

    @classmethod
    def bipartite(cls, dim_a: int | Sequence[int], dim_b: int | Sequence[int],
                  erasure_a: bool = False, erasure_b: bool = False) -> "SystemDims":
        """Layout with the given A-side dims followed by the B-side dims.

        Erasure flags apply to the last part on the respective side.
        """
        da = [dim_a] if np.isscalar(dim_a) else list(dim_a)
        db = [dim_b] if np.isscalar(dim_b) else list(dim_b)
        parts = [Part("A", int(d), erasure_a and i == len(da) - 1) for i, d in enumerate(da)]
        parts += [Part("B", int(d), erasure_b and i == len(db) - 1) for i, d in enumerate(db)]
        return cls(tuple(parts))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(p.dim for p in self.parts)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.parts)

    def indices(self, side: str) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.parts) if p.side == side)

    @property
    def a_indices(self) -> tuple[int, ...]:
        return self.indices("A")

    @property
    def b_indices(self) -> tuple[int, ...]:
        return self.indices("B")

    def side_dim(self, side: str) -> int:
        return int(np.prod([self.parts[i].dim for i in self.indices(side)] or [1]))

    @property
    def dim_a(self) -> int:
        return self.side_dim("A")

    @property
    def dim_b(self) -> int:
        return self.side_dim("B")

    @property
    def is_grouped(self) -> bool:
        """True when every A-side part precedes every B-side part."""
        sides = [p.side for p in self.parts]
        return sides == sorted(sides)

    def grouping_perm(self) -> tuple[int, ...]:
        return self.a_indices + self.b_indices

    def flag_index(self, side: str) -> int | None:
        for i, p in enumerate(self.parts):
            if p.side == side and p.flag:
                return i
        return None

    def select(self, keep: Iterable[int]) -> "SystemDims":
        return SystemDims(tuple(self.parts[i] for i in keep))

    def permuted(self, perm: Sequence[int]) -> "SystemDims":
        return SystemDims(tuple(self.parts[i] for i in perm))

    def check(self, m: np.ndarray) -> None:
        if m.shape != (self.total, self.total):
            raise DimensionMismatchError(
                f"operator shape {m.shape} does not match subsystem dims {self.dims}")

    def with_part(self, index: int, **changes) -> "SystemDims":
        parts = list(self.parts)
        parts[index] = replace(parts[index], **changes)
        return SystemDims(tuple(parts))


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    """Square complex array with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def kron(*ops) -> np.ndarray:
    """Kronecker product of any number of operators, left to right."""
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def hermitian_eig(h: np.ndarray) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    w, v = np.linalg.eigh(hermitize(as_matrix(h)))
    return HermitianEig(w, v)


def permutation_matrix(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Unitary ``P`` with ``P (v_0 ⊗ v_1 ⊗ ...) = v_perm[0] ⊗ v_perm[1] ⊗ ...``."""
    dims = list(dims)
    n = int(np.prod(dims))
    idx = np.arange(n).reshape(dims).transpose(perm).reshape(n)
    p = np.zeros((n, n), dtype=complex)
    p[np.arange(n), idx] = 1.0
    return p


def permute_systems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of operator ``m``; new factor ``i`` is old ``perm[i]``."""
    dims = list(dims)
    k = len(dims)
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise DimensionMismatchError(f"operator shape {m.shape} does not match dims {dims}")
    t = m.reshape(dims + dims)
    t = t.transpose(list(perm) + [k + p for p in perm])
    return t.reshape(n, n)


def partial_trace(m: np.ndarray, dims: SystemDims | Sequence[int],
                  keep: Iterable[int]) -> np.ndarray:
    """Reduced operator on the parts listed in ``keep`` (returned in original order)."""
    dim_list = list(dims.dims if isinstance(dims, SystemDims) else dims)
    m = np.asarray(m)
    n = int(np.prod(dim_list))
    if m.shape != (n, n):
        raise DimensionMismatchError(f"operator shape {m.shape} does not match dims {dim_list}")
    keep = sorted(set(keep))
    k = len(dim_list)
    if any(i < 0 or i >= k for i in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {k} parts")
    traced = [i for i in range(k) if i not in keep]
    t = m.reshape(dim_list + dim_list)
    # contract each traced ket index with its bra index
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = list(letters[:k])
    col = list(letters[k:2 * k])
    for i in traced:
        col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    r = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dim_list[i] for i in keep]))
    return r.reshape(dk, dk)


def _check_psd(w: np.ndarray, h_scale: float) -> None:
    if w.size and w[0] < -1e-8 * max(h_scale, 1e-300):
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} is significantly negative")


def support_basis(h: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal columns spanning the support of a PSD matrix."""
    w, v = hermitian_eig(h)
    lmax = float(w[-1]) if w.size else 0.0
    _check_psd(w, abs(lmax))
    if lmax <= 0:
        return v[:, :0]
    return v[:, w > rel_tol * lmax]


def support_projector(h: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Projector onto the eigenvectors with eigenvalue above ``rel_tol * λ_max``."""
    v = support_basis(h, rel_tol)
    return v @ dagger(v)


def purify(rho, rel_tol: float = 1e-12) -> np.ndarray:
    """State vector on system ⊗ reference whose system marginal is ``rho``.

    The reference dimension equals the numerical rank of ``rho``.
    """
    m = rho.matrix if hasattr(rho, "matrix") else as_matrix(rho)
    w, v = hermitian_eig(m)
    keep = w > rel_tol * max(w[-1], 0.0)
    w, v = w[keep], v[:, keep]
    r = len(w)
    # |psi> = sum_i sqrt(w_i) |v_i> ⊗ |i>
    psi = (v * np.sqrt(w)[None, :]).reshape(-1, r)
    return psi.reshape(-1)


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of d×d Hermitian matrices, shape (d², d, d).

    Diagonal units first, then symmetric and antisymmetric off-diagonal pairs.
    """
    basis = np.zeros((d * d, d, d), dtype=complex)
    k = 0
    for i in range(d):
        basis[k, i, i] = 1.0
        k += 1
    s = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            basis[k, i, j] = basis[k, j, i] = s
            k += 1
            basis[k, i, j] = -1j * s
            basis[k, j, i] = 1j * s
            k += 1
    return basis


def shift_operator(d: int, power: int = 1) -> np.ndarray:
    """Generalized shift ``X^power``: |j> -> |j + power mod d>."""
    x = np.zeros((d, d), dtype=complex)
    for j in range(d):
        x[(j + power) % d, j] = 1.0
    return x


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]
