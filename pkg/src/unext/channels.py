"""Kraus-form channels: partial dephasing, flag handling, and one-way LOCC examples.

Every channel keeps the A-side parts of its output ahead of the B-side parts.
Classical flags are explicit two-level parts with ``flag=True``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DimensionMismatchError,
    Part,
    SystemDims,
    dagger,
    kron,
    partial_trace,
    permutation_matrix,
    random_unitary,
    shift_operator,
)
from .states import DensityOperator

__all__ = [
    "KrausChannel",
    "CoherenceError",
    "identity_channel",
    "partial_dephasing",
    "flag_retrieval",
    "flag_copy",
    "failure_randomize",
    "one_way_locc_examples",
]


class CoherenceError(ValueError):
    """Input carries coherence between sectors a channel is required to respect."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive trace-preserving map ``ρ ↦ Σ K ρ K†``.

    If ``sectors`` is set, each entry is a group of orthogonal input
    projectors; :meth:`apply` refuses inputs with coherence between two
    projectors of the same group.
    """

    kraus_ops: tuple[np.ndarray, ...]
    in_dims: SystemDims
    out_dims: SystemDims
    name: str = ""
    sectors: tuple[tuple[np.ndarray, ...], ...] = ()
    sector_tol: float = 1e-9

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        shape = (self.out_dims.total, self.in_dims.total)
        for k in ops:
            if k.shape != shape:
                raise DimensionMismatchError(f"Kraus operator shape {k.shape}, expected {shape}")
        completeness = sum(dagger(k) @ k for k in ops)
        err = np.max(np.abs(completeness - np.eye(shape[1])))
        if err > 1e-10:
            raise ValueError(f"Kraus operators are not complete (deviation {err:.2e})")
        object.__setattr__(self, "kraus_ops", ops)

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        return sum(k @ m @ dagger(k) for k in self.kraus_ops)

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if rho.dims.dims != self.in_dims.dims:
            raise DimensionMismatchError(
                f"channel expects dims {self.in_dims.dims}, got {rho.dims.dims}")
        for group in self.sectors:
            for i, p in enumerate(group):
                for q in group[i + 1:]:
                    c = np.max(np.abs(p @ rho.matrix @ q))
                    if c > self.sector_tol:
                        raise CoherenceError(
                            f"{self.name or 'channel'}: input has coherence {c:.2e} across sectors")
        return DensityOperator(self.apply_matrix(rho.matrix), self.out_dims, tol=1e-9)

    __call__ = apply

    def compose(self, first: "KrausChannel") -> "KrausChannel":
        """The channel ``self ∘ first``."""
        if first.out_dims.dims != self.in_dims.dims:
            raise DimensionMismatchError("output of the first channel does not feed this one")
        ops = tuple(k2 @ k1 for k2 in self.kraus_ops for k1 in first.kraus_ops)
        ops = tuple(k for k in ops if np.any(np.abs(k) > 1e-15))
        name = f"{self.name}∘{first.name}" if self.name and first.name else ""
        return KrausChannel(ops, first.in_dims, self.out_dims, name, first.sectors)

    def choi(self) -> np.ndarray:
        """Σ_ij |i><j| ⊗ N(|i><j|), input factor first."""
        vecs = np.array([k.T.reshape(-1) for k in self.kraus_ops])
        return vecs.T @ vecs.conj()

    def is_cptp(self, tol: float = 1e-9) -> bool:
        j = self.choi()
        din, dout = self.in_dims.total, self.out_dims.total
        if np.linalg.eigvalsh(0.5 * (j + dagger(j)))[0] < -tol:
            return False
        tr_out = partial_trace(j, [din, dout], [0])
        return bool(np.max(np.abs(tr_out - np.eye(din))) <= tol)


def _embed(ops: Sequence[np.ndarray], dims: SystemDims, targets: Sequence[int],
           out_parts: Sequence[Part]) -> tuple[list[np.ndarray], SystemDims]:
    """Lift local operators on ``targets`` to the whole system.

    The target parts are replaced by ``out_parts``; the output layout lists
    A-side parts before B-side parts, otherwise keeping the order
    ``out_parts`` followed by the untouched parts.
    """
    targets = list(targets)
    rest = [i for i in range(len(dims)) if i not in targets]
    p_in = permutation_matrix(dims.dims, targets + rest)
    ordered = list(out_parts) + [dims.parts[i] for i in rest]
    regroup = sorted(range(len(ordered)), key=lambda i: ordered[i].side != "A")
    p_out = permutation_matrix([p.dim for p in ordered], regroup)
    eye = np.eye(int(np.prod([dims.parts[i].dim for i in rest] or [1])))
    full = [p_out @ np.kron(k, eye) @ p_in for k in ops]
    return full, SystemDims(tuple(ordered[i] for i in regroup))


def identity_channel(dims: SystemDims) -> KrausChannel:
    return KrausChannel((np.eye(dims.total),), dims, dims, "identity")


def _ket(d: int, i: int) -> np.ndarray:
    v = np.zeros((d, 1), dtype=complex)
    v[i] = 1.0
    return v


def _erasure_part(dims: SystemDims, side: str) -> int:
    for i in dims.indices(side):
        if dims.parts[i].erasure_extended:
            return i
    raise ValueError(f"party {side} is not erasure-extended")


def _sector_projectors(dims: SystemDims, index: int) -> tuple[np.ndarray, np.ndarray]:
    d = dims.parts[index].dim
    base = np.eye(d, dtype=complex)
    base[d - 1, d - 1] = 0.0
    erased = np.eye(d, dtype=complex) - base
    lifted, _ = _embed([base, erased], dims, [index], [dims.parts[index]])
    return lifted[0], lifted[1]


def partial_dephasing(dims: SystemDims, party: str = "A") -> KrausChannel:
    """Π(·)Π + [e](·)[e] on the erasure-extended part of ``party``."""
    i = _erasure_part(dims, party)
    base, erased = _sector_projectors(dims, i)
    return KrausChannel((base, erased), dims, dims, f"partial_dephasing_{party}")


def flag_retrieval(dims: SystemDims) -> KrausChannel:
    """Local {Π, [e]} measurements; Alice records the outcome in a flag X_A.

    On the erasure outcome each party prepares a maximally mixed state on
    its base space. Output layout: X_A, A' : B'.
    """
    ia, ib = _erasure_part(dims, "A"), _erasure_part(dims, "B")
    if len(dims.a_indices) != 1 or len(dims.b_indices) != 1:
        raise ValueError("flag retrieval expects a single erasure-extended part per party")
    da, db = dims.parts[ia].base_dim, dims.parts[ib].base_dim
    keep_a = np.eye(da, da + 1)
    keep_b = np.eye(db, db + 1)
    alice = [kron(_ket(2, 1), keep_a)]
    alice += [kron(_ket(2, 0), _ket(da, a) @ dagger(_ket(da + 1, da))) / np.sqrt(da) for a in range(da)]
    bob = [keep_b] + [_ket(db, b) @ dagger(_ket(db + 1, db)) / np.sqrt(db) for b in range(db)]
    ops = [kron(ka, kb) for ka in alice for kb in bob]
    out_parts = [Part("A", 2, flag=True, name="XA"), Part("A", da, name="A'"), Part("B", db, name="B'")]
    full, out_dims = _embed(ops, dims, [ia, ib], out_parts)
    sectors = (_sector_projectors(dims, ia), _sector_projectors(dims, ib))
    return KrausChannel(tuple(full), dims, out_dims, "flag_retrieval", sectors)


def flag_copy(dims: SystemDims) -> KrausChannel:
    """Classical copy of Alice's flag X_A into a new flag X_B held by Bob."""
    ix = dims.flag_index("A")
    if ix is None:
        raise ValueError("input has no flag on Alice's side")
    ops = [kron(_ket(2, x), _ket(2, x)) @ dagger(_ket(2, x)) for x in range(2)]
    out_parts = [dims.parts[ix], Part("B", 2, flag=True, name="XB")]
    full, out_dims = _embed(ops, dims, [ix], out_parts)
    return KrausChannel(tuple(full), dims, out_dims, "flag_copy")


def _randomize_ops(d: int) -> list[np.ndarray]:
    """Kraus operators of the flag-controlled replacement on (flag ⊗ d)."""
    ops = [kron(_ket(2, 1) @ dagger(_ket(2, 1)), np.eye(d))]
    ops += [kron(_ket(2, 0) @ dagger(_ket(2, 0)), _ket(d, i) @ dagger(_ket(d, j))) / np.sqrt(d)
            for i in range(d) for j in range(d)]
    return ops


def failure_randomize(dims: SystemDims) -> KrausChannel:
    """Replace the payload by a maximally mixed state when the flag reads 0.

    With flags on both sides the replacement is done locally by each party
    and Bob's flag is discarded afterwards; with only Alice's flag the
    replacement of every non-flag part is conditioned on X_A directly.
    """
    ixa = dims.flag_index("A")
    if ixa is None:
        raise ValueError("input has no flag on Alice's side")
    ixb = dims.flag_index("B")
    payload_a = [i for i in dims.a_indices if i != ixa]
    payload_b = [i for i in dims.b_indices if i != ixb]
    dpa = int(np.prod([dims.parts[i].dim for i in payload_a] or [1]))
    dpb = int(np.prod([dims.parts[i].dim for i in payload_b] or [1]))
    if ixb is None:
        targets = [ixa] + payload_a + payload_b
        ops = _randomize_ops(dpa * dpb)
        out_parts = [dims.parts[i] for i in targets]
        full, out_dims = _embed(ops, dims, targets, out_parts)
        return KrausChannel(tuple(full), dims, out_dims, "failure_randomize")
    targets = [ixa] + payload_a + [ixb] + payload_b
    discard_xb = [kron(dagger(_ket(2, x)), np.eye(dpb)) for x in range(2)]
    ops = [kron(ka, kd @ kb) for ka in _randomize_ops(dpa)
           for kb in _randomize_ops(dpb) for kd in discard_xb]
    ops = [k for k in ops if np.any(np.abs(k) > 1e-15)]
    out_parts = [dims.parts[i] for i in [ixa] + payload_a + payload_b]
    full, out_dims = _embed(ops, dims, targets, out_parts)
    return KrausChannel(tuple(full), dims, out_dims, "failure_randomize")


def one_way_locc_examples(dims: SystemDims, seed: int = 7) -> list[KrausChannel]:
    """A fixed catalogue of one-way LOCC channels applicable to ``dims``.

    * ``measure_and_shift``: Alice measures in the computational basis, keeps
      the outcome x, Bob applies the shift X^x.
    * ``weak_povm``: Alice performs a two-outcome unsharp measurement, keeps
      the post-measurement state and writes x into a new register; Bob
      applies X^x.
    * ``local_unitaries``: fixed Haar-random U_A ⊗ U_B.
    * ``discard_last_a``: Alice discards her last part, leaving |0>.
    * ``flag_protocol``: flag retrieval, flag copy and failure
      randomization in sequence (erasure-extended inputs only).
    """
    rng = np.random.default_rng(seed)
    a_idx, b_idx = list(dims.a_indices), list(dims.b_indices)
    da, db = dims.dim_a, dims.dim_b
    parts_ab = [dims.parts[i] for i in a_idx + b_idx]
    catalogue = []

    ops = [kron(_ket(da, x) @ dagger(_ket(da, x)), shift_operator(db, x)) for x in range(da)]
    full, out = _embed(ops, dims, a_idx + b_idx, parts_ab)
    catalogue.append(KrausChannel(tuple(full), dims, out, "measure_and_shift"))

    e0 = np.linspace(0.8, 0.2, da)
    m0, m1 = np.diag(np.sqrt(e0)), np.diag(np.sqrt(1 - e0))
    ops = [kron(_ket(2, x), mx, shift_operator(db, x)) for x, mx in enumerate((m0, m1))]
    full, out = _embed(ops, dims, a_idx + b_idx, [Part("A", 2, name="R")] + parts_ab)
    catalogue.append(KrausChannel(tuple(full), dims, out, "weak_povm"))

    u = kron(random_unitary(da, rng), random_unitary(db, rng))
    full, out = _embed([u], dims, a_idx + b_idx, parts_ab)
    catalogue.append(KrausChannel(tuple(full), dims, out, "local_unitaries"))

    last = a_idx[-1]
    dl = dims.parts[last].dim
    ops = [_ket(dl, 0) @ dagger(_ket(dl, j)) for j in range(dl)]
    full, out = _embed(ops, dims, [last], [dims.parts[last]])
    catalogue.append(KrausChannel(tuple(full), dims, out, "discard_last_a"))

    erasure_ready = (len(a_idx) == 1 and len(b_idx) == 1
                     and dims.parts[a_idx[0]].erasure_extended
                     and dims.parts[b_idx[0]].erasure_extended)
    if erasure_ready:
        retrieve = flag_retrieval(dims)
        copy = flag_copy(retrieve.out_dims)
        randomize = failure_randomize(copy.out_dims)
        protocol = randomize.compose(copy.compose(retrieve))
        catalogue.append(KrausChannel(protocol.kraus_ops, dims, protocol.out_dims, "flag_protocol",
                                      retrieve.sectors))
    return catalogue
