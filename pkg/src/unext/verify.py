"""Batch suites that check the library's structural results numerically.

Each suite produces a :class:`TheoremReport` listing its cases with measured
value, target and slack. A case passes iff its slack is non-negative, where
the slack is measured against the suite tolerance and the case relation:

* ``eq``:  ``tol − |measured − target|``
* ``ge``:  ``measured − (target − tol)``
* ``le``:  ``(target + tol) − measured``

Solver failures and other exceptions are caught per case and recorded as
failing cases; a suite never aborts the run.
"""

from __future__ import annotations

import contextlib
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .channels import failure_randomize, flag_copy, one_way_locc_examples, partial_dephasing
from .entropy import (
    coherent_information,
    dmin,
    isotropic_coherent_closed,
    werner_coherent_closed,
)
from .linalg import Part, SystemDims, kron, partial_trace, random_unitary
from .states import (
    DensityOperator,
    ErasureEmbedding,
    doubly_erased_private,
    erased_private,
    erased_state,
    isotropic_state,
    max_entangled,
    mixed_shield_private_state,
    private_state,
    PrivateStateSpec,
    product_state,
    random_full_rank,
    tensor,
    werner_state,
)
from .unextendible import (
    doubly_erased_bound,
    emin,
    erased_private_witness,
    extension_residual,
    find_joint_extension,
    fullrank_witness,
    is_super_two_extendible,
    witness_overlap,
)

__all__ = ["Case", "TheoremReport", "SUITES", "SUITE_IDS", "run_suite", "reports_to_json",
           "UnknownSuiteError"]

log = logging.getLogger(__name__)


class UnknownSuiteError(KeyError):
    pass


@dataclass
class Case:
    descriptor: str
    measured: float
    target: float
    slack: float
    passed: bool
    relation: str = "eq"
    error: str | None = None


@dataclass
class TheoremReport:
    theorem_id: str
    tolerance: float
    cases: list[Case] = field(default_factory=list)
    note: str = ""
    wall_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _slack(measured: float, target: float, tol: float, relation: str) -> float:
    if relation == "eq":
        return tol - abs(measured - target)
    if relation == "ge":
        return measured - (target - tol)
    if relation == "le":
        return (target + tol) - measured
    raise ValueError(f"unknown relation {relation!r}")


class _Recorder:
    def __init__(self, report: TheoremReport):
        self.report = report

    def check(self, descriptor: str, measure: Callable[[], float], target: float,
              relation: str = "eq", tol: float | None = None) -> None:
        tol = self.report.tolerance if tol is None else tol
        try:
            m = float(measure())
        except Exception as exc:  # recorded, suite continues
            log.warning("case %s failed: %s", descriptor, exc)
            self.report.cases.append(Case(descriptor, math.nan, target, -math.inf, False, relation,
                                          f"{type(exc).__name__}: {exc}"))
            return
        s = _slack(m, target, tol, relation)
        self.report.cases.append(Case(descriptor, m, target, s, bool(s >= 0), relation))

    @contextlib.contextmanager
    def guard(self, descriptor: str):
        """Record an exception raised while preparing a group of cases."""
        try:
            yield
        except Exception as exc:  # recorded, suite continues
            log.warning("case %s failed: %s", descriptor, exc)
            self.report.cases.append(Case(descriptor, math.nan, math.nan, -math.inf, False, "eq",
                                          f"{type(exc).__name__}: {exc}"))


def _grid(grid: Mapping[str, Sequence[float]] | None, suite: str, default: Sequence[float]):
    if grid and suite in grid:
        return [float(x) for x in grid[suite]]
    return list(default)


def _qubit_product() -> DensityOperator:
    plus = np.full((2, 2), 0.5)
    return product_state(np.diag([0.7, 0.3]), plus)


def _private_states() -> list[tuple[str, DensityOperator]]:
    return [("phi2", max_entangled(2)), ("mixed_shield", mixed_shield_private_state())]


# -- suites ------------------------------------------------------------------

def _doubly_erased_bound(rec: _Recorder, rng, grid) -> None:
    ps = _grid(grid, "doubly-erased-bound", [0.0, 0.25, 0.5, 0.75, 1.0])
    for name, gamma in _private_states():
        for p in ps:
            rep = {}

            def value(p=p, gamma=gamma, rep=rep):
                rep["r"] = emin(doubly_erased_private(gamma, p))
                return rep["r"].value_bits

            rec.check(f"gamma={name} p={p:g} emin>=bound", value, doubly_erased_bound(p, 2), "ge")
            if "r" in rep:
                r = rep["r"]
                rec.check(f"gamma={name} p={p:g} emin=chain", lambda r=r: r.value_bits, r.chain_value)
            if name == "phi2":
                rec.check(f"gamma={name} p={p:g} emin=closed",
                          lambda r=rep.get("r"): r.value_bits, doubly_erased_bound(p, 2))


def _zero_iff_member(rec: _Recorder, rng, grid) -> None:
    tol = 1e-6
    states = [
        ("phi2", max_entangled(2)),
        ("phi3", max_entangled(3)),
        ("erased(0.5,2)", erased_state(0.5, 2)),
        ("werner(0.7,2)", werner_state(0.7, 2)),
        ("product", _qubit_product()),
        ("doubly_erased(phi2,0.5)", doubly_erased_private(max_entangled(2), 0.5)),
        ("random_full_rank(2,3)", random_full_rank(2, 3, rng)),
    ]
    for name, rho in states:
        with rec.guard(name):
            v = is_super_two_extendible(rho, tol)
            bits = v.report.value_bits
            if v.is_member:
                rec.check(f"{name} member -> emin=0", lambda: bits, 0.0, "eq", tol)
            else:
                rec.check(f"{name} non-member -> emin>0", lambda: bits, -0.5 * math.log2(1 - tol), "ge", 0.0)
            rec.check(f"{name} verdict matches leak", lambda: float(v.is_member == (v.leak <= tol)),
                      1.0, "eq", 0.0)
    rec.check("phi2 leak", lambda: is_super_two_extendible(max_entangled(2), tol).leak, 0.75, "eq", 1e-4)


def _no_go(rec: _Recorder, rng, grid) -> None:
    members = [
        ("erased(0.9,2)", erased_state(0.9, 2)),
        ("erased(0.5,2)", erased_state(0.5, 2)),
        ("werner(0.3,2)", werner_state(0.3, 2)),
        ("random_full_rank(2,2)", random_full_rank(2, 2, rng)),
        ("erased_private(mixed_shield,0.5)", erased_private(mixed_shield_private_state(), 0.5)),
    ]
    for name, rho in members:
        rec.check(f"{name} emin=0", lambda rho=rho: emin(rho).value_bits, 0.0, "eq", 1e-6)
        for ch in one_way_locc_examples(rho.dims):
            rec.check(f"{name} -> {ch.name}", lambda rho=rho, ch=ch: emin(ch(rho)).value_bits, 0.0, "le")


def _erased_private(rec: _Recorder, rng, grid) -> None:
    gamma = mixed_shield_private_state()
    for p in _grid(grid, "erased-private", [0.25, 0.5, 0.75]):
        rho = erased_private(gamma, p)
        rec.check(f"mixed_shield p={p:g} emin=0", lambda rho=rho: emin(rho).value_bits, 0.0)
        rec.check(f"mixed_shield p={p:g} member",
                  lambda rho=rho: float(is_super_two_extendible(rho).is_member), 1.0, "eq", 0.0)


def _erased_state(rec: _Recorder, rng, grid) -> None:
    for p in _grid(grid, "erased-state", [0.0, 0.25, 0.5, 0.75, 0.99]):
        rho = erased_state(p, 2)
        rec.check(f"erased(p={p:g},d=2) emin=0", lambda rho=rho: emin(rho).value_bits, 0.0)
        rec.check(f"erased(p={p:g},d=2) member",
                  lambda rho=rho: float(is_super_two_extendible(rho).is_member), 1.0, "eq", 0.0)


def _full_rank(rec: _Recorder, rng, grid) -> None:
    for da, db in ((2, 2), (2, 3)):
        for i in range(20):
            rho = random_full_rank(da, db, rng)
            rec.check(f"random {da}x{db} #{i}", lambda rho=rho: emin(rho).value_bits, 0.0)
    for t in _grid(grid, "full-rank", np.linspace(0.05, 0.95, 11)):
        rec.check(f"werner(p={t:.3g},2)", lambda t=t: emin(werner_state(t, 2)).value_bits, 0.0)
        rec.check(f"isotropic(F={t:.3g},2)", lambda t=t: emin(isotropic_state(t, 2)).value_bits, 0.0)


def _flagged_input(q: float, gamma: np.ndarray, sigma: np.ndarray, dims: SystemDims) -> DensityOperator:
    one, zero = np.diag([0.0, 1.0]), np.diag([1.0, 0.0])
    return DensityOperator(q * kron(one, gamma) + (1 - q) * kron(zero, sigma), dims)


def _flag_normalization(rec: _Recorder, rng, grid) -> None:
    dims = SystemDims((Part("A", 2, flag=True, name="XA"), Part("A", 2, name="A'"),
                       Part("B", 2, name="B'")))
    gamma = max_entangled(2).matrix
    copy = flag_copy(dims)
    channel = failure_randomize(copy.out_dims).compose(copy)
    for i in range(5):
        q = float(rng.uniform(0.05, 0.95))
        sigma = random_full_rank(2, 2, rng, floor=0.0).matrix
        out = channel(_flagged_input(q, gamma, sigma, dims)).matrix
        expected = _flagged_input(q, gamma, np.eye(4) / 4, dims).matrix
        rec.check(f"instance {i} q={q:.4f}", lambda: float(np.max(np.abs(out - expected))), 0.0, "le")
    same = _flagged_input(1.0, gamma, np.eye(4) / 4, dims)
    rec.check("q=1 unchanged", lambda: float(np.max(np.abs(channel(same).matrix - same.matrix))), 0.0, "le")


def _dephased_extension(rec: _Recorder, rng, grid) -> None:
    for p in _grid(grid, "dephased-extension", [0.5]):
        for name, gamma in _private_states():
            with rec.guard(f"gamma={name} p={p:g}"):
                _dephased_case(rec, name, gamma, p)


def _dephased_case(rec: _Recorder, name: str, gamma: DensityOperator, p: float) -> None:
    eta = doubly_erased_private(gamma, p)
    da1, db1 = eta.dims.dim_a, eta.dims.dim_b
    da, db = da1 - 1, db1 - 1
    tag = f"gamma={name} p={p:g}"
    delta = partial_dephasing(eta.dims)
    rec.check(f"{tag} eta invariant under dephasing",
              lambda: float(np.max(np.abs(delta(eta).matrix - eta.matrix))), 0.0, "le", 1e-12)
    rep = emin(eta, with_chain=False)
    omega_ae = partial_trace(rep.optimal_extension, [da1, db1, db1], [0, 2])
    e_a = ErasureEmbedding(da).erased()
    pi = kron(ErasureEmbedding(da).base_projector(), np.eye(db1))
    ee = kron(e_a, np.eye(db1))
    dephased = pi @ omega_ae @ pi + ee @ omega_ae @ ee

    feas = find_joint_extension([da1, db1, db1], [([0, 1], eta.matrix), ([0, 2], dephased)])
    rec.check(f"{tag} dephased marginal in extension set", lambda: feas.residual, 0.0, "le", 1e-6)

    # non-erased block: p σ_AE on base A ⊗ E; erased block: (1 − p) τ_E
    block = dephased.reshape(da1, db1, da1, db1)
    x = block[:da, :, :da, :].reshape(da * db1, da * db1)
    tau = block[da, :, da, :]
    rec.check(f"{tag} erased block trace", lambda: float(np.trace(tau).real), 1 - p, "eq", 1e-6)
    rec.check(f"{tag} tau psd", lambda: float(np.linalg.eigvalsh(tau)[0]), 0.0, "ge", 1e-8)
    if p <= 0:
        return
    sigma = x / p
    rec.check(f"{tag} sigma trace", lambda: float(np.trace(sigma).real), 1.0, "eq", 1e-6)
    inc = kron(np.eye(da1)[:, :da], np.eye(db1))
    recon = inc @ (p * sigma) @ inc.T + kron(e_a, tau)
    rec.check(f"{tag} block decomposition", lambda: float(np.max(np.abs(recon - dephased))), 0.0, "le", 1e-9)
    eb = ErasureEmbedding(db)
    iso = kron(np.eye(da), eb.isometry())
    gamma_emb = iso @ gamma.grouped() @ iso.conj().T
    feas_g = find_joint_extension([da, db1, db1], [([0, 1], gamma_emb), ([0, 2], sigma)])
    rec.check(f"{tag} sigma in extension set of gamma", lambda: feas_g.residual, 0.0, "le", 1e-6)


def _convex_not_closed(rec: _Recorder, rng, grid) -> None:
    pairs = [
        ("erased(0.9)+erased(0.2)", erased_state(0.9, 2), erased_state(0.2, 2)),
        ("erased(0.99)+random_full_rank(2,3)", erased_state(0.99, 2), random_full_rank(2, 3, rng)),
        ("erased_private(0.5)+erased_private(0.8)",
         erased_private(mixed_shield_private_state(), 0.5),
         erased_private(mixed_shield_private_state(0.4), 0.8)),
    ]
    for name, r1, r2 in pairs:
        for t in (0.3, 0.7):
            mix = DensityOperator(t * r1.matrix + (1 - t) * r2.matrix, r1.dims)
            rec.check(f"{name} t={t:g} member",
                      lambda mix=mix: float(is_super_two_extendible(mix).is_member), 1.0, "eq", 0.0)
    for p in _grid(grid, "convex-not-closed", [0.9, 0.99, 0.999]):
        rec.check(f"erased(p={p:g}) emin=0", lambda p=p: emin(erased_state(p, 2)).value_bits, 0.0)
    rec.check("limit p=1 emin=1", lambda: emin(erased_state(1.0, 2)).value_bits, 1.0, "eq", 1e-4)


def _erased_witness(rec: _Recorder, rng, grid) -> None:
    for name, gamma in _private_states():
        for p in _grid(grid, "erased-witness", [0.0, 0.3, 0.5, 0.9]):
            tag = f"gamma={name} p={p:g}"
            with rec.guard(tag):
                _erased_witness_case(rec, tag, gamma, p)


def _erased_witness_case(rec: _Recorder, tag: str, gamma: DensityOperator, p: float) -> None:
    omega = erased_private_witness(gamma, p)
    eta = erased_private(gamma, p)
    rec.check(f"{tag} extension residual", lambda: extension_residual(eta, omega), 0.0, "le")
    if p == 0.0:
        ab = eta.grouped()
        da, db = eta.dims.dim_a, eta.dims.dim_b
        prod = kron(partial_trace(ab, [da, db], [0]), partial_trace(ab, [da, db], [1]))
        rec.check(f"{tag} marginal is product", lambda: float(np.max(np.abs(ab - prod))), 0.0, "le")
        return
    rec.check(f"{tag} witness overlap", lambda: witness_overlap(eta, omega), 1.0)
    rec.check(f"{tag} dmin between p and 1-p",
              lambda: dmin(eta.matrix, erased_private(gamma, 1 - p).matrix), 0.0)


def _full_rank_witness(rec: _Recorder, rng, grid) -> None:
    states = [("werner(0.3,2)", werner_state(0.3, 2)), ("isotropic(0.5,2)", isotropic_state(0.5, 2)),
              ("random_full_rank(2,3)", random_full_rank(2, 3, rng))]
    for name, rho in states:
        with rec.guard(name):
            omega = fullrank_witness(rho)
            db = rho.dims.dim_b
            rec.check(f"{name} overlap", lambda: witness_overlap(rho, omega), 1.0)
            rec.check(f"{name} extension residual", lambda: extension_residual(rho, omega), 0.0, "le")
            rec.check(f"{name} dmin to rho_A x I/d",
                      lambda: dmin(rho.matrix, kron(rho.marginal("A"), np.eye(db) / db)), 0.0)

    def rejected():
        try:
            fullrank_witness(max_entangled(2))
        except ValueError:
            return 1.0
        return 0.0

    rec.check("phi2 rejected", rejected, 1.0, "eq", 0.0)


def _werner_coherent(rec: _Recorder, rng, grid) -> None:
    for d in (2, 3):
        for p in _grid(grid, "werner-coherent-info", np.linspace(0, 1, 11)):
            rec.check(f"d={d} p={p:.3g}", lambda p=p, d=d: coherent_information(werner_state(p, d)),
                      werner_coherent_closed(p, d))
    rec.check("spot p=1 d=2", lambda: werner_coherent_closed(1.0, 2), 1 - math.log2(3))


def _isotropic_coherent(rec: _Recorder, rng, grid) -> None:
    for d in (2, 3):
        for f in _grid(grid, "isotropic-coherent-info", np.linspace(0, 1, 11)):
            rec.check(f"d={d} F={f:.3g}", lambda f=f, d=d: coherent_information(isotropic_state(f, d)),
                      isotropic_coherent_closed(f, d))
        rec.check(f"spot F=1 d={d}", lambda d=d: isotropic_coherent_closed(1.0, d), math.log2(d))


def _additivity(rec: _Recorder, rng, grid) -> None:
    phi, prod, er = max_entangled(2), _qubit_product(), erased_state(0.5, 2)
    pairs = [("phi2", phi, "phi2", phi), ("phi2", phi, "product", prod),
             ("phi2", phi, "erased(0.5)", er), ("product", prod, "erased(0.5)", er)]
    for n1, r1, n2, r2 in pairs:
        def gap(r1=r1, r2=r2):
            return emin(tensor(r1, r2)).value_bits - emin(r1).value_bits - emin(r2).value_bits
        rec.check(f"{n1} x {n2}", gap, 0.0)


def _monotonicity(rec: _Recorder, rng, grid) -> None:
    states = [("phi2", max_entangled(2)),
              ("doubly_erased(phi2,0.5)", doubly_erased_private(max_entangled(2), 0.5)),
              ("werner(0.7,2)", werner_state(0.7, 2))]
    for name, rho in states:
        before = emin(rho).value_bits
        for ch in one_way_locc_examples(rho.dims):
            rec.check(f"{name} -> {ch.name}", lambda rho=rho, ch=ch: emin(ch(rho)).value_bits, before, "le")


def _privacy_bound(rec: _Recorder, rng, grid) -> None:
    cases = [("k=2 shield 2x2 shift twists", private_state(PrivateStateSpec())),
             ("k=2 mixed shield", mixed_shield_private_state()),
             ("k=2 shield 2x2 random twists",
              private_state(PrivateStateSpec(twist_unitaries=[random_unitary(4, rng) for _ in range(2)]))),
             ("k=3 shield 1x2", private_state(PrivateStateSpec(k=3, shield_dims=(1, 2))))]
    for name, gamma in cases:
        k = gamma.origin["k"]
        rec.check(name, lambda gamma=gamma: emin(gamma).value_bits, math.log2(k), "ge")


_NO_GO_NOTE = ("For every member state the probabilistic one-way distillable key is zero; "
               "checked here in contrapositive form on the channel catalogue only.")

# id -> (runner, tolerance, note)
SUITES: dict[str, tuple[Callable, float, str]] = {
    "doubly-erased-bound": (_doubly_erased_bound, 5e-4, ""),
    "zero-iff-member": (_zero_iff_member, 1e-6, ""),
    "no-go": (_no_go, 1e-5, _NO_GO_NOTE),
    "erased-private": (_erased_private, 1e-6, ""),
    "erased-state": (_erased_state, 1e-6, ""),
    "full-rank": (_full_rank, 1e-6, ""),
    "flag-normalization": (_flag_normalization, 1e-10, ""),
    "dephased-extension": (_dephased_extension, 1e-6, ""),
    "convex-not-closed": (_convex_not_closed, 1e-6, ""),
    "erased-witness": (_erased_witness, 1e-10, ""),
    "full-rank-witness": (_full_rank_witness, 1e-10, ""),
    "werner-coherent-info": (_werner_coherent, 1e-8, ""),
    "isotropic-coherent-info": (_isotropic_coherent, 1e-8, ""),
    "additivity": (_additivity, 5e-3, ""),
    "monotonicity": (_monotonicity, 1e-5, ""),
    "privacy-bound": (_privacy_bound, 1e-4, ""),
}
SUITE_IDS = tuple(SUITES)


def run_suite(ids: Iterable[str] | str = "all", seed: int = 0,
              tol: float | None = None,
              grid: Mapping[str, Sequence[float]] | None = None) -> list[TheoremReport]:
    """Run the named suites in order and return one report per suite.

    ``tol`` overrides every suite's declared tolerance; ``grid`` maps a
    suite id to a replacement parameter grid for suites that sweep one.
    Each suite gets its own generator seeded from ``seed`` and its position
    in :data:`SUITE_IDS`, so results do not depend on which suites run.
    """
    if isinstance(ids, str):
        ids = SUITE_IDS if ids == "all" else [ids]
    ids = list(ids)
    unknown = [i for i in ids if i not in SUITES]
    if unknown:
        raise UnknownSuiteError(f"unknown suite id(s) {unknown}; valid ids: {', '.join(SUITE_IDS)}")
    reports = []
    for sid in ids:
        runner, default_tol, note = SUITES[sid]
        report = TheoremReport(sid, default_tol if tol is None else tol, note=note)
        rng = np.random.default_rng([seed, SUITE_IDS.index(sid)])
        t0 = time.perf_counter()
        try:
            runner(_Recorder(report), rng, grid)
        except Exception as exc:  # setup failure outside any case
            log.exception("suite %s aborted", sid)
            report.cases.append(Case("suite setup", math.nan, math.nan, -math.inf, False, "eq",
                                     f"{type(exc).__name__}: {exc}"))
        report.wall_s = time.perf_counter() - t0
        log.info("suite %s: %s (%d cases, %.2fs)", sid, "pass" if report.passed else "FAIL",
                 len(report.cases), report.wall_s)
        reports.append(report)
    return reports


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def reports_to_json(reports: Sequence[TheoremReport], seed: int | None = None) -> str:
    doc = {
        "seed": seed,
        "passed": all(r.passed for r in reports),
        "reports": [
            {k: ([{ck: _finite(cv) for ck, cv in c.items()} for c in v] if k == "cases" else _finite(v))
             for k, v in r.to_dict().items()}
            for r in reports
        ],
    }
    return json.dumps(doc, indent=2)
