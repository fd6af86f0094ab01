"""Property suites behind ``qudit-unruh verify``.

Each suite uses a fixed default seed so runs are reproducible:

=============  =====
suite          seed
=============  =====
structure      1101
degradability  1202
covariance     1303
oracle         1404
capacity       1505
=============  =====
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import infotheory as it
from . import liealg as la
from .fock import QuditState
from .squeezer_oracle import apply_multirail_squeezer, partial_trace_C, partial_trace_A
from .unruh import (
    ChannelSpec,
    assemble_output,
    complementary_block,
    conjugate_degrade,
    maximally_mixed_output,
    output_block,
)

SEEDS = {
    "structure": 1101,
    "degradability": 1202,
    "covariance": 1303,
    "oracle": 1404,
    "capacity": 1505,
}
SUITES = tuple(SEEDS) + ("all",)


@dataclass
class PropertyResult:
    name: str
    cases: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)


@dataclass
class VerifyReport:
    suite: str
    results: list[PropertyResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def cases(self) -> int:
        return sum(r.cases for r in self.results)

    def add(self, name: str, residuals, tolerance: float) -> PropertyResult:
        res = [float(x) for x in residuals]
        r = PropertyResult(name, len(res), max(res) if res else 0.0, tolerance)
        self.results.append(r)
        return r

    def table(self) -> str:
        head = ("suite", "property", "cases", "max_residual", "tolerance", "status")
        rows = [
            (self.suite, r.name, str(r.cases), f"{r.max_residual:.3e}", f"{r.tolerance:.1e}",
             "PASS" if r.passed else "FAIL")
            for r in self.results
        ]
        widths = [max(len(x) for x in col) for col in zip(head, *rows)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows]
        return "\n".join(lines)


def suite_structure(seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    rep = VerifyReport("structure")
    trace_res, herm_res, lemma_res, k1_res = [], [], [], []
    for d in range(2, 6):
        for k in range(1, 7):
            b = QuditState.random(d, rng)
            blk = output_block(d, k, b)
            trace_res.append(abs(np.trace(blk) - math.comb(d + k - 1, d)))
            herm_res.append(max(np.abs(blk - blk.conj().T).max(), -np.linalg.eigvalsh(blk).min()))
    for d in range(2, 5):
        for k in range(1, 6):
            for _ in range(10):
                b = QuditState.random(d, rng)
                diff = complementary_block(d, k + 1, b) - output_block(d, k, b).conj()
                lemma_res.append(np.abs(diff - np.eye(diff.shape[0])).max())
        b = QuditState.random(d, rng)
        k1_res.append(np.abs(output_block(d, 1, b) - b.projector()).max())
    rep.add("trace = binomial(d+k-1, d)", trace_res, 1e-12)
    rep.add("blocks Hermitian and PSD", herm_res, 1e-10)
    rep.add("sigma_C(k+1) - conj sigma_A(k) = 1", lemma_res, 1e-12)
    rep.add("k=1 block is the input projector", k1_res, 1e-14)
    return rep


def suite_degradability(seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    rep = VerifyReport("degradability")
    res = []
    for d in range(2, 5):
        for z in (0.1, 0.5, 0.9):
            spec = ChannelSpec(d, z, tail_epsilon=1e-8)
            b = QuditState.random(d, rng)
            degraded = conjugate_degrade(assemble_output(spec, b, "A"), spec)
            res.append(it.trace_distance(degraded, assemble_output(spec, b, "C")))
    rep.add("conjugate degrading map reaches sigma_C", res, 2e-8)
    return rep


def suite_covariance(seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    rep = VerifyReport("covariance")
    cov, recon, serre, hom = [], [], [], []
    for d in range(2, 5):
        for k in range(1, 5):
            for _ in range(20):
                cov.append(la.covariance_residual(d, k, QuditState.random(d, rng), la.random_su(d, rng)))
        for _ in range(10):
            b = QuditState.random(d, rng)
            coeffs = la.canonical_coefficients(b)
            for k in range(1, 6):
                recon.append(np.abs(la.reconstruct_block(d, k, coeffs) - output_block(d, k, b)).max())
        for k in range(1, 6):
            serre.append(max(la.chevalley_serre_residuals(d, k).values()))
        for k in range(1, 5):
            U, V = la.random_su(d, rng), la.random_su(d, rng)
            hom.append(np.abs(la.symmetric_power(U @ V, k)
                              - la.symmetric_power(U, k) @ la.symmetric_power(V, k)).max())
    rep.add("SU(d) covariance of sector maps", cov, 1e-10)
    rep.add("k-independent generator coefficients", recon, 1e-12)
    rep.add("Chevalley-Serre relations", serre, 1e-12)
    rep.add("symmetric power is a homomorphism", hom, 1e-9)
    return rep


def oracle_distance(d: int, z: float, beta, tail: float = 1e-8) -> it.BlockDistance:
    """Blockwise distance between the brute-force and closed-form A-side outputs."""
    spec = ChannelSpec(d, z, tail_epsilon=tail)
    closed = assemble_output(spec, beta, "A")
    state = apply_multirail_squeezer(beta, spec.r, len(closed))
    return it.blockwise_trace_distance(partial_trace_C(state), closed)


def suite_oracle(seed: int) -> VerifyReport:
    rng = np.random.default_rng(seed)
    rep = VerifyReport("oracle")
    dist, comp = [], []
    for d in (2, 3, 4):
        for z in (0.25, 0.5):
            for _ in range(5):
                dist.append(oracle_distance(d, z, QuditState.random(d, rng)).total)
            spec = ChannelSpec(d, z, tail_epsilon=1e-8)
            b = QuditState.random(d, rng)
            closed = assemble_output(spec, b, "C")
            state = apply_multirail_squeezer(b, spec.r, len(closed))
            comp.append(it.trace_distance(partial_trace_A(state), closed))
    rep.add("oracle vs closed form, channel output", dist, 1e-6)
    rep.add("oracle vs closed form, complementary output", comp, 1e-6)
    return rep


DEFAULT_DS = (2, 3, 5, 10)


def default_z_grid(points: int = 100) -> np.ndarray:
    return np.linspace(0.0, 0.99, points)


def suite_capacity(seed: int) -> VerifyReport:
    rep = VerifyReport("capacity")
    grid = default_z_grid()
    ends, ident, mono, series = [], [], [], []
    for d in DEFAULT_DS:
        ends.append(abs(it.quantum_capacity(d, 0.0).value - math.log2(d)))
        ends.append(abs(it.private_quantum_capacity(d, 0.0).value))
        q = np.array([it.quantum_capacity(d, z).value for z in grid])
        qp = np.array([it.private_quantum_capacity(d, z).value for z in grid])
        ident.append(np.abs(2 * qp + q - math.log2(d)).max())
        # positive when monotonicity fails
        mono.append(max(0.0, np.diff(q).max(), -np.diff(qp).min()))
    tol = 1e-12
    for d in (2, 3, 4):
        for z in (0.2, 0.5, 0.8):
            spec = ChannelSpec(d, z, tail_epsilon=1e-10)
            st = maximally_mixed_output(spec, "A")
            gap = abs(it.entropy_HA(d, z, tol).value - it.von_neumann_entropy(st))
            series.append(gap / (tol + it.entropy_tail_bound(d, z, len(st))))
    rep.add("Q(d,0) = log2 d and Qp(d,0) = 0", ends, 1e-9)
    rep.add("2 Qp + Q = log2 d on the grid", ident, 1e-10)
    rep.add("Q decreasing, Qp increasing", mono, 0.0)
    rep.add("series vs matrix entropy (ratio to bound)", series, 1.0)
    return rep


_RUNNERS: dict[str, Callable[[int], VerifyReport]] = {
    "structure": suite_structure,
    "degradability": suite_degradability,
    "covariance": suite_covariance,
    "oracle": suite_oracle,
    "capacity": suite_capacity,
}


def run_suite(name: str, seed: int | None = None) -> list[VerifyReport]:
    """Run one suite (or ``"all"``) and return its reports in fixed order."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    names = list(_RUNNERS) if name == "all" else [name]
    out = []
    for n in names:
        t = time.perf_counter()
        rep = _RUNNERS[n](SEEDS[n] if seed is None else seed)
        rep.seconds = time.perf_counter() - t
        out.append(rep)
    return out
