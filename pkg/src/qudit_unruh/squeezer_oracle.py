"""Brute-force two-mode squeezing of a multi-rail qudit in truncated Fock space.

Two construction routes that share no formula with the closed-form channel:

* :func:`apply_multirail_squeezer` takes the tensor product of single-mode
  squeezer columns (each mode squeezed independently, one mode carrying the
  input photon);
* :func:`disentangled_squeezer_state` applies the normal-ordered factorisation
  ``U = exp(t a^dag c^dag) cosh^-(1 + n_a + n_c) exp(-t a c)`` mode by mode on
  a sparse dictionary state.

States are truncated by C-side photon number: sector ``k`` (``k-1`` photons
in C, ``k`` in A) is kept for ``k <= cutoff``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln, xlogy
from scipy.stats import nbinom

from .fock import QuditState, occupation_array, rank_occupations, sector_dim
from .unruh import Block, BlockState

# blocks up to this size are stored dense, larger ones as CSR
DENSE_LIMIT = 1024


def squeezer_column(n: int, r: float, cutoff: int) -> np.ndarray:
    """Amplitudes of ``|n+m>_A |m>_C`` for ``m = 0..cutoff`` after squeezing ``|n>_A |0>_C``."""
    if n < 0 or cutoff < 0:
        raise ValueError("n and cutoff must be non-negative")
    if r < 0:
        raise ValueError("r must be non-negative")
    m = np.arange(cutoff + 1, dtype=float)
    log_c = (
        -(1 + n) * math.log(math.cosh(r))
        + 0.5 * (gammaln(n + m + 1) - gammaln(n + 1) - gammaln(m + 1))
        + xlogy(m, math.tanh(r))
    )
    return np.exp(log_c)


@dataclass(frozen=True)
class SectorAmplitudes:
    """Nonzero amplitudes of one sector as (A position, C position, value) triplets."""

    k: int
    a_pos: np.ndarray
    c_pos: np.ndarray
    amp: np.ndarray

    def matrix(self, d: int) -> sp.csr_matrix:
        """Amplitude matrix ``Psi[a, c]`` over the sector bases."""
        shape = (sector_dim(d, self.k), sector_dim(d, self.k - 1))
        return sp.coo_matrix((self.amp, (self.a_pos, self.c_pos)), shape=shape).tocsr()


@dataclass(frozen=True, eq=False)
class TruncatedPureState:
    """Joint A-C pure state restricted to sectors ``1..cutoff``."""

    d: int
    cutoff: int
    sectors: tuple[SectorAmplitudes, ...]
    truncation_loss: float = 0.0

    @cached_property
    def amplitudes(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], complex]:
        """Map ``(A occupations, C occupations) -> amplitude``."""
        out = {}
        for s in self.sectors:
            a_occ = occupation_array(self.d, s.k)
            c_occ = occupation_array(self.d, s.k - 1)
            for a, c, v in zip(s.a_pos, s.c_pos, s.amp):
                out[(tuple(int(x) for x in a_occ[a]), tuple(int(x) for x in c_occ[c]))] = complex(v)
        return out

    def norm_squared(self) -> float:
        return math.fsum(float(np.vdot(s.amp, s.amp).real) for s in self.sectors)

    def sector(self, k: int) -> SectorAmplitudes:
        return self.sectors[k - 1]


def _loss(d: int, z: float, cutoff: int) -> float:
    # sector weights follow a negative binomial law in k-1
    return float(nbinom.sf(cutoff - 1, d + 1, 1 - z)) if z > 0 else 0.0


def apply_multirail_squeezer(beta, r: float, cutoff: int) -> TruncatedPureState:
    """Squeeze every rail of ``sum_i beta_i a_i^dag |vac>`` against its own C mode.

    The amplitude of ``|L + e_i>_A |L>_C`` is ``beta_i`` times the
    one-photon column at ``L_i`` times the vacuum columns at ``L_j``, j != i.
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    b = beta.beta if isinstance(beta, QuditState) else QuditState(beta).beta
    d = b.size
    col0 = squeezer_column(0, r, cutoff)
    col1 = squeezer_column(1, r, cutoff)
    sectors = []
    for k in range(1, cutoff + 1):
        low = occupation_array(d, k - 1)
        c_pos = np.arange(low.shape[0])
        vac = col0[low]
        a_list, c_list, v_list = [], [], []
        for i in range(d):
            if b[i] == 0:
                continue
            others = np.prod(np.delete(vac, i, axis=1), axis=1)
            raised = low.copy()
            raised[:, i] += 1
            a_list.append(rank_occupations(raised))
            c_list.append(c_pos)
            v_list.append(b[i] * col1[low[:, i]] * others)
        sectors.append(
            SectorAmplitudes(
                k,
                np.concatenate(a_list),
                np.concatenate(c_list),
                np.concatenate(v_list).astype(complex),
            )
        )
    return TruncatedPureState(d, cutoff, tuple(sectors), _loss(d, math.tanh(r) ** 2, cutoff))


def _apply_mode(state: dict, i: int, t: float, ch: float, max_c: int) -> dict:
    """Disentangled single-mode squeezer on mode pair ``(a_i, c_i)``."""
    # exp(-t a c)
    lowered: dict = {}
    for (A, C), v in state.items():
        for m in range(min(A[i], C[i]) + 1):
            coef = (-t) ** m / math.factorial(m) * math.sqrt(
                math.perm(A[i], m) * math.perm(C[i], m)
            )
            A2 = A[:i] + (A[i] - m,) + A[i + 1:]
            C2 = C[:i] + (C[i] - m,) + C[i + 1:]
            lowered[(A2, C2)] = lowered.get((A2, C2), 0) + coef * v
    # cosh^-(1 + n_a + n_c)
    for key in lowered:
        A, C = key
        lowered[key] *= ch ** -(1 + A[i] + C[i])
    # exp(t a^dag c^dag), truncated on total C photons
    out: dict = {}
    for (A, C), v in lowered.items():
        room = max_c - sum(C)
        for m in range(room + 1):
            if t == 0 and m > 0:
                break
            coef = t ** m / math.factorial(m) * math.sqrt(
                math.perm(A[i] + m, m) * math.perm(C[i] + m, m)
            )
            A2 = A[:i] + (A[i] + m,) + A[i + 1:]
            C2 = C[:i] + (C[i] + m,) + C[i + 1:]
            out[(A2, C2)] = out.get((A2, C2), 0) + coef * v
    return out


def disentangled_squeezer_state(beta, r: float, cutoff: int) -> TruncatedPureState:
    """Same state as :func:`apply_multirail_squeezer`, built from the disentangled operator.

    Exponential series are expanded term by term on a dictionary state, so
    this route is only practical for small ``d`` and ``cutoff``.
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    b = beta.beta if isinstance(beta, QuditState) else QuditState(beta).beta
    d = b.size
    t, ch = math.tanh(r), math.cosh(r)
    vac = (0,) * d
    state = {}
    for i in range(d):
        A = tuple(1 if j == i else 0 for j in range(d))
        state[(A, vac)] = complex(b[i])
    for i in range(d):
        state = _apply_mode(state, i, t, ch, cutoff - 1)
    by_k: dict[int, list] = {}
    for (A, C), v in state.items():
        if v != 0:
            by_k.setdefault(sum(C) + 1, []).append((A, C, v))
    sectors = []
    for k in range(1, cutoff + 1):
        rows = by_k.get(k, [])
        if rows:
            a_pos = rank_occupations(np.array([x[0] for x in rows]))
            c_pos = rank_occupations(np.array([x[1] for x in rows]))
            amp = np.array([x[2] for x in rows], dtype=complex)
        else:
            a_pos = c_pos = np.zeros(0, dtype=np.int64)
            amp = np.zeros(0, dtype=complex)
        sectors.append(SectorAmplitudes(k, a_pos, c_pos, amp))
    return TruncatedPureState(d, cutoff, tuple(sectors), _loss(d, t * t, cutoff))


def _reduced(state: TruncatedPureState, keep: str) -> BlockState:
    blocks = []
    for s in state.sectors:
        psi = s.matrix(state.d)
        rho = psi @ psi.conj().T if keep == "A" else (psi.T @ psi.conj()).tocsr()
        w = float(np.real(rho.diagonal().sum()))
        if w == 0.0:
            continue
        rho = rho / w
        if rho.shape[0] <= DENSE_LIMIT:
            rho = rho.toarray()
        blocks.append(Block(s.k, w, rho))
    return BlockState(state.d, keep, tuple(blocks), state.truncation_loss)


def partial_trace_C(state: TruncatedPureState) -> BlockState:
    """Reduced state on A, ``rho_A = Psi Psi^dag`` per sector."""
    return _reduced(state, "A")


def partial_trace_A(state: TruncatedPureState) -> BlockState:
    """Reduced state on C, ``rho_C = Psi^T conj(Psi)`` per sector."""
    return _reduced(state, "C")


def cutoff_for_tail(d: int, z: float, tail: float, max_cutoff: int = 10_000) -> int:
    """Smallest cutoff whose exact truncation loss is ``<= tail``."""
    if z == 0:
        return 1
    k = 1
    while _loss(d, z, k) > tail:
        k += 1
        if k > max_cutoff:
            raise ValueError(f"tail {tail:g} needs more than {max_cutoff} sectors")
    return k
