"""Entropies, distances and the closed-form capacities of the qudit Unruh channel.

All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln, xlogy

from .series import certified_sum
from .unruh import Block, BlockState, SectorOperator

# eigenvalues in [-CLIP, 0] are treated as zero; below -NEG_LIMIT the state is rejected
CLIP = 1e-10
NEG_LIMIT = 1e-8
# closest approach to z = 1 accepted by the series evaluations
Z_MAX = 1 - 1e-6
# blocks up to this size get an exact eigendecomposition in distance computations
EXACT_DIM = 500


class InvalidStateError(ValueError):
    """A matrix that should be a density operator is not one."""


# -- entropies -----------------------------------------------------------------


def _entropy_from_eigs(eig: np.ndarray, mult: np.ndarray | None = None) -> float:
    eig = np.asarray(eig, dtype=float)
    if eig.size and eig.min() < -NEG_LIMIT:
        raise InvalidStateError(f"eigenvalue {eig.min():.3e} is negative beyond tolerance")
    eig = np.where(eig < 0, 0.0, eig)
    terms = -xlogy(eig, eig) / math.log(2)
    if mult is not None:
        terms = terms * mult
    return float(math.fsum(terms))


def _hermitian_eigs(m) -> np.ndarray:
    if isinstance(m, SectorOperator):
        eig, mult = m.spectrum()
        return np.repeat(eig, mult.astype(np.int64))
    if sp.issparse(m):
        m = m.toarray()
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.conj().T, atol=1e-9):
        raise InvalidStateError("matrix is not Hermitian")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def _block_entropy(rho) -> float:
    if isinstance(rho, SectorOperator):
        eig, mult = rho.spectrum()
        return _entropy_from_eigs(eig, mult)
    return _entropy_from_eigs(_hermitian_eigs(rho))


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho``.

    A :class:`BlockState` is handled blockwise as ``H(w) + sum_k w_k H(rho_k)``,
    which equals the entropy of the direct sum of its weighted blocks.
    """
    if isinstance(rho, BlockState):
        w = rho.weights
        if w.size and w.min() < 0:
            raise InvalidStateError("negative block weight")
        shannon = -float(math.fsum(xlogy(w, w))) / math.log(2)
        return shannon + math.fsum(b.weight * _block_entropy(b.rho) for b in rho.blocks if b.weight > 0)
    return _entropy_from_eigs(_hermitian_eigs(rho))


def h2(x: float) -> float:
    """Binary entropy in bits."""
    if not 0 <= x <= 1:
        raise ValueError("h2 needs 0 <= x <= 1")
    return float(-(xlogy(x, x) + xlogy(1 - x, 1 - x)) / math.log(2))


# -- distances -------------------------------------------------------------------


def _check_density(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m.toarray() if sp.issparse(m) else m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    return m


def trace_norm(X) -> float:
    """Exact trace norm of a Hermitian (or general dense) matrix."""
    if isinstance(X, SectorOperator):
        return X.trace_norm()
    X = X.toarray() if sp.issparse(X) else np.asarray(X)
    if np.allclose(X, X.conj().T, atol=1e-13):
        return float(np.sum(np.abs(np.linalg.eigvalsh((X + X.conj().T) / 2))))
    return float(np.sum(np.linalg.svd(X, compute_uv=False)))


def trace_norm_bound(X) -> float:
    """Upper bound ``min(sum |X_ij|, sqrt(n) ||X||_F)`` on the trace norm, for large sparse ``X``."""
    if sp.issparse(X):
        a = np.abs(X.data)
        n = X.shape[0]
    else:
        a = np.abs(np.asarray(X))
        n = a.shape[0]
    return float(min(a.sum(), math.sqrt(n) * math.sqrt(float(np.sum(a * a)))))


def _sector_difference(a: Block | None, b: Block | None):
    if a is None:
        return b.rho * (-b.weight)
    if b is None:
        return a.rho * a.weight
    x, y = a.rho, b.rho
    if isinstance(x, SectorOperator) and isinstance(y, SectorOperator):
        return x * a.weight - y * b.weight
    if isinstance(x, SectorOperator):
        x = x.to_matrix(sparse=sp.issparse(y))
    if isinstance(y, SectorOperator):
        y = y.to_matrix(sparse=sp.issparse(x))
    return x * a.weight - y * b.weight


def _sector_norm(X) -> tuple[float, bool]:
    """Trace norm of a sector difference and whether it is exact."""
    if isinstance(X, SectorOperator):
        try:
            return X.trace_norm(), True
        except MemoryError:
            X = X.to_matrix(sparse=True)
    if X.shape[0] <= EXACT_DIM:
        return trace_norm(X), True
    return trace_norm_bound(X), False


@dataclass(frozen=True)
class BlockDistance:
    """Per-sector half trace norms of ``w_a rho_a - w_b rho_b`` and their sum."""

    per_sector: dict[int, float]
    total: float
    exact: bool
    tail: float

    @property
    def certified(self) -> float:
        """Bound on the distance between the untruncated states."""
        return self.total + self.tail


def blockwise_trace_distance(a: BlockState, b: BlockState) -> BlockDistance:
    """Trace distance between two block-diagonal states, sector by sector.

    Sectors present in only one state count with their full weight.  Sectors
    above ``EXACT_DIM`` use :func:`trace_norm_bound`, so ``total`` is then an
    upper bound (flagged by ``exact=False``).
    """
    if a.d != b.d or a.side != b.side:
        raise ValueError("states live on different spaces")
    ka = {blk.k: blk for blk in a.blocks}
    kb = {blk.k: blk for blk in b.blocks}
    per, exact = {}, True
    for k in sorted(set(ka) | set(kb)):
        x, y = ka.get(k), kb.get(k)
        if x is not None and y is not None and x.dim != y.dim:
            raise ValueError(f"sector {k} dimensions differ")
        norm, ok = _sector_norm(_sector_difference(x, y))
        per[k] = 0.5 * norm
        exact &= ok
    total = math.fsum(per.values())
    return BlockDistance(per, total, exact, 0.5 * (a.tail_bound + b.tail_bound))


def trace_distance(rho, sigma) -> float:
    """``(1/2) ||rho - sigma||_1``; block states are compared sector by sector."""
    if isinstance(rho, BlockState) or isinstance(sigma, BlockState):
        if not (isinstance(rho, BlockState) and isinstance(sigma, BlockState)):
            raise ValueError("cannot compare a block state with a flat matrix")
        return blockwise_trace_distance(rho, sigma).total
    r, s = _check_density(rho, "rho"), _check_density(sigma, "sigma")
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch {r.shape} vs {s.shape}")
    return 0.5 * trace_norm(r - s)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    # rounding-level eigenvalues would contribute ~1e-8 after the square root
    w = np.where(w > 1e-14 * max(w.max(), 0.0), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``; reduces to ``Tr rho sigma`` for pure sigma."""
    r, s = _check_density(rho, "rho"), _check_density(sigma, "sigma")
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch {r.shape} vs {s.shape}")
    # ||sqrt(rho) sqrt(sigma)||_1 avoids square roots of noisy near-zero eigenvalues
    sv = np.linalg.svd(_psd_sqrt(r) @ _psd_sqrt(s), compute_uv=False)
    return float(min(1.0, np.sum(sv) ** 2))


# -- bipartite plumbing --------------------------------------------------------


def _dims(rho: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(x) for x in dims)
    if math.prod(dims) != rho.shape[0]:
        raise ValueError(f"factor dimensions {dims} do not multiply to {rho.shape[0]}")
    return dims


def partial_trace(rho, dims: Sequence[int], keep: int | Sequence[int]) -> np.ndarray:
    """Reduced state on the factors listed in ``keep`` (0-based)."""
    rho = _check_density(rho, "rho")
    dims = _dims(rho, dims)
    keep = [keep] if isinstance(keep, (int, np.integer)) else sorted(keep)
    n = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = math.prod(dims[i] for i in keep)
    return red.reshape(dk, dk)


def purify(rho) -> np.ndarray:
    """Vector ``sum_i sqrt(l_i) |v_i> |i>`` on ``H (x) H`` whose first marginal is ``rho``."""
    rho = _check_density(rho, "rho")
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    if w.min() < -NEG_LIMIT:
        raise InvalidStateError("cannot purify a matrix with negative eigenvalues")
    w = np.clip(w, 0, None)
    n = rho.shape[0]
    psi = np.zeros((n, n), dtype=complex)
    for i in range(n):
        psi[:, i] = math.sqrt(w[i]) * v[:, i]
    return psi.reshape(n * n)


def conditional_entropy(rho, dims: Sequence[int]) -> float:
    """``H(A|B) = H(AB) - H(B)`` for ``dims = (dA, dB)``."""
    rho = _check_density(rho, "rho")
    _dims(rho, dims)
    return von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, dims, 1))


def coherent_information(rho, dims: Sequence[int]) -> float:
    """``I(A>B) = H(B) - H(AB)`` for ``dims = (dA, dB)``."""
    return -conditional_entropy(rho, dims)


def mutual_information(rho, dims: Sequence[int]) -> float:
    """``I(A;B) = H(A) + H(B) - H(AB)``."""
    rho = _check_density(rho, "rho")
    _dims(rho, dims)
    return (
        von_neumann_entropy(partial_trace(rho, dims, 0))
        + von_neumann_entropy(partial_trace(rho, dims, 1))
        - von_neumann_entropy(rho)
    )


# -- finite channels ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteChannel:
    """Channel given by an isometry ``V: in -> out (x) env``."""

    V: np.ndarray
    d_in: int
    d_out: int
    d_env: int

    def __post_init__(self):
        V = np.asarray(self.V, dtype=complex)
        if V.shape != (self.d_out * self.d_env, self.d_in):
            raise ValueError(f"isometry shape {V.shape} does not match dimensions")
        if not np.allclose(V.conj().T @ V, np.eye(self.d_in), atol=1e-10):
            raise ValueError("V is not an isometry")
        object.__setattr__(self, "V", V)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray]) -> "FiniteChannel":
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        d_out, d_in = ks[0].shape
        V = np.zeros((d_out, len(ks), d_in), dtype=complex)
        for e, k in enumerate(ks):
            V[:, e, :] = k
        return cls(V.reshape(d_out * len(ks), d_in), d_in, d_out, len(ks))

    @classmethod
    def identity(cls, d: int) -> "FiniteChannel":
        return cls(np.eye(d), d, d, 1)

    @classmethod
    def replacement(cls, d_in: int, state) -> "FiniteChannel":
        """Discard the input and prepare the pure ``state``."""
        s = np.asarray(state, dtype=complex).reshape(-1)
        s = s / np.linalg.norm(s)
        kraus = []
        for e in range(d_in):
            k = np.zeros((s.size, d_in), dtype=complex)
            k[:, e] = s
            kraus.append(k)
        return cls.from_kraus(kraus)

    def _joint(self, rho) -> np.ndarray:
        rho = _check_density(rho, "rho")
        if rho.shape != (self.d_in, self.d_in):
            raise ValueError(f"input must be {self.d_in}x{self.d_in}")
        return self.V @ rho @ self.V.conj().T

    def apply(self, rho) -> np.ndarray:
        return partial_trace(self._joint(rho), (self.d_out, self.d_env), 0)

    def complementary(self, rho) -> np.ndarray:
        return partial_trace(self._joint(rho), (self.d_out, self.d_env), 1)

    def apply_to_bipartite(self, rho, d_ref: int) -> np.ndarray:
        """``(id_R (x) N)(rho)`` for ``rho`` on ``R (x) in``."""
        rho = _check_density(rho, "rho")
        if rho.shape[0] != d_ref * self.d_in:
            raise ValueError("bipartite state does not match d_ref * d_in")
        W = np.kron(np.eye(d_ref), self.V)
        joint = W @ rho @ W.conj().T
        return partial_trace(joint, (d_ref, self.d_out, self.d_env), [0, 1])


def wiretap_rate_lower_bound(N: FiniteChannel, E: FiniteChannel, psi) -> float:
    """``(1/2)[I(A'>B)_rho - I(A'>E)_tau]`` with ``rho, tau`` the outputs of ``N, E`` on ``psi``.

    ``psi`` is a pure state vector on ``A' (x) A``; both channels act on ``A``.
    """
    if N.d_in != E.d_in:
        raise ValueError("channels must share an input space")
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size % N.d_in:
        raise ValueError("psi does not factor as A' (x) A")
    d_ref = psi.size // N.d_in
    joint = np.outer(psi, psi.conj())
    rho = N.apply_to_bipartite(joint, d_ref)
    tau = E.apply_to_bipartite(joint, d_ref)
    return 0.5 * (
        coherent_information(rho, (d_ref, N.d_out)) - coherent_information(tau, (d_ref, E.d_out))
    )


# -- capacity series -------------------------------------------------------------------


@dataclass(frozen=True)
class CapacityResult:
    value: float
    series_terms_used: int
    tail_bound: float
    parameters: tuple[int, float]

    def __float__(self) -> float:
        return self.value


def _check_dz(d: int, z: float) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    if not 0 <= z <= Z_MAX:
        raise ValueError(f"z must lie in [0, {Z_MAX}], got {z}")


def _log_s(d: int, z: float, k: np.ndarray) -> np.ndarray:
    # log of (1-z)^(d+1) z^(k-1) binomial(d+k-1, d), natural log
    return (
        (d + 1) * math.log1p(-z)
        + xlogy(k - 1, z)
        + gammaln(d + k) - gammaln(d + 1) - gammaln(k)
    )


_LN2 = math.log(2)


def _weighted_log_sum(d: int, z: float, shift: int, start: int, tol: float):
    """``sum_{k>=start} s_k log2(k + shift)``.

    ``log(k+1+shift)/log(k+shift)`` decreases in ``k``, as does ``z(d+k)/k``,
    so their product at ``K`` bounds every later term ratio.
    """
    return certified_sum(
        lambda k: _log_s(d, z, k) + np.log(np.log(k + shift) / _LN2),
        lambda k: z * (d + k) / k * np.log(k + 1 + shift) / np.log(k + shift),
        tol,
        start=start,
    )


def _head(d: int, z: float) -> float:
    # -log2 T - (1+d) z/(1-z) log2 z, with T = (1-z)^(d+1) / d
    log_t = (d + 1) * math.log1p(-z) - math.log(d)
    return (-log_t - (1 + d) * float(xlogy(z, z)) / (1 - z)) / _LN2


def entropy_HA(d: int, z: float, tol: float = 1e-12) -> CapacityResult:
    """Entropy of the channel output for the maximally mixed input, in bits."""
    _check_dz(d, z)
    res = _weighted_log_sum(d, z, 0, 2, tol) if z > 0 else None
    if res is None:
        return CapacityResult(math.log2(d), 1, 0.0, (d, z))
    return CapacityResult(_head(d, z) - res.value, res.terms, res.tail_bound, (d, z))


def entropy_HC(d: int, z: float, tol: float = 1e-12) -> CapacityResult:
    """Entropy of the complementary output for the maximally mixed input, in bits."""
    _check_dz(d, z)
    if z == 0:
        return CapacityResult(0.0, 1, 0.0, (d, z))
    res = _weighted_log_sum(d, z, d - 1, 1, tol)
    return CapacityResult(_head(d, z) - res.value, res.terms, res.tail_bound, (d, z))


def quantum_capacity(d: int, z: float, tol: float = 1e-12) -> CapacityResult:
    """``Q = sum_k s_k log2((d+k-1)/k)`` in bits per channel use.

    The log factor decreases in ``k``, so ``z(d+k)/k`` alone bounds the term ratio.
    """
    _check_dz(d, z)
    if z == 0:
        return CapacityResult(math.log2(d), 1, 0.0, (d, z))
    res = certified_sum(
        lambda k: _log_s(d, z, k) + np.log(np.log((d + k - 1) / k) / _LN2),
        lambda k: z * (d + k) / k,
        tol,
    )
    return CapacityResult(res.value, res.terms, res.tail_bound, (d, z))


def private_quantum_capacity(d: int, z: float, tol: float = 1e-12) -> CapacityResult:
    """``Q_p = (log2 d - Q) / 2`` in bits per channel use."""
    q = quantum_capacity(d, z, tol)
    return CapacityResult(
        0.5 * (math.log2(d) - q.value), q.series_terms_used, 0.5 * q.tail_bound, (d, z)
    )


def entropy_tail_bound(d: int, z: float, K: int) -> float:
    """Bound on the entropy carried by output sectors ``k > K`` (either side).

    Each such sector contributes ``s_k (-log2 T - log2 f_k - (k-1) log2 z)``
    with ``f_k >= 1``; dropping ``log2 f_k`` leaves terms
    ``u_k = s_k (a + (k-1) b)``, ``a = -log2 T``, ``b = -log2 z``, whose ratio
    is bounded by ``z(d+k)/k * (a + k b)/(a + (k-1) b)``, decreasing in ``k``.
    """
    _check_dz(d, z)
    if z == 0:
        return 0.0
    a = -((d + 1) * math.log1p(-z) - math.log(d)) / _LN2
    b = -math.log2(z)
    res = certified_sum(
        lambda k: _log_s(d, z, k) + np.log(a + (k - 1) * b),
        lambda k: z * (d + k) / k * (a + k * b) / (a + (k - 1) * b),
        1e-18,
        start=K + 1,
    )
    return res.value + res.tail_bound
