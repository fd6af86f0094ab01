"""Completely symmetric Fock bases over ``d`` bosonic modes.

Every matrix in this package is written in one shared basis order, tagged
``"lex-desc"``: occupation tuples of a photon-number sector sorted in
descending lexicographic order.  For ``d=3, n=1`` this is
``(1,0,0), (0,1,0), (0,0,1)``, so the single-photon sector lines up with the
mode order of the fundamental representation.

Mode indices in the public API are 1-based.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

ORDERING_TAG = "lex-desc"


@dataclass(frozen=True)
class MultiIndex:
    """Occupation numbers ``(l_1, ..., l_d)`` of a symmetric Fock state."""

    occupations: tuple[int, ...]
    photons: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        occ = tuple(int(x) for x in self.occupations)
        if len(occ) < 2:
            raise ValueError(f"need at least 2 modes, got {len(occ)}")
        if any(x < 0 for x in occ):
            raise ValueError(f"occupations must be non-negative: {occ}")
        object.__setattr__(self, "occupations", occ)
        object.__setattr__(self, "photons", sum(occ))

    @property
    def d(self) -> int:
        return len(self.occupations)

    def __iter__(self) -> Iterator[int]:
        return iter(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)

    def __getitem__(self, i: int) -> int:
        return self.occupations[i]


@dataclass(frozen=True)
class SymmetricBasis:
    """Canonically ordered basis of the ``n``-photon sector of ``d`` modes."""

    d: int
    n: int
    indices: tuple[MultiIndex, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def __getitem__(self, p: int) -> MultiIndex:
        return self.indices[p]

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.indices)

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def occupations(self) -> np.ndarray:
        """Read-only ``(dim, d)`` integer array of the basis occupations."""
        return occupation_array(self.d, self.n)

    def position(self, index: MultiIndex | Sequence[int]) -> int:
        return basis_position(self, index)


def sector_dim(d: int, n: int) -> int:
    """Dimension ``binomial(d+n-1, n)`` of the ``n``-photon sector."""
    if n < 0:
        return 0
    return math.comb(d + n - 1, n)


def _compositions(d: int, n: int) -> np.ndarray:
    if d == 1:
        return np.array([[n]], dtype=np.int64)
    if d == 2:
        first = np.arange(n, -1, -1, dtype=np.int64)
        return np.column_stack([first, n - first])
    parts = []
    for first in range(n, -1, -1):
        tail = _compositions(d - 1, n - first)
        head = np.full((tail.shape[0], 1), first, dtype=np.int64)
        parts.append(np.hstack([head, tail]))
    return np.vstack(parts)


@functools.lru_cache(maxsize=256)
def occupation_array(d: int, n: int) -> np.ndarray:
    """All weak compositions of ``n`` into ``d`` parts, in lex-desc order.

    Also used internally with ``d == 1``.
    """
    if d < 1 or n < 0:
        raise ValueError(f"invalid sector d={d}, n={n}")
    out = _compositions(d, n)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=64)
def _pascal(rows: int, cols: int) -> np.ndarray:
    table = np.zeros((rows + 1, cols + 1), dtype=np.int64)
    for a in range(rows + 1):
        for b in range(min(a, cols) + 1):
            table[a, b] = math.comb(a, b)
    return table


def rank_occupations(occ: np.ndarray) -> np.ndarray:
    """Vectorized canonical positions of the rows of ``occ`` within their sector.

    All rows must have the same photon number.  A row ``l`` at position ``j``
    (1-based) is preceded by ``binomial(r_j - l_j + d - j - 1, d - j)`` tuples
    that agree on the earlier entries and carry more photons in mode ``j``,
    where ``r_j`` is the photon count not yet placed.
    """
    occ = np.asarray(occ, dtype=np.int64)
    if occ.ndim == 1:
        occ = occ[None, :]
    m, d = occ.shape
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    n = int(occ[0].sum())
    table = _pascal(n + d, d)
    rank = np.zeros(m, dtype=np.int64)
    remaining = np.full(m, n, dtype=np.int64)
    for j in range(1, d):
        l = occ[:, j - 1]
        rank += table[remaining - l + d - j - 1, d - j]
        remaining -= l
    return rank


@functools.lru_cache(maxsize=256)
def enumerate_symmetric_basis(d: int, n: int) -> SymmetricBasis:
    """Basis of the completely symmetric ``n``-photon subspace of ``d`` modes.

    Args:
        d: Number of modes, at least 2.
        n: Total photon number, non-negative.

    Returns:
        A :class:`SymmetricBasis` with ``binomial(d+n-1, n)`` indices in
        lex-desc order.  Results are cached; repeated calls return the same
        object.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    indices = tuple(MultiIndex(tuple(int(x) for x in row)) for row in occupation_array(d, n))
    return SymmetricBasis(d=d, n=n, indices=indices)


def basis_position(basis: SymmetricBasis, index: MultiIndex | Sequence[int]) -> int:
    """Position of ``index`` in ``basis``; raises ``LookupError`` if absent."""
    occ = index.occupations if isinstance(index, MultiIndex) else tuple(index)
    if len(occ) != basis.d or sum(occ) != basis.n or any(x < 0 for x in occ):
        raise LookupError(f"{occ} is not in the d={basis.d}, n={basis.n} sector")
    return int(rank_occupations(np.array(occ))[0])


def raise_index(index: MultiIndex, i: int) -> MultiIndex:
    """Return ``index`` with one more photon in mode ``i`` (1-based)."""
    if not 1 <= i <= index.d:
        raise IndexError(f"mode {i} out of range 1..{index.d}")
    occ = list(index.occupations)
    occ[i - 1] += 1
    return MultiIndex(tuple(occ))


@dataclass(frozen=True, eq=False)
class QuditState:
    """Multi-rail qudit: one photon spread over ``d`` modes with amplitudes ``beta``."""

    beta: np.ndarray
    atol: float = 1e-9

    def __post_init__(self):
        beta = np.array(self.beta, dtype=complex).reshape(-1)
        if beta.size < 2:
            raise ValueError("a qudit needs at least 2 amplitudes")
        norm = float(np.vdot(beta, beta).real)
        if abs(norm - 1.0) > self.atol:
            raise ValueError(f"amplitudes are not normalized: sum |beta|^2 = {norm!r}")
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)

    @property
    def d(self) -> int:
        return self.beta.size

    @classmethod
    def normalized(cls, beta: Sequence[complex], atol: float = 1e-6) -> "QuditState":
        """Accept ``beta`` if its norm is within ``atol`` of 1, then renormalize."""
        beta = np.asarray(beta, dtype=complex).reshape(-1)
        norm = float(np.vdot(beta, beta).real)
        if abs(norm - 1.0) > atol:
            raise ValueError(f"amplitudes are not normalized: sum |beta|^2 = {norm!r}")
        return cls(beta / math.sqrt(norm))

    @classmethod
    def basis(cls, d: int, i: int) -> "QuditState":
        if not 1 <= i <= d:
            raise IndexError(f"mode {i} out of range 1..{d}")
        beta = np.zeros(d, dtype=complex)
        beta[i - 1] = 1.0
        return cls(beta)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator | int | None = None) -> "QuditState":
        """Haar-random pure qudit."""
        rng = np.random.default_rng(rng)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        return cls(v / np.linalg.norm(v))

    def projector(self) -> np.ndarray:
        return np.outer(self.beta, self.beta.conj())


def multirail_encode(state: QuditState) -> np.ndarray:
    """Amplitudes of ``sum_i beta_i a_i^dag |vac>`` in the 1-photon sector basis."""
    # lex-desc places the photon-in-mode-i state at position i-1
    return np.array(state.beta, dtype=complex)
