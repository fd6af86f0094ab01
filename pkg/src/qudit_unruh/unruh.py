"""Closed-form qudit Unruh channel in truncated Fock space.

Sector ``k`` of the channel output lives on the ``k``-photon symmetric space
of ``d`` modes (A side); the matching sector of the complementary output lives
on ``k-1`` photons (C side).  Every block produced here is a one-body
operator ``dGamma_n(M) + c * 1`` where ``dGamma_n(M) = sum_ij M_ij a_i^dag a_j``
restricted to ``n`` photons; :class:`SectorOperator` keeps that form and only
builds explicit matrices on request, so sectors with millions of states cost
nothing until materialized.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, TextIO, Union

import numpy as np
import scipy.sparse as sp
from scipy.special import comb, gammaln, xlogy

from .fock import (
    ORDERING_TAG,
    QuditState,
    occupation_array,
    rank_occupations,
    sector_dim,
)
from .series import TruncationError, certified_sum

Side = Literal["A", "C"]

# clusters of one-body eigenvalues closer than this (relative) are merged
_EIG_CLUSTER_RTOL = 1e-13
# largest number of distinct spectral values enumerated for one block
_MAX_SPECTRAL_POINTS = 20_000_000


@dataclass(frozen=True)
class ChannelSpec:
    """Channel parameters: ``d`` rails, ``z = tanh(r)**2`` and truncation policy."""

    d: int
    z: float
    tail_epsilon: float = 1e-8
    max_sectors: int = 10_000

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not 0.0 <= self.z < 1.0:
            raise ValueError(f"z must lie in [0, 1), got {self.z}")
        if not 0.0 < self.tail_epsilon < 1.0:
            raise ValueError(f"tail_epsilon must lie in (0, 1), got {self.tail_epsilon}")
        if self.max_sectors < 1:
            raise ValueError("max_sectors must be positive")

    @classmethod
    def from_r(cls, d: int, r: float, **kwargs) -> "ChannelSpec":
        return cls(d, math.tanh(r) ** 2, **kwargs)

    @property
    def r(self) -> float:
        return math.atanh(math.sqrt(self.z))


def sector_weight(d: int, z: float, k: int) -> float:
    """``s_k = (1-z)^(d+1) z^(k-1) binomial(d+k-1, d)``: trace of output sector ``k``."""
    if k < 1:
        return 0.0
    if z == 0.0:
        return 1.0 if k == 1 else 0.0
    return math.exp(
        (d + 1) * math.log1p(-z) + (k - 1) * math.log(z) + _log_comb(d + k - 1, d)
    )


def sector_weights(d: int, z: float, K: int) -> np.ndarray:
    """``s_1, ..., s_K`` as an array."""
    k = np.arange(1, K + 1, dtype=float)
    log_s = (d + 1) * math.log1p(-z) + xlogy(k - 1, z) + _log_comb(d + k - 1, d)
    return np.exp(log_s)


def _log_comb(n, k):
    return gammaln(np.asarray(n) + 1) - gammaln(k + 1) - gammaln(np.asarray(n) - k + 1)


def truncation_level(spec: ChannelSpec) -> tuple[int, float]:
    """Smallest sector count ``K`` whose certified uncaptured trace is ``<= tail_epsilon``.

    ``s_{k+1}/s_k = z (d+k)/k`` decreases towards ``z``, so once it drops below
    one the remaining weight is dominated by a geometric series.

    Returns:
        ``(K, tail_bound)``.

    Raises:
        TruncationError: if ``K`` would exceed ``spec.max_sectors``.
    """
    d, z = spec.d, spec.z
    try:
        res = certified_sum(
            lambda k: (d + 1) * math.log1p(-z) + xlogy(k - 1, z) + _log_comb(d + k - 1, d),
            lambda k: z * (d + k) / k,
            spec.tail_epsilon,
            max_terms=spec.max_sectors,
            chunk=min(spec.max_sectors, 1024),
        )
    except TruncationError as exc:
        raise TruncationError(
            f"d={d}, z={z}: capturing all but {spec.tail_epsilon:g} of the trace needs "
            f"more than max_sectors={spec.max_sectors} sectors (mean photon number "
            f"{(d + 1) * z / (1 - z):.3g}); lower z or raise the cap"
        ) from exc
    return res.terms, res.tail_bound


def _bilinear_coo(d: int, n: int, M: np.ndarray):
    """COO triplets of ``sum_ij M_ij a_i^dag a_j`` on the ``n``-photon sector.

    Built from the lowered states: for each ``(n-1)``-photon index ``I`` the
    entry at ``(I + e_i, I + e_j)`` receives ``M_ij sqrt((l_i+1)(l_j+1))``.
    """
    if n == 0:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0, complex)
    low = occupation_array(d, n - 1)
    rows, cols, vals = [], [], []
    eye = np.eye(d, dtype=np.int64)
    pos = [rank_occupations(low + eye[i]) for i in range(d)]
    amp = np.sqrt(low + 1.0)
    for i in range(d):
        for j in range(d):
            if M[i, j] == 0:
                continue
            rows.append(pos[i])
            cols.append(pos[j])
            vals.append(M[i, j] * amp[:, i] * amp[:, j])
    if not rows:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0, complex)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def one_body_matrix(d: int, n: int, M: np.ndarray, shift: complex = 0.0, *, sparse: bool = False):
    """Explicit matrix of ``dGamma_n(M) + shift * 1`` in the canonical basis."""
    M = np.asarray(M, dtype=complex)
    dim = sector_dim(d, n)
    r, c, v = _bilinear_coo(d, n, M)
    mat = sp.coo_matrix((v, (r, c)), shape=(dim, dim)).tocsr()
    if shift != 0:
        mat = mat + shift * sp.identity(dim, dtype=complex, format="csr")
    if sparse:
        return mat.tocsr()
    return mat.toarray()


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """The operator ``dGamma_n(one_body) + shift * 1`` on the ``n``-photon sector."""

    d: int
    photons: int
    one_body: np.ndarray
    shift: complex = 0.0

    def __post_init__(self):
        M = np.array(self.one_body, dtype=complex)
        if M.shape != (self.d, self.d):
            raise ValueError(f"one_body must be {self.d}x{self.d}, got {M.shape}")
        if self.photons < 0:
            raise ValueError("photon number must be non-negative")
        M.setflags(write=False)
        object.__setattr__(self, "one_body", M)

    @property
    def dim(self) -> int:
        return sector_dim(self.d, self.photons)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim, self.dim)

    def trace(self) -> complex:
        # tr dGamma_n(M) = tr(M) * n * dim / d
        return np.trace(self.one_body) * self.photons * self.dim / self.d + self.shift * self.dim

    def _check(self, other: "SectorOperator"):
        if (self.d, self.photons) != (other.d, other.photons):
            raise ValueError("operators live on different sectors")

    def __add__(self, other: "SectorOperator") -> "SectorOperator":
        self._check(other)
        return SectorOperator(self.d, self.photons, self.one_body + other.one_body, self.shift + other.shift)

    def __sub__(self, other: "SectorOperator") -> "SectorOperator":
        self._check(other)
        return SectorOperator(self.d, self.photons, self.one_body - other.one_body, self.shift - other.shift)

    def __mul__(self, a: complex) -> "SectorOperator":
        return SectorOperator(self.d, self.photons, a * self.one_body, a * self.shift)

    __rmul__ = __mul__

    def conj(self) -> "SectorOperator":
        """Entrywise complex conjugate in the (real) canonical Fock basis."""
        return SectorOperator(self.d, self.photons, self.one_body.conj(), np.conj(self.shift))

    def normalized(self) -> "SectorOperator":
        tr = self.trace()
        if abs(tr) == 0:
            raise ValueError("cannot normalize a traceless operator")
        return self * (1.0 / tr.real if abs(tr.imag) < 1e-12 * abs(tr) else 1.0 / tr)

    def plus_identity(self, c: complex) -> "SectorOperator":
        return SectorOperator(self.d, self.photons, self.one_body, self.shift + c)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.one_body, self.one_body.conj().T, atol=atol)) and abs(np.imag(self.shift)) <= atol

    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct eigenvalues and their multiplicities.

        With one-body eigenvalues ``x_1..x_d`` the eigenvalues are
        ``sum_i m_i x_i + shift`` over occupations ``m`` of ``n`` photons.
        Degenerate ``x`` are merged first, so a rank-one ``M`` needs only
        ``n + 1`` evaluations whatever ``d`` is.
        """
        if not self.is_hermitian(atol=1e-10):
            raise ValueError("spectrum() needs a Hermitian operator")
        x = np.linalg.eigvalsh((self.one_body + self.one_body.conj().T) / 2)
        scale = max(1.0, float(np.max(np.abs(x))))
        groups: list[list[float]] = [[x[0]]]
        for v in x[1:]:
            if v - groups[-1][-1] <= _EIG_CLUSTER_RTOL * scale:
                groups[-1].append(v)
            else:
                groups.append([v])
        values = np.array([np.mean(g) for g in groups])
        sizes = np.array([len(g) for g in groups])
        p, n = len(groups), self.photons
        if comb(n + p - 1, n) > _MAX_SPECTRAL_POINTS:
            raise MemoryError(f"spectrum with {comb(n + p - 1, n):.3g} points is too large")
        occ = occupation_array(p, n)
        eig = occ @ values + float(np.real(self.shift))
        mult = np.prod(comb(sizes + occ - 1, occ), axis=1)
        return eig, mult

    def trace_norm(self) -> float:
        eig, mult = self.spectrum()
        return float(np.sum(mult * np.abs(eig)))

    def to_matrix(self, sparse: bool = False):
        return one_body_matrix(self.d, self.photons, self.one_body, self.shift, sparse=sparse)

    def __array__(self, dtype=None, copy=None):
        m = self.to_matrix()
        return m if dtype is None else m.astype(dtype)


Matrix = Union[np.ndarray, sp.spmatrix, SectorOperator]


@dataclass(frozen=True)
class Block:
    """Sector ``k`` of a block-diagonal state: weight times a unit-trace block."""

    k: int
    weight: float
    rho: Matrix

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def dense(self) -> np.ndarray:
        return _dense(self.rho)


def _dense(m: Matrix) -> np.ndarray:
    if isinstance(m, SectorOperator):
        return m.to_matrix()
    if sp.issparse(m):
        return m.toarray()
    return np.asarray(m)


@dataclass(frozen=True)
class BlockState:
    """Block-diagonal density operator truncated to finitely many sectors.

    ``tail_bound`` bounds the trace missing from the truncation.  On side A
    block ``k`` acts on ``k`` photons; on side C on ``k-1`` photons.
    """

    d: int
    side: Side
    blocks: tuple[Block, ...]
    tail_bound: float = 0.0
    z: float | None = None

    def __post_init__(self):
        if self.side not in ("A", "C"):
            raise ValueError(f"side must be 'A' or 'C', got {self.side!r}")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def block(self, k: int) -> Block:
        for b in self.blocks:
            if b.k == k:
                return b
        raise KeyError(f"no sector k={k}")

    @property
    def sectors(self) -> list[int]:
        return [b.k for b in self.blocks]

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.blocks])

    @property
    def captured_trace(self) -> float:
        return math.fsum(b.weight for b in self.blocks)

    def photons(self, k: int) -> int:
        return k if self.side == "A" else k - 1

    def to_dense(self) -> np.ndarray:
        """Explicit direct sum of the weighted blocks (small truncations only)."""
        dims = [b.dim for b in self.blocks]
        out = np.zeros((sum(dims), sum(dims)), dtype=complex)
        at = 0
        for b, n in zip(self.blocks, dims):
            out[at:at + n, at:at + n] = b.weight * b.dense()
            at += n
        return out

    def validate(self, atol: float = 1e-10) -> None:
        """Raise ``ValueError`` unless every block is Hermitian, PSD and unit-trace."""
        for b in self.blocks:
            if b.weight < 0:
                raise ValueError(f"negative weight in sector {b.k}")
            if b.dim != sector_dim(self.d, self.photons(b.k)):
                raise ValueError(f"sector {b.k} has dimension {b.dim}")
            if isinstance(b.rho, SectorOperator):
                if not b.rho.is_hermitian(atol):
                    raise ValueError(f"sector {b.k} is not Hermitian")
                eig, _ = b.rho.spectrum()
                lo, tr = eig.min(), b.rho.trace()
            else:
                m = b.dense()
                if not np.allclose(m, m.conj().T, atol=atol):
                    raise ValueError(f"sector {b.k} is not Hermitian")
                lo, tr = np.linalg.eigvalsh(m).min(), np.trace(m)
            if lo < -atol:
                raise ValueError(f"sector {b.k} has eigenvalue {lo}")
            if abs(tr - 1) > atol * max(1, b.dim):
                raise ValueError(f"sector {b.k} has trace {tr}")
        if self.captured_trace > 1 + atol:
            raise ValueError("weights sum to more than one")


def _check_k(k: int):
    if int(k) != k or k < 1:
        raise ValueError(f"sector index k must be an integer >= 1, got {k}")


def _beta(beta) -> np.ndarray:
    if isinstance(beta, QuditState):
        return np.asarray(beta.beta)
    return QuditState(beta).beta


def output_block(d: int, k: int, beta, *, sparse: bool = False):
    """Unnormalized output sector ``sigma_A^(k)`` for the input amplitudes ``beta``.

    Over the ``k``-photon basis, each ``(k-1)``-photon index ``I`` contributes
    ``beta_i conj(beta_j) sqrt((l_i+1)(l_j+1))`` at ``(I + e_i, I + e_j)``.
    The trace is ``binomial(d+k-1, d)``.
    """
    _check_k(k)
    b = _beta(beta)
    if b.size != d:
        raise ValueError(f"beta has {b.size} amplitudes, expected {d}")
    return one_body_matrix(d, k, np.outer(b, b.conj()), sparse=sparse)


def complementary_block(d: int, k: int, beta, *, sparse: bool = False):
    """Unnormalized complementary sector ``sigma_C^(k)`` over ``k-1`` photons.

    Equals ``conj(output_block(d, k-1, beta)) + 1``; for ``k == 1`` this is
    the 1x1 vacuum projector.
    """
    _check_k(k)
    b = _beta(beta)
    if b.size != d:
        raise ValueError(f"beta has {b.size} amplitudes, expected {d}")
    return one_body_matrix(d, k - 1, np.outer(b.conj(), b), 1.0, sparse=sparse)


def _sector_operator(d: int, k: int, M: np.ndarray, side: Side) -> SectorOperator:
    if side == "A":
        return SectorOperator(d, k, M)
    return SectorOperator(d, k - 1, M.conj(), 1.0)


def _assemble(spec: ChannelSpec, M: np.ndarray, side: Side) -> BlockState:
    if side not in ("A", "C"):
        raise ValueError(f"side must be 'A' or 'C', got {side!r}")
    K, tail = truncation_level(spec)
    weights = sector_weights(spec.d, spec.z, K)
    blocks = []
    for k, w in zip(range(1, K + 1), weights):
        rho = _sector_operator(spec.d, k, M, side)
        # trace of both sides' sector k is binomial(d+k-1, d)
        blocks.append(Block(k, float(w), rho * (1.0 / math.comb(spec.d + k - 1, spec.d))))
    return BlockState(spec.d, side, tuple(blocks), tail, spec.z)


def assemble_output(spec: ChannelSpec, beta, side: Side = "A") -> BlockState:
    """Truncated channel (side ``"A"``) or complementary (side ``"C"``) output.

    Sector weights are ``s_k`` and each block is normalized; the number of
    sectors is the smallest whose certified tail is ``<= spec.tail_epsilon``.
    """
    b = _beta(beta)
    if b.size != spec.d:
        raise ValueError(f"beta has {b.size} amplitudes, expected {spec.d}")
    return _assemble(spec, np.outer(b, b.conj()), side)


def assemble_mixed_output(spec: ChannelSpec, rho_in: np.ndarray, side: Side = "A") -> BlockState:
    """Output for a mixed input qudit ``rho_in`` (linear extension of :func:`assemble_output`)."""
    rho_in = np.asarray(rho_in, dtype=complex)
    if rho_in.shape != (spec.d, spec.d):
        raise ValueError(f"input must be {spec.d}x{spec.d}")
    if abs(np.trace(rho_in) - 1) > 1e-9:
        raise ValueError("input must have unit trace")
    return _assemble(spec, rho_in, side)


def maximally_mixed_output(spec: ChannelSpec, side: Side = "A") -> BlockState:
    """Image of the maximally mixed qudit: every block proportional to the identity.

    Side A sector ``k`` is ``(k/d)(1-z)^(d+1) z^(k-1)`` times the identity on
    ``binomial(d+k-1, k)`` states; side C sector ``k`` is
    ``((d+k-1)/d)(1-z)^(d+1) z^(k-1)`` times the identity on
    ``binomial(d+k-2, k-1)`` states.
    """
    d = spec.d
    K, tail = truncation_level(spec)
    blocks = []
    for k in range(1, K + 1):
        n = k if side == "A" else k - 1
        dim = sector_dim(d, n)
        per_state = (k if side == "A" else d + k - 1) / d
        weight = per_state * dim * _t_factor(d, spec.z, k)
        blocks.append(Block(k, weight, SectorOperator(d, n, np.zeros((d, d)), 1.0 / dim)))
    return BlockState(d, side, tuple(blocks), tail, spec.z)


def _t_factor(d: int, z: float, k: int) -> float:
    if z == 0.0:
        return 1.0 if k == 1 else 0.0
    return math.exp((d + 1) * math.log1p(-z) + (k - 1) * math.log(z))


@dataclass(frozen=True)
class OmegaZero:
    """Diagonal state admixed by the conjugate degrading map.

    Sector ``k`` is ``(1-z)^d z^(k-1)`` times the identity on the
    ``(k-1)``-photon space; its weights sum to one.
    """

    d: int
    z: float

    def weight(self, k: int) -> float:
        if k < 1:
            return 0.0
        if self.z == 0.0:
            return 1.0 if k == 1 else 0.0
        return math.exp(
            self.d * math.log1p(-self.z) + (k - 1) * math.log(self.z)
            + float(_log_comb(self.d + k - 2, k - 1))
        )

    def block(self, k: int) -> SectorOperator:
        n = k - 1
        return SectorOperator(self.d, n, np.zeros((self.d, self.d)), 1.0 / sector_dim(self.d, n))

    def tail_bound(self, K: int) -> float:
        """Certified bound on the weight of sectors ``k > K``."""
        d, z = self.d, self.z
        if z == 0.0:
            return 0.0
        res = certified_sum(
            lambda k: d * math.log1p(-z) + (k - 1) * math.log(z) + _log_comb(d + k - 2, k - 1),
            lambda k: z * (d + k - 1) / k,
            1e-18,
            start=K + 1,
            max_terms=10_000_000,
        )
        return res.value + res.tail_bound


def conjugate_degrade(sigma_A: BlockState, spec: ChannelSpec) -> BlockState:
    """Apply ``sigma -> z conj(sigma) + (1-z) omega_0`` and relabel onto the C side.

    Block ``k`` of the result combines ``conj`` of A-side block ``k-1`` with
    sector ``k`` of :class:`OmegaZero`.  For an A-side output with sectors
    ``1..K`` the result has sectors ``1..K+1``.
    """
    if sigma_A.side != "A":
        raise ValueError("conjugate_degrade expects an A-side state")
    if sigma_A.d != spec.d:
        raise ValueError("state and spec disagree on d")
    d, z = spec.d, spec.z
    omega = OmegaZero(d, z)
    by_k = {b.k: b for b in sigma_A.blocks}
    K = max(by_k) if by_k else 0
    blocks = []
    for k in range(1, K + 2):
        w0 = (1 - z) * omega.weight(k)
        prev = by_k.get(k - 1)
        if prev is None:
            if w0 == 0.0:
                continue
            blocks.append(Block(k, w0, omega.block(k)))
            continue
        unnorm = _combine(z * prev.weight, _conj(prev.rho), w0, omega.block(k))
        weight = float(np.real(_trace(unnorm)))
        if weight == 0.0:
            continue
        blocks.append(Block(k, weight, _scale(unnorm, 1.0 / weight)))
    tail = z * sigma_A.tail_bound + (1 - z) * omega.tail_bound(K + 1)
    return BlockState(d, "C", tuple(blocks), tail, z)


def _conj(m: Matrix) -> Matrix:
    return m.conj()


def _trace(m: Matrix) -> complex:
    if isinstance(m, SectorOperator):
        return m.trace()
    return m.diagonal().sum()


def _scale(m: Matrix, a: float) -> Matrix:
    return m * a


def _combine(a: float, x: Matrix, b: float, y: SectorOperator) -> Matrix:
    if isinstance(x, SectorOperator):
        return x * a + y * b
    return a * x + b * (y.to_matrix(sparse=sp.issparse(x)))


# -- block dump format --------------------------------------------------------

DUMP_MAGIC = "# qudit-unruh block dump v1"


@dataclass
class DumpRecord:
    k: int
    weight: float
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


@dataclass
class BlockDump:
    d: int
    z: float | None
    side: str
    ordering: str
    tail_bound: float
    records: list[DumpRecord] = field(default_factory=list)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_block_dump(out: TextIO, dump: BlockDump) -> None:
    """Write ``dump`` as text.

    Header lines ``d``, ``z``, ``side``, ``ordering``, ``tail_bound`` follow
    the magic line.  Each block is a ``block k=.. weight=.. dim=.. trace=..``
    line followed by ``dim`` rows of ``dim`` space-separated ``re im`` pairs.
    """
    out.write(DUMP_MAGIC + "\n")
    out.write(f"d {dump.d}\n")
    out.write(f"z {'none' if dump.z is None else _fmt(dump.z)}\n")
    out.write(f"side {dump.side}\n")
    out.write(f"ordering {dump.ordering}\n")
    out.write(f"tail_bound {_fmt(dump.tail_bound)}\n")
    for rec in dump.records:
        tr = rec.trace
        out.write(
            f"block k={rec.k} weight={_fmt(rec.weight)} dim={rec.dim} "
            f"trace={_fmt(tr.real)},{_fmt(tr.imag)}\n"
        )
        for row in np.asarray(rec.matrix):
            out.write(" ".join(f"{_fmt(v.real)} {_fmt(v.imag)}" for v in row) + "\n")


def read_block_dump(src: TextIO | str) -> BlockDump:
    """Parse the format written by :func:`write_block_dump`."""
    if isinstance(src, str):
        src = io.StringIO(src)
    lines = [ln.rstrip("\n") for ln in src if ln.strip()]
    if not lines or lines[0] != DUMP_MAGIC:
        raise ValueError("not a block dump")
    head = {}
    for ln in lines[1:6]:
        key, _, val = ln.partition(" ")
        head[key] = val
    dump = BlockDump(
        d=int(head["d"]),
        z=None if head["z"] == "none" else float(head["z"]),
        side=head["side"],
        ordering=head["ordering"],
        tail_bound=float(head["tail_bound"]),
    )
    at = 6
    while at < len(lines):
        fields = dict(kv.split("=", 1) for kv in lines[at].split()[1:])
        dim = int(fields["dim"])
        rows = []
        for ln in lines[at + 1: at + 1 + dim]:
            nums = np.array(ln.split(), dtype=float)
            rows.append(nums[0::2] + 1j * nums[1::2])
        mat = np.array(rows, dtype=complex).reshape(dim, dim)
        dump.records.append(DumpRecord(int(fields["k"]), float(fields["weight"]), mat))
        at += 1 + dim
    return dump


def block_state_dump(state: BlockState, max_dim: int = 2000) -> BlockDump:
    """Dump record list for every (normalized) block of ``state``."""
    recs = []
    for b in state.blocks:
        if b.dim > max_dim:
            raise ValueError(f"sector {b.k} has dimension {b.dim} > {max_dim}; refusing to dump")
        recs.append(DumpRecord(b.k, b.weight, b.dense()))
    return BlockDump(state.d, state.z, state.side, ORDERING_TAG, state.tail_bound, recs)


def iter_states(states: Iterable[BlockState]) -> Iterator[Block]:
    for s in states:
        yield from s.blocks
