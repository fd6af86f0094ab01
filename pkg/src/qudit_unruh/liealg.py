"""sl(d, C) generators in the fundamental and completely symmetric representations.

Generators are realised through boson bilinears: ``E_ij`` acts as
``a_i^dag a_j`` and ``H_ij`` as ``n_i - n_j`` on the k-photon sector.  Mode
labels are 1-based throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.linalg import expm

from .fock import QuditState, enumerate_symmetric_basis, occupation_array, rank_occupations, sector_dim
from .unruh import output_block


class GeneratorKind(enum.Enum):
    CartanH = "H"
    StepE = "E"
    StepEdag = "Edag"


@dataclass(frozen=True, order=True)
class GeneratorLabel:
    kind: GeneratorKind
    i: int
    j: int

    def __post_init__(self):
        if not isinstance(self.kind, GeneratorKind):
            object.__setattr__(self, "kind", GeneratorKind(self.kind))
        if self.i == self.j:
            raise ValueError(f"generator needs i != j, got i = j = {self.i}")
        if self.i < 1 or self.j < 1:
            raise ValueError("mode indices are 1-based")

    def check(self, d: int) -> None:
        if self.i > d or self.j > d:
            raise ValueError(f"label {self} out of range for d={d}")

    def __str__(self) -> str:
        return f"{self.kind.value}{self.i}{self.j}" if self.i < 10 and self.j < 10 else f"{self.kind.value}({self.i},{self.j})"


def H(i: int, j: int) -> GeneratorLabel:
    return GeneratorLabel(GeneratorKind.CartanH, i, j)


def E(i: int, j: int) -> GeneratorLabel:
    return GeneratorLabel(GeneratorKind.StepE, i, j)


def Edag(i: int, j: int) -> GeneratorLabel:
    return GeneratorLabel(GeneratorKind.StepEdag, i, j)


@dataclass(frozen=True, eq=False)
class RepMatrix:
    label: GeneratorLabel
    d: int
    k: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def fundamental_generator(d: int, label: GeneratorLabel) -> RepMatrix:
    """Defining d x d matrix of ``label``."""
    label.check(d)
    i, j = label.i - 1, label.j - 1
    m = np.zeros((d, d))
    if label.kind is GeneratorKind.CartanH:
        m[i, i], m[j, j] = 1.0, -1.0
    elif label.kind is GeneratorKind.StepE:
        m[i, j] = 1.0
    else:
        m[j, i] = 1.0
    return RepMatrix(label, d, 1, m)


def _hop(d: int, k: int, m: int, l: int) -> np.ndarray:
    """Matrix of ``a_m^dag a_l`` (0-based modes) on the k-photon sector."""
    basis = enumerate_symmetric_basis(d, k)
    pos = {idx.occupations: p for p, idx in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)))
    for col, idx in enumerate(basis):
        occ = list(idx.occupations)
        if occ[l] == 0:
            continue
        amp = math.sqrt(occ[l])
        occ[l] -= 1
        amp *= math.sqrt(occ[m] + 1)
        occ[m] += 1
        out[pos[tuple(occ)], col] += amp
    return out


def symmetric_generator(d: int, k: int, label: GeneratorLabel) -> RepMatrix:
    """``label`` in the k-th completely symmetric representation.

    Built state by state from the ladder rule
    ``a_m^dag a_l |..l_l..l_m..> = sqrt(l_l (l_m + 1)) |..l_l-1..l_m+1..>``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    label.check(d)
    i, j = label.i - 1, label.j - 1
    if label.kind is GeneratorKind.CartanH:
        occ = occupation_array(d, k)
        m = np.diag((occ[:, i] - occ[:, j]).astype(float))
    elif label.kind is GeneratorKind.StepE:
        m = _hop(d, k, i, j)
    else:
        m = _hop(d, k, j, i)
    return RepMatrix(label, d, k, m)


def lift_one_body(X: np.ndarray, k: int) -> np.ndarray:
    """``sum_ij X_ij a_i^dag a_j`` on the k-photon sector, via the generator matrices."""
    X = np.asarray(X)
    d = X.shape[0]
    out = np.zeros((sector_dim(d, k),) * 2, dtype=complex)
    occ = occupation_array(d, k).astype(float)
    for i in range(d):
        out += np.diag(X[i, i] * occ[:, i])
        for j in range(d):
            if i != j and X[i, j] != 0:
                out += X[i, j] * symmetric_generator(d, k, E(i + 1, j + 1)).matrix
    return out


def canonical_coefficients(beta) -> dict[GeneratorLabel, complex]:
    """Overcomplete expansion coefficients of a pure input qudit.

    ``|beta_i|^2`` on every ``H_ij`` (j != i) and ``d beta_i conj(beta_j)`` on
    ``E_ij`` for every ordered pair, ``2 d (d-1)`` labels in total.
    """
    b = beta.beta if isinstance(beta, QuditState) else QuditState(beta).beta
    d = b.size
    out: dict[GeneratorLabel, complex] = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            if i != j:
                out[H(i, j)] = abs(b[i - 1]) ** 2
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            if i != j:
                out[E(i, j)] = d * b[i - 1] * np.conj(b[j - 1])
    return out


def reconstruct_block(d: int, k: int, n_coeffs: Mapping[GeneratorLabel, complex]) -> np.ndarray:
    """``(1/d) (k * 1 + sum_a n_a lambda_a)`` in the k-th symmetric representation."""
    if not n_coeffs:
        raise ValueError("empty coefficient map")
    out = k * np.eye(sector_dim(d, k), dtype=complex)
    for label, n in n_coeffs.items():
        if not isinstance(label, GeneratorLabel):
            raise ValueError(f"coefficient key {label!r} is not a GeneratorLabel")
        label.check(d)
        if not np.isfinite(n):
            raise ValueError(f"non-finite coefficient for {label}")
        out += n * symmetric_generator(d, k, label).matrix
    return out / d


def _is_unitary(U: np.ndarray, atol: float) -> bool:
    return U.ndim == 2 and U.shape[0] == U.shape[1] and np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=atol)


def symmetric_power(U: np.ndarray, k: int) -> np.ndarray:
    """Action of ``U`` on the k-photon symmetric space.

    ``U`` maps ``a_j^dag -> sum_i U_ij a_i^dag``; each normalised monomial
    ``prod_j (a_j^dag)^{l_j} / sqrt(l_j!)`` is expanded as a polynomial in
    the creation operators and read back in the normalised basis.
    """
    U = np.asarray(U, dtype=complex)
    if not _is_unitary(U, 1e-10):
        raise ValueError("symmetric_power needs a unitary matrix (tolerance 1e-10)")
    if k < 0:
        raise ValueError("k must be non-negative")
    d = U.shape[0]
    occ = occupation_array(d, k)
    dim = occ.shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    norm = np.sqrt(np.prod([[math.factorial(x) for x in row] for row in occ], axis=1))
    for col, row in enumerate(occ):
        poly = {(0,) * d: 1.0 + 0j}
        for j, lj in enumerate(row):
            for _ in range(lj):
                nxt: dict = {}
                for mono, c in poly.items():
                    for i in range(d):
                        if U[i, j] == 0:
                            continue
                        m2 = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                        nxt[m2] = nxt.get(m2, 0) + c * U[i, j]
                poly = nxt
        monos = np.array(list(poly.keys()), dtype=np.int64).reshape(-1, d)
        coeffs = np.array(list(poly.values()))
        rows = rank_occupations(monos)
        out[rows, col] = coeffs * norm[rows] / norm[col]
    return out


def random_su(d: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Haar-random element of SU(d)."""
    rng = np.random.default_rng(rng)
    g = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q / np.linalg.det(q) ** (1.0 / d)


def permutation_su(perm) -> np.ndarray:
    """Permutation matrix sending mode ``j`` to ``perm[j]`` (0-based), phased into SU(d)."""
    d = len(perm)
    P = np.zeros((d, d), dtype=complex)
    P[list(perm), list(range(d))] = 1.0
    return P / np.linalg.det(P) ** (1.0 / d)


def trace_norm(X: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(X, compute_uv=False)))


def covariance_residual(d: int, k: int, beta, g: np.ndarray) -> float:
    """``|| E_k(g psi g^dag) - S_k(g) E_k(psi) S_k(g)^dag ||_1`` for the normalised sector map."""
    g = np.asarray(g, dtype=complex)
    if not _is_unitary(g, 1e-10) or abs(np.linalg.det(g) - 1) > 1e-9:
        raise ValueError("g must be in SU(d)")
    b = beta.beta if isinstance(beta, QuditState) else QuditState(beta).beta
    if b.size != d:
        raise ValueError("beta has the wrong length")
    tr = math.comb(d + k - 1, d)
    lhs = output_block(d, k, QuditState.normalized(g @ b)) / tr
    S = symmetric_power(g, k)
    rhs = S @ (output_block(d, k, QuditState(b)) / tr) @ S.conj().T
    return trace_norm(lhs - rhs)


def exp_lift_residual(X: np.ndarray, k: int) -> float:
    """``|| sym(exp(iX)) - exp(i lift(X)) ||`` (max entry) for Hermitian ``X``."""
    lhs = symmetric_power(expm(1j * np.asarray(X)), k)
    rhs = expm(1j * lift_one_body(X, k))
    return float(np.max(np.abs(lhs - rhs)))


def cartan_matrix(d: int) -> np.ndarray:
    """Cartan matrix of sl(d): 2 on the diagonal, -1 between neighbours."""
    r = d - 1
    return 2 * np.eye(r, dtype=int) - np.eye(r, k=1, dtype=int) - np.eye(r, k=-1, dtype=int)


def _comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def chevalley_serre_residuals(d: int, k: int) -> dict[str, float]:
    """Max-entry residuals of the Chevalley-Serre relations in the k-th symmetric rep.

    With ``H_i = H_{i,i+1}``, ``E_i = E_{i,i+1}``, ``F_i = E^dag_{i,i+1}`` and
    Cartan matrix ``A``: ``[H_i,H_j]=0``, ``[H_i,E_j]=A_ij E_j``,
    ``[H_i,F_j]=-A_ij F_j``, ``[E_i,F_j]=delta_ij H_i`` and the Serre relations
    ``ad(E_i)^(1-A_ij) E_j = 0`` (same for F).  Also checks
    ``[E_ij, E^dag_ij] = H_ij`` on every pair.
    """
    A = cartan_matrix(d)
    r = d - 1
    Hs = [symmetric_generator(d, k, H(i, i + 1)).matrix for i in range(1, d)]
    Es = [symmetric_generator(d, k, E(i, i + 1)).matrix for i in range(1, d)]
    Fs = [symmetric_generator(d, k, Edag(i, i + 1)).matrix for i in range(1, d)]
    res = {"HH": 0.0, "HE": 0.0, "HF": 0.0, "EF": 0.0, "serre_E": 0.0, "serre_F": 0.0, "pairs": 0.0}

    def upd(key, x):
        res[key] = max(res[key], float(np.max(np.abs(x))) if x.size else 0.0)

    for a in range(r):
        for b in range(r):
            upd("HH", _comm(Hs[a], Hs[b]))
            upd("HE", _comm(Hs[a], Es[b]) - A[a, b] * Es[b])
            upd("HF", _comm(Hs[a], Fs[b]) + A[a, b] * Fs[b])
            upd("EF", _comm(Es[a], Fs[b]) - (Hs[a] if a == b else 0))
            if a != b:
                xe, xf = Es[b], Fs[b]
                for _ in range(1 - A[a, b]):
                    xe, xf = _comm(Es[a], xe), _comm(Fs[a], xf)
                upd("serre_E", xe)
                upd("serre_F", xf)
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            e = symmetric_generator(d, k, E(i, j)).matrix
            f = symmetric_generator(d, k, Edag(i, j)).matrix
            h = symmetric_generator(d, k, H(i, j)).matrix
            upd("pairs", _comm(e, f) - h)
    return res
