"""Summation of positive series with a certified geometric tail bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class TruncationError(RuntimeError):
    """Raised when a series or sector truncation would exceed its hard cap."""


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms: int
    tail_bound: float


def certified_sum(
    log_term: Callable[[np.ndarray], np.ndarray],
    ratio_bound: Callable[[np.ndarray], np.ndarray],
    tol: float,
    *,
    start: int = 1,
    max_terms: int = 50_000_000,
    chunk: int = 4096,
) -> SeriesResult:
    """Sum ``t_k = exp(log_term(k))`` for ``k >= start`` until the tail is certified.

    ``ratio_bound(k)`` must bound ``t_{j+1} / t_j`` for every ``j >= k``
    (callers pass a non-increasing majorant of the term ratio).  Once
    ``rho = ratio_bound(K) < 1`` the remainder obeys
    ``sum_{j>K} t_j <= t_K * rho / (1 - rho)``; summation stops at the first
    ``K`` where that bound is ``<= tol``.

    Raises:
        TruncationError: if more than ``max_terms`` terms would be needed.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    total = 0.0
    k0 = start
    while k0 - start < max_terms:
        ks = np.arange(k0, k0 + chunk, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = np.exp(log_term(ks))
            rho = np.asarray(ratio_bound(ks), dtype=float) * np.ones_like(ks)
            tail = np.where(rho < 1.0, t * rho / (1.0 - rho), np.inf)
        t = np.nan_to_num(t, nan=0.0)
        hit = np.flatnonzero(tail <= tol)
        if hit.size:
            stop = int(hit[0])
            total += math.fsum(t[: stop + 1])
            return SeriesResult(total, int(ks[stop]), float(tail[stop]))
        total += math.fsum(t)
        k0 += chunk
    raise TruncationError(
        f"series needs more than {max_terms} terms to reach tail <= {tol:g}"
    )


def geometric_tail(last_term: float, ratio: float) -> float:
    """Bound on ``sum_{j>K} t_j`` given ``t_K`` and a ratio bound valid beyond ``K``."""
    if ratio >= 1.0:
        return math.inf
    return last_term * ratio / (1.0 - ratio)
