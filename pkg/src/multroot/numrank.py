"""Numerical rank without a user-supplied threshold.

From the singular values ``sigma_1 >= ... >= sigma_n`` we form the
elementary symmetric sums ``s_k`` and, for each candidate ``m`` (the
dimension of the numerical kernel),

    b_m = max_{0 <= i < m}  (s_{n-i} / s_{n-m})^(1/(m-i))
    g_m = max_{m < i <= n}  (s_{n-i} / s_{n-m})^(1/(i-m)),   g_n = 1
    a_m = b_m * g_m

Whenever ``a_m < 1/9`` the matrix has eps-rank ``n - m`` with
``eps = (3a + 1 - sqrt((3a+1)^2 - 16a)) / (4 g_m)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

THRESHOLD = 1.0 / 9.0


@dataclass(frozen=True)
class MRecord:
    m: int
    b: float
    g: float
    a: float


@dataclass(frozen=True)
class RankProfile:
    sigma: Tuple[float, ...]
    s_sums: Tuple[float, ...]
    records: Tuple[MRecord, ...]
    chosen_m: Optional[int]
    epsilon: float
    rank: int
    exact_rank: int

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def consistent(self) -> bool:
        return self.chosen_m is None or self.chosen_m >= self.n - self.exact_rank

    def record(self, m: int) -> Optional[MRecord]:
        for rec in self.records:
            if rec.m == m:
                return rec
        return None


def singular_values(M) -> np.ndarray:
    """Singular values in nonincreasing order (wide inputs are transposed)."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[0] < M.shape[1]:
        M = M.T
    if M.size == 0:
        return np.zeros(M.shape[1])
    return np.linalg.svd(M, compute_uv=False)


def elementary_symmetric(sigma) -> np.ndarray:
    """``s_0 = 1, s_1, ..., s_n`` via the coefficients of ``prod (lambda + sigma_i)``."""
    s = np.zeros(len(sigma) + 1)
    s[0] = 1.0
    for k, v in enumerate(sigma, start=1):
        s[1:k + 1] = s[1:k + 1] + v * s[0:k]
    return s


def epsilon_from(a: float, g: float) -> float:
    """Smaller root of ``2 t^2 - (3a+1) t + 2a``, divided by ``g``."""
    disc = (3 * a + 1) ** 2 - 16 * a
    # 4a / (3a + 1 + sqrt(disc)) is the cancellation-free form of the smaller root
    tau1 = 4 * a / (3 * a + 1 + math.sqrt(disc))
    return tau1 / g


def numerical_rank(M) -> RankProfile:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    s_dim, n = M.shape
    sigma = singular_values(M)
    n = sigma.size
    sums = elementary_symmetric(sigma)
    top = sigma[0] if n else 0.0
    tau_zero = max(M.shape) * np.finfo(float).eps * top
    exact = int(np.count_nonzero(sigma > tau_zero))

    records: List[MRecord] = []
    for m in range(1, n + 1):
        base = sums[n - m]
        if n - m > 0 and not base > tau_zero ** (n - m):
            continue
        b = max((sums[n - i] / base) ** (1.0 / (m - i)) for i in range(m))
        if m == n:
            g = 1.0
        else:
            g = max((sums[n - i] / base) ** (1.0 / (i - m)) for i in range(m + 1, n + 1))
        records.append(MRecord(m, float(b), float(g), float(b * g)))

    chosen = None
    for rec in records:
        if rec.a < THRESHOLD:
            chosen = rec  # records are in increasing m: keep the largest
    if chosen is None:
        eps = float(sigma[-1]) / 2 if n else 0.0
        rank = n
        m = None
    else:
        eps = epsilon_from(chosen.a, chosen.g)
        rank = n - chosen.m
        m = chosen.m
    return RankProfile(
        sigma=tuple(float(v) for v in sigma),
        s_sums=tuple(float(v) for v in sums),
        records=tuple(records),
        chosen_m=m,
        epsilon=float(eps),
        rank=rank,
        exact_rank=exact,
    )
