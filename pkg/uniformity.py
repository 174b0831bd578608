#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Uniformity Norms
Gowers norms on Z_N (inductive, FFT and fully expanded), mixed seminorms of
multiplicative actions, the inverse-theorem diagnostic table and Kátai-type
correlations.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from actions import DilationAction, FgAction
from averages import single_average
from errors import CostGuardError, DegenerateRangeError, OutOfRangeError, UnsupportedActionError
from workers import chunk_ranges, default_workers, ordered_map

logger = logging.getLogger(__name__)

WORK_LIMIT = 10 ** 9
EXPANDED_LIMIT = 10 ** 8
HIGH_ORDER_MAX_N = 128
U2_BLOCK = 256


@dataclass(frozen=True)
class PeriodizedSequence:
    """A finite sequence read on Z_N."""
    values: np.ndarray

    @classmethod
    def of(cls, values, bounded: bool = False) -> "PeriodizedSequence":
        values = np.asarray(values, dtype=np.complex128)
        if values.ndim != 1 or values.size == 0:
            raise OutOfRangeError("a periodized sequence needs a nonempty 1-d array")
        if bounded and np.any(np.abs(values) > 1 + 1e-12):
            raise OutOfRangeError("values must lie in the unit disk")
        return cls(values)

    @property
    def N(self) -> int:
        return self.values.size

    def shift(self, h: int) -> np.ndarray:
        """n ↦ a(n + h)."""
        return np.roll(self.values, -h)


Sequenceish = Union[PeriodizedSequence, np.ndarray, Sequence[complex]]


def _values(a: Sequenceish) -> np.ndarray:
    if isinstance(a, PeriodizedSequence):
        return a.values
    return PeriodizedSequence.of(a).values


def _u2_power_fft(a: np.ndarray) -> float:
    coeffs = np.fft.fft(a) / a.size
    return float(np.sum(np.abs(coeffs) ** 4))


def _u2_power_direct(a: np.ndarray) -> float:
    N = a.size
    n = np.arange(N)
    total = 0.0
    for block in chunk_ranges(N, -(-N // U2_BLOCK)):
        h = np.arange(block.start, block.stop)[:, None]
        rows = a[None, :] * np.conj(a[(n[None, :] + h) % N])
        total += float(np.sum(np.abs(rows.mean(axis=1)) ** 2))
    return total / N


def _power(a: np.ndarray, s: int, fft: bool) -> float:
    """‖a‖_{U^s}^{2^s} through the inductive definition."""
    if s == 1:
        return float(abs(a.mean()) ** 2)
    if s == 2:
        return _u2_power_fft(a) if fft else _u2_power_direct(a)
    return float(np.mean([_power(a * np.conj(np.roll(a, -h)), s - 1, fft) for h in range(a.size)]))


def _plan(N: int, s: int) -> bool:
    """Whether the U² level goes through the FFT; raises when neither path fits."""
    if s < 1:
        raise OutOfRangeError(f"s must be ≥ 1, got {s}")
    if s >= 4 and N > HIGH_ORDER_MAX_N:
        raise CostGuardError(f"U^{s} is limited to N ≤ {HIGH_ORDER_MAX_N}, got N={N}")
    if N ** s <= WORK_LIMIT:
        return False
    if s <= 3 and N ** (s - 1) * max(1, math.log2(N)) <= WORK_LIMIT:
        return True
    raise CostGuardError(f"U^{s}(Z_{N}) needs about {float(N) ** s:.3g} operations")


def gowers_norm(a: Sequenceish, s: int) -> float:
    """‖a‖_{U^s(Z_N)}: ‖a‖_{U¹} = |E a| and ‖a‖_{U^{s+1}}^{2^{s+1}} = E_h ‖a·conj(a_h)‖_{U^s}^{2^s}."""
    values = _values(a)
    fft = _plan(values.size, s)
    return max(_power(values, s, fft), 0.0) ** (1.0 / 2 ** s)


def gowers_u2_fft(a: Sequenceish) -> float:
    """‖a‖_{U²}⁴ = Σ_ξ |â(ξ)|⁴."""
    return _u2_power_fft(_values(a)) ** 0.25


def gowers_norm_expanded(a: Sequenceish, s: int) -> float:
    """E_{x,h} ∏_{ω∈{0,1}^s} C^{|ω|} a(x + ω·h), summed out in full."""
    values = _values(a)
    N = values.size
    if s < 1:
        raise OutOfRangeError(f"s must be ≥ 1, got {s}")
    if N ** (s + 1) > EXPANDED_LIMIT:
        raise CostGuardError(f"the expanded U^{s} sum has {N ** (s + 1):,} terms")
    grid = np.meshgrid(*([np.arange(N)] * (s + 1)), indexing="ij")
    x, hs = grid[0], grid[1:]
    product = np.ones(x.shape, dtype=np.complex128)
    for omega in itertools.product((0, 1), repeat=s):
        idx = (x + sum(w * h for w, h in zip(omega, hs))) % N
        v = values[idx]
        product *= np.conj(v) if sum(omega) % 2 else v
    return max(float(product.mean().real), 0.0) ** (1.0 / 2 ** s)


# =============================================================================
# MIXED SEMINORMS
# =============================================================================

def orbit_matrix(action, F: np.ndarray, N: int) -> np.ndarray:
    """Row x holds (F(T_n x))_{n∈[N]}."""
    if not isinstance(action, (FgAction, DilationAction)):
        raise UnsupportedActionError(f"orbit sequences need a finite-space action, got {action!r}")
    F = np.asarray(F)
    if F.shape != (action.space.size,):
        raise OutOfRangeError(f"observable of shape {F.shape} on a space of size {action.space.size}")
    keys, valid = action.keys_along(1, 0, N)
    matrix = np.empty((action.space.size, N), dtype=np.complex128)
    uniq, inverse = np.unique(keys[valid], return_inverse=True)
    images = np.stack([F[action.permutation(k)] for k in uniq.tolist()], axis=1) if uniq.size else np.zeros((F.size, 0))
    matrix[:, valid] = images[:, inverse.reshape(-1)]
    # a dilation by a multiple of M sends every point to 0
    matrix[:, ~valid] = F[0]
    return matrix


def _row_powers(task) -> List[float]:
    rows, s, fft = task
    return [_power(row, s, fft) for row in rows]


def mixed_seminorm(action, F: np.ndarray, s: int, N: int, workers: Optional[int] = None) -> float:
    """((1/M) Σ_x ‖(F(T_n x))_{n∈[N]}‖_{U^s(Z_N)}^{2^s})^{1/2^s}, a per-N value."""
    if N < 1:
        raise OutOfRangeError(f"N must be ≥ 1, got {N}")
    _plan(N, s)
    fft = True
    matrix = orbit_matrix(action, F, N)
    count = default_workers() if workers is None else max(1, workers)
    tasks = [(matrix[r.start : r.stop], s, fft) for r in chunk_ranges(matrix.shape[0], count)]
    powers = [p for chunk in ordered_map(_row_powers, tasks, workers=count) for p in chunk]
    value = max(float(np.mean(powers)), 0.0) ** (1.0 / 2 ** s)
    logger.debug(f"🔄 mixed U^{s} seminorm at N={N:,}: {value:.6f}")
    return value


def inverse_diagnostic(
    action,
    F: np.ndarray,
    qr_grid: Iterable[Tuple[int, int]],
    N_ladder: Sequence[int],
    s_max: int = 2,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """Per N: max_{(q,r)} ‖E_{n∈[N]} T_{qn+r}F‖ next to the mixed seminorms of order 2..s_max."""
    if not isinstance(action, FgAction):
        raise UnsupportedActionError(f"the inverse diagnostic needs a finitely generated action, got {action!r}")
    qr_grid = list(qr_grid)
    rows = []
    for N in N_ladder:
        means = [single_average(action, F, q, r, N).norm for q, r in qr_grid]
        row = {"N": N, "max_progression_mean": max(means) if means else 0.0}
        for s in range(2, s_max + 1):
            row[f"seminorm_u{s}"] = mixed_seminorm(action, F, s, N, workers)
        rows.append(row)
        logger.info(f"📊 N={N:,}: progression {row['max_progression_mean']:.4f}, "
                    + ", ".join(f"U^{s} {row[f'seminorm_u{s}']:.4f}" for s in range(2, s_max + 1)))
    return pd.DataFrame(rows)


# =============================================================================
# KÁTAI CORRELATIONS
# =============================================================================

def katai_correlation(A: np.ndarray, p: int, q: int, p2: int, q2: int) -> complex:
    """E over the valid box of A(pm, qn)·conj(A(p'm, q'n)); A[i, j] holds (i+1, j+1)."""
    A = np.asarray(A)
    if p * q2 == p2 * q:
        raise DegenerateRangeError(f"{p}/{q} equals {p2}/{q2}")
    M = A.shape[0] // max(p, p2)
    N = A.shape[1] // max(q, q2)
    if M < 1 or N < 1:
        raise DegenerateRangeError(f"no (m, n) keeps ({max(p, p2)}m, {max(q, q2)}n) inside {A.shape}")
    m = np.arange(1, M + 1)[:, None]
    n = np.arange(1, N + 1)[None, :]
    first = A[p * m - 1, q * n - 1]
    second = A[p2 * m - 1, q2 * n - 1]
    return complex(np.mean(first * np.conj(second)))


def katai_sequence_correlation(w: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]], p: int, p2: int, N: int) -> complex:
    """E_{n ≤ N/max(p,p')} w(pn)·conj(w(p'n)); an array w is indexed by n directly."""
    if p == p2:
        raise DegenerateRangeError(f"the two primes coincide ({p})")
    top = N // max(p, p2)
    if top < 1:
        raise DegenerateRangeError(f"N={N} leaves no n with {max(p, p2)}n ≤ N")
    n = np.arange(1, top + 1, dtype=np.int64)
    if callable(w):
        first, second = np.asarray(w(p * n)), np.asarray(w(p2 * n))
    else:
        w = np.asarray(w)
        if w.size <= N:
            raise OutOfRangeError(f"w covers {w.size - 1} values, need {N}")
        first, second = w[p * n], w[p2 * n]
    return complex(np.mean(first * np.conj(second)))
