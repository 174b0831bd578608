#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Quadratic Equations
Homogeneous equations ax²+by² = dxy+exz+fyz with a+b = d: parametrized solution
families, their reduction to four linear forms, and monochromatic-solution search.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from errors import HypothesisViolationError, InvalidShiftError, OutOfRangeError
from linforms import LinearForm, independent
from workers import chunk_ranges, default_workers, ordered_map

logger = logging.getLogger(__name__)

_m, _n = sympy.symbols("m n", integer=True)


@dataclass(frozen=True)
class QuadEquation:
    a: int
    b: int
    d: int
    e: int
    f: int

    def __post_init__(self):
        if self.a < 1 or self.e < 1:
            raise OutOfRangeError(f"a and e must be positive, got a={self.a}, e={self.e}")

    @property
    def admissible(self) -> bool:
        return self.a + self.b == self.d

    def residual(self, x, y, z):
        return self.a * x * x + self.b * y * y - self.d * x * y - self.e * x * z - self.f * y * z

    def __str__(self) -> str:
        return f"{self.a}x² + {self.b}y² = {self.d}xy + {self.e}xz + {self.f}yz"


def verify_triple(eq: QuadEquation, x: int, y: int, z: int) -> bool:
    return eq.residual(x, y, z) == 0


Quadratic = Tuple[LinearForm, LinearForm]


def _form_expr(form: LinearForm):
    return form.alpha * _m + form.beta * _n


@dataclass(frozen=True)
class SolutionFamily:
    """x, y, z as products of two linear forms in (m, n)."""
    x: Quadratic
    y: Quadratic
    z: Quadratic

    def __call__(self, m, n):
        return tuple(L1(m, n) * L2(m, n) for L1, L2 in (self.x, self.y, self.z))

    def expressions(self):
        return tuple(sympy.expand(_form_expr(L1) * _form_expr(L2)) for L1, L2 in (self.x, self.y, self.z))

    def verify(self, eq: QuadEquation) -> bool:
        """Symbolic check that the family solves eq identically."""
        x, y, z = self.expressions()
        return sympy.expand(eq.residual(x, y, z)) == 0

    @property
    def forms(self) -> Tuple[LinearForm, ...]:
        return self.x + self.y + self.z

    def __str__(self) -> str:
        return ", ".join(f"{L1}{L2}" for L1, L2 in (self.x, self.y, self.z))


def solution_family(eq: QuadEquation) -> SolutionFamily:
    """(m(em+fn), n(em+fn), (m−n)(am−bn))."""
    if not eq.admissible:
        raise HypothesisViolationError(f"a+b={eq.a + eq.b} differs from d={eq.d}")
    common = LinearForm(eq.e, eq.f)
    family = SolutionFamily(
        x=(LinearForm(1, 0), common),
        y=(LinearForm(0, 1), common),
        z=(LinearForm(1, -1), LinearForm(eq.a, -eq.b)),
    )
    if not family.verify(eq):
        raise HypothesisViolationError(f"parametrization does not solve {eq}")
    return family


def shifted_family(eq: QuadEquation, l: int) -> SolutionFamily:
    """The family after m ↦ m + l·n; every coefficient is nonnegative."""
    if not eq.admissible:
        raise HypothesisViolationError(f"a+b={eq.a + eq.b} differs from d={eq.d}")
    if l < 1 or l * eq.e + eq.f <= 0 or l * eq.a - eq.b < 0:
        raise InvalidShiftError(f"l={l} needs l ≥ 1, le+f > 0 and la−b ≥ 0")
    common = LinearForm(eq.e, l * eq.e + eq.f)
    family = SolutionFamily(
        x=(LinearForm(1, l), common),
        y=(LinearForm(0, 1), common),
        z=(LinearForm(1, l - 1), LinearForm(eq.a, l * eq.a - eq.b)),
    )
    if not family.verify(eq):
        raise HypothesisViolationError(f"shifted parametrization does not solve {eq}")
    return family


def minimal_shift(eq: QuadEquation) -> int:
    """Smallest l ≥ 1 accepted by shifted_family."""
    l = 1
    while l * eq.e + eq.f <= 0 or l * eq.a - eq.b < 0:
        l += 1
    return l


@dataclass(frozen=True)
class RecurrenceForms:
    L1: LinearForm
    L2: LinearForm
    L3: LinearForm
    L4: LinearForm
    nonnegative: bool
    independent_34: bool
    independent_1_diff: bool
    independent_2_diff: bool
    e_plus_f_nonzero: bool
    a_ne_b: bool
    degenerate_case: bool

    @property
    def difference(self) -> LinearForm:
        return LinearForm(self.L3.alpha - self.L4.alpha, self.L3.beta - self.L4.beta)

    @property
    def hypotheses_hold(self) -> bool:
        return (
            self.nonnegative
            and self.independent_34
            and self.independent_1_diff
            and self.independent_2_diff
            and not self.degenerate_case
        )

    def as_dict(self) -> dict:
        return {
            "L1": str(self.L1),
            "L2": str(self.L2),
            "L3": str(self.L3),
            "L4": str(self.L4),
            "nonnegative": self.nonnegative,
            "independent(L3,L4)": self.independent_34,
            "independent(L1,L3-L4)": self.independent_1_diff,
            "independent(L2,L3-L4)": self.independent_2_diff,
            "e+f != 0": self.e_plus_f_nonzero,
            "a != b": self.a_ne_b,
            "degenerate (a=d=e=-f, b=0)": self.degenerate_case,
        }


def to_recurrence_forms(eq: QuadEquation, l: int) -> RecurrenceForms:
    """L1 = am+(la−b)n, L2 = em+(le+f)n, L3 = m+ln, L4 = n with the hypothesis report."""
    shifted_family(eq, l)
    L1 = LinearForm(eq.a, l * eq.a - eq.b)
    L2 = LinearForm(eq.e, l * eq.e + eq.f)
    L3 = LinearForm(1, l)
    L4 = LinearForm(0, 1)
    diff = LinearForm(1, l - 1)
    return RecurrenceForms(
        L1=L1,
        L2=L2,
        L3=L3,
        L4=L4,
        nonnegative=all(L.nonnegative for L in (L1, L2, L3, L4, diff)),
        independent_34=independent(L3, L4),
        independent_1_diff=independent(L1, diff),
        independent_2_diff=independent(L2, diff),
        e_plus_f_nonzero=eq.e + eq.f != 0,
        a_ne_b=eq.a != eq.b,
        degenerate_case=eq.a == eq.d == eq.e == -eq.f and eq.b == 0,
    )


# =============================================================================
# MONOCHROMATIC SEARCH
# =============================================================================

@dataclass(frozen=True)
class Triple:
    k: int
    m: int
    n: int
    x: int
    y: int
    z: int
    color: int


Coloring = Union[Callable[[np.ndarray], np.ndarray], Sequence[int], np.ndarray]

# (m, n) pairs evaluated per block; PAIR_LIMIT caps the whole grid
PAIR_BLOCK = 1 << 21
PAIR_LIMIT = 10 ** 9


def _search_chunk(task) -> List[Tuple[int, ...]]:
    ks, base, m_idx, n_idx, colors, distinct = task
    N = colors.size - 1
    found = []
    for k in ks:
        values = k * base
        inside = np.all((values >= 1) & (values <= N), axis=0)
        if not inside.any():
            continue
        x, y, z = (v[inside] for v in values)
        ms, ns = m_idx[inside], n_idx[inside]
        cx, cy, cz = colors[x], colors[y], colors[z]
        same = (cx == cy) & (cy == cz)
        if distinct:
            same &= (x != y) & (y != z) & (x != z)
        else:
            same &= ~((x == y) & (y == z))
        for i in np.flatnonzero(same).tolist():
            found.append((k, int(ms[i]), int(ns[i]), int(x[i]), int(y[i]), int(z[i]), int(cx[i])))
    return found


def _pair_bounds(family: SolutionFamily, N: int) -> Tuple[Optional[int], Optional[int]]:
    """Bounds on m and n implied by every coordinate of the family lying in [1, N].

    Each coordinate is a product of two nonzero integer factors, so every factor has
    absolute value ≤ N; a factor with nonnegative coefficients then bounds m and n.
    """
    m_bound = n_bound = None

    def tighten(bound, value):
        return value if bound is None else min(bound, value)

    for L1, L2 in (family.x, family.y, family.z):
        for form in (L1, L2):
            if form.nonnegative:
                if form.alpha > 0:
                    m_bound = tighten(m_bound, N // form.alpha)
                if form.beta > 0:
                    n_bound = tighten(n_bound, N // form.beta)
        if L1.nonnegative and L2.nonnegative:
            if L1.alpha * L2.alpha > 0:
                m_bound = tighten(m_bound, math.isqrt(N // (L1.alpha * L2.alpha)))
            if L1.beta * L2.beta > 0:
                n_bound = tighten(n_bound, math.isqrt(N // (L1.beta * L2.beta)))
    return m_bound, n_bound


def _base_pairs(family: SolutionFamily, N: int, m_bound: int, n_bound: int):
    """All (m, n) in [m_bound]×[n_bound] whose base triple lies in [1, N], m-major."""
    ns = np.arange(1, n_bound + 1, dtype=np.int64)
    rows = max(1, PAIR_BLOCK // n_bound)
    bases, ms_all, ns_all = [], [], []
    for start in range(1, m_bound + 1, rows):
        block = np.arange(start, min(start + rows, m_bound + 1), dtype=np.int64)
        m_idx, n_idx = (a.ravel() for a in np.meshgrid(block, ns, indexing="ij"))
        base = np.array(family(m_idx, n_idx))
        keep = np.all((base >= 1) & (base <= N), axis=0)
        bases.append(base[:, keep])
        ms_all.append(m_idx[keep])
        ns_all.append(n_idx[keep])
    return np.concatenate(bases, axis=1), np.concatenate(ms_all), np.concatenate(ns_all)


def monochromatic_search(
    coloring: Coloring,
    eq: QuadEquation,
    N: int,
    k_max: Optional[int] = None,
    mn_max: Optional[int] = None,
    family: Optional[SolutionFamily] = None,
    distinct: bool = False,
    workers: Optional[int] = None,
) -> List[Triple]:
    """Triples (kx, ky, kz)(m, n) inside [N] with one color, ordered by (k, m, n).

    (m, n) ranges over every pair whose base triple lies in [N], bounded through the
    family's nonnegative factors. mn_max caps both m and n and is required when the
    family bounds neither on its own.
    """
    if N < 1:
        return []
    family = family or solution_family(eq)
    if callable(coloring):
        colors = np.asarray(coloring(np.arange(N + 1)))
    else:
        colors = np.asarray(coloring)
        if colors.size < N + 1:
            raise OutOfRangeError(f"coloring covers {colors.size} values, need {N + 1}")
        colors = colors[: N + 1]

    m_bound, n_bound = _pair_bounds(family, N)
    if mn_max is not None:
        m_bound = mn_max if m_bound is None else min(m_bound, mn_max)
        n_bound = mn_max if n_bound is None else min(n_bound, mn_max)
    if m_bound is None or n_bound is None:
        raise OutOfRangeError(f"the family {family} does not bound (m, n); pass mn_max")
    if m_bound * n_bound > PAIR_LIMIT:
        raise OutOfRangeError(f"{m_bound:,}×{n_bound:,} (m, n) pairs exceed {PAIR_LIMIT:,}; pass mn_max")
    if m_bound < 1 or n_bound < 1:
        return []
    base, m_idx, n_idx = _base_pairs(family, N, m_bound, n_bound)
    logger.debug(f"🔄 {m_idx.size:,} base pairs within m ≤ {m_bound:,}, n ≤ {n_bound:,}")
    if base.shape[1] == 0:
        return []
    # beyond this k every scaled triple leaves [N]
    k_cap = N // int(base.max(axis=0).min())
    k_max = min(k_max or k_cap, k_cap)

    count = default_workers() if workers is None else max(1, workers)
    tasks = [
        (list(r), base, m_idx, n_idx, colors, distinct)
        for r in (range(c.start + 1, c.stop + 1) for c in chunk_ranges(k_max, count * 4 if count > 1 else 1))
    ]
    chunks = ordered_map(_search_chunk, tasks, workers=count)
    triples = [Triple(*row) for chunk in chunks for row in chunk]
    logger.info(f"📊 {len(triples):,} monochromatic triples for {eq} within [{N:,}]")
    return triples
