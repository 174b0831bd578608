#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Linear Forms
Linear forms αm+βn, rational polynomials c·∏L_j^{k_j} that factor linearly,
substitutions, hypothesis checks and the lattice-indicator identity.
"""

import cmath
import enum
import math
import re
from dataclasses import InitVar, dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import (
    DegenerateSubstitutionError,
    EmptyAfterExclusionError,
    InvalidShiftError,
    OutOfRangeError,
    SchemaError,
    SingularMatrixError,
    TrivialFormError,
)


class Singular(enum.Enum):
    """Non-numeric outcomes of evaluating a rational polynomial."""
    UNDEFINED = "undefined"
    ZERO = "zero"


@dataclass(frozen=True, order=True)
class LinearForm:
    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0:
            raise TrivialFormError("the zero form (0, 0) is not a linear form")

    def __call__(self, m, n):
        return self.alpha * m + self.beta * n

    @property
    def nonnegative(self) -> bool:
        return self.alpha >= 0 and self.beta >= 0

    def normalized(self) -> Tuple[int, int, "LinearForm"]:
        """(content, sign, primitive form); first nonzero coefficient made positive."""
        g = math.gcd(self.alpha, self.beta)
        alpha, beta = self.alpha // g, self.beta // g
        sign = 1
        if alpha < 0 or (alpha == 0 and beta < 0):
            alpha, beta, sign = -alpha, -beta, -1
        return g, sign, LinearForm(alpha, beta)

    def __str__(self) -> str:
        op = "-" if self.beta < 0 else "+"
        return f"({self.alpha} m {op} {abs(self.beta)} n)"


def independent(first: LinearForm, second: LinearForm) -> bool:
    return first.alpha * second.beta != second.alpha * first.beta


@dataclass(frozen=True)
class RationalPolynomialFL:
    """c·∏ L_j^{k_j}, stored canonically: primitive distinct forms, sorted."""
    c: Fraction
    factors: Tuple[Tuple[LinearForm, int], ...] = ()
    allow_signed: InitVar[bool] = False
    signed: bool = field(init=False, default=False)

    def __post_init__(self, allow_signed: bool):
        c = Fraction(self.c)
        merged = {}
        for form, k in self.factors:
            if not isinstance(form, LinearForm):
                form = LinearForm(*form)
            if not form.nonnegative and not allow_signed:
                raise TrivialFormError(f"form {form} has a negative coefficient")
            k = int(k)
            if k == 0:
                continue
            content, sign, primitive = form.normalized()
            c *= Fraction(content * sign) ** k
            merged[primitive] = merged.get(primitive, 0) + k
        if c == 0:
            raise OutOfRangeError("the constant c must be nonzero")
        factors = tuple(sorted((f, k) for f, k in merged.items() if k != 0))
        signed = c < 0 or any(not f.nonnegative for f, _ in factors)
        if signed and not allow_signed:
            raise OutOfRangeError("the constant c must be positive")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "signed", signed)

    @property
    def forms(self) -> Tuple[LinearForm, ...]:
        return tuple(f for f, _ in self.factors)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(k for _, k in self.factors)

    def __str__(self) -> str:
        return format_rp(self)


def rp(c=1, *factors, allow_signed: bool = False) -> RationalPolynomialFL:
    """Shorthand: rp(2, ((1, 1), 1), ((0, 1), -1)) is 2(m+n)/n."""
    return RationalPolynomialFL(Fraction(c), tuple(factors), allow_signed)


ONE = RationalPolynomialFL(Fraction(1))


def eval_rp(R: RationalPolynomialFL, m: int, n: int) -> Union[Fraction, Singular]:
    """Exact value, or Singular.ZERO / Singular.UNDEFINED."""
    value = R.c
    zero = undefined = False
    for form, k in R.factors:
        v = form(m, n)
        if v == 0:
            if k < 0:
                undefined = True
            else:
                zero = True
            continue
        value *= Fraction(v) ** k
    if undefined:
        return Singular.UNDEFINED
    if zero:
        return Singular.ZERO
    return value


def degree(R: RationalPolynomialFL) -> int:
    return sum(R.exponents)


def is_simple_zero(R: RationalPolynomialFL, m0: int, n0: int) -> bool:
    return any(k == 1 and form(m0, n0) == 0 for form, k in R.factors)


def _primitive(form: LinearForm) -> LinearForm:
    return form.normalized()[2]


def power_form_order(R: RationalPolynomialFL, excluded: Optional[Iterable[LinearForm]] = None) -> int:
    """gcd of the exponents left after dropping the excluded forms."""
    dropped = {_primitive(f) for f in (excluded or ())}
    remaining = [abs(k) for form, k in R.factors if form not in dropped]
    if not remaining:
        raise EmptyAfterExclusionError("no factor left after exclusion; the power-form test is vacuous")
    return math.gcd(*remaining)


def root_polynomial(R: RationalPolynomialFL, r: int) -> RationalPolynomialFL:
    """S with R = c·S^r (S has constant 1); r must divide every exponent."""
    if any(k % r for k in R.exponents):
        raise OutOfRangeError(f"{r} does not divide every exponent of {format_rp(R)}")
    return RationalPolynomialFL(Fraction(1), tuple((f, k // r) for f, k in R.factors), R.signed)


def substitute(
    R: RationalPolynomialFL,
    m_shift: Tuple[int, int, int],
    n_shift: Tuple[int, int, int],
) -> RationalPolynomialFL:
    """Applies m ↦ um+vn, n ↦ u'm+v'n (affine parts must vanish)."""
    (u, v, w), (u2, v2, w2) = m_shift, n_shift
    if w or w2:
        raise InvalidShiftError("affine shifts belong to grids; substitutions must be linear")
    factors = []
    for form, k in R.factors:
        alpha = form.alpha * u + form.beta * u2
        beta = form.alpha * v + form.beta * v2
        if alpha == 0 and beta == 0:
            raise DegenerateSubstitutionError(f"factor {form} vanishes identically")
        factors.append((LinearForm(alpha, beta), k))
    return RationalPolynomialFL(R.c, tuple(factors), True)


# =============================================================================
# HYPOTHESIS CHECKS FOR THE RECURRENCE THEOREMS
# =============================================================================

def main_a_base_point(forms: Sequence[LinearForm], box: int = 10) -> Optional[Tuple[int, int]]:
    """First (m0, n0) in [0, box]² with L_1 ∈ {0, 1} and L_j = 1 for j ≥ 2."""
    first, rest = forms[0], forms[1:]
    for m0 in range(box + 1):
        for n0 in range(box + 1):
            if first(m0, n0) in (0, 1) and all(L(m0, n0) == 1 for L in rest):
                return (m0, n0)
    return None


@dataclass
class MainBReport:
    r2_shape_ok: bool
    r1_not_power: bool
    base_point: Optional[Tuple[int, int]]
    degree_zero_unit_point: bool

    @property
    def satisfied(self) -> bool:
        return self.r2_shape_ok and self.r1_not_power and self.base_point is not None


def main_b_report(R1: RationalPolynomialFL, R2: RationalPolynomialFL, box: int = 10) -> MainBReport:
    """Checks the hypotheses of the rational-pair lower bound on a search box."""
    r2_forms = R2.forms
    shape_ok = len(r2_forms) <= 2 and (len(r2_forms) < 2 or independent(*r2_forms))
    try:
        not_power = power_form_order(R1, excluded=r2_forms) == 1
    except EmptyAfterExclusionError:
        not_power = False

    base = None
    both_one = False
    for m0 in range(box + 1):
        for n0 in range(box + 1):
            v2 = eval_rp(R2, m0, n0)
            if v2 != 1:
                continue
            v1 = eval_rp(R1, m0, n0)
            if v1 == 1:
                both_one = True
            if base is None and (v1 == 1 or is_simple_zero(R1, m0, n0)):
                base = (m0, n0)
    return MainBReport(
        r2_shape_ok=shape_ok,
        r1_not_power=not_power,
        base_point=base,
        degree_zero_unit_point=degree(R1) == 0 and both_one,
    )


# =============================================================================
# GRIDS AND THE LATTICE INDICATOR IDENTITY
# =============================================================================

@dataclass(frozen=True)
class Grid2D:
    """Λ = {(a1·m + b1, a2·n + b2)}."""
    a1: int = 1
    b1: int = 0
    a2: int = 1
    b2: int = 0

    def __post_init__(self):
        if self.a1 < 1 or self.a2 < 1:
            raise OutOfRangeError("grid steps a1, a2 must be positive")

    def contains(self, m, n):
        return ((m - self.b1) % self.a1 == 0) & ((n - self.b2) % self.a2 == 0)

    def point(self, m, n):
        return self.a1 * m + self.b1, self.a2 * n + self.b2

    @property
    def is_full(self) -> bool:
        return self == FULL_GRID


FULL_GRID = Grid2D()


@dataclass(frozen=True)
class LatticeCheck:
    indicator: int
    exponential_sum: complex
    dual: Tuple[Tuple[Fraction, Fraction], ...]

    @property
    def agrees(self) -> bool:
        return abs(self.exponential_sum - self.indicator) <= 1e-12


def lattice_dual(A: Sequence[Sequence[int]]) -> Tuple[Tuple[Fraction, Fraction], ...]:
    """Z_A = {q ∈ [0,1)² : q·A ∈ Z²}, |det A| elements."""
    (a, b), (c, d) = A
    det = a * d - b * c
    if det == 0:
        raise SingularMatrixError(f"matrix {A} is singular")
    # rows of A^{-1}
    inv = ((Fraction(d, det), Fraction(-b, det)), (Fraction(-c, det), Fraction(a, det)))
    size = abs(det)
    points = set()
    for k1 in range(size):
        for k2 in range(size):
            q1 = (k1 * inv[0][0] + k2 * inv[1][0]) % 1
            q2 = (k1 * inv[0][1] + k2 * inv[1][1]) % 1
            points.add((q1, q2))
    return tuple(sorted(points))


def lattice_indicator_check(A: Sequence[Sequence[int]], m: int, n: int) -> LatticeCheck:
    """Membership of (m, n) in A·Z² next to E_{q∈Z_A} e(m q1 + n q2)."""
    dual = lattice_dual(A)
    (a, b), (c, d) = A
    det = a * d - b * c
    inside = (d * m - b * n) % det == 0 and (-c * m + a * n) % det == 0
    total = sum(cmath.exp(2j * math.pi * float((m * q1 + n * q2) % 1)) for q1, q2 in dual)
    return LatticeCheck(indicator=int(inside), exponential_sum=total / len(dual), dual=dual)


# =============================================================================
# TEXT SYNTAX
# =============================================================================

_TERM = re.compile(r"([+-]?)(\d*)([mn])")
_FACTOR = re.compile(r"^\((?P<body>[^()]*)\)(?:\^\(?(?P<exp>[+-]?\d+)\)?)?$|^(?P<var>[mn])(?:\^\(?(?P<vexp>[+-]?\d+)\)?)?$")


def _parse_form(body: str) -> LinearForm:
    text = body.replace(" ", "")
    coeffs = {"m": 0, "n": 0}
    pos = 0
    for match in _TERM.finditer(text):
        if match.start() != pos or (pos > 0 and not match.group(1)):
            raise SchemaError(f"cannot parse linear form '{body}'")
        sign = -1 if match.group(1) == "-" else 1
        coeffs[match.group(3)] += sign * int(match.group(2) or 1)
        pos = match.end()
    if pos != len(text) or pos == 0:
        raise SchemaError(f"cannot parse linear form '{body}'")
    return LinearForm(coeffs["m"], coeffs["n"])


def parse_form(text: str) -> LinearForm:
    """'m + 2n', '(1 m + 2 n)' or 'n'."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    return _parse_form(text)


def parse_rp(text: str, allow_signed: bool = False) -> RationalPolynomialFL:
    """Parses 'c * (a m + b n)^k * ...'; a bare constant is allowed."""
    c = Fraction(1)
    factors: List[Tuple[LinearForm, int]] = []
    for token in text.split("*"):
        token = token.strip().replace(" ", "")
        if not token:
            raise SchemaError(f"empty factor in '{text}'")
        match = _FACTOR.match(token)
        if match is None:
            try:
                c *= Fraction(token)
            except (ValueError, ZeroDivisionError) as e:
                raise SchemaError(f"cannot parse factor '{token}' in '{text}'") from e
            continue
        if match.group("var"):
            form = LinearForm(1, 0) if match.group("var") == "m" else LinearForm(0, 1)
            k = int(match.group("vexp") or 1)
        else:
            form = _parse_form(match.group("body"))
            k = int(match.group("exp") or 1)
        factors.append((form, k))
    try:
        return RationalPolynomialFL(c, tuple(factors), allow_signed)
    except (TrivialFormError, OutOfRangeError) as e:
        raise SchemaError(f"invalid rational polynomial '{text}': {e}") from e


def format_rp(R: RationalPolynomialFL) -> str:
    parts = [str(R.c)]
    parts += [f"{form}^{k}" for form, k in R.factors]
    return " * ".join(parts)


def form_values(R: RationalPolynomialFL, m: np.ndarray, n: np.ndarray) -> List[np.ndarray]:
    """Values of every factor form on the arrays (m, n)."""
    return [form(m, n) for form in R.forms]
