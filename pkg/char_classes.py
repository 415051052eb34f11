"""
Universal conversions between Chern classes, the Chern character and the Todd class.

The universal polynomials live in a weighted GradedPoly ring over c1..cN
(c_i of weight i) and are evaluated in any target ring that supports
`+`, `*` and multiplication by a Fraction: GradedPoly (Borel classes),
ModelElement (ingested rings) or BSClass.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Sequence, Tuple

from errors import ContextMismatchError
from exact_poly import GradedPoly, PolyContext, todd_log_series, trunc_exp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChernTuple:
    """(c_1, ..., c_k) of a rank-`rank` bundle; missing higher classes are zero."""

    rank: int
    classes: Tuple[Any, ...]
    unit: Any

    def __post_init__(self):
        if self.rank < 0:
            raise ContextMismatchError(f"negative rank {self.rank}")
        object.__setattr__(self, "classes", tuple(self.classes))

    def zero(self):
        return self.unit * 0

    def c(self, i: int):
        if i == 0:
            return self.unit
        if 1 <= i <= len(self.classes):
            return self.classes[i - 1]
        return self.zero()

    def padded(self, length: int) -> List[Any]:
        return [self.c(i) for i in range(1, length + 1)]

    def total(self):
        result = self.unit
        for c in self.classes:
            result = result + c
        return result


def trivial(rank: int, unit: Any) -> ChernTuple:
    return ChernTuple(rank, (), unit)


# ---------------------------
# Universal polynomials
# ---------------------------
@lru_cache(maxsize=None)
def chern_context(cap: int) -> PolyContext:
    """c1..c_cap with c_i of weight i."""
    return PolyContext(tuple(f"c{i}" for i in range(1, cap + 1)), cap, tuple(range(1, cap + 1)))


@lru_cache(maxsize=None)
def power_sums(cap: int) -> Tuple[GradedPoly, ...]:
    """p_0..p_cap of the formal Chern roots (Newton's identities); p_0 is left at 0."""
    ctx = chern_context(cap)
    c = ctx.gens()
    p = [ctx.zero()]
    for k in range(1, cap + 1):
        value = c[k - 1] * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            value = value + c[i - 1] * p[k - i] * (-1) ** (i - 1)
        p.append(value)
    return tuple(p)


@lru_cache(maxsize=None)
def universal_chern_character(rank: int, cap: int) -> GradedPoly:
    """rank + sum_k p_k / k!."""
    ctx = chern_context(cap)
    p = power_sums(cap)
    result = ctx.const(rank)
    for k in range(1, cap + 1):
        result = result + p[k] / math.factorial(k)
    return result


@lru_cache(maxsize=None)
def universal_todd(cap: int) -> GradedPoly:
    """prod x_i/(1 - e^{-x_i}) = exp(sum_k g_k p_k), g the log-Todd coefficients."""
    ctx = chern_context(cap)
    g = todd_log_series(cap)
    p = power_sums(cap)
    exponent = ctx.zero()
    for k in range(1, cap + 1):
        exponent = exponent + p[k] * g[k]
    return trunc_exp(exponent)


def _evaluate(universal: GradedPoly, t: ChernTuple, cap: int):
    if cap == 0:
        return t.unit * universal.constant_term()
    return universal.evaluate_in(t.padded(cap), t.unit)


# ---------------------------
# Conversions
# ---------------------------
def chern_character(t: ChernTuple, cap: int):
    """rank + sum_k P_k(c_1..c_k), truncated at degree cap."""
    return _evaluate(universal_chern_character(t.rank, cap), t, cap)


def todd_class(t: ChernTuple, cap: int):
    return _evaluate(universal_todd(cap), t, cap)


def sum_of_line_bundles(weights: Sequence[Any], unit: Any) -> ChernTuple:
    """Chern classes of L_1 + ... + L_r with c_1(L_i) = weights[i]: elementary symmetric functions."""
    weights = list(weights)
    e = [unit] + [unit * 0 for _ in weights]
    for x in weights:
        for k in range(len(e) - 1, 0, -1):
            e[k] = e[k] + e[k - 1] * x
    return ChernTuple(len(weights), tuple(e[1:]), unit)


def direct_sum(a: ChernTuple, b: ChernTuple) -> ChernTuple:
    """Whitney sum: c(a + b) = c(a) c(b)."""
    length = len(a.classes) + len(b.classes)
    classes = []
    for k in range(1, length + 1):
        value = a.zero()
        for i in range(0, k + 1):
            if i <= len(a.classes) and k - i <= len(b.classes):
                value = value + a.c(i) * b.c(k - i)
        classes.append(value)
    return ChernTuple(a.rank + b.rank, tuple(classes), a.unit)


def chern_classes_from_character(rank: int, ch_parts: Sequence[Any], unit: Any) -> ChernTuple:
    """
    Inverse of chern_character: ch_parts[k-1] is the degree-k component ch_k.

    Uses p_k = k! ch_k and k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i.
    """
    p = [None] + [part * math.factorial(k) for k, part in enumerate(ch_parts, start=1)]
    e = [unit]
    for k in range(1, len(ch_parts) + 1):
        value = unit * 0
        for i in range(1, k + 1):
            value = value + e[k - i] * p[i] * (-1) ** (i - 1)
        e.append(value * Fraction(1, k))
    return ChernTuple(rank, tuple(e[1:]), unit)
