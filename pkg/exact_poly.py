"""
Exact rational arithmetic and truncated graded polynomials.

A GradedPoly is a sparse map from exponent vectors to Fractions living in a
PolyContext (ordered variables, per-variable weights and a degree cap).
Terms whose weighted degree exceeds the cap are discarded on construction,
so every product is automatically truncated.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar, Union

import sympy

from errors import ContextMismatchError, NotDivisibleError, SeriesError

Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]
E = TypeVar("E")


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"not an exact rational: {value!r}")


def render_fraction(value: Fraction) -> str:
    return str(value)


# ---------------------------
# Context
# ---------------------------
@dataclass(frozen=True)
class PolyContext:
    variables: Tuple[str, ...]
    cap: int
    weights: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.weights:
            object.__setattr__(self, "weights", (1,) * len(self.variables))
        if len(self.weights) != len(self.variables):
            raise ContextMismatchError("one weight per variable is required")
        if any(w < 1 for w in self.weights):
            raise ContextMismatchError("variable weights must be positive")
        if self.cap < 0:
            raise ContextMismatchError("degree cap must be non-negative")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def degree(self, exps: Exponents) -> int:
        return sum(w * e for w, e in zip(self.weights, exps))

    def with_cap(self, cap: int) -> "PolyContext":
        return PolyContext(self.variables, cap, self.weights)

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.const(1)

    def const(self, value: Scalar) -> "GradedPoly":
        return GradedPoly(self, {(0,) * self.nvars: value})

    def gen(self, index: int) -> "GradedPoly":
        exps = [0] * self.nvars
        exps[index] = 1
        return GradedPoly(self, {tuple(exps): 1})

    def gens(self) -> List["GradedPoly"]:
        return [self.gen(i) for i in range(self.nvars)]

    def linear(self, coeffs: Sequence[Scalar]) -> "GradedPoly":
        if len(coeffs) != self.nvars:
            raise ContextMismatchError(f"expected {self.nvars} coefficients, got {len(coeffs)}")
        terms = {}
        for i, c in enumerate(coeffs):
            exps = [0] * self.nvars
            exps[i] = 1
            terms[tuple(exps)] = c
        return GradedPoly(self, terms)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ContextMismatchError(f"unknown variable {name!r}") from None


# ---------------------------
# Polynomials
# ---------------------------
class GradedPoly:
    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: PolyContext, terms: Mapping[Exponents, Scalar]):
        clean: Dict[Exponents, Fraction] = {}
        for exps, coeff in terms.items():
            if len(exps) != ctx.nvars:
                raise ContextMismatchError("exponent vector length does not match the variables")
            c = as_fraction(coeff)
            if c and ctx.degree(exps) <= ctx.cap:
                clean[tuple(exps)] = c
        self.ctx = ctx
        self._terms = clean
        self._hash = None

    # -- inspection --------------------------------------------------------
    @property
    def variables(self) -> Tuple[str, ...]:
        return self.ctx.variables

    @property
    def degree_cap(self) -> int:
        return self.ctx.cap

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return MappingProxyType(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.ctx.nvars, Fraction(0))

    def degrees(self) -> List[int]:
        return sorted({self.ctx.degree(e) for e in self._terms})

    def lowest_degree(self) -> Optional[int]:
        degs = self.degrees()
        return degs[0] if degs else None

    def max_degree(self) -> Optional[int]:
        degs = self.degrees()
        return degs[-1] if degs else None

    def homogeneous(self, degree: int) -> "GradedPoly":
        return GradedPoly(self.ctx, {e: c for e, c in self._terms.items() if self.ctx.degree(e) == degree})

    def with_cap(self, cap: int) -> "GradedPoly":
        return GradedPoly(self.ctx.with_cap(cap), self._terms)

    def coefficient(self, exps: Exponents) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "GradedPoly") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError(f"variable context mismatch: {self.ctx} vs {other.ctx}")

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        if isinstance(other, GradedPoly):
            self._check(other)
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return GradedPoly(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.ctx, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedPoly(self.ctx, {e: c * other for e, c in self._terms.items()})
        if not isinstance(other, GradedPoly):
            return NotImplemented
        self._check(other)
        ctx = self.ctx
        cap = ctx.cap
        right = [(e, c, ctx.degree(e)) for e, c in other._terms.items()]
        out: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            d1 = ctx.degree(e1)
            for e2, c2, d2 in right:
                if d1 + d2 > cap:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return GradedPoly(ctx, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedPoly(self.ctx, {e: c / other for e, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- substitution ------------------------------------------------------
    def evaluate_in(self, values: Sequence[E], one: E) -> E:
        """Substitute ring elements for the variables (any ring with +, * and scalar *)."""
        if len(values) != self.ctx.nvars:
            raise ContextMismatchError("one value per variable is required")
        powers: Dict[Tuple[int, int], E] = {}

        def power(i: int, e: int) -> E:
            key = (i, e)
            if key not in powers:
                powers[key] = values[i] if e == 1 else power(i, e - 1) * values[i]
            return powers[key]

        total = None
        for exps, coeff in sorted(self._terms.items(), key=lambda item: _order_key(self.ctx, item[0])):
            term = one
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            term = term * coeff
            total = term if total is None else total + term
        return total if total is not None else one * 0

    def substitute_linear(self, images: Sequence["GradedPoly"]) -> "GradedPoly":
        if not images:
            return self
        return self.evaluate_in(list(images), images[0].ctx.one())

    # -- rendering ---------------------------------------------------------
    def render(self) -> str:
        if not self._terms:
            return "0"
        parts: List[str] = []
        for exps, coeff in sorted(self._terms.items(), key=lambda item: _order_key(self.ctx, item[0])):
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.ctx.variables, exps)
                if e
            )
            mag = abs(coeff)
            if not mono:
                body = render_fraction(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{render_fraction(mag)}*{mono}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f" + {body}" if coeff > 0 else f" - {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"GradedPoly({self.render()!r}, cap={self.ctx.cap})"

    # -- sympy bridge ------------------------------------------------------
    def to_sympy(self):
        symbols = [sympy.Symbol(v) for v in self.ctx.variables]
        expr = sympy.Integer(0)
        for exps, coeff in self._terms.items():
            term = sympy.Rational(coeff.numerator, coeff.denominator)
            for s, e in zip(symbols, exps):
                term *= s ** e
            expr += term
        return expr

    @classmethod
    def from_sympy(cls, ctx: PolyContext, expr) -> "GradedPoly":
        symbols = [sympy.Symbol(v) for v in ctx.variables]
        expr = sympy.expand(sympy.sympify(expr))
        if expr == 0:
            return ctx.zero()
        stray = expr.free_symbols - set(symbols)
        if stray:
            raise ContextMismatchError(f"unknown symbols {sorted(str(s) for s in stray)}")
        if not symbols:
            return ctx.const(as_fraction(sympy.Rational(expr)))
        try:
            poly = sympy.Poly(expr, *symbols)
        except sympy.PolynomialError as exc:
            raise ContextMismatchError(f"not a polynomial: {expr}") from exc
        terms = {}
        for exps, coeff in poly.terms():
            if not coeff.is_Rational:
                raise ContextMismatchError(f"coefficient {coeff} is not rational")
            terms[tuple(exps)] = as_fraction(coeff)
        return GradedPoly(ctx, terms)


def _order_key(ctx: PolyContext, exps: Exponents):
    # graded lex: lower degree first, then higher powers of earlier variables
    return (ctx.degree(exps), tuple(-e for e in exps))


# ---------------------------
# Operations
# ---------------------------
def add(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    f._check(g)
    return f + g


def mul(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    f._check(g)
    return f * g


def trunc_exp(f: GradedPoly) -> GradedPoly:
    if f.constant_term():
        raise SeriesError("trunc_exp needs a zero constant term")
    result = f.ctx.one()
    term = f.ctx.one()
    for k in range(1, f.ctx.cap + 1):
        term = term * f / k
        if not term:
            break
        result = result + term
    return result


def trunc_log(f: GradedPoly) -> GradedPoly:
    if f.constant_term() != 1:
        raise SeriesError("trunc_log needs constant term 1")
    u = f - 1
    result = f.ctx.zero()
    power = f.ctx.one()
    for m in range(1, f.ctx.cap + 1):
        power = power * u
        if not power:
            break
        result = result + power * Fraction((-1) ** (m + 1), m)
    return result


def is_linear(ell: GradedPoly) -> bool:
    return bool(ell) and all(sum(e) == 1 for e in ell._terms)


def divide_exact(f: GradedPoly, ell: GradedPoly) -> GradedPoly:
    """Quotient q with q*ell == f; raises NotDivisibleError otherwise."""
    f._check(ell)
    if not is_linear(ell):
        raise NotDivisibleError(f"divisor {ell.render()} is not a nonzero linear form")
    # pivot on the last variable present in ell; lex order with the pivot most significant
    pivot = max(e.index(1) for e in ell._terms)
    pivot_exps = tuple(1 if i == pivot else 0 for i in range(f.ctx.nvars))
    lead = ell._terms[pivot_exps]
    ell_terms = list(ell._terms.items())

    def key(exps: Exponents):
        return (exps[pivot], exps)

    remainder: Dict[Exponents, Fraction] = dict(f._terms)
    quotient: Dict[Exponents, Fraction] = {}
    while remainder:
        top = max(remainder, key=key)
        if top[pivot] == 0:
            raise NotDivisibleError(f"{ell.render()} does not divide {f.render()}")
        c = remainder[top] / lead
        q_exps = tuple(e - 1 if i == pivot else e for i, e in enumerate(top))
        quotient[q_exps] = quotient.get(q_exps, 0) + c
        for e_l, c_l in ell_terms:
            e = tuple(a + b for a, b in zip(q_exps, e_l))
            value = remainder.get(e, 0) - c * c_l
            if value:
                remainder[e] = value
            else:
                remainder.pop(e, None)
    return GradedPoly(f.ctx, quotient)


def series_quotient(num: GradedPoly, den: GradedPoly, cap: Optional[int] = None) -> GradedPoly:
    """
    Power-series quotient num/den, exact through degree `cap` (default: the
    inputs' cap) and returned in the inputs' context truncated there.

    When den has a zero constant term its lowest homogeneous part must be a
    linear form dividing both num and den. Dividing by it lowers the known
    precision by its degree, so the inputs must carry that many degrees beyond
    `cap`; otherwise SeriesError, never a silently shorter result.
    """
    num._check(den)
    target = num.ctx.cap if cap is None else cap
    if target < 0:
        raise SeriesError("series_quotient needs a non-negative cap")
    if not den:
        raise SeriesError("series_quotient by zero")
    lost = 0
    if not den.constant_term():
        lost = den.lowest_degree()
        low = den.homogeneous(lost)
        if not is_linear(low):
            raise SeriesError(f"zero leading coefficient after order matching ({den.render()})")
        try:
            num = divide_exact(num, low)
            den = divide_exact(den, low)
        except NotDivisibleError as exc:
            raise SeriesError(f"cannot match vanishing orders: {exc}") from exc
    if target + lost > num.ctx.cap:
        raise SeriesError(
            f"quotient through degree {target} needs both series through degree {target + lost}, "
            f"got {num.ctx.cap}"
        )
    num = num.with_cap(target)
    den = den.with_cap(target)
    c0 = den.constant_term()
    u = den / c0 - 1
    inverse = den.ctx.one()
    power = den.ctx.one()
    for _ in range(target):
        power = power * (-u)
        if not power:
            break
        inverse = inverse + power
    return num * inverse / c0


def formal_quotient(
    num: Callable[[PolyContext], GradedPoly],
    den: Callable[[PolyContext], GradedPoly],
    ctx: PolyContext,
) -> GradedPoly:
    """
    num/den for formal series given by builders, exact through ctx.cap and
    returned in ctx. The builders are evaluated with enough extra precision to
    absorb the order matching.
    """
    work = ctx.with_cap(ctx.cap + max(ctx.weights, default=1))
    return series_quotient(num(work), den(work), cap=ctx.cap)


def series_coefficients(f: GradedPoly) -> List[Fraction]:
    """Coefficients a_0..a_cap of a one-variable series."""
    if f.ctx.nvars != 1:
        raise ContextMismatchError("series_coefficients needs a one-variable context")
    return [f.coefficient((k,)) for k in range(f.ctx.cap + 1)]


@lru_cache(maxsize=None)
def todd_series(cap: int) -> Tuple[Fraction, ...]:
    """Coefficients of t/(1 - e^{-t}) up to t^cap."""
    ctx = PolyContext(("t",), cap)
    quotient = formal_quotient(lambda c: c.gen(0), lambda c: 1 - trunc_exp(-c.gen(0)), ctx)
    return tuple(series_coefficients(quotient))


@lru_cache(maxsize=None)
def todd_log_series(cap: int) -> Tuple[Fraction, ...]:
    """Coefficients of log(t/(1 - e^{-t})) up to t^cap."""
    ctx = PolyContext(("t",), cap)
    todd = GradedPoly(ctx, {(k,): c for k, c in enumerate(todd_series(cap))})
    return tuple(series_coefficients(trunc_log(todd)))


def evaluate_series(coeffs: Sequence[Fraction], x: E, one: E) -> E:
    """Sum of coeffs[k] * x^k in any ring; Horner from the top."""
    result = one * 0
    for c in reversed(coeffs):
        result = result * x + one * c
    return result
