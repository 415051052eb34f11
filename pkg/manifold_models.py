"""
Finite presentations of H^even(X, Z): explicit multiplication tables with an
integration functional, tangent Chern classes and an optional Sq^2 table.

Model file format (one entry per line, `#` starts a comment):

    name: P2
    dim: 2
    basis 0: 1
    basis 1: h
    basis 2: h2
    mult: h * h = h2
    integrate: h2 = 1
    tangent: c1 = 3*h
    tangent: c2 = 3*h2
    h2basis: h
    sq2: <H^4 name> = <H^6 combination>      (only meaningful when dim >= 3)

`basis d` lists the basis of H^{2d}.  Products that are not listed are zero.
"""
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from sympy.matrices.normalforms import smith_normal_form
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from bgg import BorelClass, borel_context, integrate_gp, is_invariant, weight_form
from char_classes import ChernTuple
from errors import ContextMismatchError, HypothesisError, ModelParseError, ModelValidationError, SeriesError
from exact_poly import GradedPoly, as_fraction, render_fraction
from root_system import CartanType, RootDatum, build
from weyl import Parabolic, parabolic

logger = logging.getLogger(__name__)

LinComb = Dict[str, Fraction]
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TRANSFORMS = standard_transformations + (convert_xor,)


# ---------------------------
# Ring models
# ---------------------------
@dataclass(frozen=True)
class RingModel:
    name: str
    dim: int
    basis: Tuple[Tuple[str, ...], ...]
    mult: Mapping[Tuple[str, str], LinComb] = field(repr=False)
    integrals: Mapping[str, Fraction] = field(repr=False)
    tangent: Tuple[LinComb, ...] = field(repr=False)
    h2_basis: Tuple[str, ...] = ()
    sq2_table: Optional[Mapping[str, Tuple[str, ...]]] = field(default=None, repr=False)

    def __post_init__(self):
        degrees = {}
        order = {}
        for d, names in enumerate(self.basis):
            for name in names:
                if name in degrees:
                    raise ModelValidationError(f"basis element {name} listed twice", (name,))
                degrees[name] = d
                order[name] = len(order)
        object.__setattr__(self, "_degrees", degrees)
        object.__setattr__(self, "_order", order)
        if not self.h2_basis and len(self.basis) > 1:
            object.__setattr__(self, "h2_basis", tuple(self.basis[1]))

    # -- basis -------------------------------------------------------------
    @property
    def names(self) -> List[str]:
        return [name for names in self.basis for name in names]

    def degree_of(self, name: str) -> int:
        try:
            return self._degrees[name]
        except KeyError:
            raise ContextMismatchError(f"{name!r} is not a basis element of {self.name}") from None

    def key(self, a: str, b: str) -> Tuple[str, str]:
        return (a, b) if self._order[a] <= self._order[b] else (b, a)

    def product(self, a: str, b: str) -> LinComb:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        return dict(self.mult.get(self.key(a, b), {}))

    # -- elements ----------------------------------------------------------
    def element(self, coeffs: Mapping[str, Any]) -> "ModelElement":
        for name in coeffs:
            self.degree_of(name)
        return ModelElement(self, coeffs)

    def zero(self) -> "ModelElement":
        return ModelElement(self, {})

    def one(self) -> "ModelElement":
        return ModelElement(self, {"1": 1})

    def gen(self, name: str) -> "ModelElement":
        return self.element({name: 1})

    def h2_elements(self) -> List["ModelElement"]:
        return [self.gen(name) for name in self.h2_basis]

    def tangent_chern(self) -> ChernTuple:
        return ChernTuple(self.dim, tuple(self.element(c) for c in self.tangent), self.one())

    def integrate(self, x: "ModelElement") -> Fraction:
        return sum((c * self.integrals.get(name, 0) for name, c in x.coeffs.items()), Fraction(0))

    def has_sq2(self) -> bool:
        return self.sq2_table is not None

    def sq2(self, x: "ModelElement") -> "ModelElement":
        """Sq^2 on a degree-4 class, reduced mod 2 (H^6 coefficients in {0, 1})."""
        if self.sq2_table is None:
            raise HypothesisError(f"model {self.name} carries no Sq^2 table")
        out: Dict[str, int] = {}
        for name, c in x.homogeneous(2).coeffs.items():
            if c.denominator != 1:
                raise HypothesisError(f"Sq^2 needs an integral class, got {render_fraction(c)}*{name}")
            if c.numerator % 2:
                for target in self.sq2_table.get(name, ()):
                    out[target] = out.get(target, 0) ^ 1
        return ModelElement(self, out)


class ModelElement:
    __slots__ = ("model", "coeffs")

    def __init__(self, model: RingModel, coeffs: Mapping[str, Any]):
        self.model = model
        self.coeffs = {name: as_fraction(c) for name, c in coeffs.items() if c}

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.model.one() * other
        if not isinstance(other, ModelElement):
            return NotImplemented
        return self.model == other.model and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.model.name, frozenset(self.coeffs.items())))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _check(self, other: "ModelElement") -> None:
        if other.model is not self.model and other.model != self.model:
            raise ContextMismatchError(f"elements of {self.model.name} and {other.model.name}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.model.one() * other
        if not isinstance(other, ModelElement):
            return NotImplemented
        self._check(other)
        coeffs = dict(self.coeffs)
        for name, c in other.coeffs.items():
            coeffs[name] = coeffs.get(name, 0) + c
        return ModelElement(self.model, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return ModelElement(self.model, {name: -c for name, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ModelElement(self.model, {name: c * other for name, c in self.coeffs.items()})
        if not isinstance(other, ModelElement):
            return NotImplemented
        self._check(other)
        out: Dict[str, Fraction] = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                for name, c in self.model.product(a, b).items():
                    out[name] = out.get(name, 0) + ca * cb * c
        return ModelElement(self.model, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = self.model.one()
        for _ in range(k):
            result = result * self
        return result

    def constant_term(self) -> Fraction:
        return self.coeffs.get("1", Fraction(0))

    def homogeneous(self, degree: int) -> "ModelElement":
        return ModelElement(
            self.model, {n: c for n, c in self.coeffs.items() if self.model.degree_of(n) == degree}
        )

    def exp(self) -> "ModelElement":
        if self.constant_term():
            raise SeriesError("exp needs a nilpotent class")
        result = self.model.one()
        term = self.model.one()
        for k in range(1, self.model.dim + 1):
            term = term * self * Fraction(1, k)
            if not term:
                break
            result = result + term
        return result

    def render(self) -> str:
        return render_lincomb(self.model, self.coeffs)

    def __repr__(self) -> str:
        return f"ModelElement({self.render()!r})"


def render_lincomb(model: RingModel, coeffs: Mapping[str, Fraction]) -> str:
    items = sorted(((n, c) for n, c in coeffs.items() if c), key=lambda nc: model._order[nc[0]])
    if not items:
        return "0"
    parts = []
    for name, c in items:
        if name == "1":
            parts.append(render_fraction(c))
        elif c == 1:
            parts.append(name)
        else:
            parts.append(f"{render_fraction(c)}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------
# Validation
# ---------------------------
def validate_model(model: RingModel) -> RingModel:
    """Exhaustive structural checks; failures carry a witness tuple of basis names."""
    if not model.basis or tuple(model.basis[0]) != ("1",):
        raise ModelValidationError("degree-0 basis must be exactly {1}", ("1",))
    if len(model.basis) != model.dim + 1:
        raise ModelValidationError(f"expected bases for degrees 0..{model.dim}", (model.name,))
    for name in model.names[1:]:
        if not _IDENTIFIER.match(name):
            raise ModelValidationError(f"basis name {name!r} is not an identifier", (name,))

    for (a, b), rhs in model.mult.items():
        if "1" in (a, b):
            raise ModelValidationError("products with 1 are implicit", (a, b))
        target = model.degree_of(a) + model.degree_of(b)
        for name in rhs:
            if model.degree_of(name) != target:
                raise ModelValidationError(
                    f"grading violation: {a} * {b} has a term {name} of degree {model.degree_of(name)}",
                    (a, b, name),
                )

    names = model.names[1:]
    for a, b, c in product(names, repeat=3):
        if model.degree_of(a) + model.degree_of(b) + model.degree_of(c) > model.dim:
            continue
        x, y, z = model.gen(a), model.gen(b), model.gen(c)
        if (x * y) * z != x * (y * z):
            raise ModelValidationError(f"associativity fails for ({a} * {b}) * {c}", (a, b, c))

    top = set(model.basis[model.dim])
    for name, value in model.integrals.items():
        if name not in top:
            raise ModelValidationError(f"integrate is only defined on top degree, got {name}", (name,))
        if as_fraction(value).denominator != 1:
            raise ModelValidationError(f"integral of {name} is not an integer", (name,))
    missing = sorted(top - set(model.integrals), key=model._order.get)
    if missing:
        raise ModelValidationError(f"no integral given for {missing[0]}", (missing[0],))

    if len(model.tangent) > model.dim:
        raise ModelValidationError("more tangent classes than the dimension", (model.name,))
    for k, c in enumerate(model.tangent, start=1):
        for name in c:
            if model.degree_of(name) != k:
                raise ModelValidationError(f"tangent c{k} has a term {name} of degree {model.degree_of(name)}", (f"c{k}", name))

    for name in model.h2_basis:
        if model.degree_of(name) != 1:
            raise ModelValidationError(f"h2basis element {name} is not in H^2", (name,))

    if model.sq2_table is not None:
        for name, targets in model.sq2_table.items():
            if model.degree_of(name) != 2:
                raise ModelValidationError(f"sq2 source {name} is not in H^4", (name,))
            for target in targets:
                if model.degree_of(target) != 3:
                    raise ModelValidationError(f"sq2 target {target} is not in H^6", (name, target))
    return model


def validate_generation(model: RingModel) -> None:
    """H^even(X, Z) is generated multiplicatively by the H^2 basis (Smith normal form over Z per degree)."""
    for d in range(1, model.dim + 1):
        names = model.basis[d]
        if not names:
            continue
        rows = []
        for mono in combinations_with_replacement(model.h2_basis, d):
            x = model.one()
            for g in mono:
                x = x * model.gen(g)
            coords = [x.coeffs.get(name, Fraction(0)) for name in names]
            if any(c.denominator != 1 for c in coords):
                raise HypothesisError(f"non-integral structure constants in degree {d} of {model.name}")
            rows.append([int(c) for c in coords])
        if not rows:
            raise HypothesisError(f"H^{2 * d} of {model.name} is not generated by H^2")
        snf = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
        units = sum(1 for i in range(min(snf.shape)) if abs(snf[i, i]) == 1)
        if units != len(names):
            raise HypothesisError(f"H^{2 * d} of {model.name} is not generated by H^2 over Z")


# ---------------------------
# Builders
# ---------------------------
def build_model(
    name: str,
    dim: int,
    basis: Sequence[Sequence[str]],
    mult: Iterable[Tuple[str, str, Mapping[str, Any]]],
    integrals: Mapping[str, Any],
    tangent: Sequence[Mapping[str, Any]],
    h2_basis: Sequence[str] = (),
    sq2_table: Optional[Mapping[str, Iterable[str]]] = None,
) -> RingModel:
    """Canonicalize tables (commuting entries merged, zeros dropped) and validate."""
    skeleton = RingModel(name, dim, tuple(tuple(b) for b in basis), {}, {}, (), tuple(h2_basis))
    table: Dict[Tuple[str, str], LinComb] = {}
    for a, b, rhs in mult:
        skeleton.degree_of(a)
        skeleton.degree_of(b)
        key = skeleton.key(a, b)
        clean = {n: as_fraction(c) for n, c in rhs.items() if c}
        for n in clean:
            skeleton.degree_of(n)
        if key in table and table[key] != clean:
            raise ModelValidationError(f"conflicting products for {a} * {b}", (a, b))
        if clean:
            table[key] = clean
    sq2 = None
    if sq2_table is not None:
        sq2 = {k: tuple(sorted(set(v), key=skeleton._order.get)) for k, v in sq2_table.items()}
    model = RingModel(
        name=name,
        dim=dim,
        basis=skeleton.basis,
        mult=table,
        integrals={n: as_fraction(v) for n, v in integrals.items()},
        tangent=tuple({n: as_fraction(c) for n, c in t.items() if c} for t in tangent),
        h2_basis=skeleton.h2_basis,
        sq2_table=sq2,
    )
    return validate_model(model)


@lru_cache(maxsize=None)
def projective_space(n: int) -> RingModel:
    """Z[h]/(h^{n+1}) with c(T) = (1+h)^{n+1} and Sq^2(h^j) = j h^{j+1}."""
    if n < 1:
        raise ContextMismatchError("projective space needs n >= 1")
    names = ["1", "h"] + [f"h{j}" for j in range(2, n + 1)]
    mult = [
        (names[i], names[j], {names[i + j]: 1})
        for i in range(1, n + 1)
        for j in range(i, n + 1)
        if i + j <= n
    ]
    tangent = [{names[k]: math.comb(n + 1, k)} for k in range(1, n + 1)]
    # Sq^2(h^2) = 2 h^3 = 0 mod 2
    sq2 = {names[2]: ()} if n >= 2 else None
    return build_model(
        name=f"P{n}",
        dim=n,
        basis=[(name,) for name in names],
        mult=mult,
        integrals={names[n]: 1},
        tangent=tangent,
        h2_basis=("h",),
        sq2_table=sq2,
    )


def _product_name(a: str, b: str, tags: Tuple[str, str]) -> str:
    if a == "1" and b == "1":
        return "1"
    if b == "1":
        return f"{a}_{tags[0]}"
    if a == "1":
        return f"{b}_{tags[1]}"
    return f"{a}_{tags[0]}_{b}_{tags[1]}"


def _sq2_of(model: RingModel, name: str) -> Optional[LinComb]:
    """Sq^2 mod 2 on a basis element of degree <= 2 (Sq^2 x = x^2 on H^2); None when unknown."""
    d = model.degree_of(name)
    if d == 0:
        return {}
    if d == 1:
        square = model.gen(name) * model.gen(name)
        return {n: Fraction(1) for n, c in square.coeffs.items() if c.numerator % 2}
    if d == 2:
        if model.dim < 3:
            return {}
        if model.sq2_table is None:
            return None
        return {n: Fraction(1) for n in model.sq2_table.get(name, ())}
    return None


def kunneth(left: RingModel, right: RingModel, tags: Tuple[str, str] = ("1", "2")) -> RingModel:
    """H*(X x Y) = H*(X) (x) H*(Y), tangent classes multiplied, Sq^2 by the Cartan formula."""
    dim = left.dim + right.dim
    pairs: Dict[int, List[Tuple[str, str]]] = {d: [] for d in range(dim + 1)}
    for a in left.names:
        for b in right.names:
            pairs[left.degree_of(a) + right.degree_of(b)].append((a, b))
    rename = {(a, b): _product_name(a, b, tags) for d in pairs for a, b in pairs[d]}
    basis = [[rename[p] for p in pairs[d]] for d in range(dim + 1)]

    def tensor(x: LinComb, y: LinComb) -> LinComb:
        out: LinComb = {}
        for a, ca in x.items():
            for b, cb in y.items():
                out[rename[(a, b)]] = out.get(rename[(a, b)], 0) + ca * cb
        return out

    mult = []
    flat = [p for d in range(1, dim + 1) for p in pairs[d]]
    for i, (a, b) in enumerate(flat):
        for c, e in flat[i:]:
            mult.append((rename[(a, b)], rename[(c, e)], tensor(left.product(a, c), right.product(b, e))))

    integrals = {}
    for a in left.basis[left.dim]:
        for b in right.basis[right.dim]:
            integrals[rename[(a, b)]] = left.integrals[a] * right.integrals[b]

    total_left = [{"1": Fraction(1)}] + [dict(c) for c in left.tangent] + [{}] * (left.dim - len(left.tangent))
    total_right = [{"1": Fraction(1)}] + [dict(c) for c in right.tangent] + [{}] * (right.dim - len(right.tangent))
    tangent = []
    for k in range(1, dim + 1):
        ck: LinComb = {}
        for i in range(0, k + 1):
            j = k - i
            if i <= left.dim and j <= right.dim:
                for n, c in tensor(total_left[i], total_right[j]).items():
                    ck[n] = ck.get(n, 0) + c
        tangent.append(ck)

    sq2: Optional[Dict[str, List[str]]] = {}
    if dim >= 3:
        for a, b in pairs[2]:
            # Sq^2(a x b) = Sq^2 a x b + a x Sq^2 b
            sa, sb = _sq2_of(left, a), _sq2_of(right, b)
            if sa is None or sb is None:
                sq2 = None
                break
            image = tensor(sa, {b: Fraction(1)})
            for n, c in tensor({a: Fraction(1)}, sb).items():
                image[n] = image.get(n, 0) + c
            sq2[rename[(a, b)]] = [n for n, c in image.items() if c.numerator % 2]

    h2 = [rename[(a, "1")] for a in left.h2_basis] + [rename[("1", b)] for b in right.h2_basis]
    model = build_model(
        name=f"{left.name}x{right.name}",
        dim=dim,
        basis=basis,
        mult=mult,
        integrals=integrals,
        tangent=tangent,
        h2_basis=h2,
        sq2_table=sq2,
    )
    logger.debug(f"built Kunneth product {model.name}: dim {dim}, {len(model.names)} basis elements")
    return model


# ---------------------------
# Flag manifolds
# ---------------------------
@dataclass(frozen=True)
class FlagManifold:
    """G/P seen through the Borel picture: classes are W_I-invariant BorelClasses."""

    datum: RootDatum
    subset: Parabolic

    @property
    def name(self) -> str:
        inside = ",".join(str(i + 1) for i in sorted(self.subset))
        return f"{self.datum.cartan_type}/P{{{inside}}}"

    @property
    def dim(self) -> int:
        return self.datum.n - len(self.datum.sub_positive_roots(self.subset))

    @property
    def h2_indices(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.datum.rank) if i not in self.subset)

    def h2_elements(self) -> List[BorelClass]:
        return [weight_form(self.datum, self.datum.fundamental_weight(i)) for i in self.h2_indices]

    def one(self) -> BorelClass:
        return borel_context(self.datum).one()

    def check_invariant(self, f: BorelClass, label: str = "class") -> None:
        if not is_invariant(self.datum, f, self.subset):
            raise HypothesisError(f"{label} {f.render()} is not W_I-invariant for I = {sorted(i + 1 for i in self.subset)}")

    def integrate(self, f: BorelClass) -> Fraction:
        return integrate_gp(f, self.datum, self.subset)


ManifoldRef = Union[RingModel, FlagManifold]


def flag_model(cartan_type: Union[CartanType, str], indices: Iterable[int] = ()) -> FlagManifold:
    """`indices` are 0-based simple-root indices generating W_I."""
    datum = build(cartan_type)
    return FlagManifold(datum, parabolic(datum, indices))


# ---------------------------
# Text formats
# ---------------------------
class ModelDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    name: str = Field(..., min_length=1, description="Model name")
    dim: int = Field(..., ge=0, description="Complex dimension")
    basis: Dict[int, List[str]] = Field(..., description="Basis of H^{2d} per degree d")
    mult: List[Tuple[str, str, Dict[str, Fraction]]] = Field(default_factory=list, description="Nonzero products")
    integrate: Dict[str, Fraction] = Field(default_factory=dict, description="Top-degree integrals")
    tangent: Dict[int, Dict[str, Fraction]] = Field(default_factory=dict, description="Tangent Chern classes c_k")
    h2basis: List[str] = Field(default_factory=list, description="Distinguished generators of H^2")
    sq2: Optional[Dict[str, List[str]]] = Field(None, description="Sq^2: H^4 -> H^6 mod 2")


_KEYS = ("name", "dim", "basis", "mult", "integrate", "tangent", "h2basis", "sq2")
_LINE = re.compile(r"^(?P<key>[A-Za-z0-9_]+)(?:\s+(?P<arg>\d+))?\s*:\s*(?P<value>.*)$")


def _parse_expression(text: str, symbols: Iterable[str], line_no: int):
    local = {name: sympy.Symbol(name) for name in symbols}
    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS)
    except Exception as exc:
        raise ModelParseError(f"cannot parse expression {text!r} ({exc.__class__.__name__})", line_no) from None
    unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in local)
    if unknown:
        raise ModelParseError(f"unknown name {unknown[0]!r} in {text!r}", line_no)
    return sympy.expand(expr)


def _linear_combination(text: str, names: Sequence[str], line_no: int) -> LinComb:
    """`2*a - b/3 + 1` over basis names; constants go to the unit `1`."""
    expr = _parse_expression(text, [n for n in names if n != "1"], line_no)
    out: LinComb = {}
    for term in sympy.Add.make_args(expr):
        coeff, rest = term.as_coeff_Mul()
        if not coeff.is_Rational:
            raise ModelParseError(f"non-rational coefficient in {text!r}", line_no)
        if rest == 1:
            name = "1"
        elif rest.is_Symbol:
            name = str(rest)
        else:
            raise ModelParseError(f"{text!r} is not a linear combination of basis elements", line_no)
        out[name] = out.get(name, 0) + as_fraction(coeff)
    return {n: c for n, c in out.items() if c}


def _evaluate_expression(expr, gens: Mapping[str, Any], one: Any, line_no: int):
    if expr.is_Symbol:
        return gens[str(expr)]
    if expr.is_Rational:
        return one * as_fraction(expr)
    if expr.is_Add:
        args = [_evaluate_expression(a, gens, one, line_no) for a in expr.args]
        result = args[0]
        for a in args[1:]:
            result = result + a
        return result
    if expr.is_Mul:
        result = one
        for a in expr.args:
            result = result * _evaluate_expression(a, gens, one, line_no)
        return result
    if expr.is_Pow and expr.exp.is_Integer and expr.exp >= 0:
        base = _evaluate_expression(expr.base, gens, one, line_no)
        result = one
        for _ in range(int(expr.exp)):
            result = result * base
        return result
    raise ModelParseError(f"unsupported expression {expr}", line_no)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_model(text: str) -> RingModel:
    raw: Dict[str, Any] = {"basis": {}, "mult": [], "integrate": {}, "tangent": {}}
    pending: List[Tuple[int, str, Optional[str], str]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = _strip(line)
        if not line:
            continue
        match = _LINE.match(line)
        if not match:
            raise ModelParseError(f"cannot parse {line!r}", line_no)
        key, arg, value = match.group("key"), match.group("arg"), match.group("value").strip()
        if key not in _KEYS:
            raise ModelParseError(f"unknown field {key!r}", line_no)
        if (arg is not None) != (key == "basis"):
            raise ModelParseError(f"unexpected degree argument on {key!r}", line_no)
        if key == "name":
            raw["name"] = value
        elif key == "dim":
            if not value.isdigit():
                raise ModelParseError(f"dim must be a natural number, got {value!r}", line_no)
            raw["dim"] = int(value)
        elif key == "basis":
            names = [n.strip() for n in value.split(",")] if "," in value else value.split()
            for n in names:
                if n != "1" and not _IDENTIFIER.match(n):
                    raise ModelParseError(f"basis name {n!r} is not an identifier", line_no)
            if int(arg) in raw["basis"]:
                raise ModelParseError(f"basis {arg} given twice", line_no)
            raw["basis"][int(arg)] = names
        elif key == "h2basis":
            raw["h2basis"] = [n.strip() for n in re.split(r"[,\s]+", value) if n.strip()]
        else:
            pending.append((line_no, key, arg, value))

    names = [n for d in sorted(raw["basis"]) for n in raw["basis"][d]]
    for line_no, key, _, value in pending:
        lhs, sep, rhs = value.partition("=")
        if not sep:
            raise ModelParseError(f"expected '=' in {key} entry", line_no)
        lhs = lhs.strip()
        if key == "mult":
            factors = [f.strip() for f in lhs.split("*")]
            if len(factors) != 2 or any(f not in names for f in factors):
                raise ModelParseError(f"mult entry needs 'a * b' over basis names, got {lhs!r}", line_no)
            raw["mult"].append((factors[0], factors[1], _linear_combination(rhs, names, line_no)))
        elif key == "integrate":
            if lhs not in names:
                raise ModelParseError(f"unknown basis element {lhs!r}", line_no)
            raw["integrate"][lhs] = sum(_linear_combination(rhs, [], line_no).values(), Fraction(0))
        elif key == "tangent":
            match = re.match(r"^c(\d+)$", lhs)
            if not match:
                raise ModelParseError(f"tangent entry needs 'cK = ...', got {lhs!r}", line_no)
            raw["tangent"][int(match.group(1))] = _linear_combination(rhs, names, line_no)
        elif key == "sq2":
            if lhs not in names:
                raise ModelParseError(f"unknown basis element {lhs!r}", line_no)
            image = _linear_combination(rhs, names, line_no) if rhs.strip() not in ("", "0") else {}
            raw.setdefault("sq2", {})[lhs] = [n for n, c in image.items() if c.denominator == 1 and c.numerator % 2]

    try:
        doc = ModelDocument(**raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ModelParseError(f"{where}: {first['msg']}") from None

    if sorted(doc.basis) != list(range(doc.dim + 1)):
        raise ModelParseError(f"basis lines must cover degrees 0..{doc.dim}")
    tangent_keys = sorted(doc.tangent)
    if tangent_keys and (tangent_keys[0] < 1 or tangent_keys[-1] > doc.dim):
        raise ModelParseError(f"tangent classes must be c1..c{doc.dim}")
    model = build_model(
        name=doc.name,
        dim=doc.dim,
        basis=[doc.basis[d] for d in range(doc.dim + 1)],
        mult=doc.mult,
        integrals=doc.integrate,
        tangent=[doc.tangent.get(k, {}) for k in range(1, doc.dim + 1)],
        h2_basis=doc.h2basis,
        sq2_table=doc.sq2,
    )
    logger.debug(f"parsed model {model.name}: dim {model.dim}, {len(model.names)} basis elements")
    return model


def ingest(path: Union[str, Path]) -> RingModel:
    path = Path(path)
    logger.info(f"Reading model file {path}")
    return parse_model(path.read_text(encoding="utf-8"))


def dumps_model(model: RingModel) -> str:
    lines = [f"name: {model.name}", f"dim: {model.dim}"]
    for d, names in enumerate(model.basis):
        lines.append(f"basis {d}: {', '.join(names)}")
    for (a, b), rhs in sorted(model.mult.items(), key=lambda kv: (model._order[kv[0][0]], model._order[kv[0][1]])):
        lines.append(f"mult: {a} * {b} = {render_lincomb(model, rhs)}")
    for name in model.basis[model.dim]:
        lines.append(f"integrate: {name} = {render_fraction(model.integrals[name])}")
    for k, c in enumerate(model.tangent, start=1):
        lines.append(f"tangent: c{k} = {render_lincomb(model, c)}")
    if model.h2_basis:
        lines.append(f"h2basis: {', '.join(model.h2_basis)}")
    if model.sq2_table is not None:
        for name in sorted(model.sq2_table, key=model._order.get):
            targets = model.sq2_table[name]
            lines.append(f"sq2: {name} = {' + '.join(targets) if targets else '0'}")
    return "\n".join(lines) + "\n"


def parse_tuple(text: str, target: ManifoldRef) -> ChernTuple:
    """
    Chern tuple file: optional `rank: r` (default dim), then `cK = <expression>`.

    Model targets accept polynomial expressions in the basis names (`6*h^2`),
    flag targets polynomials in x1..xr (the fundamental weights).
    """
    rank = None
    entries: Dict[int, Tuple[int, str]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = _strip(line)
        if not line:
            continue
        match = re.match(r"^rank\s*:\s*(\d+)$", line)
        if match:
            rank = int(match.group(1))
            continue
        match = re.match(r"^c(\d+)\s*=\s*(.+)$", line)
        if not match:
            raise ModelParseError(f"expected 'cK = ...' or 'rank: r', got {line!r}", line_no)
        k = int(match.group(1))
        if k < 1:
            raise ModelParseError("Chern classes start at c1", line_no)
        if k in entries:
            raise ModelParseError(f"c{k} given twice", line_no)
        entries[k] = (line_no, match.group(2))

    dim = target.dim
    rank = dim if rank is None else rank
    length = min(rank, dim)
    for k, (line_no, _) in entries.items():
        if k > rank:
            raise ModelParseError(f"c{k} exceeds the rank {rank}", line_no)

    if isinstance(target, FlagManifold):
        ctx = borel_context(target.datum)
        one = ctx.one()

        def convert(k: int, line_no: int, text: str) -> GradedPoly:
            expr = _parse_expression(text, ctx.variables, line_no)
            try:
                value = GradedPoly.from_sympy(ctx, expr)
            except ContextMismatchError as exc:
                raise ModelParseError(str(exc), line_no) from None
            if value and value.degrees() != [k]:
                raise ModelParseError(f"c{k} must be homogeneous of degree {k}", line_no)
            target.check_invariant(value, f"c{k}")
            return value
    else:
        one = target.one()
        gens = {name: target.gen(name) for name in target.names if name != "1"}

        def convert(k: int, line_no: int, text: str):
            expr = _parse_expression(text, gens, line_no)
            value = _evaluate_expression(expr, gens, one, line_no)
            if value.homogeneous(k) != value:
                raise ModelParseError(f"c{k} must be homogeneous of degree {k}", line_no)
            return value

    classes = []
    for k in range(1, length + 1):
        if k in entries:
            line_no, body = entries[k]
            classes.append(convert(k, line_no, body))
        else:
            classes.append(one * 0)
    return ChernTuple(rank, tuple(classes), one)


def read_tuple(path: Union[str, Path], target: ManifoldRef) -> ChernTuple:
    path = Path(path)
    logger.info(f"Reading Chern tuple {path} for {target.name}")
    return parse_tuple(path.read_text(encoding="utf-8"), target)
