"""
Cohomology of the Bott-Samelson desingularization Z of G/B and the
pushforward psi_* to Schubert classes.

For a reduced word beta of w0 the ring H*(Z) is free on the square-free
monomials xi_K, K a subset of {1..n}, subject to
    xi_j^2 = - sum_{i<j} <alpha_i^v, alpha_j> xi_i xi_j,
with alpha_i = s_{beta_1}...s_{beta_{i-1}}(beta_i).  Indices are 0-based in code.
"""
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from errors import ContextMismatchError
from exact_poly import evaluate_series, render_fraction, todd_series
from root_system import Root, RootDatum, pairing
from weyl import (
    WeylElement,
    Word,
    enumerate_group,
    extend_to_w0,
    from_word,
    identity,
    is_reduced_word_of_w0,
    longest,
    multiply,
    prefix_element,
    reflection,
    render_word,
)

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]


# ---------------------------
# Word data
# ---------------------------
@dataclass(frozen=True)
class WordData:
    datum: RootDatum
    beta: Word
    alpha: Tuple[Root, ...] = field(compare=False, repr=False)
    cartan_ints: Tuple[Tuple[int, ...], ...] = field(compare=False, repr=False)
    reflections: Tuple[WeylElement, ...] = field(compare=False, repr=False)
    _memo: Dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.beta)

    @classmethod
    def build(cls, datum: RootDatum, beta: Sequence[int]) -> "WordData":
        beta = tuple(beta)
        if not is_reduced_word_of_w0(datum, beta):
            raise ContextMismatchError(f"{render_word(beta)} is not a reduced word of w0 in {datum.cartan_type}")
        alpha = []
        for i, b in enumerate(beta):
            u = from_word(datum, beta[:i])
            alpha.append(datum.root_from_coords(u.act(datum.simple_roots[b].coords)))
        n = len(beta)
        # <alpha_i^v, alpha_j> = pairing(alpha_j, alpha_i)
        ints = tuple(
            tuple(int(pairing(datum, alpha[j].coords, alpha[i])) for j in range(n))
            for i in range(n)
        )
        return cls(
            datum=datum,
            beta=beta,
            alpha=tuple(alpha),
            cartan_ints=ints,
            reflections=tuple(reflection(datum, a) for a in alpha),
        )

    def one(self) -> "BSClass":
        return BSClass(self, {(): Fraction(1)})

    def zero(self) -> "BSClass":
        return BSClass(self, {})

    def xi(self, i: int) -> "BSClass":
        return BSClass(self, {(i,): Fraction(1)})

    def normal_form(self, exps: Tuple[int, ...], pick: str = "highest") -> Dict[Subset, Fraction]:
        """Square-free expansion of prod xi_i^{exps_i}."""
        key = (exps, pick)
        if key in self._memo:
            return self._memo[key]
        if sum(exps) > self.n:
            result: Dict[Subset, Fraction] = {}
        else:
            squares = [j for j, e in enumerate(exps) if e >= 2]
            if not squares:
                result = {tuple(i for i, e in enumerate(exps) if e): Fraction(1)}
            else:
                j = squares[-1] if pick == "highest" else squares[0]
                result = {}
                for i in range(j):
                    c = self.cartan_ints[i][j]
                    if not c:
                        continue
                    new = list(exps)
                    new[j] -= 1
                    new[i] += 1
                    for subset, coeff in self.normal_form(tuple(new), pick).items():
                        value = result.get(subset, 0) - c * coeff
                        if value:
                            result[subset] = value
                        else:
                            result.pop(subset, None)
        self._memo[key] = result
        return result


@lru_cache(maxsize=256)
def word_data(datum: RootDatum, beta: Word) -> WordData:
    return WordData.build(datum, beta)


# ---------------------------
# BS classes
# ---------------------------
class BSClass:
    __slots__ = ("wd", "terms")

    def __init__(self, wd: WordData, terms: Mapping[Subset, Fraction]):
        self.wd = wd
        self.terms = {tuple(k): Fraction(v) for k, v in terms.items() if v}

    def __eq__(self, other) -> bool:
        if not isinstance(other, BSClass):
            return NotImplemented
        return self.wd == other.wd and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.wd, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: "BSClass") -> None:
        if self.wd != other.wd:
            raise ContextMismatchError("BS classes over different words")

    def __add__(self, other: "BSClass") -> "BSClass":
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return BSClass(self.wd, terms)

    def __neg__(self) -> "BSClass":
        return BSClass(self.wd, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "BSClass") -> "BSClass":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BSClass(self.wd, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, BSClass):
            return bs_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def coefficient(self, subset: Iterable[int]) -> Fraction:
        return self.terms.get(tuple(sorted(subset)), Fraction(0))

    def homogeneous(self, degree: int) -> "BSClass":
        return BSClass(self.wd, {k: v for k, v in self.terms.items() if len(k) == degree})

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            mono = "*".join(f"xi{i + 1}" for i in k) or "1"
            parts.append(f"{render_fraction(v)}*{mono}" if mono != "1" else render_fraction(v))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"BSClass({self.render()!r})"


def bs_mul(a: BSClass, b: BSClass, pick: str = "highest") -> BSClass:
    a._check(b)
    wd = a.wd
    out: Dict[Subset, Fraction] = {}
    for k1, v1 in a.terms.items():
        for k2, v2 in b.terms.items():
            if len(k1) + len(k2) > wd.n:
                continue
            exps = [0] * wd.n
            for i in k1:
                exps[i] += 1
            for i in k2:
                exps[i] += 1
            for subset, c in wd.normal_form(tuple(exps), pick).items():
                out[subset] = out.get(subset, 0) + v1 * v2 * c
    return BSClass(wd, out)


def todd_z(wd: WordData) -> BSClass:
    """prod_r Q(y_r), y_r = sum_{i<=r} <alpha_i^v, alpha_r> xi_i, Q(t) = t/(1 - e^{-t})."""
    if "todd" in wd._memo:
        return wd._memo["todd"]
    coeffs = todd_series(wd.n)
    one = wd.one()
    result = one
    for r in range(wd.n):
        y = BSClass(wd, {(i,): wd.cartan_ints[i][r] for i in range(r + 1)})
        result = result * evaluate_series(coeffs, y, one)
    wd._memo["todd"] = result
    return result


def ch_ozk(k: int, wd: WordData) -> BSClass:
    """(-1)^k prod_{i<=k} xi_i^2 / (1 - e^{xi_i}), each factor expanded as xi_i Q(-xi_i)."""
    if not 0 <= k <= wd.n:
        raise ContextMismatchError(f"k = {k} outside 0..{wd.n}")
    coeffs = todd_series(wd.n)
    one = wd.one()
    result = one
    for i in range(k):
        xi = wd.xi(i)
        result = result * (xi * evaluate_series(coeffs, -xi, one))
    return result


# ---------------------------
# Schubert vectors
# ---------------------------
class SchubertVector:
    """Rational combination of Schubert classes [X_v], X_v of dimension l(v)."""

    __slots__ = ("datum", "coeffs")

    def __init__(self, datum: RootDatum, coeffs: Mapping[WeylElement, Fraction]):
        self.datum = datum
        self.coeffs = {w: Fraction(c) for w, c in coeffs.items() if c}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchubertVector):
            return NotImplemented
        return self.datum == other.datum and self.coeffs == other.coeffs

    def coefficient(self, w: WeylElement) -> Fraction:
        return self.coeffs.get(w, Fraction(0))

    def integrate(self) -> Fraction:
        """Coefficient of the point class [X_e]."""
        return self.coefficient(identity(self.datum))

    def items(self) -> List[Tuple[WeylElement, Fraction]]:
        return sorted(self.coeffs.items(), key=lambda kv: (-kv[0].length, kv[0].word))

    def to_dict(self) -> Dict[str, str]:
        return {w.render(): render_fraction(c) for w, c in self.items()}

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"[X_{w.render()}]" if c == 1 else f"{render_fraction(c)}*[X_{w.render()}]"
            for w, c in self.items()
        )

    def __repr__(self) -> str:
        return f"SchubertVector({self.render()!r})"


def pushforward(a: BSClass, wd: Optional[WordData] = None) -> SchubertVector:
    """psi_*(xi_K) = [X_{w_K w0}] if l(w_K) = |K|, else 0; w_K in increasing index order."""
    wd = wd or a.wd
    datum = wd.datum
    w0 = longest(datum)
    out: Dict[WeylElement, Fraction] = {}
    for subset, coeff in a.terms.items():
        w_k = identity(datum)
        for i in subset:
            w_k = multiply(w_k, wd.reflections[i])
        if w_k.length != len(subset):
            continue
        target = multiply(w_k, w0)
        out[target] = out.get(target, 0) + coeff
    return SchubertVector(datum, out)


def ch_schubert(w: WeylElement, beta: Optional[Sequence[int]] = None) -> SchubertVector:
    """
    psi_*(ch(O_{Z_K}) td(Z)) = ch(O_{X_w}) td(G/B) in the Schubert basis.

    K = [1..k] with k = n - l(w), over a word of w0 whose first k letters
    give w_[1..k] = w w0.
    """
    datum = w.datum
    w0 = longest(datum)
    k = w0.length - w.length
    target = multiply(w, w0)
    beta = tuple(beta) if beta is not None else extend_to_w0(target)
    if prefix_element(datum, beta, k) != target:
        raise ContextMismatchError(
            f"word {render_word(beta)} does not satisfy w_[1..{k}] = {target.render()}"
        )
    return _ch_schubert(w, beta, k)


@lru_cache(maxsize=4096)
def _ch_schubert(w: WeylElement, beta: Word, k: int) -> SchubertVector:
    wd = word_data(w.datum, beta)
    return pushforward(bs_mul(ch_ozk(k, wd), todd_z(wd)), wd)


# ---------------------------
# q-matrix
# ---------------------------
QMatrix = Dict[WeylElement, SchubertVector]


def q_matrix(datum: RootDatum) -> QMatrix:
    rows: QMatrix = {}
    for w in enumerate_group(datum):
        rows[w] = ch_schubert(w)
        logger.debug(f"q-matrix row {w.render()}: {rows[w].render()}")
    return rows


def q_matrix_for_word(datum: RootDatum, beta: Sequence[int]) -> QMatrix:
    """Rows reachable from one fixed word: w = w_[1..k] w0 for k = 0..n."""
    beta = tuple(beta)
    wd = word_data(datum, beta)
    w0 = longest(datum)
    rows: QMatrix = {}
    for k in range(wd.n + 1):
        w = multiply(prefix_element(datum, beta, k), w0)
        rows[w] = ch_schubert(w, beta)
    return dict(sorted(rows.items(), key=lambda kv: (kv[0].length, kv[0].word)))


def q_matrix_table(rows: QMatrix) -> Dict[str, Dict[str, str]]:
    ordered = sorted(rows.items(), key=lambda kv: (kv[0].length, kv[0].word))
    return {w.render(): row.to_dict() for w, row in ordered}


def q_matrix_json(rows: QMatrix) -> str:
    return json.dumps(q_matrix_table(rows), indent=2)


def is_integral(rows: QMatrix) -> bool:
    return all(c.denominator == 1 for row in rows.values() for c in row.coeffs.values())
