"""
Cartan data for the finite crystallographic types.

Weights and roots are stored in the fundamental-weight basis: the j-th simple
root is the j-th column of the Cartan matrix A, where A[i][j] = <alpha_j, alpha_i^v>.
"""
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import sympy

from errors import CartanTypeError, ContextMismatchError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
Weight = Tuple[Number, ...]

MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 3, "E": 6, "F": 4, "G": 2}
MAX_RANK = {"E": 8, "F": 4, "G": 2}
_COMPONENT = re.compile(r"^([A-Ga-g])\s*(\d+)$")


def _norm(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


# ---------------------------
# Cartan types
# ---------------------------
@dataclass(frozen=True)
class CartanType:
    components: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        if not self.components:
            raise CartanTypeError("empty Cartan type")
        for family, rank in self.components:
            if family not in MIN_RANK:
                raise CartanTypeError(f"unknown family {family!r}")
            if rank < MIN_RANK[family] or rank > MAX_RANK.get(family, rank):
                raise CartanTypeError(f"invalid rank {rank} for family {family}")

    @classmethod
    def parse(cls, text: str) -> "CartanType":
        parts = [p.strip() for p in re.split(r"[x×*]", text.strip()) if p.strip()]
        components = []
        for part in parts:
            match = _COMPONENT.match(part)
            if not match:
                raise CartanTypeError(f"cannot parse Cartan type component {part!r} in {text!r}")
            components.append((match.group(1).upper(), int(match.group(2))))
        return cls(tuple(components))

    @property
    def rank(self) -> int:
        return sum(r for _, r in self.components)

    def __str__(self) -> str:
        return "x".join(f"{f}{r}" for f, r in self.components)


def simple_cartan_matrix(family: str, rank: int) -> List[List[int]]:
    n = rank
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def bond(i: int, j: int, a_ij: int = -1, a_ji: int = -1) -> None:
        a[i][j] = a_ij
        a[j][i] = a_ji

    if family == "A":
        for i in range(n - 1):
            bond(i, i + 1)
    elif family == "B":
        for i in range(n - 2):
            bond(i, i + 1)
        # alpha_n short: <alpha_{n-1}, alpha_n^v> = -2
        bond(n - 2, n - 1, -1, -2)
    elif family == "C":
        for i in range(n - 2):
            bond(i, i + 1)
        bond(n - 2, n - 1, -2, -1)
    elif family == "D":
        for i in range(n - 2):
            bond(i, i + 1)
        bond(n - 3, n - 1)
    elif family == "E":
        bond(0, 2)
        bond(1, 3)
        for i in range(2, n - 1):
            bond(i, i + 1)
    elif family == "F":
        bond(0, 1)
        bond(1, 2, -1, -2)
        bond(2, 3)
    elif family == "G":
        # alpha_1 short, alpha_2 long
        bond(0, 1, -3, -1)
    else:
        raise CartanTypeError(f"unknown family {family!r}")
    return a


def cartan_matrix(cartan_type: CartanType) -> Tuple[Tuple[int, ...], ...]:
    """Block-diagonal Cartan matrix of a product type."""
    n = cartan_type.rank
    a = [[0] * n for _ in range(n)]
    offset = 0
    for family, rank in cartan_type.components:
        block = simple_cartan_matrix(family, rank)
        for i in range(rank):
            for j in range(rank):
                a[offset + i][offset + j] = block[i][j]
        offset += rank
    return tuple(tuple(row) for row in a)


# ---------------------------
# Roots and data
# ---------------------------
@dataclass(frozen=True)
class Root:
    coords: Tuple[int, ...]
    root_coords: Tuple[int, ...] = field(compare=False)

    @property
    def positive(self) -> bool:
        return all(c >= 0 for c in self.root_coords)

    @property
    def height(self) -> int:
        return sum(self.root_coords)

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coords), tuple(-c for c in self.root_coords))


@dataclass(frozen=True)
class RootDatum:
    cartan_type: CartanType
    cartan: Tuple[Tuple[int, ...], ...] = field(compare=False, repr=False)
    symmetrizer: Tuple[Fraction, ...] = field(compare=False, repr=False)
    inverse_cartan: Tuple[Tuple[Fraction, ...], ...] = field(compare=False, repr=False)
    simple_roots: Tuple[Root, ...] = field(compare=False, repr=False)
    positive_roots: Tuple[Root, ...] = field(compare=False, repr=False)

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def n(self) -> int:
        """|Phi^+| = dim G/B."""
        return len(self.positive_roots)

    @property
    def rho(self) -> Weight:
        return (1,) * self.rank

    def fundamental_weight(self, i: int) -> Weight:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def check_weight(self, weight: Sequence[Number]) -> Weight:
        if len(weight) != self.rank:
            raise ContextMismatchError(f"weight {tuple(weight)} does not belong to a rank-{self.rank} datum")
        return tuple(weight)

    def to_root_basis(self, weight: Sequence[Number]) -> Tuple[Number, ...]:
        weight = self.check_weight(weight)
        return tuple(
            _norm(sum(row[j] * weight[j] for j in range(self.rank)))
            for row in self.inverse_cartan
        )

    def root_from_coords(self, coords: Sequence[int]) -> Root:
        root_coords = tuple(int(c) for c in self.to_root_basis(coords))
        return Root(tuple(coords), root_coords)

    def sub_positive_roots(self, subset: Sequence[int]) -> Tuple[Root, ...]:
        """Positive roots supported on the simple roots in subset (Phi_I^+)."""
        allowed = set(subset)
        return tuple(
            a for a in self.positive_roots
            if all(c == 0 or i in allowed for i, c in enumerate(a.root_coords))
        )


def _symmetrizer(a: Tuple[Tuple[int, ...], ...]) -> Tuple[Fraction, ...]:
    # d_i A_ij = d_j A_ji, propagated along the Dynkin graph
    n = len(a)
    d: List[Fraction] = [Fraction(0)] * n
    for start in range(n):
        if d[start]:
            continue
        d[start] = Fraction(1)
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if i != j and a[i][j] and not d[j]:
                    d[j] = d[i] * a[i][j] / a[j][i]
                    queue.append(j)
    return tuple(d)


@lru_cache(maxsize=None)
def build(cartan_type: Union[CartanType, str]) -> RootDatum:
    if isinstance(cartan_type, str):
        cartan_type = CartanType.parse(cartan_type)
    a = cartan_matrix(cartan_type)
    n = len(a)
    inv = sympy.Matrix(a).inv()
    inverse = tuple(
        tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n))
        for i in range(n)
    )

    def root_coords(coords: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(int(sum(inverse[i][j] * coords[j] for j in range(n))) for i in range(n))

    simple = tuple(
        Root(tuple(a[i][j] for i in range(n)), tuple(1 if k == j else 0 for k in range(n)))
        for j in range(n)
    )
    # closure of the simple roots under simple reflections
    seen = {r.coords for r in simple}
    queue = deque(r.coords for r in simple)
    while queue:
        coords = queue.popleft()
        for i in range(n):
            image = tuple(coords[k] - coords[i] * simple[i].coords[k] for k in range(n))
            if image not in seen:
                seen.add(image)
                queue.append(image)
    positives = [Root(c, root_coords(c)) for c in seen]
    positives = [r for r in positives if r.positive]
    positives.sort(key=lambda r: (r.height, tuple(-c for c in r.root_coords)))
    datum = RootDatum(
        cartan_type=cartan_type,
        cartan=a,
        symmetrizer=_symmetrizer(a),
        inverse_cartan=inverse,
        simple_roots=simple,
        positive_roots=tuple(positives),
    )
    logger.debug(f"built root datum {cartan_type}: rank {n}, |Phi+| = {len(positives)}")
    return datum


# ---------------------------
# Pairing and reflections
# ---------------------------
def _root_norm(datum: RootDatum, alpha: Root) -> Fraction:
    c = alpha.root_coords
    d = datum.symmetrizer
    a = datum.cartan
    return sum(
        (c[i] * c[j] * d[i] * a[i][j] for i in range(datum.rank) for j in range(datum.rank)),
        Fraction(0),
    )


def pairing(datum: RootDatum, weight: Sequence[Number], alpha: Root) -> Number:
    """<weight, alpha^v>, expanding alpha^v over the simple coroots."""
    weight = datum.check_weight(weight)
    if len(alpha.coords) != datum.rank:
        raise ContextMismatchError("root does not belong to this datum")
    d = datum.symmetrizer
    inner = sum((Fraction(weight[j]) * alpha.root_coords[j] * d[j] for j in range(datum.rank)), Fraction(0))
    return _norm(2 * inner / _root_norm(datum, alpha))


def reflect(datum: RootDatum, weight: Sequence[Number], alpha: Root) -> Weight:
    k = pairing(datum, weight, alpha)
    return tuple(_norm(w - k * a) for w, a in zip(weight, alpha.coords))


def simple_reflect(datum: RootDatum, weight: Sequence[Number], i: int) -> Weight:
    """s_i(weight) = weight - weight_i alpha_i."""
    k = weight[i]
    if not k:
        return tuple(weight)
    column = datum.simple_roots[i].coords
    return tuple(w - k * a for w, a in zip(weight, column))


def weyl_dimension(datum: RootDatum, weight: Sequence[Number]) -> Fraction:
    """prod over positive roots of <weight + rho, a^v> / <rho, a^v>."""
    shifted = tuple(w + 1 for w in datum.check_weight(weight))
    value = Fraction(1)
    for alpha in datum.positive_roots:
        value *= Fraction(pairing(datum, shifted, alpha)) / Fraction(pairing(datum, datum.rho, alpha))
    return value


def is_type_ac(cartan_type: CartanType) -> bool:
    """Products of SL and Sp (B2 = C2 up to relabelling)."""
    return all(f in ("A", "C") or (f, r) == ("B", 2) for f, r in cartan_type.components)


def dominant(datum: RootDatum, weight: Sequence[Number]) -> Tuple[Weight, Tuple[int, ...]]:
    """The dominant weight in the W-orbit, with the simple reflections applied (in order)."""
    mu = datum.check_weight(weight)
    applied = []
    while True:
        i = next((j for j, c in enumerate(mu) if c < 0), None)
        if i is None:
            return tuple(mu), tuple(applied)
        applied.append(i)
        mu = simple_reflect(datum, mu, i)
