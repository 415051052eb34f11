"""
Weyl group elements, keyed by the image of rho.

Simple reflections are indexed from 0 internally and rendered from 1
(`s1*s2*s1`, identity `e`).  Every element carries the lexicographically
first reduced word, recovered from its key by peeling left descents.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from errors import ContextMismatchError, ResourceLimitError
from root_system import Root, RootDatum, Weight, reflect, simple_reflect
from settings import get_settings

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Parabolic = FrozenSet[int]


@dataclass(frozen=True)
class WeylElement:
    key: Tuple[int, ...]
    datum: RootDatum = field(repr=False)
    word: Word = field(compare=False)

    @property
    def length(self) -> int:
        return len(self.word)

    def act(self, weight: Sequence) -> Weight:
        result = tuple(weight)
        for i in reversed(self.word):
            result = simple_reflect(self.datum, result, i)
        return result

    def render(self) -> str:
        return render_word(self.word)

    def __str__(self) -> str:
        return self.render()


# ---------------------------
# Construction
# ---------------------------
def _descent_word(datum: RootDatum, key: Sequence[int]) -> Word:
    word = []
    mu = tuple(key)
    while True:
        i = next((j for j, c in enumerate(mu) if c < 0), None)
        if i is None:
            break
        word.append(i)
        mu = simple_reflect(datum, mu, i)
    if mu != datum.rho:
        raise ContextMismatchError(f"{tuple(key)} is not in the Weyl orbit of rho")
    return tuple(word)


def from_key(datum: RootDatum, key: Sequence[int]) -> WeylElement:
    key = tuple(int(c) for c in datum.check_weight(key))
    return WeylElement(key, datum, _descent_word(datum, key))


def from_word(datum: RootDatum, word: Iterable[int]) -> WeylElement:
    key = datum.rho
    for i in reversed(tuple(word)):
        if not 0 <= i < datum.rank:
            raise ContextMismatchError(f"simple reflection index {i + 1} out of range")
        key = simple_reflect(datum, key, i)
    return from_key(datum, key)


def identity(datum: RootDatum) -> WeylElement:
    return WeylElement(datum.rho, datum, ())


def simple(datum: RootDatum, i: int) -> WeylElement:
    return from_word(datum, (i,))


def reflection(datum: RootDatum, alpha: Root) -> WeylElement:
    return from_key(datum, reflect(datum, datum.rho, alpha))


def parse_word(datum: RootDatum, text: str) -> WeylElement:
    """Parse `s1*s2*s1`, `1,2,1`, `121` or `e`."""
    return from_word(datum, parse_indices(text))


def parse_indices(text: str) -> Word:
    text = text.strip()
    if text in ("", "e"):
        return ()
    if "*" in text or text.startswith("s"):
        parts = [p.strip().lstrip("s") for p in text.split("*")]
    elif "," in text:
        parts = [p.strip() for p in text.split(",")]
    else:
        parts = list(text)
    try:
        return tuple(int(p) - 1 for p in parts)
    except ValueError:
        raise ContextMismatchError(f"cannot parse word {text!r}") from None


def render_word(word: Sequence[int]) -> str:
    return "*".join(f"s{i + 1}" for i in word) if word else "e"


# ---------------------------
# Group operations
# ---------------------------
def _check_same(u: WeylElement, v: WeylElement) -> None:
    if u.datum != v.datum:
        raise ContextMismatchError("Weyl elements from different root data")


def multiply(u: WeylElement, v: WeylElement) -> WeylElement:
    _check_same(u, v)
    return from_key(u.datum, u.act(v.key))


def inverse(w: WeylElement) -> WeylElement:
    return from_word(w.datum, reversed(w.word))


def longest(datum: RootDatum) -> WeylElement:
    return from_key(datum, tuple(-c for c in datum.rho))


@lru_cache(maxsize=32)
def _enumerate(datum: RootDatum, limit: int) -> Tuple[WeylElement, ...]:
    seen = {datum.rho}
    queue = deque([datum.rho])
    while queue:
        key = queue.popleft()
        for i in range(datum.rank):
            image = simple_reflect(datum, key, i)
            if image not in seen:
                seen.add(image)
                if len(seen) > limit:
                    raise ResourceLimitError(
                        f"W({datum.cartan_type}) has more than {limit} elements; raise WEYL_ORDER_LIMIT"
                    )
                queue.append(image)
    elements = [from_key(datum, k) for k in seen]
    elements.sort(key=lambda w: (w.length, w.word))
    logger.debug(f"enumerated W({datum.cartan_type}): {len(elements)} elements")
    return tuple(elements)


def enumerate_group(datum: RootDatum, limit: Optional[int] = None) -> Tuple[WeylElement, ...]:
    """All elements sorted by (length, word)."""
    if limit is None:
        limit = get_settings().weyl_order_limit
    return _enumerate(datum, limit)


def bruhat_leq(u: WeylElement, w: WeylElement) -> bool:
    """u <= w, peeling left descents of w (subword property)."""
    _check_same(u, w)
    datum = w.datum
    uk, wk = u.key, w.key
    while True:
        i = next((j for j, c in enumerate(wk) if c < 0), None)
        if i is None:
            return uk == datum.rho
        if uk[i] < 0:
            uk = simple_reflect(datum, uk, i)
        wk = simple_reflect(datum, wk, i)


def all_reduced_words(w: WeylElement, limit: Optional[int] = None) -> List[Word]:
    if limit is None:
        limit = get_settings().reduced_word_limit
    datum = w.datum
    memo: Dict[Tuple[int, ...], List[Word]] = {datum.rho: [()]}

    def words(key: Tuple[int, ...]) -> List[Word]:
        if key in memo:
            return memo[key]
        out: List[Word] = []
        for i, c in enumerate(key):
            if c < 0:
                for rest in words(simple_reflect(datum, key, i)):
                    out.append((i,) + rest)
                    if len(out) > limit:
                        raise ResourceLimitError(
                            f"{w.render()} has more than {limit} reduced words; raise REDUCED_WORD_LIMIT"
                        )
        memo[key] = out
        return out

    return sorted(words(w.key))


# ---------------------------
# Parabolic cosets
# ---------------------------
def parabolic(datum: RootDatum, indices: Iterable[int]) -> Parabolic:
    subset = frozenset(indices)
    bad = [i + 1 for i in subset if not 0 <= i < datum.rank]
    if bad:
        raise ContextMismatchError(f"parabolic indices {bad} outside 1..{datum.rank}")
    return subset


def _raises_length(w: WeylElement, i: int) -> bool:
    # l(w s_i) > l(w) iff w(alpha_i) is positive
    image = w.act(w.datum.simple_roots[i].coords)
    return all(c >= 0 for c in w.datum.to_root_basis(image))


def _right_multiply(w: WeylElement, i: int) -> WeylElement:
    return from_key(w.datum, w.act(simple_reflect(w.datum, w.datum.rho, i)))


def saturated_rep(w: WeylElement, subset: Iterable[int]) -> WeylElement:
    """The maximal-length element of the coset w W_I."""
    subset = sorted(parabolic(w.datum, subset))
    changed = True
    while changed:
        changed = False
        for i in subset:
            if _raises_length(w, i):
                w = _right_multiply(w, i)
                changed = True
    return w


def minimal_rep(w: WeylElement, subset: Iterable[int]) -> WeylElement:
    subset = sorted(parabolic(w.datum, subset))
    changed = True
    while changed:
        changed = False
        for i in subset:
            if not _raises_length(w, i):
                w = _right_multiply(w, i)
                changed = True
    return w


def parabolic_longest(datum: RootDatum, subset: Iterable[int]) -> WeylElement:
    return saturated_rep(identity(datum), subset)


def saturated_cosets(datum: RootDatum, subset: Iterable[int]) -> List[WeylElement]:
    """P-saturated representatives of W/W_I, sorted by (length, word)."""
    subset = parabolic(datum, subset)
    reps = {saturated_rep(w, subset) for w in enumerate_group(datum)}
    return sorted(reps, key=lambda w: (w.length, w.word))


# ---------------------------
# Words of w0
# ---------------------------
def prefix_element(datum: RootDatum, beta: Sequence[int], k: int) -> WeylElement:
    """w_[1..k] = s_{beta_k} ... s_{beta_1}."""
    return from_word(datum, reversed(tuple(beta[:k])))


def extend_to_w0(prefix: WeylElement) -> Word:
    """A reduced word beta of w0 with s_{beta_k}...s_{beta_1} = prefix, k = l(prefix)."""
    datum = prefix.datum
    w0 = longest(datum)
    beta = inverse(prefix).word + multiply(prefix, w0).word
    if len(beta) != w0.length or from_word(datum, beta) != w0:
        raise ContextMismatchError(f"failed to extend {prefix.render()} to a reduced word of w0")
    return beta


def is_reduced_word_of_w0(datum: RootDatum, beta: Sequence[int]) -> bool:
    w0 = longest(datum)
    return len(beta) == w0.length and from_word(datum, beta) == w0


def admissible_words(w: WeylElement) -> List[Word]:
    """Every reduced word of w0 whose first n - l(w) letters induce w w0."""
    datum = w.datum
    w0 = longest(datum)
    v = multiply(w, w0)
    heads = all_reduced_words(inverse(v))
    tails = all_reduced_words(multiply(v, w0))
    return sorted(h + t for h in heads for t in tails)
