"""
Divided-difference operators on the Borel picture of H*(G/B, Q).

A BorelClass is a GradedPoly in the fundamental-weight coordinates x1..xr,
capped at |Phi^+|.  Classes are never reduced modulo the invariant ideal;
every number extracted from them goes through D_w, which kills that ideal.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Sequence

from errors import ContextMismatchError
from exact_poly import GradedPoly, PolyContext, divide_exact
from root_system import RootDatum
from weyl import WeylElement, longest, multiply, parabolic, parabolic_longest

logger = logging.getLogger(__name__)

BorelClass = GradedPoly


@lru_cache(maxsize=None)
def borel_context(datum: RootDatum) -> PolyContext:
    return PolyContext(tuple(f"x{i + 1}" for i in range(datum.rank)), datum.n)


def borel_ring(datum: RootDatum) -> PolyContext:
    """Variables x1..xr standing for the fundamental weights, capped at dim G/B."""
    return borel_context(datum)


def weight_form(datum: RootDatum, weight: Sequence) -> BorelClass:
    """The linear form sum_i weight_i x_i, i.e. the class of L(weight) in H^2."""
    return borel_context(datum).linear(datum.check_weight(weight))


def root_form(datum: RootDatum, i: int) -> BorelClass:
    return weight_form(datum, datum.simple_roots[i].coords)


def _check(datum: RootDatum, f: BorelClass) -> None:
    if f.ctx != borel_context(datum):
        raise ContextMismatchError(f"class does not live in the Borel ring of {datum.cartan_type}")


def _images(w: WeylElement) -> List[BorelClass]:
    datum = w.datum
    return [weight_form(datum, w.act(datum.fundamental_weight(i))) for i in range(datum.rank)]


def weyl_act(w: WeylElement, f: BorelClass) -> BorelClass:
    """x_i -> w(omega_i)."""
    _check(w.datum, f)
    if not w.word:
        return f
    return f.substitute_linear(_images(w))


@lru_cache(maxsize=65536)
def _simple_images(datum: RootDatum, i: int) -> tuple:
    ctx = borel_context(datum)
    alpha = datum.simple_roots[i].coords
    images = []
    for j in range(datum.rank):
        if j == i:
            images.append(ctx.linear(tuple((1 if k == j else 0) - alpha[k] for k in range(datum.rank))))
        else:
            images.append(ctx.gen(j))
    return tuple(images)


@lru_cache(maxsize=65536)
def demazure(datum: RootDatum, i: int, f: BorelClass) -> BorelClass:
    """A_i f = (f - s_i f) / alpha_i."""
    _check(datum, f)
    if not f:
        return f
    reflected = f.substitute_linear(_simple_images(datum, i))
    return divide_exact(f - reflected, root_form(datum, i))


def demazure_w(w: WeylElement, f: BorelClass) -> BorelClass:
    """A_w = A_{i1} ... A_{il} for w = s_{i1}...s_{il}; the last letter acts first."""
    for i in reversed(w.word):
        if not f:
            break
        f = demazure(w.datum, i, f)
    return f


def d_functional(w: WeylElement, f: BorelClass) -> Fraction:
    """D_w f = (A_w f)(0); only the degree-l(w) part of f contributes."""
    _check(w.datum, f)
    return demazure_w(w, f.homogeneous(w.length)).constant_term()


def integrate_gb(f: BorelClass, datum: RootDatum) -> Fraction:
    return d_functional(longest(datum), f)


def schubert_pair(f: BorelClass, w: WeylElement) -> Fraction:
    """Pairing of f with the Schubert class [X_w] of dimension l(w)."""
    return d_functional(w, f)


def is_invariant(datum: RootDatum, f: BorelClass, subset: Iterable[int]) -> bool:
    return all(not demazure(datum, i, f) for i in sorted(parabolic(datum, subset)))


def integrate_gp(f: BorelClass, datum: RootDatum, subset: Iterable[int]) -> Fraction:
    """Integral over G/P of a W_I-invariant class: D at the minimal representative of w0 W_I."""
    top = multiply(longest(datum), parabolic_longest(datum, subset))
    return d_functional(top, f)
