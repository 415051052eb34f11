"""
Admissibility checkers for Chern tuples, and the convention calibration.

Every checker returns a Verdict whose conditions are exact: integrality
conditions carry the rational value, congruences the class being reduced.
"""
import logging
import math
import random
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import sympy

from bgg import integrate_gb, schubert_pair, weight_form
from bott_samelson import ch_schubert, q_matrix
from char_classes import ChernTuple, chern_character, todd_class
from errors import CalibrationError, HypothesisError, ResourceLimitError
from exact_poly import render_fraction, trunc_exp
from manifold_models import FlagManifold, ModelElement, RingModel, projective_space, validate_generation
from reports import CalibrationReport, Condition, Convention, OracleOutcome, Verdict
from root_system import CartanType, RootDatum, build, is_type_ac, weyl_dimension
from settings import get_settings
from weyl import WeylElement, identity, longest, multiply, parabolic_longest, saturated_cosets

logger = logging.getLogger(__name__)

CANDIDATES: Tuple[Tuple[int, str], ...] = ((1, "direct"), (1, "w0-shifted"), (-1, "direct"), (-1, "w0-shifted"))
CALIBRATION_TYPES = ("A1", "A2")


# ---------------------------
# Condition helpers
# ---------------------------
def _integral(value: Fraction, label: str, source: str) -> Condition:
    return Condition(
        condition=label,
        value=render_fraction(value),
        modulus="Z",
        passed=value.denominator == 1,
        source=source,
    )


def _congruent_zero(x: ModelElement, degree: int, modulus: int, label: str, source: str) -> Condition:
    """Every coefficient of the degree part of x over the integral basis is an integer divisible by modulus."""
    part = x.homogeneous(degree)
    coeffs = part.coeffs.values()
    passed = all(c.denominator == 1 and c.numerator % modulus == 0 for c in coeffs)
    return Condition(condition=label, value=part.render(), modulus=str(modulus), passed=passed, source=source)


def _integral_class(x: ModelElement, label: str, source: str) -> Condition:
    passed = all(c.denominator == 1 for c in x.coeffs.values())
    return Condition(condition=label, value=x.render(), modulus="Z", passed=passed, source=source)


def _check_rank(t: ChernTuple, expected: int, what: str) -> None:
    if t.rank != expected:
        raise HypothesisError(f"{what} needs a rank-{expected} tuple, got rank {t.rank}")


def _check_dim(m: RingModel, expected: int, what: str) -> None:
    if m.dim != expected:
        raise HypothesisError(f"{what} needs a {expected}-dimensional manifold, {m.name} has dimension {m.dim}")


def _multisets(size: int, max_k: int) -> Iterator[Tuple[int, ...]]:
    """Multisets of range(size) with at most max_k elements, by cardinality then lexicographically."""
    for k in range(0, max_k + 1):
        yield from combinations_with_replacement(range(size), k)


def _count_multisets(size: int, max_k: int) -> int:
    if max_k < 0:
        return 0
    if size == 0:
        return 1
    return sum(math.comb(size + k - 1, k) for k in range(max_k + 1))


def _guard(count: int, cap: Optional[int]) -> None:
    cap = get_settings().condition_cap if cap is None else cap
    if count > cap:
        raise ResourceLimitError(f"{count} conditions exceed the cap of {cap}; raise CONDITION_CAP")


def _collect(
    items: Iterable,
    evaluate: Callable[..., Condition],
    stop_on_failure: bool,
    notes: List[str],
) -> List[Condition]:
    conditions = []
    for item in items:
        condition = evaluate(item)
        logger.debug(f"{condition.condition}: {condition.value} ({'pass' if condition.passed else 'fail'})")
        conditions.append(condition)
        if stop_on_failure and not condition.passed:
            notes.append("stopped at the first failing condition")
            break
    return conditions


def _evaluated_count(total: int, sample: Optional[int]) -> int:
    return total if sample is None else min(total, sample)


def _select(items: Iterable, total: int, sample: Optional[int], notes: List[str]) -> Iterator:
    """A seeded sample of `sample` of the `total` items, streamed; the first item (xi = 0) is always kept."""
    if sample is None or sample >= total:
        return iter(items)
    if sample < 1:
        raise HypothesisError(f"sample size must be >= 1, got {sample}")
    seed = get_settings().sample_seed
    picked = {0, *random.Random(seed).sample(range(1, total), sample - 1)}
    notes.append(f"sampled {sample} of {total} conditions (seed {seed})")
    return (item for i, item in enumerate(items) if i in picked)


def _xi_label(m: RingModel, multiset: Sequence[int]) -> str:
    if not multiset:
        return "0"
    return " + ".join(m.h2_basis[i] for i in multiset)


def _index_integrand(m: RingModel, t: ChernTuple) -> ModelElement:
    """ch(t) td(X) in the model."""
    return chern_character(t, m.dim) * todd_class(m.tangent_chern(), m.dim)


# ---------------------------
# Low dimensions
# ---------------------------
def check_dim4(m: RingModel, t: ChernTuple) -> Verdict:
    """Rank-4 tuples on a 4-fold: the mod 2 relation for each H^2 generator and the mod 6 congruence for c4."""
    _check_dim(m, 4, "check_dim4")
    _check_rank(t, 4, "check_dim4")
    c1, c2, c3, c4 = t.padded(4)
    x = m.tangent_chern()
    k1, k2 = x.c(1), x.c(2)

    conditions = [_integral(m.integrate(_index_integrand(m, t)), "integral of ch(t) td(X), xi = 0", "index")]
    for xi in m.h2_elements():
        value = xi * (c1 * c2 + c3 - (k1 + xi) * c2)
        conditions.append(_congruent_zero(value, 4, 2, f"xi = {xi.render()}: xi(c1c2 + c3 - (c1(X) + xi)c2)", "rank4-mod2"))

    half = (c2 * (c2 - k2) + k1 * (c3 - (c1 + k1) * c2)) * Fraction(1, 2)
    conditions.append(_integral_class(half.homogeneous(4), "half-term of the c4 congruence is integral", "rank4-mod6-integral"))
    difference = c4 - (c1 + k1) * (c3 - c1 * c2) - half
    conditions.append(_congruent_zero(difference, 4, 6, "c4 - (c1 + c1(X))(c3 - c1c2) - half-term", "rank4-mod6"))
    verdict = Verdict.from_conditions(conditions)
    logger.info(f"check_dim4 on {m.name}: {'pass' if verdict.passed else 'fail'}")
    return verdict


def _wu_condition(m: RingModel, t: ChernTuple) -> Condition:
    c1, c2, c3 = t.padded(3)
    base = (c3 - c1 * c2).homogeneous(3)
    if m.dim < 3:
        return _congruent_zero(base, 3, 2, "c3 - c1c2 - Sq2(c2)", "wu")
    if m.has_sq2():
        sq = m.sq2(c2)
    elif m.dim == 3:
        # Sq^2 on H^{2n-2} is multiplication by c1(X)
        sq = m.tangent_chern().c(1) * c2
    else:
        raise HypothesisError(f"model {m.name} carries no Sq^2 table")
    return _congruent_zero(base - sq, 3, 2, "c3 - c1c2 - Sq2(c2)", "wu")


def check_wu(m: RingModel, t: ChernTuple) -> Verdict:
    """c3 = c1c2 + Sq^2 c2 in H^6(X, Z/2)."""
    return Verdict.from_conditions([_wu_condition(m, t)])


def check_dim5(m: RingModel, t: ChernTuple) -> Verdict:
    _check_dim(m, 5, "check_dim5")
    _check_rank(t, 5, "check_dim5")
    notes: List[str] = []
    if m.has_sq2():
        conditions = [_wu_condition(m, t)]
    else:
        logger.warning(f"model {m.name} has no Sq^2 table; the mod 2 condition is left unevaluated")
        conditions = [
            Condition(
                condition="Sq2 condition unevaluated",
                value="n/a",
                modulus="2",
                passed=True,
                source="wu",
                evaluated=False,
            )
        ]
        notes.append("no Sq^2 table: c3 = c1c2 + Sq2(c2) mod 2 was not checked")
    integrand = _index_integrand(m, t)
    for label, xi in [("0", m.zero())] + [(g.render(), g) for g in m.h2_elements()]:
        value = m.integrate(integrand * xi.exp())
        conditions.append(_integral(value, f"integral of ch(t) e^xi td(X), xi = {label}", "index-twisted"))
    verdict = Verdict.from_conditions(conditions, notes)
    logger.info(f"check_dim5 on {m.name}: {'pass' if verdict.passed else 'fail'}")
    return verdict


# ---------------------------
# Torsion-free cohomology and projective space
# ---------------------------
def check_torsion_free(
    m: RingModel,
    t: ChernTuple,
    stop_on_failure: bool = False,
    cap: Optional[int] = None,
    sample: Optional[int] = None,
) -> Verdict:
    """
    integral of ch(t) e^xi td(X) for xi a sum of at most n - 3 H^2 generators.

    With `sample`, only a seeded subset of the xi is evaluated (xi = 0 always).
    """
    validate_generation(m)
    _check_rank(t, m.dim, "check_torsion_free")
    max_k = m.dim - 3
    total = _count_multisets(len(m.h2_basis), max_k)
    _guard(_evaluated_count(total, sample), cap)
    integrand = _index_integrand(m, t)
    gens = m.h2_elements()
    notes: List[str] = []

    def evaluate(multiset: Tuple[int, ...]) -> Condition:
        xi = m.zero()
        for i in multiset:
            xi = xi + gens[i]
        value = m.integrate(integrand * xi.exp())
        return _integral(value, f"integral of ch(t) e^xi td(X), xi = {_xi_label(m, multiset)}", "index-twisted")

    multisets = _select(_multisets(len(gens), max_k), total, sample, notes)
    conditions = _collect(multisets, evaluate, stop_on_failure, notes)
    verdict = Verdict.from_conditions(conditions, notes)
    logger.info(f"check_torsion_free on {m.name}: {len(conditions)} conditions, {'pass' if verdict.passed else 'fail'}")
    return verdict


def check_projective(n: int, t: ChernTuple, stop_on_failure: bool = False) -> Verdict:
    """integral over P^n of ch(t) e^{kh} (h/(1 - e^{-h}))^{n+1}, 0 <= k <= n - 3."""
    _check_rank(t, n, "check_projective")
    m = projective_space(n)
    integrand = _index_integrand(m, t)
    h = m.gen("h")
    notes: List[str] = []

    def evaluate(k: int) -> Condition:
        value = m.integrate(integrand * (h * k).exp())
        return _integral(value, f"integral of ch(t) e^({k}h) td(P{n})", "projective")

    conditions = _collect(range(0, n - 2), evaluate, stop_on_failure, notes)
    verdict = Verdict.from_conditions(conditions, notes)
    logger.info(f"check_projective on P{n}: {len(conditions)} conditions, {'pass' if verdict.passed else 'fail'}")
    return verdict


def check_model(
    m: RingModel,
    t: ChernTuple,
    mode: Optional[str] = None,
    stop_on_failure: bool = False,
    sample: Optional[int] = None,
) -> Verdict:
    """Dispatch: `dim4`, `dim5`, `wu` or `torsion-free`; by default chosen from the dimension."""
    if mode is None:
        mode = {4: "dim4", 5: "dim5"}.get(m.dim, "torsion-free")
    if mode == "dim4":
        return check_dim4(m, t)
    if mode == "dim5":
        return check_dim5(m, t)
    if mode == "wu":
        return check_wu(m, t)
    return check_torsion_free(m, t, stop_on_failure=stop_on_failure, sample=sample)


# ---------------------------
# Flag manifolds
# ---------------------------
def _pair(f, w: WeylElement, convention: Convention):
    if convention.schubert_index == "direct":
        return schubert_pair(f, w)
    return schubert_pair(f, multiply(w, longest(w.datum)))


def _flag_character(flag: FlagManifold, t: ChernTuple):
    _check_rank(t, flag.dim, f"flag checks on {flag.name}")
    for k, c in enumerate(t.classes, start=1):
        flag.check_invariant(c, f"c{k}")
    return chern_character(t, flag.datum.n)


def check_flag(
    flag: FlagManifold,
    t: ChernTuple,
    convention: Convention,
    stop_on_failure: bool = False,
) -> Verdict:
    """sum_{w'} q_{w,w'} <ch(t), [X_w']> in Z for every P-saturated w with dim X_P(w) >= 3."""
    ch = _flag_character(flag, t)
    datum = flag.datum
    floor = parabolic_longest(datum, flag.subset).length + 3
    cosets = [w for w in saturated_cosets(datum, flag.subset) if w.length >= floor]
    notes: List[str] = []

    def evaluate(w: WeylElement) -> Condition:
        row = ch_schubert(w)
        value = sum((q * _pair(ch, v, convention) for v, q in row.items()), Fraction(0))
        return _integral(value, f"integral of ch(t) ch(O_X) td over X_{w.render()}", "schubert")

    conditions = _collect(cosets, evaluate, stop_on_failure, notes)
    verdict = Verdict.from_conditions(conditions, notes)
    logger.info(f"check_flag on {flag.name}: {len(conditions)} conditions, {'pass' if verdict.passed else 'fail'}")
    return verdict


def check_flag_weights(
    flag: FlagManifold,
    t: ChernTuple,
    convention: Convention,
    stop_on_failure: bool = False,
    cap: Optional[int] = None,
    sample: Optional[int] = None,
) -> Verdict:
    """integral over G/B of ch(t) e^{chi + s rho}, chi a sum of at most dim(G/B) - 3 fundamental weights."""
    datum = flag.datum
    if not is_type_ac(datum.cartan_type):
        logger.warning(f"{datum.cartan_type} is not a product of types A and C; using the Schubert route")
        verdict = check_flag(flag, t, convention, stop_on_failure)
        verdict.notes.append(f"weights route needs types A/C; {datum.cartan_type} was checked through Schubert cells")
        return verdict
    ch = _flag_character(flag, t)
    max_k = datum.n - 3
    total = _count_multisets(datum.rank, max_k)
    _guard(_evaluated_count(total, sample), cap)
    notes: List[str] = []
    s = convention.twist_sign

    def evaluate(multiset: Tuple[int, ...]) -> Condition:
        chi = [0] * datum.rank
        for i in multiset:
            chi[i] += 1
        shifted = tuple(c + s for c in chi)
        value = integrate_gb(ch * trunc_exp(weight_form(datum, shifted)), datum)
        label = " + ".join(f"w{i + 1}" for i in multiset) or "0"
        return _integral(value, f"integral of ch(t) e^(chi + {'' if s > 0 else '-'}rho), chi = {label}", "weights")

    multisets = _select(_multisets(datum.rank, max_k), total, sample, notes)
    conditions = _collect(multisets, evaluate, stop_on_failure, notes)
    verdict = Verdict.from_conditions(conditions, notes)
    logger.info(f"check_flag_weights on {flag.name}: {len(conditions)} conditions, {'pass' if verdict.passed else 'fail'}")
    return verdict


# ---------------------------
# Bound
# ---------------------------
def buhstaber_bound(q: int) -> int:
    """prod over primes p of p^floor((q-1)/(2p-1))."""
    if q < 1:
        raise HypothesisError(f"q must be >= 1, got {q}")
    m = 1
    for p in sympy.primerange(2, q + 1):
        m *= int(p) ** ((q - 1) // (2 * int(p) - 1))
    return m


# ---------------------------
# Calibration
# ---------------------------
def _dominant_box(datum: RootDatum) -> List[Tuple[int, ...]]:
    top = 5 if datum.rank == 1 else 3
    grid = [()]
    for _ in range(datum.rank):
        grid = [g + (a,) for g in grid for a in range(top + 1)]
    return grid


def _oracle_point_class(datum: RootDatum, rows, index: str) -> Tuple[bool, str]:
    point = identity(datum) if index == "direct" else longest(datum)
    for w, row in rows.items():
        value = row.coefficient(point)
        if value != 1:
            return False, f"coefficient of the point class in row {w.render()} is {render_fraction(value)}"
    return True, f"{len(rows)} rows"


def _oracle_flag_route(datum: RootDatum, rows, index: str) -> Tuple[bool, str]:
    convention = Convention(twist_sign=1, schubert_index=index)
    top = rows[longest(datum)]
    for chi in _dominant_box(datum):
        e_chi = trunc_exp(weight_form(datum, chi))
        value = sum((q * _pair(e_chi, v, convention) for v, q in top.items()), Fraction(0))
        expected = weyl_dimension(datum, chi)
        if value != expected:
            return False, f"chi = {chi}: got {render_fraction(value)}, expected {render_fraction(expected)}"
    return True, f"{len(_dominant_box(datum))} weights"


def _oracle_weights_route(datum: RootDatum, sign: int) -> Tuple[bool, str]:
    for chi in _dominant_box(datum):
        shifted = tuple(c + sign for c in chi)
        value = integrate_gb(trunc_exp(weight_form(datum, shifted)), datum)
        expected = weyl_dimension(datum, chi)
        if value != expected:
            return False, f"chi = {chi}: got {render_fraction(value)}, expected {render_fraction(expected)}"
    return True, f"{len(_dominant_box(datum))} weights"


def calibrate(datum: Union[RootDatum, CartanType, str]) -> CalibrationReport:
    """
    Pick the unique (twist sign, Schubert index) under which the point-class
    and Weyl-dimension oracles hold on A1, A2 and the given rank <= 2 datum.
    """
    if not isinstance(datum, RootDatum):
        datum = build(datum)
    if datum.rank > 2:
        raise HypothesisError(f"calibration runs on rank <= 2 data, got {datum.cartan_type}")
    types = sorted({str(build(c).cartan_type) for c in CALIBRATION_TYPES} | {str(datum.cartan_type)})
    data = [build(c) for c in types]
    rows = {str(d.cartan_type): q_matrix(d) for d in data}

    outcomes: List[OracleOutcome] = []
    passing = []
    for sign, index in CANDIDATES:
        ok = True
        for d in data:
            name = str(d.cartan_type)
            for oracle, (passed, detail) in (
                ("point class", _oracle_point_class(d, rows[name], index)),
                ("Weyl dimension, Schubert route", _oracle_flag_route(d, rows[name], index)),
                ("Weyl dimension, weights route", _oracle_weights_route(d, sign)),
            ):
                outcomes.append(
                    OracleOutcome(
                        cartan_type=name,
                        twist_sign=sign,
                        schubert_index=index,
                        oracle=oracle,
                        passed=passed,
                        detail=detail,
                    )
                )
                ok = ok and passed
        if ok:
            passing.append((sign, index))
        logger.debug(f"convention sign={sign:+d} index={index}: {'pass' if ok else 'fail'}")

    if len(passing) != 1:
        failed = [o for o in outcomes if not o.passed]
        summary = "; ".join(f"{o.cartan_type} {o.twist_sign:+d}/{o.schubert_index} {o.oracle}: {o.detail}" for o in failed[:8])
        raise CalibrationError(f"{len(passing)} conventions pass the oracles (expected exactly one). {summary}")
    sign, index = passing[0]
    logger.info(f"calibrated convention: twist sign {sign:+d}, Schubert index {index}")
    return CalibrationReport(twist_sign=sign, schubert_index=index, types=types, outcomes=outcomes)


def save_calibration(report: CalibrationReport, path: Optional[Path] = None) -> Path:
    path = Path(path) if path is not None else get_settings().calibration_file
    report.save(path)
    logger.info(f"Saved calibration record to {path}")
    return path


def load_convention(path: Optional[Path] = None) -> Convention:
    path = Path(path) if path is not None else get_settings().calibration_file
    return CalibrationReport.load(path).convention()
