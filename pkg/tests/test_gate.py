import json
from itertools import combinations_with_replacement, product

import pytest

from bgg import borel_ring, weight_form
from char_classes import ChernTuple, sum_of_line_bundles, trivial
from errors import CalibrationError, HypothesisError, ResourceLimitError
from gate import (
    _select,
    buhstaber_bound,
    calibrate,
    check_dim4,
    check_dim5,
    check_flag,
    check_flag_weights,
    check_model,
    check_projective,
    check_torsion_free,
    check_wu,
    load_convention,
    save_calibration,
)
from manifold_models import dumps_model, flag_model, kunneth, parse_model, projective_space
from reports import Convention, Verdict
from settings import get_settings

WEIGHT_BOX = range(-2, 3)


def line_bundle_sums(m):
    h = m.gen("h")
    for weights in combinations_with_replacement(WEIGHT_BOX, m.dim):
        yield weights, sum_of_line_bundles([h * a for a in weights], m.one())


def without_sq2(m):
    text = "".join(line + "\n" for line in dumps_model(m).splitlines() if not line.startswith("sq2"))
    return parse_model(text)


def random_model_tuple(rng, m):
    classes = tuple(m.gen(m.basis[k][0]) * rng.randint(-6, 6) for k in range(1, m.dim + 1))
    return ChernTuple(m.dim, classes, m.one())


# ---------------------------
# Existence closure
# ---------------------------
def test_line_bundle_sums_on_p3():
    m = projective_space(3)
    for weights, t in line_bundle_sums(m):
        assert check_projective(3, t).passed, weights
        assert check_torsion_free(m, t).passed, weights
        assert check_wu(m, t).passed, weights


def test_line_bundle_sums_on_p4():
    m = projective_space(4)
    for weights, t in line_bundle_sums(m):
        assert check_projective(4, t).passed, weights
        assert check_torsion_free(m, t).passed, weights
        verdict = check_dim4(m, t)
        assert verdict.passed, (weights, verdict.render())


def test_line_bundle_sums_on_p5():
    m = projective_space(5)
    for weights, t in line_bundle_sums(m):
        assert check_projective(5, t).passed, weights
        assert check_torsion_free(m, t).passed, weights
        verdict = check_dim5(m, t)
        assert verdict.passed, (weights, verdict.render())


def test_line_bundle_sums_on_the_a2_flag():
    flag = flag_model("A2")
    convention = Convention()
    weights = [weight_form(flag.datum, w) for w in [(0, 0), (1, 0), (0, 1), (1, 1)]]
    for choice in product(weights, repeat=3):
        t = sum_of_line_bundles(list(choice), flag.one())
        assert check_flag(flag, t, convention).passed
        assert check_flag_weights(flag, t, convention).passed


def test_line_bundle_sums_on_the_b2_flag():
    flag = flag_model("B2")
    convention = Convention()
    weights = [weight_form(flag.datum, w) for w in [(0, 0), (1, 0), (0, 1), (-1, 1)]]
    for choice in combinations_with_replacement(weights, 4):
        t = sum_of_line_bundles(list(choice), flag.one())
        assert check_flag(flag, t, convention).passed
        assert check_flag_weights(flag, t, convention).passed


def test_trivial_tuples_pass():
    for n in (3, 4, 5):
        m = projective_space(n)
        assert check_model(m, trivial(n, m.one())).passed
    flag = flag_model("A2")
    assert check_flag(flag, trivial(3, flag.one()), Convention()).passed


# ---------------------------
# Low-dimensional checkers
# ---------------------------
def test_dim4_residue_scan():
    m = projective_space(4)
    h4 = m.gen("h4")
    for k in range(6):
        t = ChernTuple(4, (m.zero(), m.zero(), m.zero(), h4 * k), m.one())
        verdict = check_dim4(m, t)
        assert verdict.passed == (k == 0)
        if k:
            assert {c.source for c in verdict.failures()} == {"index", "rank4-mod6"}


def test_dim4_hypotheses():
    with pytest.raises(HypothesisError):
        check_dim4(projective_space(3), trivial(4, projective_space(3).one()))
    m = projective_space(4)
    with pytest.raises(HypothesisError):
        check_dim4(m, trivial(3, m.one()))


def test_dim5_top_class_perturbation():
    m = projective_space(5)
    h, h5 = m.gen("h"), m.gen("h5")
    base = sum_of_line_bundles([h, h, h * -1, m.zero(), m.zero()], m.one())
    assert check_dim5(m, base).passed

    classes = list(base.classes)
    classes[4] = classes[4] + h5
    verdict = check_dim5(m, ChernTuple(5, tuple(classes), m.one()))
    twisted = [c for c in verdict.conditions if c.source == "index-twisted"]
    assert len(twisted) == 2
    assert not any(c.passed for c in twisted)
    assert all(c.passed for c in verdict.conditions if c.source == "wu")

    classes[4] = base.classes[4] + h5 * 24
    assert check_dim5(m, ChernTuple(5, tuple(classes), m.one())).passed


def test_dim5_without_sq2_table():
    m = without_sq2(projective_space(5))
    verdict = check_dim5(m, m.tangent_chern())
    assert verdict.passed
    assert not verdict.conditions[0].evaluated
    assert verdict.notes


def test_wu_on_p3():
    m = projective_space(3)
    h2, h3 = m.gen("h2"), m.gen("h3")
    assert check_wu(m, ChernTuple(3, (m.zero(), h2, m.zero()), m.one())).passed
    assert not check_wu(m, ChernTuple(3, (m.zero(), h2, h3), m.one())).passed
    # without a table the 3-fold rule Sq^2 = c1(X) * - gives the same answers
    bare = without_sq2(m)
    assert check_wu(bare, ChernTuple(3, (bare.zero(), bare.gen("h2"), bare.zero()), bare.one())).passed
    assert not check_wu(bare, ChernTuple(3, (bare.zero(), bare.gen("h2"), bare.gen("h3")), bare.one())).passed


def test_wu_needs_a_table_above_dimension_three():
    m = without_sq2(projective_space(4))
    with pytest.raises(HypothesisError):
        check_wu(m, trivial(4, m.one()))


# ---------------------------
# Torsion-free and projective checkers
# ---------------------------
def test_projective_values():
    m = projective_space(3)
    h2, h3 = m.gen("h2"), m.gen("h3")
    passing = check_projective(3, ChernTuple(3, (m.zero(), h2, m.zero()), m.one()))
    assert passing.passed
    assert passing.conditions[0].value == "1"
    failing = check_projective(3, ChernTuple(3, (m.zero(), m.zero(), h3), m.one()))
    assert not failing.passed
    assert failing.conditions[0].value == "7/2"
    assert failing.conditions[0].modulus == "Z"


def test_condition_counts():
    assert len(check_projective(2, trivial(2, projective_space(2).one())).conditions) == 0
    assert len(check_torsion_free(projective_space(2), trivial(2, projective_space(2).one())).conditions) == 0
    assert len(check_torsion_free(projective_space(3), trivial(3, projective_space(3).one())).conditions) == 1
    assert len(check_projective(6, trivial(6, projective_space(6).one())).conditions) == 4


@pytest.mark.parametrize("n", [3, 4])
def test_projective_and_torsion_free_agree(rng, n):
    m = projective_space(n)
    for _ in range(100):
        t = random_model_tuple(rng, m)
        assert check_projective(n, t).passed == check_torsion_free(m, t).passed


def test_stop_on_failure_keeps_a_prefix():
    m = projective_space(5)
    t = ChernTuple(5, (m.zero(), m.zero(), m.gen("h3"), m.zero(), m.zero()), m.one())
    full = check_torsion_free(m, t)
    short = check_torsion_free(m, t, stop_on_failure=True)
    assert not full.passed and not short.passed
    assert short.conditions == full.conditions[: len(short.conditions)]
    assert not short.conditions[-1].passed


def test_condition_cap():
    m = projective_space(4)
    with pytest.raises(ResourceLimitError):
        check_torsion_free(m, trivial(4, m.one()), cap=1)


def test_sampled_conditions_are_a_seeded_subset():
    m = kunneth(projective_space(3), projective_space(3))
    t = m.tangent_chern()
    full = check_torsion_free(m, t)
    assert len(full.conditions) == 10
    first = check_torsion_free(m, t, sample=4)
    second = check_torsion_free(m, t, sample=4)
    assert first == second
    assert len(first.conditions) == 4
    assert first.conditions[0].condition.endswith("xi = 0")
    assert all(c in full.conditions for c in first.conditions)
    assert any("sampled 4 of 10" in note for note in first.notes)
    assert check_model(m, t, sample=4) == first
    with pytest.raises(HypothesisError):
        check_torsion_free(m, t, sample=0)


def test_more_conditions_never_turn_a_failure_into_a_pass(rng):
    m = kunneth(projective_space(3), projective_space(3))
    failures = 0
    for _ in range(10):
        t = random_model_tuple(rng, m)
        full = check_torsion_free(m, t)
        for size in range(1, len(full.conditions) + 1):
            sampled = check_torsion_free(m, t, sample=size)
            assert all(c in full.conditions for c in sampled.conditions)
            if not sampled.passed:
                assert not full.passed
        short = check_torsion_free(m, t, stop_on_failure=True)
        assert short.passed == full.passed
        failures += not full.passed
    assert failures


def test_sampling_streams_the_conditions():
    consumed = []

    def items():
        for i in range(10):
            consumed.append(i)
            yield i

    notes = []
    picked = _select(items(), 10, 4, notes)
    assert consumed == []
    assert next(picked) == 0
    assert consumed == [0]
    rest = list(picked)
    assert len(rest) == 3
    assert rest == sorted(rest)
    assert notes == [f"sampled 4 of 10 conditions (seed {get_settings().sample_seed})"]

    full = _select(items(), 10, None, [])
    assert next(full) == 0


def test_sampling_keeps_the_cap_on_evaluated_conditions():
    m = projective_space(4)
    verdict = check_torsion_free(m, trivial(4, m.one()), cap=1, sample=1)
    assert [c.condition for c in verdict.conditions] == ["integral of ch(t) e^xi td(X), xi = 0"]


def test_generation_hypothesis():
    text = dumps_model(projective_space(2)).replace("mult: h * h = h2", "mult: h * h = 2*h2")
    m = parse_model(text)
    with pytest.raises(HypothesisError):
        check_torsion_free(m, trivial(2, m.one()))


# ---------------------------
# Flag checkers
# ---------------------------
def random_flag_tuple(rng, flag):
    """Random c_1..c_n on a rank two flag manifold, coefficients in [-3, 3]."""
    x1, x2 = borel_ring(flag.datum).gens()
    zero = flag.one() * 0

    def form(degree):
        return sum((x1 ** i * x2 ** (degree - i) * rng.randint(-3, 3) for i in range(degree + 1)), zero)

    return ChernTuple(flag.dim, tuple(form(k) for k in range(1, flag.dim + 1)), flag.one())


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_flag_routes_agree(rng, name):
    flag = flag_model(name)
    convention = Convention()
    outcomes = set()
    for _ in range(100):
        t = random_flag_tuple(rng, flag)
        cells = check_flag(flag, t, convention)
        weights = check_flag_weights(flag, t, convention)
        assert not weights.notes
        assert cells.passed == weights.passed
        outcomes.add(cells.passed)
    assert outcomes == {True, False}


def test_a2_full_flag_has_one_condition():
    flag = flag_model("A2")
    t = trivial(3, flag.one())
    assert len(check_flag(flag, t, Convention()).conditions) == 1
    assert len(check_flag_weights(flag, t, Convention()).conditions) == 1


def test_a1_has_no_conditions():
    flag = flag_model("A1")
    x = borel_ring(flag.datum).gen(0)
    t = ChernTuple(1, (x * 7,), flag.one())
    assert check_flag(flag, t, Convention()).conditions == []
    assert check_flag_weights(flag, t, Convention()).passed


def test_weights_route_falls_back_outside_types_a_and_c():
    flag = flag_model("G2")
    verdict = check_flag_weights(flag, trivial(6, flag.one()), Convention())
    assert verdict.passed
    assert any("Schubert cells" in note for note in verdict.notes)
    assert {c.source for c in verdict.conditions} == {"schubert"}


def test_flag_input_must_be_invariant():
    flag = flag_model("A2", (0,))
    x1, _ = borel_ring(flag.datum).gens()
    with pytest.raises(HypothesisError):
        check_flag(flag, ChernTuple(2, (x1,), flag.one()), Convention())


# ---------------------------
# Bound and calibration
# ---------------------------
@pytest.mark.parametrize("q, expected", [(1, 1), (3, 1), (4, 2), (7, 12), (10, 2 ** 3 * 3 * 5)])
def test_buhstaber_bound(q, expected):
    assert buhstaber_bound(q) == expected


def test_buhstaber_bound_domain():
    with pytest.raises(HypothesisError):
        buhstaber_bound(0)


def test_calibration_picks_the_positive_direct_convention():
    report = calibrate("A2")
    assert (report.twist_sign, report.schubert_index) == (1, "direct")
    assert report.types == ["A1", "A2"]
    assert len(report.outcomes) == 4 * 2 * 3
    chosen = [o for o in report.outcomes if (o.twist_sign, o.schubert_index) == (1, "direct")]
    assert all(o.passed for o in chosen)
    assert not all(o.passed for o in report.outcomes)


def test_calibration_on_b2():
    report = calibrate("B2")
    assert report.types == ["A1", "A2", "B2"]
    assert report.convention() == Convention(twist_sign=1, schubert_index="direct")


def test_calibration_needs_rank_two():
    with pytest.raises(HypothesisError):
        calibrate("A3")


def test_calibration_record_round_trip(tmp_path):
    path = save_calibration(calibrate("A1"), tmp_path / "calibration.json")
    assert load_convention(path) == Convention(twist_sign=1, schubert_index="direct")
    with pytest.raises(CalibrationError):
        load_convention(tmp_path / "missing.json")


def test_default_calibration_file():
    with pytest.raises(CalibrationError):
        load_convention()
    save_calibration(calibrate("A1"))
    assert load_convention() == Convention()


# ---------------------------
# Reports
# ---------------------------
def test_verdict_json_round_trip():
    m = projective_space(3)
    verdict = check_projective(3, ChernTuple(3, (m.zero(), m.zero(), m.gen("h3")), m.one()))
    payload = json.loads(verdict.to_json())
    assert payload["pass"] is False
    assert payload["criterion"] == "finite surrogate"
    assert set(payload["conditions"][0]) == {"condition", "value", "modulus", "pass", "source", "evaluated"}
    assert Verdict.model_validate_json(verdict.to_json()) == verdict
    assert "[FAIL]" in verdict.render()
