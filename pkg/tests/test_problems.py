import random

import pytest
from hypothesis import given, settings, strategies as st

from bsigma import problems as P
from bsigma.colorings import ColoringInstance, ColoringSpoiler
from bsigma.errors import FixtureError, InvalidParams, SolutionError, UnsupportedLevel
from bsigma.functional import Status
from bsigma.machines import EnumSet, SpoilerTag
from bsigma.problems import Family, FamilySpoiler, ProblemId, Solution
from bsigma.streams import Stream


def parity():
    return P.pigeonhole(0, parity=True)


def single_five():
    tag = SpoilerTag(finite=True, final_membership=lambda x: x == 5, bound=6,
                     settling=lambda x: 6, settle_stage=6)
    w = EnumSet.from_table(0, {5: 6}, "five", tag)
    return Family((w,), FamilySpoiler(union_bound=6, settle_stage=6))


def test_parity_hole_zero_passes():
    v = P.validate(ProblemId.RT1, parity(), Solution.hole(0), window=100, threshold=50)
    assert v.passed


def test_parity_hole_out_of_range_fails():
    assert P.validate(ProblemId.RT1, parity(), Solution.hole(2), window=100).status is Status.FAIL


def test_parity_hole_needs_enough_pigeons():
    v = P.validate(ProblemId.RT1, parity(), Solution.hole(0), window=100, threshold=51)
    assert v.status is Status.FAIL


def test_finite_union_bounds():
    assert P.validate(ProblemId.FINITE_UNION, single_five(), Solution.bound(6), window=50).passed
    assert not P.validate(ProblemId.FINITE_UNION, single_five(), Solution.bound(4), window=50).passed


def test_homogeneous_set_checks():
    inst = parity()
    evens = Stream.where(lambda x: x % 2 == 0)
    assert P.validate(ProblemId.RT1, inst, Solution.set(evens)).passed
    mixed = Stream.where(lambda x: x % 3 == 0)
    assert not P.validate(ProblemId.RT1, inst, Solution.set(mixed)).passed


def test_empty_solution_only_for_non_instances():
    assert not P.validate(ProblemId.RT1, parity(), Solution.empty()).passed
    pairs = P.stable_tuples(0, 2)
    assert P.validate(ProblemId.RT1, pairs, Solution.empty()).passed


def test_wrong_variant_is_a_type_error():
    with pytest.raises(SolutionError):
        P.validate(ProblemId.RT22, P.stable_tuples(0, 2), Solution.hole(0))
    with pytest.raises(SolutionError):
        Solution.hole(-1).check()
    with pytest.raises(SolutionError):
        Solution(P.Variant.SET, [1, 2]).check()


def test_hole_without_spoiler_is_unknown():
    inst = ColoringInstance(1, 2, lambda t: t[0] % 2)
    assert P.validate(ProblemId.RT1, inst, Solution.hole(0)).status is Status.UNKNOWN


def test_generate_parity_split_has_two_infinite_holes():
    inst, sp = P.generate(ProblemId.RT1, 3, k=2, parity=True)
    counts = [sum(1 for x in range(1000) if inst.color(x) == h) for h in (0, 1)]
    assert counts == [500, 500]
    assert sp.infinite_holes == {0, 1}


@pytest.mark.parametrize("seed", range(10))
def test_pigeonhole_spoiler_holes_are_really_infinite(seed):
    inst, sp = P.generate(ProblemId.RT1, seed)
    window = 4000
    counts = {}
    for x in range(window):
        counts[inst.color(x)] = counts.get(inst.color(x), 0) + 1
    for h in range(inst.colors):
        late = sum(1 for x in range(window - 200, window) if inst.color(x) == h)
        assert (late > 0) == (h in sp.infinite_holes)


@pytest.mark.parametrize("seed", range(10))
def test_rainbow_class_cap(seed):
    inst, sp = P.generate(ProblemId.RAINBOW, seed, cap=3)
    sizes = {}
    for x in range(2000):
        sizes[inst.color(x)] = sizes.get(inst.color(x), 0) + 1
    assert max(sizes.values()) <= 3
    assert all(sp.extras["last_member"](c) < 2000 for c in list(sizes)[:-8])


@pytest.mark.parametrize("seed", range(10))
def test_ficf_intersection_misses_infinitely_many(seed):
    fam, sp = P.generate(ProblemId.FICF, seed, n=2)
    window = 600
    final = [w.members_at(window + 8) for w in fam.sets]
    missing = [x for x in range(window) if not all(x in m for m in final)]
    assert sum(1 for x in missing if x > window // 2) >= 10
    # spoiler agrees with the stage view
    for e, w in enumerate(fam.sets):
        for x in range(window):
            assert (x in final[e]) == w.spoiler.final_membership(x)


@pytest.mark.parametrize("seed", range(10))
def test_ficf_settling_formula(seed):
    fam, sp = P.generate(ProblemId.FICF, seed)
    n = len(fam)
    settling = sp.extras["settling"]
    for x in range(60):
        s = settling(x)
        # direct evaluation of the least-gap rule at stages s, s+5 and one before s
        def gap(s):
            for y in range(x, s + 1):
                for e in range(n):
                    if not fam.sets[e].contains(y, s):
                        return e
            return n
        assert gap(s) == gap(s + 5) == sp.limit_color(x)
        assert sp.limit_color(x) < n


def test_partial_coloring_restricts_to_block_tops():
    inst, _ = P.generate(ProblemId.RT1, 4, partial=True)
    assert not inst.computable_domain
    r = P.restrict_to_computable_domain(inst)
    assert r.domain.take(5) == [9, 19, 29, 39, 49]
    total = P.pigeonhole(1)
    assert P.restrict_to_computable_domain(total) is total


def test_restricted_instance_validates_with_its_spoiler():
    inst, _ = P.generate(ProblemId.RT1, 6, partial=True)
    r = P.restrict_to_computable_domain(inst)
    h = min(r.spoiler.infinite_holes)
    assert P.validate(ProblemId.RT1, r, Solution.hole(h), window=3000).passed


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_stable_tuples_settle(seed, k):
    inst = P.stable_tuples(seed, k)
    sp = inst.spoiler
    for x in range(30):
        for s in range(sp.settling(x), sp.settling(x) + 10):
            assert inst.color(x, s) == sp.limit_color(x)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_finite_union_spoiler_is_exact(seed):
    fam = P.finite_union(seed)
    sp = fam.spoiler
    union = set().union(*(w.members_at(sp.settle_stage) for w in fam.sets))
    assert max(union) + 1 == sp.union_bound
    before = set().union(*(w.members_at(sp.settle_stage - 1) for w in fam.sets))
    assert before != union
    P.audit(ProblemId.FINITE_UNION, fam, 200)


def test_sigma_levels():
    with pytest.raises(UnsupportedLevel):
        P.sigma_coloring(0, 3)
    inst = P.sigma_coloring(5, 2)
    P.audit(ProblemId.RT1, inst, 200)
    cert = inst.matrix.certificate
    for x in range(20):
        c = inst.spoiler.ground_truth(x)
        assert all(inst.matrix(x, c, cert.witness(x), w1) for w1 in range(30))


def test_invalid_params():
    with pytest.raises(InvalidParams):
        P.pigeonhole(0, k=1)
    with pytest.raises(InvalidParams):
        P.finite_union(0, n=0)


def test_poisoned_hole_schedule_detected():
    inst = parity()
    inst.spoiler = ColoringSpoiler(infinite_holes=frozenset({0}),
                                   witness_schedule={0: Stream.where(lambda x: x % 3 == 0)})
    with pytest.raises(FixtureError):
        P.validate(ProblemId.RT1, inst, Solution.hole(0))


@pytest.mark.parametrize("seed", range(8))
def test_restriction_round_trip(seed):
    # a hole of the restricted instance is a hole of the original one
    inst, _ = P.generate(ProblemId.RT1, seed, partial=True)
    r = P.restrict_to_computable_domain(inst)
    h = min(r.spoiler.infinite_holes)
    assert P.validate(ProblemId.RT1, inst, Solution.hole(h), window=4000).passed
    # and a total instance is its own restriction
    total = P.pigeonhole(seed)
    assert P.restrict_to_computable_domain(total) is total
