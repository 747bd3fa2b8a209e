from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from bsigma import oracles as O
from bsigma import problems as P
from bsigma import reductions as R
from bsigma.colorings import ColoringInstance, ColoringSpoiler
from bsigma.errors import FixtureError
from bsigma.problems import ProblemId, Solution
from bsigma.streams import Stream


def test_wr1_image_of_parity_gives_evens():
    c0 = P.pigeonhole(0, parity=True)
    img = O.with_spoiler(R.get("wr1"), c0)
    h1 = O.solve_with_spoiler(ProblemId.RT22, img)
    assert h1.payload.take(5) == [0, 2, 4, 6, 8]


def half():
    sp = ColoringSpoiler(class_cap=2, extras={"last_member": lambda c: 2 * c + 1})
    return ColoringInstance(1, None, lambda t: t[0] // 2, spoiler=sp)


def test_srt22_image_of_half_gives_one_point_per_color():
    img = O.with_spoiler(R.srt22_pair(), half())
    h1 = O.solve_with_spoiler(ProblemId.SRT2K, img)
    assert h1.payload.take(5) == [0, 2, 4, 6, 8]
    assert P.validate(ProblemId.SRT2K, img, h1, window=200).passed


@pytest.mark.parametrize("name", ["wr1", "wr1-set", "srt22", "srt2i", "identity", "wr1-rtn"])
@pytest.mark.parametrize("seed", range(4))
def test_oracle_sets_are_homogeneous_under_the_image(name, seed):
    from bsigma.harness import SOURCES
    pair = R.get(name)
    src = SOURCES[name](seed)
    img = O.with_spoiler(pair, src)
    sol = O.solve_with_spoiler(pair.target, img)
    assert O.checked_solution(pair.target, img, sol, 2000, 32) is sol


def test_checked_solution_rejects_bad_oracle_output():
    c0 = P.pigeonhole(0, parity=True)
    img = O.with_spoiler(R.get("wr1"), c0)
    bad = Solution.set(Stream.where(lambda x: True))
    with pytest.raises(FixtureError):
        O.checked_solution(ProblemId.RT22, img, bad, 200, 8)


def test_rainbow_trivial_solver_half():
    c0 = half()
    assert O.new_color_representatives(c0).take(4) == [0, 2, 4, 6]
    assert O.rainbow_trivial_solver(c0).payload.take(4) == [0, 1, 2, 3]


def test_rainbow_trivial_solver_injective():
    c0 = ColoringInstance(1, None, lambda t: 3 * t[0] + 1)
    assert O.new_color_representatives(c0).take(6) == list(range(6))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_rainbow_solution_colors_distinct(seed, cap):
    c0 = P.rainbow(seed, cap)
    sol = O.rainbow_trivial_solver(c0)
    colors = sol.payload.take(40)
    assert len(set(colors)) == 40
    assert P.validate(ProblemId.RAINBOW, c0, sol, window=2000).passed


def pentagon(t):
    x, y = t
    return 1 if (y - x) % 5 in (1, 4) else 0


def test_pentagon_has_no_monochromatic_triangle():
    res = O.brute_homogeneous(pentagon, 5, 2, 3)
    assert isinstance(res, O.ExhaustionCertificate) and not res.capped
    assert O.brute_verdict(res).status.value == "fail"


def test_k6_sampled_colorings_have_triangles():
    edges = list(combinations(range(6), 2))
    for mask in range(0, 1 << 15, 97):
        col = {e: (mask >> i) & 1 for i, e in enumerate(edges)}
        found = O.brute_homogeneous(col.__getitem__, 6, 2, 3)
        assert isinstance(found, tuple)
        assert len({col[p] for p in combinations(found, 2)}) == 1


def test_constant_coloring_returns_least_subset():
    assert O.brute_homogeneous(lambda t: 0, 9, 3, 5) == (0, 1, 2, 3, 4)


def test_search_cap():
    res = O.brute_homogeneous(lambda t: 0, 40, 2, 3)
    assert res.capped
    assert O.brute_verdict(res).status.value == "unknown"
    assert res.to_json()["capped"] is True


@pytest.mark.parametrize("seed", range(5))
def test_brute_force_agrees_with_spoiler_solution(seed):
    pair = R.get("wr1")
    src = P.pigeonhole(seed)
    img = O.with_spoiler(pair, src)
    h = O.solve_with_spoiler(ProblemId.RT22, img).payload.take(8)
    found = O.brute_homogeneous(O.window_coloring(img, h), len(h), 2, len(h))
    assert found == tuple(range(len(h)))


def test_lastlemma_spoiler_hole_matches_ground_truth():
    src = P.sigma_coloring(3, 2)
    pair = R.lastlemma_pair(2)
    img = O.with_spoiler(pair, src)
    h1 = O.solve_with_spoiler(ProblemId.RTN2, img)
    hole = pair.back(src, h1).payload
    assert hole in src.spoiler.infinite_holes
    assert src.spoiler.ground_truth(h1.payload[0]) == hole


def test_oracle_refuses_missing_spoiler():
    c0 = ColoringInstance(1, 2, lambda t: t[0] % 2)
    with pytest.raises(FixtureError):
        O.image_spoiler(R.get("wr1"), c0)
