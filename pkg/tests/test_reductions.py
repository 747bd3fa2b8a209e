import json
import random

import pytest

from bsigma import problems as P
from bsigma import reductions as R
from bsigma.colorings import ColoringInstance
from bsigma.errors import UnknownReduction, UnsupportedLevel
from bsigma.machines import DecidableMatrix, EnumSet
from bsigma.problems import Family, Solution, Variant
from bsigma.streams import Stream


def one_place(fn, k=None):
    return ColoringInstance(1, k, lambda t: fn(t[0]))


def family(*stage_fns):
    return Family(tuple(EnumSet(e, f) for e, f in enumerate(stage_fns)))


def test_wr1_phi_parity():
    img = R.wr1_phi(P.pigeonhole(0, parity=True))
    assert img.color(2, 4) == 1 and img.color(2, 3) == 0


def test_wr1_phi_constant():
    img = R.wr1_phi(one_place(lambda x: 0, 1))
    assert all(img.color(x, y) == 1 for y in range(12) for x in range(y))


@pytest.mark.parametrize("seed", range(5))
def test_wr1_phi_matches_direct_comparison(seed):
    c0 = P.pigeonhole(seed)
    img = R.wr1_phi(c0)
    rng = random.Random(seed)
    for _ in range(100):
        x, y = sorted(rng.sample(range(500), 2))
        assert img.color(x, y) == int(c0.color(x) == c0.color(y))


def test_wr1_phi_arity_three():
    c0 = P.pigeonhole(2)
    img = R.wr1_phi(c0, arity=3)
    assert img.arity == 3
    assert img.color(1, 5, 9) == int(c0.color(1) == c0.color(5))


def test_wr1_psi_parity():
    c0 = P.pigeonhole(0, parity=True)
    evens = Stream.where(lambda x: x % 2 == 0)
    odds = Stream.where(lambda x: x % 2 == 1)
    assert R.wr1_psi(c0, Solution.set(evens)).payload == 0
    assert R.wr1_psi(c0, Solution.set(odds)).payload == 1
    back = R.wr1_psi(c0, Solution.set(odds), Variant.SET)
    assert back.variant is Variant.SET and back.payload.take(3) == [1, 3, 5]


def test_srt22_half_coloring():
    c0 = one_place(lambda x: x // 2)
    pair = R.srt22_pair()
    img = pair.image(c0)
    # once y is two past x the colors differ for good
    assert all(img.color(x, y) == 0 for x in range(30) for y in range(x + 2, x + 40))
    out = pair.back(c0, Solution.set(Stream.where(lambda x: x % 2 == 0)))
    assert out.payload.take(6) == [0, 1, 2, 3, 4, 5]


def test_finite_union_empty_family():
    img = R.finite_union_phi(family(lambda x, s: False))
    assert [img.color(x) for x in range(10)] == [0] * 10


def test_finite_union_single_element():
    img = R.finite_union_phi(Family((EnumSet.from_table(0, {5: 6}),)))
    assert [img.color(x) for x in range(9)] == [0, 0, 0, 0, 0, 0, 6, 6, 6]


def test_finite_union_psi_reads_only_the_hole():
    fam = Family((EnumSet.from_table(0, {5: 6}),))
    assert R.get("finite-union").back(fam, Solution.hole(6)).payload == 6


def test_srt2i_evens_and_tail():
    fam = family(lambda x, s: x % 2 == 0 and x < s, lambda x, s: 1 <= x < s)
    img = R.srt2i_pair().image(fam)
    assert img.colors == 3
    assert img.color(0, 10) == 1
    assert all(img.color(x, x + 10) == 0 for x in range(1, 30))


def test_srt2i_psi_on_a_pair():
    fam = family(lambda x, s: x % 2 == 0 and x < s, lambda x, s: 1 <= x < s)
    h = Stream.of([3, 20, 40])
    assert R.srt2i_pair().back(fam, Solution.set(h)).payload == 0


def two_color_matrix():
    # true color: x mod 2, witnessed at w0 = x mod 3
    return DecidableMatrix(3, lambda x, c, w0: c == x % 2 and w0 == x % 3)


def matrix_tape(theta, k):
    from bsigma.coding import uncantor_tuple
    return lambda p: k if p == 0 else int(theta(*uncantor_tuple(p - 1, theta.arity)))


def test_truncation_level_one():
    theta = two_color_matrix()
    read = matrix_tape(theta, 2)
    for x in range(30):
        # brute-force reading of the definition
        for z0 in range(6):
            expect = next((c for c in range(2) if any(theta(x, c, w) for w in range(z0))), 2)
            assert R.truncated_color(x, (z0,), 2, read) == expect
        for z0 in range(3, 8):
            assert R.truncated_color(x, (z0,), 2, read) == x % 2


def test_lastlemma_constant_coloring():
    inst = P.sigma_coloring(1, 1, k=2)
    theta = DecidableMatrix(3, lambda x, c, w0: c == 0)
    const = ColoringInstance(1, 2, lambda t: 0, inst.domain, matrix=theta, level=1)
    img = R.lastlemma_pair(1).image(const)
    assert all(img.color(*t) == 1 for t in [(0, 1, 2), (3, 5, 9), (1, 2, 30)])


def test_lastlemma_levels():
    with pytest.raises(UnsupportedLevel):
        R.lastlemma_pair(3)
    assert R.lastlemma_pair(2).target_arity == 4


def test_identity_round_trip():
    inst = P.stable_tuples(3, 2)
    img = R.identity_pair().image(inst)
    assert all(img.color(x, y) == inst.color(x, y) for y in range(25) for x in range(y))


def test_catalog_listing():
    data = json.loads(R.listing_json())
    assert len(data["reductions"]) == len(R.CATALOG)
    assert {"name", "source", "target", "strong", "anchor"} <= set(data["reductions"][0])
    with pytest.raises(UnknownReduction):
        R.get("no-such")


def test_mutation_shifts_psi():
    c0 = P.pigeonhole(0, parity=True)
    evens = Solution.set(Stream.where(lambda x: x % 2 == 0))
    bad = R.mutated(R.get("wr1"), 1)
    assert bad.back(c0, evens).payload == 1
    assert bad.describe()["mutation"] == 1


def test_pairs_never_touch_spoilers():
    c0 = P.pigeonhole(7)
    stripped = ColoringInstance(1, c0.colors, c0.color_fn)
    a, b = R.get("wr1").image(c0), R.get("wr1").image(stripped)
    assert all(a.color(x, y) == b.color(x, y) for y in range(20) for x in range(y))
