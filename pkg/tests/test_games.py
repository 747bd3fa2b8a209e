import json

import pytest
from hypothesis import given, settings, strategies as st

from bsigma import games as G
from bsigma.errors import MalformedCandidate
from bsigma.functional import Kind, PointwiseFunctional, Status

FIRST_COLOR = {
    "start": "q",
    "states": {
        "q": {"query": 0, "on": {"1": "zero", "2": "one", "*": "zero"}},
        "zero": {"emit": 0},
        "one": {"emit": 1},
    },
}


def test_constant_hole_defeated_and_class_starved():
    tr = G.play("nontrivial-rt1", "constant-hole", 1000, seed=0)
    assert tr.verdict.status is Status.DEFEATED
    after = [v for move in tr.moves[1:] for _, v in move["oracle"]]
    assert after and all(v == 2 for v in after)   # tape value 2 is color 1


def test_never_commits_survives():
    tr = G.play("nontrivial-rt1", "never-commits", 1000)
    assert tr.verdict.status is Status.SURVIVED
    assert tr.budget_used == 1000


@pytest.mark.parametrize("seed", range(5))
def test_majority_defeated_within_budget(seed):
    tr = G.play("nontrivial-rt1", "majority-of-first-100", 1000, seed=seed)
    assert tr.verdict.status is Status.DEFEATED and tr.budget_used <= 1000


def test_set_candidate_defeated():
    assert G.play("nontrivial-rt1", "evens", 1000).verdict.status is Status.DEFEATED


def test_budget_one_is_survival():
    for name in G.NAIVE_RT1:
        assert G.play("nontrivial-rt1", name, 1).verdict.status is Status.SURVIVED
    assert G.play("nontrivial-union", "immediate-bound-100", 1).verdict.status is Status.SURVIVED


def test_transcripts_serialize_and_replay():
    tr = G.play("nontrivial-rt1", "majority-of-first-100", 1000, seed=3)
    json.loads(tr.dumps())
    tr.commitments()          # raises on a retraction
    assert G.replay(tr)


def test_rt1_vs_union_empty_family():
    tr = G.play("rt1-vs-union", "empty-constant", 10**4)
    assert tr.verdict.status is Status.DEFEATED
    assert all(v != 1 for _, v in tr.commitments().items())   # color 0 never used


def test_rt1_vs_union_naive_defeated():
    tr = G.play("rt1-vs-union", "naive", 10**4)
    assert tr.verdict.status is Status.DEFEATED and tr.budget_used <= 10**4
    assert G.replay(tr)


def test_rt1_vs_union_changing_claim_survives():
    tr = G.play("rt1-vs-union", "changing", 10**4)
    assert tr.verdict.status is Status.SURVIVED
    claims = [m["outputs"][-1] for m in tr.moves]
    assert len(set(claims[-10:])) == 2


def test_rt1_vs_union_rejects_non_family_phi():
    phi = PointwiseFunctional("not-a-family", lambda n, ask: 0)
    psi = PointwiseFunctional("zero", lambda n, ask: 0)
    with pytest.raises(MalformedCandidate):
        G.game_rt1_vs_finite_union(phi, psi, 100)


def test_rt1_vs_union_rejects_bad_family_tape():
    phi = PointwiseFunctional("zero-members", lambda n, ask: 0, Kind.FUNCTION, Kind.FAMILY)
    psi = PointwiseFunctional("zero", lambda n, ask: 0)
    with pytest.raises(MalformedCandidate):
        G.game_rt1_vs_finite_union(phi, psi, 100)


def test_union_immediate_bound():
    tr = G.play("nontrivial-union", "immediate-bound-100", 1000, seed=0)
    assert tr.verdict.status is Status.DEFEATED
    (pos, code), = tr.moves[-1]["oracle"]
    assert code == 1 << 101


def test_union_stage_count_and_never():
    assert G.play("nontrivial-union", "stage-count", 1000).verdict.status is Status.DEFEATED
    assert G.play("nontrivial-union", "never-commits", 1000).verdict.status is Status.SURVIVED


def test_transducer_candidate(tmp_path):
    path = tmp_path / "first.json"
    path.write_text(json.dumps({"xi": FIRST_COLOR}))
    for seed in range(4):
        a = G.play("nontrivial-rt1", str(path), 100, seed=seed)
        b = G.play("nontrivial-rt1", "first-color", 100, seed=seed)
        assert a.verdict.status is b.verdict.status is Status.DEFEATED
        assert a.verdict.witness == b.verdict.witness


def test_transducer_offsets_and_streams():
    copy = G.transducer({"start": "q", "mode": "pointwise", "states": {
        "q": {"query": {"offset": 0}, "on": {"0": "a", "*": "b"}},
        "a": {"emit": 0}, "b": {"emit": 1}}})
    from bsigma.functional import OraclePrefix
    assert copy.eval(OraclePrefix.from_values([0, 5, 0]), 100).values() == [0, 1, 0]


@pytest.mark.parametrize("bad", [
    {"states": {}},
    {"start": "q", "states": {"q": {"query": 0, "on": {"1": "nowhere", "*": "q"}}}},
    {"start": "q", "states": {"q": {"query": 0, "on": {"1": "q"}}}},
    {"start": "q", "states": {"q": {"emit": 1, "query": 2}}},
])
def test_malformed_transducers(bad):
    with pytest.raises(MalformedCandidate):
        G.transducer(bad)


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MalformedCandidate):
        G.load_candidate(path)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(sorted(G.RT1_CANDIDATES)), st.integers(0, 1000), st.integers(1, 400))
def test_verdict_is_defeated_or_survived(name, seed, budget):
    tr = G.play("nontrivial-rt1", name, budget, seed=seed)
    assert tr.verdict.status in (Status.DEFEATED, Status.SURVIVED)
    assert tr.budget_used <= budget
