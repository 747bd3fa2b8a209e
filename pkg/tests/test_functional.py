import random

import pytest
from hypothesis import given, settings, strategies as st

from bsigma.errors import BudgetExhausted, DomainKindMismatch
from bsigma.functional import (Kind, MonotoneFunctional, OraclePrefix, OutputPrefix, Pending,
                               PointwiseFunctional, Status, check_masking, check_monotone,
                               compose, identity, random_chain, run_to_window)
from bsigma.reductions import equal_color_functional

successor = PointwiseFunctional("succ", lambda n, ask: ask(n) + 1)


def test_prefix_rejects_duplicates_and_orders_by_extension():
    with pytest.raises(ValueError):
        OraclePrefix(((0, 1), (0, 2)))
    p = OraclePrefix.from_values([1, 2])
    q = p.extend({5: 0})
    assert p <= q and not q <= p
    assert not OraclePrefix.from_values([1, 3]) <= q


def test_compose_identities():
    f = compose(identity(), identity())
    assert f.eval(OraclePrefix.from_dict({0: 1}), 100).entries == ((0, 1),)


def test_compose_successor_after_identity():
    f = compose(successor, identity())
    assert f.eval(OraclePrefix.from_dict({0: 4}), 100).entries == ((0, 5),)


def test_compose_use_is_inner_use():
    # g's output n reads oracle positions 7n .. 7n+6; f's output reads g at 0, 1, 2
    g = PointwiseFunctional("sum7", lambda n, ask: sum(ask(7 * n + i) for i in range(7)))
    f = PointwiseFunctional("sum3", lambda n, ask: ask(0) + ask(1) + ask(2) if n == 0 else ask(99))
    h = compose(f, g)
    prefix = OraclePrefix.from_values(list(range(21)))
    out = h.eval(prefix, 10**4)
    assert out.entries == ((0, sum(range(21))),)
    assert out.use[0] == frozenset(range(21))
    # masking every other position leaves the output alone
    rng = random.Random(0)
    assert check_masking(h, prefix.extend({p: 0 for p in range(21, 40)}), 10**4,
                         lambda p: p >= 21, rng).passed


def test_compose_kind_mismatch():
    fam = PointwiseFunctional("fam", lambda n, ask: 0, Kind.FUNCTION, Kind.FAMILY)
    with pytest.raises(DomainKindMismatch):
        compose(identity(Kind.FUNCTION), fam)


def test_run_to_window_identity_parity():
    assert run_to_window(identity(), lambda x: x % 2, 4, 100).values() == [0, 1, 0, 1]


def test_run_to_window_budget_zero():
    with pytest.raises(BudgetExhausted):
        run_to_window(identity(), lambda x: x, 1, 0)
    # each output costs a query and a commit: two steps per position
    with pytest.raises(BudgetExhausted):
        run_to_window(identity(), lambda x: x, 4, 7)


def test_wr1_phi_on_parity_window():
    parity_tape = lambda x: x % 2 + 1
    # pairs (0,1), (0,2), (1,2)
    assert run_to_window(equal_color_functional(), parity_tape, 3, 100).values() == [0, 1, 0]


def test_pending_stops_output():
    f = PointwiseFunctional("half", lambda n, ask: ask(n) if n < 2 else (_ for _ in ()).throw(Pending()))
    out = f.eval(OraclePrefix.from_values([5, 6, 7]), 100)
    assert out.values() == [5, 6]


def test_resume_matches_fresh_eval():
    p = OraclePrefix.from_values([3, 1, 4])
    q = p.extend({3: 1, 4: 5})
    first = successor.eval(p, 100)
    assert successor.eval(q, 100, resume=first).entries == successor.eval(q, 100).entries


class Retracting(MonotoneFunctional):
    name, in_kind, out_kind = "retracting", Kind.FUNCTION, Kind.FUNCTION

    def eval(self, prefix, budget, window=None, resume=None):
        return OutputPrefix(((0, budget % 2),), {0: frozenset()}, 1)

    def value_at(self, n, oracle):
        return 0


def test_check_monotone_identity_passes():
    rng = random.Random(1)
    chain = random_chain(rng)
    pairs = list(zip(chain, chain[1:]))
    assert check_monotone(identity(), pairs, [1, 5, 50]).passed


def test_check_monotone_catches_retraction():
    p = OraclePrefix.from_values([0])
    v = check_monotone(Retracting(), [(p, p)], [2, 3])
    assert v.status is Status.FAIL
    assert v.witness[-2:] == (2, 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_pointwise_laws_on_random_chains(seed):
    rng = random.Random(seed)
    chain = random_chain(rng, length=3)
    pairs = list(zip(chain, chain[1:]))
    for f in (identity(), successor, compose(successor, successor)):
        assert check_monotone(f, pairs, [3, 10, 1000]).passed
