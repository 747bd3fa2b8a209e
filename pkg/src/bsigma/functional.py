"""Turing functionals as monotone transformers of finite oracle prefixes.

A functional is evaluated position by position. Computing output position
``n`` may query the oracle; the first query that falls outside the known
prefix stops evaluation, so a longer prefix can only add outputs, and a
larger step budget can only add outputs. Every query and every committed
output costs one step.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import count
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import BudgetExhausted, DomainKindMismatch


class Kind(str, Enum):
    SET = "set-characteristic"
    FUNCTION = "function-graph"
    FAMILY = "family-enumeration"


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    DEFEATED = "defeated"
    SURVIVED = "survived-budget"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Any = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @classmethod
    def ok(cls, detail: str = "") -> "Verdict":
        return cls(Status.PASS, detail=detail)

    @classmethod
    def fail(cls, witness: Any = None, detail: str = "") -> "Verdict":
        return cls(Status.FAIL, witness, detail)

    def to_json(self) -> dict:
        return {"status": self.status.value, "witness": _jsonable(self.witness), "detail": self.detail}


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    return repr(obj)


@dataclass(frozen=True)
class OraclePrefix:
    entries: tuple[tuple[int, int], ...] = ()
    kind: Kind = Kind.FUNCTION
    _map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        entries = tuple((int(p), int(v)) for p, v in self.entries)
        m = dict(entries)
        if len(m) != len(entries):
            raise ValueError("oracle prefix positions must be distinct")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_map", m)

    @classmethod
    def from_values(cls, values: Sequence[int], kind: Kind = Kind.FUNCTION) -> "OraclePrefix":
        return cls(tuple(enumerate(values)), kind)

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int], kind: Kind = Kind.FUNCTION) -> "OraclePrefix":
        return cls(tuple(sorted(mapping.items())), kind)

    def __contains__(self, position: int) -> bool:
        return position in self._map

    def __getitem__(self, position: int) -> int:
        return self._map[position]

    def __len__(self) -> int:
        return len(self.entries)

    def __le__(self, other: "OraclePrefix") -> bool:
        return all(other._map.get(p) == v and p in other._map for p, v in self.entries)

    def as_dict(self) -> dict[int, int]:
        return dict(self._map)

    def extend(self, more: Mapping[int, int]) -> "OraclePrefix":
        m = self.as_dict()
        for p, v in more.items():
            if p in m and m[p] != v:
                raise ValueError(f"position {p} already holds {m[p]}")
            m[p] = v
        return OraclePrefix.from_dict(m, self.kind)

    def restrict(self, positions: Iterable[int]) -> "OraclePrefix":
        keep = set(positions)
        return OraclePrefix(tuple(e for e in self.entries if e[0] in keep), self.kind)


@dataclass(frozen=True)
class OutputPrefix:
    entries: tuple[tuple[int, int], ...] = ()
    use: Mapping[int, frozenset] = field(default_factory=dict, compare=False)
    steps: int = field(default=0, compare=False)
    exhausted: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if len({p for p, _ in self.entries}) != len(self.entries):
            raise ValueError("output positions must be distinct")

    def __le__(self, other: "OutputPrefix") -> bool:
        theirs = dict(other.entries)
        return all(p in theirs and theirs[p] == v for p, v in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def values(self) -> list[int]:
        return [v for _, v in self.entries]

    def as_oracle(self, kind: Kind) -> OraclePrefix:
        return OraclePrefix(self.entries, kind)


class Pending(Exception):
    """The output at this position is not determined by the available data."""


class _OutOfSteps(Exception):
    pass


Ask = Callable[[int], int]
Rule = Callable[[int, Ask], int]


class MonotoneFunctional:
    name: str
    in_kind: Kind
    out_kind: Kind

    def eval(self, prefix: OraclePrefix, budget: int, window: int | None = None,
             resume: OutputPrefix | None = None) -> OutputPrefix:
        raise NotImplementedError

    def value_at(self, n: int, oracle: Callable[[int], int]) -> int:
        """Output at position ``n`` against a total oracle."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}: {self.in_kind.value} -> {self.out_kind.value}>"


class PointwiseFunctional(MonotoneFunctional):
    """Functional whose ``n``-th output is ``rule(n, ask)``.

    ``rule`` must be deterministic in its answers to ``ask``; it may raise
    :class:`Pending` to signal that position ``n`` is not yet determined.
    """

    def __init__(self, name: str, rule: Rule, in_kind: Kind = Kind.FUNCTION,
                 out_kind: Kind = Kind.FUNCTION):
        self.name = name
        self.rule = rule
        self.in_kind = in_kind
        self.out_kind = out_kind

    def eval(self, prefix, budget, window=None, resume=None):
        entries = list(resume.entries) if resume else []
        use = dict(resume.use) if resume else {}
        steps = 0
        exhausted = False
        start = len(entries)
        for n in count(start):
            if window is not None and n >= window:
                break
            asked: set[int] = set()

            def ask(p: int) -> int:
                nonlocal steps
                if steps >= budget:
                    raise _OutOfSteps
                steps += 1
                asked.add(p)
                if p not in prefix:
                    raise Pending
                return prefix[p]

            try:
                value = self.rule(n, ask)
            except Pending:
                break
            except _OutOfSteps:
                exhausted = True
                break
            if steps >= budget:
                exhausted = True
                break
            steps += 1
            entries.append((n, int(value)))
            use[n] = frozenset(asked)
        return OutputPrefix(tuple(entries), use, steps, exhausted)

    def value_at(self, n, oracle):
        return int(self.rule(n, oracle))


class ComposedFunctional(MonotoneFunctional):
    """``outer`` applied to the output tape of ``inner``."""

    def __init__(self, outer: MonotoneFunctional, inner: MonotoneFunctional):
        self.outer = outer
        self.inner = inner
        self.name = f"{outer.name}∘{inner.name}"
        self.in_kind = inner.in_kind
        self.out_kind = outer.out_kind

    def eval(self, prefix, budget, window=None, resume=None):
        mid = self.inner.eval(prefix, budget)
        out = self.outer.eval(mid.as_oracle(self.inner.out_kind), budget, window)
        use = {
            n: frozenset().union(*(mid.use.get(p, frozenset()) for p in ps))
            for n, ps in out.use.items()
        }
        return OutputPrefix(out.entries, use, mid.steps + out.steps, mid.exhausted or out.exhausted)

    def value_at(self, n, oracle):
        return self.outer.value_at(n, lambda p: self.inner.value_at(p, oracle))


def compose(f: MonotoneFunctional, g: MonotoneFunctional) -> MonotoneFunctional:
    """The functional ``x -> f(g(x))``."""
    if g.out_kind != f.in_kind:
        raise DomainKindMismatch(f"cannot feed {g.out_kind.value} output of {g.name} "
                                 f"into {f.name}, which reads {f.in_kind.value}")
    return ComposedFunctional(f, g)


def identity(kind: Kind = Kind.FUNCTION) -> PointwiseFunctional:
    return PointwiseFunctional("identity", lambda n, ask: ask(n), kind, kind)


def run_to_window(f: MonotoneFunctional, oracle: Callable[[int], int], window: int,
                  budget: int) -> OutputPrefix:
    """All outputs at positions below ``window`` against a total oracle.

    Raises :class:`BudgetExhausted` if ``budget`` steps do not suffice.
    """
    if budget < 1:
        raise BudgetExhausted("budget must be at least one step")
    out = _eval_total(f, oracle, window, budget)
    if len(out) < window:
        raise BudgetExhausted(f"{f.name}: {len(out)} of {window} positions within {budget} steps")
    return out


class _TotalOracle:
    """Adapter presenting a callback as an oracle prefix that contains everything."""

    def __init__(self, fn: Callable[[int], int]):
        self.fn = fn

    def __contains__(self, position: int) -> bool:
        return True

    def __getitem__(self, position: int) -> int:
        return self.fn(position)


def _eval_total(f: MonotoneFunctional, oracle, window, budget) -> OutputPrefix:
    return f.eval(_TotalOracle(oracle), budget, window)  # type: ignore[arg-type]


def check_monotone(f: MonotoneFunctional,
                   prefixes: Iterable[tuple[OraclePrefix, OraclePrefix]],
                   budgets: Sequence[int]) -> Verdict:
    """Check monotonicity, consistency and use-correctness on given pairs."""
    budgets = sorted(budgets)
    for p, q in prefixes:
        if not p <= q:
            raise ValueError("each pair must satisfy p <= q")
        runs_p = [f.eval(p, b) for b in budgets]
        runs_q = [f.eval(q, b) for b in budgets]
        for i, b in enumerate(budgets):
            for j in range(i, len(budgets)):
                if not runs_p[i] <= runs_q[j]:
                    return Verdict.fail((p, q, b, budgets[j]), "not monotone in the oracle")
                if not runs_p[i] <= runs_p[j]:
                    return Verdict.fail((p, b, budgets[j]), "output retracted at a larger budget")
        for prefix, runs in ((p, runs_p), (q, runs_q)):
            for b, out in zip(budgets, runs):
                used = set().union(*out.use.values()) if out.use else set()
                replay = f.eval(prefix.restrict(used), b)
                if not out <= replay:
                    return Verdict.fail((prefix, b, sorted(used)), "use set does not determine the output")
    return Verdict.ok()


def check_masking(f: MonotoneFunctional, prefix: OraclePrefix, budget: int,
                  masked: Callable[[int], bool], rng: random.Random) -> Verdict:
    """Changing oracle values at ``masked`` positions must not change outputs."""
    base = f.eval(prefix, budget)
    scrambled = {
        p: (v + 1 + rng.randrange(5)) if masked(p) else v for p, v in prefix.entries
    }
    other = f.eval(OraclePrefix.from_dict(scrambled, prefix.kind), budget)
    if base.entries != other.entries:
        return Verdict.fail((prefix, scrambled), "output depends on a masked position")
    return Verdict.ok()


def random_chain(rng: random.Random, length: int = 3, max_position: int = 24,
                 max_value: int = 4, kind: Kind = Kind.FUNCTION,
                 dense: bool = True) -> list[OraclePrefix]:
    """A chain ``p0 <= p1 <= ...`` of random prefixes.

    With ``dense`` set, each link extends a contiguous initial segment, which
    is the shape most functionals make progress on.
    """
    chain = []
    current: dict[int, int] = {}
    for _ in range(length):
        if dense:
            top = max(current, default=-1) + 1
            for p in range(top, top + rng.randrange(1, max_position // length + 2)):
                current[p] = rng.randrange(max_value)
        for _ in range(rng.randrange(3)):
            p = rng.randrange(max_position * 2)
            current.setdefault(p, rng.randrange(max_value))
        chain.append(OraclePrefix.from_dict(current, kind))
    return chain
