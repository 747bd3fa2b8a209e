"""Counter machines, c.e. sets in stages, and the index-set constructions.

The machine model has three instructions::

    ("inc", r)          increment register r
    ("decjz", r, l)     if register r is zero jump to l, else decrement it
    ("halt",)

Input goes in register 0. A run that executes ``halt`` after ``t`` steps
(the halt itself counts) has a history of length ``t``, and ``T(e, x, s)``
holds iff that length is at most ``s``. Stage approximations follow
``x in W_{e,s} iff x < s and T(e, x, t) for some t < s``; the ``x < s``
clause keeps every stage finite.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from itertools import count
from typing import Any, Callable, Iterator, Sequence

from .coding import uncantor
from .colorings import ColoringInstance
from .errors import BudgetExhausted, FixtureError, MachineTimeout, UnknownIndex
from .streams import Stream

Instruction = tuple


@dataclass(frozen=True)
class MachineProgram:
    instructions: tuple[Instruction, ...]
    registers: int = 2

    def __post_init__(self) -> None:
        ins = tuple(tuple(i) for i in self.instructions)
        object.__setattr__(self, "instructions", ins)
        n = len(ins)
        for k, op in enumerate(ins):
            if op[0] == "inc" and len(op) == 2:
                regs = [op[1]]
            elif op[0] == "decjz" and len(op) == 3:
                regs = [op[1]]
                if not 0 <= op[2] < n:
                    raise ValueError(f"instruction {k}: jump target {op[2]} out of range")
            elif op == ("halt",):
                regs = []
            else:
                raise ValueError(f"instruction {k}: unknown form {op!r}")
            for r in regs:
                if not 0 <= r < self.registers:
                    raise ValueError(f"instruction {k}: register {r} out of range")
        if not self._halt_reachable():
            raise ValueError("no halt instruction is syntactically reachable")

    def _halt_reachable(self) -> bool:
        seen, todo = set(), [0]
        while todo:
            k = todo.pop()
            if k in seen or k >= len(self.instructions):
                continue
            seen.add(k)
            op = self.instructions[k]
            if op[0] == "halt":
                return True
            todo.append(k + 1)
            if op[0] == "decjz":
                todo.append(op[2])
        return False

    def to_json(self) -> str:
        return json.dumps({"registers": self.registers, "instructions": [list(i) for i in self.instructions]})

    @classmethod
    def from_json(cls, text: str) -> "MachineProgram":
        data = json.loads(text)
        if isinstance(data, list):
            data = {"instructions": data}
        regs = data.get("registers")
        ins = [tuple(i) for i in data["instructions"]]
        if regs is None:
            regs = 1 + max([i[1] for i in ins if i[0] != "halt"], default=0)
        return cls(tuple(ins), regs)


@dataclass(frozen=True)
class Config:
    pc: int
    registers: tuple[int, ...]


@dataclass(frozen=True)
class HaltRecord:
    history: tuple[Config, ...]
    steps: int

    @property
    def registers(self) -> tuple[int, ...]:
        return self.history[-1].registers


def initial_config(program: MachineProgram, x: int) -> Config:
    return Config(0, (x,) + (0,) * (program.registers - 1))


def step(program: MachineProgram, config: Config, budget: int) -> HaltRecord:
    """Run from ``config`` for at most ``budget`` steps.

    Raises :class:`MachineTimeout` if the machine has not halted; this says
    nothing about whether it ever will.
    """
    history = [config]
    pc, regs = config.pc, list(config.registers)
    for t in range(1, budget + 1):
        if pc >= len(program.instructions):
            raise ValueError(f"program counter {pc} fell off the program")
        op = program.instructions[pc]
        if op[0] == "halt":
            return HaltRecord(tuple(history), t)
        if op[0] == "inc":
            regs[op[1]] += 1
            pc += 1
        elif regs[op[1]] == 0:
            pc = op[2]
        else:
            regs[op[1]] -= 1
            pc += 1
        history.append(Config(pc, tuple(regs)))
    raise MachineTimeout(f"no halt within {budget} steps")


def run(program: MachineProgram, x: int, budget: int) -> HaltRecord:
    return step(program, initial_config(program, x), budget)


# -- c.e. sets -------------------------------------------------------------

@dataclass(frozen=True)
class SpoilerTag:
    """Ground truth about an enumerated set.

    ``bound``: for finite sets every member is below it; for cofinite sets
    every number at or above it is a member. ``settling(x)`` is the first
    stage at which a final member x is present. ``settle_stage`` (finite
    sets) is a stage after which nothing new is enumerated.
    """

    finite: bool
    final_membership: Callable[[int], bool]
    cofinite: bool = False
    bound: int | None = None
    settling: Callable[[int], int] | None = None
    settle_stage: int | None = None

    @property
    def kind(self) -> str:
        if self.finite:
            return "finite"
        return "cofinite" if self.cofinite else "co-infinite"

    def to_json(self) -> dict:
        return {"kind": self.kind, "bound": self.bound, "settle_stage": self.settle_stage}


@dataclass(eq=False)
class EnumSet:
    """A c.e. set given by its stage approximations ``W_s``.

    ``stage_fn(x, s)`` is only consulted for ``x < s``. ``entry_fn(x)``,
    when supplied, is the first stage containing x (``None`` if never) and
    must agree with ``stage_fn``; it only speeds things up.
    """

    index: int | None
    stage_fn: Callable[[int, int], bool]
    spoiler: SpoilerTag | None = None
    name: str = ""
    kind: str = "stage_fn"
    entry_fn: Callable[[int], int | None] | None = None
    arrivals_fn: Callable[[int], list[int]] | None = None
    support: frozenset[int] | None = None
    _lock: Any = field(default_factory=threading.Lock, repr=False)
    _members: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_table(cls, index: int | None, entries: dict[int, int], name: str = "",
                   spoiler: SpoilerTag | None = None) -> "EnumSet":
        """A finite set whose element x first appears at stage ``entries[x]``."""
        for x, e in entries.items():
            if e <= x:
                raise ValueError(f"{x} cannot be present before stage {x + 1}")
        by_stage: dict[int, list[int]] = {}
        for x, e in entries.items():
            by_stage.setdefault(e, []).append(x)
        return cls(index, lambda x, s: x in entries and entries[x] <= s, spoiler, name,
                   "stage_fn", entries.get, lambda s: sorted(by_stage.get(s, ())),
                   frozenset(entries))

    def contains(self, x: int, s: int) -> bool:
        if x >= s:
            return False
        if self.entry_fn is not None:
            e = self.entry_fn(x)
            return e is not None and e <= s
        return bool(self.stage_fn(x, s))

    def members_at(self, s: int) -> frozenset[int]:
        with self._lock:
            if s not in self._members:
                pool = range(s) if self.support is None else self.support
                self._members[s] = frozenset(x for x in pool if self.contains(x, s))
            return self._members[s]

    def entry_stage(self, x: int, max_stage: int) -> int | None:
        """First stage ``<= max_stage`` at which x is present, else None."""
        if self.entry_fn is not None:
            e = self.entry_fn(x)
            return e if e is not None and e <= max_stage else None
        for s in range(x + 1, max_stage + 1):
            if self.contains(x, s):
                return s
        return None

    def arrivals(self, s: int) -> list[int]:
        """Elements present at stage s but not at stage s - 1, ascending."""
        if s == 0:
            return []
        if self.arrivals_fn is not None:
            return self.arrivals_fn(s)
        return [x for x in range(s) if self.contains(x, s) and not self.contains(x, s - 1)]

    def enumeration(self, max_stage: int | None = None) -> Iterator[tuple[int, int]]:
        """Yield ``(stage, x)`` in order of entry, ties broken by value."""
        stages = count(1) if max_stage is None else range(1, max_stage + 1)
        for s in stages:
            for x in self.arrivals(s):
                yield s, x

    def to_json(self) -> dict:
        return {"id": self.index, "kind": self.kind, "name": self.name,
                "spoiler": self.spoiler.to_json() if self.spoiler else None}


def check_spoiler(w: EnumSet, window: int) -> None:
    """Raise :class:`FixtureError` if ``w.spoiler`` contradicts ``w`` on the window."""
    sp = w.spoiler
    if sp is None:
        return
    horizon = window
    if sp.settle_stage is not None:
        horizon = max(horizon, sp.settle_stage + 1)
    if sp.settling is not None:
        for x in range(window):
            if sp.final_membership(x):
                e = sp.settling(x)
                if e is None:
                    raise FixtureError(f"{w.name or w.index}: member {x} has no settling stage")
                horizon = max(horizon, e + 1)
    final = w.members_at(horizon)
    for x in range(window):
        truth = sp.final_membership(x)
        if truth and x not in final:
            raise FixtureError(f"{w.name or w.index}: {x} should be a member by stage {horizon}")
        if not truth and x in final:
            raise FixtureError(f"{w.name or w.index}: {x} is enumerated but marked absent")
        if truth and sp.settling is not None:
            e = sp.settling(x)
            if not w.contains(x, e) or w.contains(x, e - 1):
                raise FixtureError(f"{w.name or w.index}: {x} does not enter at stage {e}")
    if sp.finite:
        if sp.bound is None or any(x >= sp.bound for x in final):
            raise FixtureError(f"{w.name or w.index}: member at or above declared bound {sp.bound}")
        if sp.settle_stage is not None and w.members_at(sp.settle_stage) != final:
            raise FixtureError(f"{w.name or w.index}: still changing after stage {sp.settle_stage}")
    if sp.cofinite:
        if sp.bound is None or any(not sp.final_membership(x) for x in range(sp.bound, window)):
            raise FixtureError(f"{w.name or w.index}: gap above cofinite bound {sp.bound}")


class Registry:
    """Append-only table of machines and directly staged sets.

    Indices are shared: ``W_e`` exists for every registered ``e`` whichever
    way it is backed.
    """

    def __init__(self) -> None:
        self._entries: list[MachineProgram | EnumSet] = []
        self._names: list[str] = []
        self._halts: dict[tuple[int, int], tuple[int | None, int]] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def add_machine(self, program: MachineProgram, name: str = "") -> int:
        with self._lock:
            self._entries.append(program)
            self._names.append(name)
            return len(self._entries) - 1

    def add_set(self, stage_fn: Callable[[int, int], bool], name: str = "",
                spoiler: SpoilerTag | None = None,
                entry_fn: Callable[[int], int | None] | None = None) -> EnumSet:
        with self._lock:
            e = len(self._entries)
            w = EnumSet(e, stage_fn, spoiler, name, "stage_fn", entry_fn)
            self._entries.append(w)
            self._names.append(name)
            return w

    def index_of(self, name: str) -> int:
        return self._names.index(name)

    def _get(self, e: int) -> MachineProgram | EnumSet:
        if not 0 <= e < len(self._entries):
            raise UnknownIndex(e)
        return self._entries[e]

    def halting_time(self, e: int, x: int, budget: int) -> int | None:
        """History length of machine e on x if at most ``budget``, else None."""
        prog = self._get(e)
        if not isinstance(prog, MachineProgram):
            raise UnknownIndex(f"{e} is not machine-backed")
        key = (e, x)
        cached = self._halts.get(key)
        if cached is not None:
            steps, tried = cached
            if steps is not None:
                return steps if steps <= budget else None
            if tried >= budget:
                return None
        try:
            steps = run(prog, x, budget).steps
        except MachineTimeout:
            self._halts[key] = (None, budget)
            return None
        self._halts[key] = (steps, budget)
        return steps

    def t_predicate(self, e: int, x: int, s: int) -> bool:
        """Kleene's T: machine e on input x halts with a history of length <= s.

        For directly staged sets, ``T(e, x, s)`` means x is present at stage
        ``s + 1``, which makes the usual ``W_{e,s}`` definition agree.
        """
        entry = self._get(e)
        if isinstance(entry, EnumSet):
            return entry.contains(x, s + 1)
        return self.halting_time(e, x, s) is not None

    def enum_set(self, e: int) -> EnumSet:
        entry = self._get(e)
        if isinstance(entry, EnumSet):
            return entry

        def stage_fn(x: int, s: int, e=e) -> bool:
            return x < s and self.halting_time(e, x, s - 1) is not None

        return EnumSet(e, stage_fn, None, self._names[e], "machine")


def _standard_registry() -> Registry:
    reg = Registry()
    reg.add_machine(MachineProgram((("halt",),), 1), "always-halt")
    reg.add_machine(MachineProgram((("inc", 0), ("decjz", 1, 1), ("halt",)), 2), "loop")
    reg.add_machine(MachineProgram((
        ("decjz", 0, 4), ("inc", 1), ("inc", 1), ("decjz", 2, 0), ("halt",)), 3), "double")
    reg.add_machine(MachineProgram((
        ("decjz", 0, 3), ("decjz", 0, 4), ("decjz", 1, 0), ("halt",), ("decjz", 1, 4)), 2),
        "halt-if-even")
    reg.add_machine(MachineProgram((("decjz", 0, 2), ("decjz", 1, 0), ("halt",)), 2), "countdown")
    return reg


REGISTRY = _standard_registry()


def t_predicate(e: int, x: int, s: int, registry: Registry = REGISTRY) -> bool:
    return registry.t_predicate(e, x, s)


def k_set(registry: Registry = REGISTRY) -> EnumSet:
    """The halting set ``{e : T(e, e, s) for some s}`` over registered indices."""

    def stage_fn(e: int, s: int) -> bool:
        # T is monotone in s, so "some t < s" reduces to t = s - 1
        if e >= len(registry) or e >= s:
            return False
        return registry.t_predicate(e, e, s - 1)

    return EnumSet(None, stage_fn, None, "K", "machine")


# -- decidable matrices and the FIN construction -----------------------------

@dataclass(frozen=True)
class Sigma2Certificate:
    """Makes ``exists b exists a forall c theta(i, b, a, c)`` decidable.

    ``refuter(i, b, a)`` is the least c with ``not theta(i, b, a, c)`` or None
    when there is none. ``witness(i)`` is the first surviving pair in marker
    order, or None when every pair is refuted.
    """

    refuter: Callable[[int, int, int], int | None]
    witness: Callable[[int], tuple[int, int] | None]


@dataclass(frozen=True)
class DecidableMatrix:
    arity: int
    eval: Callable[..., bool]
    certificate: Any = None
    name: str = "theta"

    def __call__(self, *args: int) -> bool:
        if len(args) != self.arity:
            raise TypeError(f"{self.name} takes {self.arity} arguments, got {len(args)}")
        return bool(self.eval(*args))


def marker_pair(p: int) -> tuple[int, int]:
    """The ``p``-th candidate ``(b, a)`` visited by the movable marker."""
    a, b = uncantor(p)
    return b, a


def marker_position(b: int, a: int) -> int:
    d = a + b
    return d * (d + 1) // 2 + b


def sigma2_truth(theta: DecidableMatrix, i: int) -> tuple[bool, tuple[int, int] | None]:
    """Truth of ``exists b, a forall c theta`` read off the certificate."""
    cert: Sigma2Certificate = theta.certificate
    w = cert.witness(i)
    return (w is not None), w


class _Marker:
    """Lazily simulated movable-marker construction for one ``i``."""

    def __init__(self, theta: DecidableMatrix, i: int):
        self.theta, self.i = theta, i
        self.stage = 0            # stages simulated so far: 0 .. stage-1
        self.pointer = 0
        self.checked = 0          # c values verified for the current candidate
        self.refutations: list[int] = []   # stage at which each element was enumerated
        self.lock = threading.Lock()

    def advance_to(self, stage: int) -> None:
        with self.lock:
            while self.stage < stage:
                s = self.stage
                b, a = marker_pair(self.pointer)
                refuted = False
                while self.checked < s:
                    if not self.theta(self.i, b, a, self.checked):
                        refuted = True
                        break
                    self.checked += 1
                if refuted:
                    self.refutations.append(s)
                    self.pointer += 1
                    self.checked = 0
                self.stage += 1


def fin_reduction(theta: DecidableMatrix, i: int) -> EnumSet:
    """A c.e. set that is finite iff ``exists b exists a forall c theta(i,b,a,c)``.

    A marker walks through candidate pairs ``(b, a)``. At stage s, if the
    current candidate is refuted by some ``c < s``, the marker moves on and
    a fresh element (the number of moves so far) is enumerated, present from
    stage ``s + 1``.
    """
    if theta.arity != 4:
        raise ValueError("fin_reduction needs a matrix theta(i, b, a, c)")
    marker = _Marker(theta, i)

    def stage_fn(x: int, s: int) -> bool:
        marker.advance_to(s)
        return x < len(marker.refutations) and marker.refutations[x] < s

    spoiler = None
    if isinstance(theta.certificate, Sigma2Certificate):
        spoiler = _marker_spoiler(theta.certificate, i)

    w = EnumSet(None, stage_fn, spoiler, f"D[{theta.name},{i}]", "stage_fn")
    w.marker = marker  # type: ignore[attr-defined]
    return w


def _marker_spoiler(cert: Sigma2Certificate, i: int) -> SpoilerTag:
    """Predict the marker's behaviour from the certificate alone."""
    witness = cert.witness(i)
    cache: list[int] = []   # refutation stage of element p

    def refutation_stage(p: int) -> int:
        while len(cache) <= p:
            q = len(cache)
            arrive = cache[-1] + 1 if cache else 0
            r = cert.refuter(i, *marker_pair(q))
            if r is None:
                raise FixtureError(f"certificate: pair {marker_pair(q)} survives, "
                                   f"but witness is {witness}")
            cache.append(max(arrive, r + 1))
        return cache[p]

    if witness is None:
        return SpoilerTag(
            finite=False, cofinite=True, bound=0,
            final_membership=lambda x: True,
            settling=lambda x: refutation_stage(x) + 1,
        )
    q = marker_position(*witness)
    settle = refutation_stage(q - 1) + 1 if q > 0 else 0
    return SpoilerTag(
        finite=True, bound=q, settle_stage=settle,
        final_membership=lambda x: x < q,
        settling=lambda x: refutation_stage(x) + 1,
    )


def sigma2_matrix(seed: int, survivors: int | None = None) -> DecidableMatrix:
    """Seeded ``theta(i, b, a, c)`` with a certificate.

    A few pairs (possibly none) survive every c; any other pair is refuted
    by ``c = r(b, a)``, a small seeded number.
    """
    import random

    from .coding import mix

    rng = random.Random(mix(11, seed))
    count_ = survivors if survivors is not None else rng.choice([0, 1, 1, 2])
    alive = frozenset(marker_pair(p) for p in rng.sample(range(4, 30), count_))

    def refuter(i: int, b: int, a: int) -> int | None:
        return None if (b, a) in alive else mix(seed, i, b, a) % 10

    def theta(i: int, b: int, a: int, c: int) -> bool:
        r = refuter(i, b, a)
        return r is None or c < r

    first = min(alive, key=lambda p: marker_position(*p), default=None)
    cert = Sigma2Certificate(refuter, lambda i: first)
    return DecidableMatrix(4, theta, cert, f"sigma2[{seed}]")


def marker_stabilization(w: EnumSet, horizon: int) -> int | None:
    """Last stage ``<= horizon`` at which a fin_reduction set changed, if it stops."""
    marker: _Marker = w.marker  # type: ignore[attr-defined]
    marker.advance_to(horizon)
    return marker.refutations[-1] + 1 if marker.refutations else 0


# -- induced colorings and computable subsets --------------------------------

def union_set(family: Sequence[EnumSet], name: str = "union") -> EnumSet:
    return EnumSet(None, lambda x, s: any(w.contains(x, s) for w in family), None, name)


def induce_coloring(family: Sequence[EnumSet], horizon: int = 1 << 16) -> ColoringInstance:
    """Partial one-place coloring: x gets the least index of a set it enters first.

    ``C(x) = i`` iff at the first stage s where x appears in any member,
    i is the least index with x in ``W_{i,s}``. Points never enumerated
    are uncolored. ``horizon`` caps the stage search of the final view.
    """
    if not family:
        raise ValueError("family must be non-empty")

    def stage_color(x: int, s: int) -> int | None:
        first, best = None, None
        for i, w in enumerate(family):
            e = w.entry_stage(x, s)
            if e is not None and (first is None or e < first):
                first, best = e, i
        return best

    def final(t: tuple[int, ...]) -> int:
        c = stage_color(t[0], horizon)
        if c is None:
            raise BudgetExhausted(f"{t[0]} not colored by stage {horizon}")
        return c

    return ColoringInstance(
        arity=1, colors=len(family), color_fn=final, domain=union_set(family),
        name="induced", stage_color_fn=stage_color,
    )


def extract_computable_subset(w: EnumSet, max_stage: int = 1 << 14) -> Stream:
    """Increasing subsequence of w's enumeration: keep x iff it beats all kept.

    If w is finite the stream stalls; asking for more items than it has
    raises :class:`BudgetExhausted` once ``max_stage`` stages are scanned.
    """

    def source() -> Iterator[int]:
        last = -1
        for _, x in w.enumeration(max_stage):
            if x > last:
                last = x
                yield x

    return Stream(source, name=f"computable⊆{w.name or w.index}", increasing=True)
