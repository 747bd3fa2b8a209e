"""Problems as (instance, solution, windowed validity), with seeded generators.

Validity is checked on a window and against generator spoilers: a
property such as "this hole is infinite" is never inferred from finite
evidence, only attested by a spoiler and then spot-checked.
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations, count
from math import lcm
from typing import Any, Callable, Sequence

from .coding import family_position, mix, set_code
from .colorings import ColoringInstance, ColoringSpoiler
from .errors import BudgetExhausted, FixtureError, InvalidParams, SolutionError
from .functional import Status, Verdict
from .machines import DecidableMatrix, EnumSet, SpoilerTag, check_spoiler, extract_computable_subset
from .streams import Stream

DEFAULT_THRESHOLD = 32
DEFAULT_WINDOW = 10_000


class ProblemId(str, Enum):
    RT1 = "RT1_finite_holes"
    RAINBOW = "Rainbow"
    RT22 = "RT2_2"
    SRT2K = "SRT2_k"
    SRT2FIN = "SRT2_finite"
    RTN2 = "RTn_2"
    FINITE_UNION = "FiniteUnion"
    FICF = "FICF"


class Variant(str, Enum):
    HOLE = "hole-index"
    SET = "infinite-set"
    BOUND = "bound"
    INDEX = "ce-index"
    EMPTY = "empty"


@dataclass(frozen=True, eq=False)
class Solution:
    variant: Variant
    payload: Any = None

    @classmethod
    def hole(cls, h: int) -> "Solution":
        return cls(Variant.HOLE, h)

    @classmethod
    def set(cls, stream: Stream) -> "Solution":
        return cls(Variant.SET, stream)

    @classmethod
    def bound(cls, b: int) -> "Solution":
        return cls(Variant.BOUND, b)

    @classmethod
    def index(cls, e: int) -> "Solution":
        return cls(Variant.INDEX, e)

    @classmethod
    def empty(cls) -> "Solution":
        return cls(Variant.EMPTY, None)

    def check(self) -> None:
        """Raise :class:`SolutionError` unless the payload fits the variant."""
        if self.variant is Variant.EMPTY:
            ok = self.payload is None
        elif self.variant is Variant.SET:
            ok = isinstance(self.payload, Stream)
        else:
            ok = isinstance(self.payload, int) and not isinstance(self.payload, bool) and self.payload >= 0
        if not ok:
            raise SolutionError(f"{self.variant.value} solution with payload {self.payload!r}")

    def to_json(self, preview: int = 8) -> dict:
        if self.variant is Variant.SET:
            return {"variant": self.variant.value, "payload": self.payload.take(preview)}
        return {"variant": self.variant.value, "payload": self.payload}


@dataclass(eq=False)
class FamilySpoiler:
    """Ground truth about a finite family of c.e. sets.

    ``union_bound``: every member of every set is below it. ``settle_stage``:
    no set changes from this stage on. ``noncofinite``: indices of members
    that are not cofinite. For families with non-cofinite members,
    ``limit_color(x)`` is the least e such that the least ``y >= x`` missing
    from some member is missing from member e, and ``infinite_limit_colors``
    lists the values it takes infinitely often.
    """

    union_bound: int | None = None
    settle_stage: int | None = None
    noncofinite: frozenset[int] = frozenset()
    limit_color: Callable[[int], int] | None = None
    infinite_limit_colors: frozenset[int] = frozenset()
    extras: dict[str, Any] = field(default_factory=dict)


@dataclass(eq=False)
class Family:
    sets: tuple[EnumSet, ...]
    spoiler: FamilySpoiler | None = None
    name: str = "family"

    def __len__(self) -> int:
        return len(self.sets)

    def delta(self, stage: int, e: int) -> list[int]:
        """``W_{e, stage+1} - W_{e, stage}``."""
        return self.sets[e].arrivals(stage + 1)

    def tape(self) -> Callable[[int], int]:
        n = len(self.sets)

        @lru_cache(maxsize=None)
        def read(pos: int) -> int:
            if pos == 0:
                return n
            stage, e = divmod(pos - 1, n)
            return set_code(self.delta(stage, e))
        return read

    def tape_position(self, stage: int, e: int) -> int:
        return family_position(stage, e, len(self.sets))


Instance = ColoringInstance | Family

_ALLOWED = {
    ProblemId.RT1: {Variant.HOLE, Variant.SET},
    ProblemId.RAINBOW: {Variant.SET},
    ProblemId.RT22: {Variant.SET},
    ProblemId.SRT2K: {Variant.SET},
    ProblemId.SRT2FIN: {Variant.SET},
    ProblemId.RTN2: {Variant.SET},
    ProblemId.FINITE_UNION: {Variant.BOUND},
    ProblemId.FICF: {Variant.INDEX},
}


def is_instance(problem: ProblemId, instance: Any) -> bool:
    if problem in (ProblemId.FINITE_UNION, ProblemId.FICF):
        if not isinstance(instance, Family) or not instance.sets:
            return False
        if problem is ProblemId.FICF and instance.spoiler is not None:
            return bool(instance.spoiler.noncofinite)
        return True
    if not isinstance(instance, ColoringInstance):
        return False
    c, r = instance.colors, instance.arity
    return {
        ProblemId.RT1: r == 1 and (c is None or c >= 1),
        ProblemId.RAINBOW: r == 1,
        ProblemId.RT22: r == 2 and c == 2,
        ProblemId.SRT2K: r == 2 and instance.stable and c is not None,
        ProblemId.SRT2FIN: r == 2 and instance.stable,
        ProblemId.RTN2: r >= 2 and c == 2,
    }[problem]


# -- validation ----------------------------------------------------------------

def _in_domain(instance: ColoringInstance, x: int, window: int) -> bool:
    if isinstance(instance.domain, EnumSet):
        return instance.domain.entry_stage(x, max(window, x + 1)) is not None
    return instance.in_domain(x)


def _domain_below(instance: ColoringInstance, window: int) -> list[int]:
    if isinstance(instance.domain, EnumSet):
        return sorted(instance.domain.members_at(window))
    return instance.domain_below(window)


def audit(problem: ProblemId, instance: Instance, window: int,
          threshold: int = DEFAULT_THRESHOLD) -> None:
    """Raise :class:`FixtureError` if the spoiler contradicts the instance on the window."""
    if isinstance(instance, Family):
        _audit_family(instance, window)
    elif isinstance(instance, ColoringInstance):
        _audit_coloring(instance, window, threshold)


def _audit_family(fam: Family, window: int) -> None:
    for w in fam.sets:
        check_spoiler(w, min(window, 512))
    sp = fam.spoiler
    if sp is None:
        return
    for e, w in enumerate(fam.sets if sp.noncofinite else ()):
        if w.spoiler is not None and (e in sp.noncofinite) == w.spoiler.cofinite:
            raise FixtureError(f"{fam.name}: member {e} cofiniteness disagrees with family spoiler")
    if sp.union_bound is not None:
        horizon = max(window, sp.settle_stage or 0)
        for e, w in enumerate(fam.sets):
            if any(x >= sp.union_bound for x in w.members_at(horizon)):
                raise FixtureError(f"{fam.name}: member {e} exceeds union bound {sp.union_bound}")
    if sp.settle_stage is not None and sp.settle_stage <= window:
        for e, w in enumerate(fam.sets):
            if w.members_at(sp.settle_stage) != w.members_at(window):
                raise FixtureError(f"{fam.name}: member {e} changes after stage {sp.settle_stage}")


def _audit_coloring(inst: ColoringInstance, window: int, threshold: int) -> None:
    sp = inst.spoiler
    if sp is None:
        return
    name = inst.name
    if inst.colors is not None and any(not 0 <= h < inst.colors for h in sp.infinite_holes):
        raise FixtureError(f"{name}: infinite hole outside the palette")
    if inst.arity == 1:
        for h in sp.infinite_holes:
            sched = sp.witness_schedule.get(h)
            if sched is None:
                continue
            items = sched.take(threshold)
            if len(items) < threshold:
                raise FixtureError(f"{name}: schedule of hole {h} stalls")
            if any(b <= a for a, b in zip(items, items[1:])):
                raise FixtureError(f"{name}: schedule of hole {h} is not increasing")
            if sp.member_bound is not None and items[-1] >= sp.member_bound(threshold):
                raise FixtureError(f"{name}: schedule of hole {h} exceeds its member bound")
            for x in items:
                if not _in_domain(inst, x, window) or inst.color(x) != h:
                    raise FixtureError(f"{name}: scheduled member {x} is not in hole {h}")
    if sp.class_cap is not None:
        sizes: dict[int, int] = {}
        for x in _domain_below(inst, window):
            c = inst.color(x)
            sizes[c] = sizes.get(c, 0) + 1
            if sizes[c] > sp.class_cap:
                raise FixtureError(f"{name}: color {c} used more than {sp.class_cap} times")
    if sp.ground_truth is not None and inst.matrix is not None:
        _audit_matrix(inst, window)
    if inst.stable and sp.settling is not None and sp.limit_color is not None:
        pts = _domain_below(inst, min(window, 4096))
        rng = random.Random(mix(window, len(pts)))
        for x in rng.sample(pts, min(16, len(pts))):
            s0 = max(sp.settling(x), x + 1)
            for s in (s0, s0 + 1, s0 + 7):
                if inst.color(x, s) != sp.limit_color(x):
                    raise FixtureError(f"{name}: color of ({x},{s}) is not the limit color")


def _audit_matrix(inst: ColoringInstance, window: int) -> None:
    cert = inst.matrix.certificate
    truth = inst.spoiler.ground_truth
    for x in _domain_below(inst, min(window, 64)):
        c = truth(x)
        w0 = cert.witness(x)
        if inst.level == 1:
            if not inst.matrix(x, c, w0):
                raise FixtureError(f"{inst.name}: ground truth color of {x} has no witness")
        else:
            if not all(inst.matrix(x, c, w0, w1) for w1 in range(64)):
                raise FixtureError(f"{inst.name}: ground truth witness of {x} is refuted")
            for c2 in range(c):
                for v0 in range(4):
                    r = cert.refuter(x, c2, v0)
                    if inst.matrix(x, c2, v0, r):
                        raise FixtureError(f"{inst.name}: refuter of ({x},{c2},{v0}) fails")


def validate(problem: ProblemId, instance: Instance, solution: Solution,
             window: int = DEFAULT_WINDOW, threshold: int = DEFAULT_THRESHOLD) -> Verdict:
    """Windowed, spoiler-backed check that ``solution`` solves ``instance``."""
    solution.check()
    well_formed = is_instance(problem, instance)
    if solution.variant is Variant.EMPTY:
        return Verdict.ok("empty solution of a non-instance") if not well_formed \
            else Verdict.fail(None, "empty solution of a genuine instance")
    if not well_formed:
        return Verdict.fail(None, "not an instance: only the empty solution applies")
    if solution.variant not in _ALLOWED[problem]:
        raise SolutionError(f"{problem.value} has no {solution.variant.value} solutions")
    audit(problem, instance, window, threshold)
    if problem is ProblemId.RT1 and solution.variant is Variant.HOLE:
        return _check_hole(instance, solution.payload, window, threshold)
    if problem is ProblemId.RT1:
        return _check_homogeneous(instance, solution.payload, threshold, window)
    if problem is ProblemId.RAINBOW:
        return _check_rainbow(instance, solution.payload, window, threshold)
    if problem is ProblemId.FINITE_UNION:
        return _check_bound(instance, solution.payload, window)
    if problem is ProblemId.FICF:
        return _check_ficf(instance, solution.payload)
    return _check_homogeneous(instance, solution.payload, threshold, window)


def _check_hole(inst: ColoringInstance, h: int, window: int, m: int) -> Verdict:
    if inst.colors is not None and not 0 <= h < inst.colors:
        return Verdict.fail(h, f"hole {h} is not one of the {inst.colors} colors")
    sp = inst.spoiler
    if sp is None:
        return Verdict(Status.UNKNOWN, h, "no spoiler: infinitude of a hole cannot be attested")
    if h not in sp.infinite_holes:
        return Verdict.fail(h, f"hole {h} is finite")
    members = 0
    for x in _domain_below(inst, window):
        if inst.color(x) == h:
            members += 1
            if members >= m:
                break
    if members < m:
        return Verdict.fail((h, members), f"only {members} pigeons below {window}")
    return Verdict.ok(f"hole {h}: at least {members} pigeons below {window}")


def _first(stream: Stream, m: int) -> list[int] | Verdict:
    try:
        items = stream.take(m)
    except BudgetExhausted as exc:
        return Verdict.fail(None, f"solution stalled: {exc}")
    if len(items) < m:
        return Verdict.fail(items, f"solution has only {len(items)} elements")
    return items


def _check_homogeneous(inst: ColoringInstance, stream: Stream, m: int, window: int) -> Verdict:
    items = _first(stream, m)
    if isinstance(items, Verdict):
        return items
    for a, b in zip(items, items[1:]):
        if b <= a:
            return Verdict.fail((a, b), "solution is not strictly increasing")
    for x in items:
        if not _in_domain(inst, x, window):
            return Verdict.fail(x, f"{x} is outside the domain")
    r = inst.arity
    color = None
    for t in combinations(items, r):
        c = inst.color_fn(t)
        if color is None:
            color = c
        elif c != color:
            return Verdict.fail(t, f"tuple {t} has color {c}, not {color}")
    sp = inst.spoiler
    if inst.stable and sp is not None and sp.limit_color is not None and r >= 2:
        for x in items:
            if sp.limit_color(x) != color:
                return Verdict.fail(x, f"limit color of {x} is {sp.limit_color(x)}, not {color}")
    return Verdict.ok(f"first {m} elements homogeneous with color {color}")


def _check_rainbow(inst: ColoringInstance, stream: Stream, window: int, m: int) -> Verdict:
    colors = _first(stream, m)
    if isinstance(colors, Verdict):
        return colors
    if len(set(colors)) < m:
        return Verdict.fail(colors, "colors repeat")
    used = {inst.color(x) for x in _domain_below(inst, window)}
    missing = [c for c in colors if c not in used]
    if missing:
        return Verdict.fail(missing, f"colors not used below {window}")
    return Verdict.ok(f"{m} distinct colors used below {window}")


def _check_bound(fam: Family, b: int, window: int) -> Verdict:
    for e, w in enumerate(fam.sets):
        over = [x for x in w.members_at(window) if x >= b]
        if over:
            return Verdict.fail((e, min(over)), f"{min(over)} in member {e} is not below {b}")
    return Verdict.ok(f"bound {b} dominates stages below {window}")


def _check_ficf(fam: Family, e: int) -> Verdict:
    if e >= len(fam.sets):
        return Verdict.fail(e, f"no member {e}")
    sp = fam.sets[e].spoiler
    if sp is None:
        return Verdict(Status.UNKNOWN, e, "no spoiler: cofiniteness cannot be decided")
    if sp.cofinite:
        return Verdict.fail(e, f"member {e} is cofinite")
    return Verdict.ok(f"member {e} is not cofinite")


# -- generators --------------------------------------------------------------

def generate(problem: ProblemId | str, seed: int, **params: Any) -> tuple[Instance, Any]:
    """Seeded instance together with its spoiler."""
    problem = ProblemId(problem)
    if problem is ProblemId.RT1:
        if params.get("level"):
            inst = sigma_coloring(seed, params["level"], params.get("k"))
        elif params.get("partial"):
            inst = partial_coloring(seed, params.get("k"))
        else:
            inst = pigeonhole(seed, params.get("k"), params.get("parity", False))
    elif problem is ProblemId.RAINBOW:
        inst = rainbow(seed, params.get("cap", 4))
    elif problem in (ProblemId.RT22, ProblemId.SRT2K, ProblemId.SRT2FIN, ProblemId.RTN2):
        k = params.get("k", 2)
        arity = params.get("n", 3) if problem is ProblemId.RTN2 else 2
        if problem in (ProblemId.RT22, ProblemId.RTN2):
            k = 2
        inst = stable_tuples(seed, k, arity)
    elif problem is ProblemId.FINITE_UNION:
        inst = finite_union(seed, params.get("n"))
    else:
        inst = ficf(seed, params.get("n"))
    return inst, inst.spoiler


def _check_k(k: int | None, rng: random.Random, top: int = 8) -> int:
    if k is None:
        return rng.randint(2, top)
    if k < 2:
        raise InvalidParams(f"need at least two colors, got {k}")
    return k


def _pattern(rng: random.Random, holes: Sequence[int]) -> list[int]:
    period = rng.randint(len(holes), 2 * len(holes) + 2)
    pat = list(holes) + [rng.choice(holes) for _ in range(period - len(holes))]
    rng.shuffle(pat)
    return pat


def pigeonhole(seed: int, k: int | None = None, parity: bool = False) -> ColoringInstance:
    """Total coloring of the naturals: a periodic pattern over the infinite
    holes, overwritten at a few points below 40 by the finite holes."""
    rng = random.Random(mix(1, seed))
    if parity:
        k, pat, overrides, prefix = 2, [0, 1], {}, 0
    else:
        k = _check_k(k, rng)
        holes = sorted(rng.sample(range(k), rng.randint(1, k)))
        pat = _pattern(rng, holes)
        prefix = 40
        overrides = {}
        for h in set(range(k)) - set(holes):
            for x in rng.sample(range(prefix), rng.randint(0, 5)):
                overrides[x] = h
    period = len(pat)
    infinite = frozenset(pat)

    def color(t: tuple[int, ...]) -> int:
        x = t[0]
        return overrides.get(x, pat[x % period])

    schedule = {h: Stream.where(lambda x, h=h: color((x,)) == h, name=f"hole{h}") for h in infinite}
    spoiler = ColoringSpoiler(
        infinite_holes=infinite, witness_schedule=schedule,
        member_bound=lambda m: prefix + (m + 1) * period,
    )
    return ColoringInstance(1, k, color, None, spoiler=spoiler, name=f"rt1[{seed}]")


def partial_coloring(seed: int, k: int | None = None) -> ColoringInstance:
    """A coloring with a c.e. domain enumerated out of order.

    Each block ``[10j, 10j+10)`` is enumerated top-down, so the computable
    subset kept by the increasing-subsequence rule is ``{10j + 9}``.
    """
    rng = random.Random(mix(2, seed))
    k = _check_k(k, rng)
    holes = sorted(rng.sample(range(k), rng.randint(1, k)))
    pat = _pattern(rng, holes)
    period = len(pat)

    def keep(x: int) -> bool:
        return x % 10 == 9 or mix(seed, x) % 10 < 6

    def entry(x: int) -> int | None:
        if not keep(x):
            return None
        j, r = divmod(x, 10)
        return 10 * j + 10 + (9 - r)

    def arrivals(s: int) -> list[int]:
        j, r = divmod(s - 10, 10)
        if s < 10 or r > 9:
            return []
        x = 10 * j + 9 - r
        return [x] if keep(x) else []

    dom = EnumSet(None, lambda x, s: (e := entry(x)) is not None and e <= s,
                  None, f"dom[{seed}]", "stage_fn", entry, arrivals)

    def color(t: tuple[int, ...]) -> int:
        return pat[t[0] % period]

    kept_colors = frozenset(pat[(10 * j + 9) % period] for j in range(period))
    restricted = ColoringSpoiler(
        infinite_holes=kept_colors,
        witness_schedule={h: Stream.where(lambda x, h=h: x % 10 == 9 and color((x,)) == h)
                          for h in kept_colors},
        member_bound=lambda m: 10 * (m + 1) * period,
    )
    spoiler = ColoringSpoiler(
        infinite_holes=frozenset(pat),
        extras={"restricted": restricted},
    )

    def stage_color(x: int, s: int) -> int | None:
        e = entry(x)
        return color((x,)) if e is not None and e <= s else None

    return ColoringInstance(1, k, color, dom, spoiler=spoiler, name=f"partial[{seed}]",
                            stage_color_fn=stage_color)


def restrict_to_computable_domain(instance: ColoringInstance,
                                  max_stage: int = 1 << 14) -> ColoringInstance:
    """Replace a c.e. domain by its extracted computable increasing subset.

    Colors are unchanged. Instances whose domain is already computable are
    returned as they are.
    """
    if instance.computable_domain:
        return instance
    sub = extract_computable_subset(instance.domain, max_stage)
    sub.require(1)
    spoiler = None
    if instance.spoiler is not None:
        spoiler = instance.spoiler.extras.get("restricted")
    return ColoringInstance(instance.arity, instance.colors, instance.color_fn, sub,
                            spoiler=spoiler, name=f"restricted({instance.name})")


class _Blocks:
    """Rainbow layout: colors come in groups of four, each group occupies a
    contiguous run whose points are shuffled among the group's colors."""

    def __init__(self, seed: int, cap: int):
        self.seed, self.cap = seed, cap
        self.starts = [0]
        self.groups: list[list[int]] = []

    def _group(self, j: int) -> list[int]:
        while len(self.groups) <= j:
            g = len(self.groups)
            rng = random.Random(mix(3, self.seed, g))
            layout = []
            for c in range(4 * g, 4 * g + 4):
                layout += [c] * rng.randint(1, self.cap)
            rng.shuffle(layout)
            self.groups.append(layout)
            self.starts.append(self.starts[-1] + len(layout))
        return self.groups[j]

    def color(self, x: int) -> int:
        while self.starts[-1] <= x:
            self._group(len(self.groups))
        j = bisect_right(self.starts, x) - 1
        return self.groups[j][x - self.starts[j]]

    def last_member(self, c: int) -> int:
        j = c // 4
        layout = self._group(j)
        return self.starts[j] + max(i for i, v in enumerate(layout) if v == c)


def rainbow(seed: int, cap: int = 4) -> ColoringInstance:
    """Every color used between 1 and ``cap`` times."""
    if cap < 1:
        raise InvalidParams("class cap must be positive")
    blocks = _Blocks(seed, cap)
    spoiler = ColoringSpoiler(class_cap=cap, extras={"last_member": blocks.last_member})
    return ColoringInstance(1, None, lambda t: blocks.color(t[0]), None, spoiler=spoiler,
                            name=f"rainbow[{seed}]")


def stable_tuples(seed: int, k: int = 2, arity: int = 2) -> ColoringInstance:
    """Stable coloring: once the second coordinate reaches ``settling(x)`` the
    color of a tuple starting at x is its limit color."""
    if k < 2 or arity < 2:
        raise InvalidParams("need k >= 2 and arity >= 2")
    rng = random.Random(mix(4, seed))
    holes = sorted(rng.sample(range(k), rng.randint(1, k)))
    pat = _pattern(rng, holes)
    period = len(pat)

    def limit(x: int) -> int:
        return pat[x % period]

    def settling(x: int) -> int:
        return x + 1 + mix(seed, x) % 6

    def color(t: tuple[int, ...]) -> int:
        x, s = t[0], t[1]
        if s >= settling(x):
            return limit(x)
        return (limit(x) + 1 + mix(seed, x, s) % (k - 1)) % k

    infinite = frozenset(pat)
    schedule = {h: stable_homogeneous(limit, settling, h) for h in infinite}
    spoiler = ColoringSpoiler(infinite_holes=infinite, witness_schedule=schedule,
                              settling=settling, limit_color=limit)
    return ColoringInstance(arity, k, color, None, stable=True, spoiler=spoiler,
                            name=f"stable{arity}[{seed}]")


def stable_homogeneous(limit: Callable[[int], int], settling: Callable[[int], int],
                       color: int, domain: Callable[[int], bool] | None = None) -> Stream:
    """Points of limit ``color``, each at or beyond the settling stage of all earlier ones."""

    def source():
        need = 0
        for x in count():
            if x >= need and limit(x) == color and (domain is None or domain(x)):
                yield x
                need = max(need, settling(x), x + 1)
    return Stream(source, name=f"stable-hom[{color}]", increasing=True)


def finite_union(seed: int, n: int | None = None) -> Family:
    """Finite sets whose largest element enters as early as possible and last."""
    rng = random.Random(mix(5, seed))
    n = n if n is not None else rng.randint(1, 6)
    if n < 1:
        raise InvalidParams("family must have a member")
    tables: list[dict[int, int]] = [{} for _ in range(n)]
    for t in tables:
        for x in rng.sample(range(60), rng.randint(0, 6)):
            t[x] = 0
    if not any(tables):
        tables[rng.randrange(n)][rng.randrange(60)] = 0
    top = max(x for t in tables for x in t)
    for t in tables:
        for x in t:
            # the top element must be the last change, at its earliest stage
            t[x] = top + 1 if x == top else min(top, x + 1 + rng.randrange(8))
    sets = []
    for e, t in enumerate(tables):
        bound = max(t, default=-1) + 1
        settle = max(t.values(), default=0)
        tag = SpoilerTag(finite=True, final_membership=t.__contains__, bound=bound,
                         settling=t.__getitem__, settle_stage=settle)
        sets.append(EnumSet.from_table(e, t, f"F{e}", tag))
    spoiler = FamilySpoiler(union_bound=top + 1, settle_stage=top + 1)
    return Family(tuple(sets), spoiler, f"union[{seed}]")


def ficf(seed: int, n: int | None = None) -> Family:
    """Sets given as complements of "missing" sets, at least one non-cofinite.

    Member e misses a finite random subset of [0, 30) and, when non-cofinite,
    the residue class ``r_e mod p_e`` from ``start_e`` on. Element x enters
    member e at stage ``x + 1 + delay``, with delay below 6.
    """
    rng = random.Random(mix(6, seed))
    n = n if n is not None else rng.randint(1, 6)
    if n < 1:
        raise InvalidParams("family must have a member")
    noncof = set(rng.sample(range(n), rng.randint(1, n)))
    finite_miss = [frozenset(rng.sample(range(30), rng.randint(0, 4))) for _ in range(n)]
    periodic = {}
    for e in noncof:
        p = rng.randint(2, 6)
        periodic[e] = (rng.randrange(p), p, rng.randint(0, 40))

    def missing(e: int, x: int) -> bool:
        if x in finite_miss[e]:
            return True
        if e in periodic:
            r, p, start = periodic[e]
            return x >= start and x % p == r
        return False

    def entry(e: int, x: int) -> int | None:
        return None if missing(e, x) else x + 1 + mix(seed, e, x) % 6

    sets = []
    for e in range(n):
        def entry_fn(x, e=e):
            return entry(e, x)

        def arrivals(s, e=e):
            return [x for x in range(max(0, s - 7), s) if entry(e, x) == s]

        cofinite = e not in noncof
        bound = (max(finite_miss[e], default=-1) + 1) if cofinite else None
        tag = SpoilerTag(finite=False, cofinite=cofinite, bound=bound,
                         final_membership=lambda x, e=e: not missing(e, x),
                         settling=entry_fn)
        sets.append(EnumSet(e, lambda x, s, f=entry_fn: (v := f(x)) is not None and v <= s,
                            tag, f"W{e}", "stage_fn", entry_fn, arrivals))

    def least_gap(x: int) -> tuple[int, int]:
        for y in count(x):
            for e in range(n):
                if missing(e, y):
                    return y, e
        raise AssertionError("unreachable: some member is not cofinite")

    def limit_color(x: int) -> int:
        return least_gap(x)[1]

    def settling(x: int) -> int:
        y, e = least_gap(x)
        need = [y]
        for z in range(x, y):
            need += [entry(f, z) for f in range(n)]
        need += [entry(f, y) for f in range(e)]
        return max(need)

    horizon = max([30] + [start for _, _, start in periodic.values()])
    period = lcm(*(p for _, p, _ in periodic.values()))
    infinite = frozenset(limit_color(x) for x in range(horizon, horizon + period))
    spoiler = FamilySpoiler(noncofinite=frozenset(noncof), limit_color=limit_color,
                            infinite_limit_colors=infinite,
                            extras={"settling": settling, "entry": entry, "horizon": horizon,
                                    "period": period})
    return Family(tuple(sets), spoiler, f"ficf[{seed}]")


# -- Sigma-level colorings given by a decidable matrix ------------------------

@dataclass(frozen=True)
class SigmaCertificate:
    """``witness(x)``: the w0 making the true color's graph hold.
    ``refuter(x, c, w0)``: a w1 refuting ``forall w1 theta(x, c, w0, w1)``
    whenever that universal fails (level 2 only)."""

    witness: Callable[[int], int]
    refuter: Callable[[int, int, int], int]


def sigma_coloring(seed: int, level: int, k: int | None = None) -> ColoringInstance:
    """A k-coloring of the naturals whose graph is ``exists w0 theta`` (level 1)
    or ``exists w0 forall w1 theta`` (level 2) for a decidable theta."""
    from .errors import UnsupportedLevel
    if level not in (1, 2):
        raise UnsupportedLevel(f"level {level} is not supported")
    rng = random.Random(mix(7, seed, level))
    k = _check_k(k, rng, top=4)
    holes = sorted(rng.sample(range(k), rng.randint(1, k)))
    pat = _pattern(rng, holes)
    period = len(pat)

    def truth(x: int) -> int:
        return pat[x % period]

    def witness(x: int) -> int:
        return mix(seed, 1, x) % (x % 7 + 4)

    def refuter(x: int, c: int, w0: int) -> int:
        return 1 + mix(seed, 2, x, c, w0) % (x % 5 + 4)

    if level == 1:
        def theta(x, c, w0):
            return c == truth(x) and w0 == witness(x)
        arity = 3
    else:
        def theta(x, c, w0, w1):
            return (c == truth(x) and w0 == witness(x)) or w1 < refuter(x, c, w0)
        arity = 4
    matrix = DecidableMatrix(arity, theta, SigmaCertificate(witness, refuter), f"theta{level}[{seed}]")
    infinite = frozenset(pat)
    spoiler = ColoringSpoiler(
        infinite_holes=infinite, ground_truth=truth,
        witness_schedule={h: Stream.where(lambda x, h=h: truth(x) == h) for h in infinite},
        member_bound=lambda m: (m + 1) * period,
    )
    return ColoringInstance(1, k, lambda t: truth(t[0]), Stream.where(lambda x: True, name="X"),
                            spoiler=spoiler, name=f"sigma{level}[{seed}]", matrix=matrix,
                            level=level)
