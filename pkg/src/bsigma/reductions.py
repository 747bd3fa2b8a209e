"""The catalog of reductions, each a pair of monotone functionals.

``phi`` reads the source instance as an oracle tape and writes the target
instance. ``psi`` reads a two-tape oracle: the source instance on even
positions and the target solution on odd positions. A strong pair's
``psi`` never looks at the even positions.

Tape layouts:

* one-place coloring: position x holds ``color + 1`` (0 outside the domain);
* tuple coloring: position ``tuple_index(t)`` holds the color of t;
* family: see :func:`bsigma.coding.family_position`;
* matrix coloring: position 0 holds the number of colors, position
  ``1 + cantor_tuple(args)`` holds ``theta(*args)``;
* solution: an infinite set as its increasing enumeration, a number at
  position 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import count
from typing import Any, Callable

from .coding import cantor_tuple, left, pair_from_index, right, tuple_from_index, tuple_index
from .colorings import ColoringInstance
from .errors import UnknownReduction, UnsupportedLevel
from .functional import Kind, MonotoneFunctional, Pending, PointwiseFunctional
from .problems import Family, ProblemId, Solution, Variant
from .streams import Stream

Ask = Callable[[int], int]


@dataclass(frozen=True)
class ReductionPair:
    name: str
    source: ProblemId
    target: ProblemId
    phi: MonotoneFunctional
    psi: MonotoneFunctional
    strong: bool
    takes: Variant          # solution variant psi reads
    gives: Variant          # solution variant psi writes
    target_arity: int
    target_colors: Callable[[Any], int | None]
    stable: bool = False
    anchor: str = ""
    mutation: int = 0       # shift applied to every psi output (mutation testing)

    # -- running the pair on concrete objects ----------------------------

    def image(self, instance: ColoringInstance | Family) -> ColoringInstance:
        """The target instance ``phi(instance)``; reads no spoiler."""
        src = source_tape(instance)
        out = lru_cache(maxsize=1 << 16)(lambda pos: self.phi.value_at(pos, src))
        if self.target_arity == 1:
            color_fn = lambda t: out(t[0])
        else:
            color_fn = lambda t: out(tuple_index(t))
        domain = instance.domain if isinstance(instance, ColoringInstance) else None
        return ColoringInstance(
            arity=self.target_arity, colors=self.target_colors(instance), color_fn=color_fn,
            domain=domain, stable=self.stable, name=f"{self.name}.phi({instance.name})",
        )

    def back(self, instance: ColoringInstance | Family, solution: Solution) -> Solution:
        """``psi(instance, solution)`` as a solution of the source problem."""
        joint = joint_tape(source_tape(instance), solution_tape(solution))
        return _decode(self.psi, joint, self.gives, self.source is not ProblemId.RAINBOW)

    def describe(self) -> dict:
        out = {"name": self.name, "source": self.source.value, "target": self.target.value,
               "strong": self.strong, "anchor": self.anchor}
        if self.mutation:
            out["mutation"] = self.mutation
        return out


def source_tape(instance: ColoringInstance | Family) -> Ask:
    if isinstance(instance, Family):
        return instance.tape()
    if instance.matrix is not None:
        theta, k, arity = instance.matrix, instance.colors, instance.matrix.arity
        from .coding import uncantor_tuple

        def read(pos: int) -> int:
            if pos == 0:
                return k
            return int(theta(*uncantor_tuple(pos - 1, arity)))
        return read
    return instance.tape()


def solution_tape(solution: Solution) -> Ask:
    solution.check()
    if solution.variant is Variant.SET:
        stream = solution.payload
        return lambda j: stream[j]
    value = solution.payload if solution.payload is not None else 0
    return lambda j: value if j == 0 else 0


def joint_tape(i0: Ask, s1: Ask) -> Ask:
    return lambda p: i0(p // 2) if p % 2 == 0 else s1(p // 2)


def _decode(psi: MonotoneFunctional, joint: Ask, variant: Variant, increasing: bool) -> Solution:
    if variant is Variant.SET:
        return Solution.set(Stream(lambda: (psi.value_at(j, joint) for j in count()),
                                   name=psi.name, increasing=increasing))
    value = psi.value_at(0, joint)
    return Solution(variant, value)


def _single(rule: Callable[[Ask], int]) -> Callable[[int, Ask], int]:
    """Rule for a functional with one output, at position 0."""
    def at(n: int, ask: Ask) -> int:
        if n > 0:
            raise Pending
        return rule(ask)
    return at


# -- pigeonhole into pairs: equality of colors ------------------------------

def equal_color_functional(arity: int = 2) -> PointwiseFunctional:
    """Color a tuple 1 iff its first two points share a color."""
    def rule(pos: int, ask: Ask) -> int:
        t = tuple_from_index(pos, arity)
        return 1 if ask(t[0]) == ask(t[1]) else 0
    return PointwiseFunctional(f"same-color/{arity}", rule)


def wr1_phi(c0: ColoringInstance, arity: int = 2) -> ColoringInstance:
    pair = {2: CATALOG["wr1"], 3: CATALOG["wr1-rtn"]}.get(arity) or _wr1(arity)
    return pair.image(c0)


def wr1_psi(c0: ColoringInstance, h1: Solution, variant: Variant = Variant.HOLE) -> Solution:
    pair = CATALOG["wr1"] if variant is Variant.HOLE else CATALOG["wr1-set"]
    return pair.back(c0, h1)


def _hole_of_least() -> PointwiseFunctional:
    return PointwiseFunctional("color-of-least", _single(lambda ask: ask(left(ask(right(0)))) - 1))


def _pass_solution(name: str = "H1") -> PointwiseFunctional:
    return PointwiseFunctional(name, lambda n, ask: ask(right(n)))


def _wr1(arity: int, strong: bool = False) -> ReductionPair:
    target = ProblemId.RT22 if arity == 2 else ProblemId.RTN2
    return ReductionPair(
        name="wr1-set" if strong else ("wr1" if arity == 2 else "wr1-rtn"),
        source=ProblemId.RT1, target=target,
        phi=equal_color_functional(arity),
        psi=_pass_solution() if strong else _hole_of_least(),
        strong=strong, takes=Variant.SET, gives=Variant.SET if strong else Variant.HOLE,
        target_arity=arity, target_colors=lambda _: 2,
        anchor="pigeonhole via equal-color pairs" + (" (set solution)" if strong else ""),
    )


# -- rainbow pigeonhole into stable pairs --------------------------------------

def srt22_pair() -> ReductionPair:
    return ReductionPair(
        name="srt22", source=ProblemId.RAINBOW, target=ProblemId.SRT2K,
        phi=equal_color_functional(2),
        psi=PointwiseFunctional("colors-of-H1", lambda n, ask: ask(left(ask(right(n)))) - 1),
        strong=False, takes=Variant.SET, gives=Variant.SET,
        target_arity=2, target_colors=lambda _: 2, stable=True,
        anchor="rainbow pigeonhole via equal-color pairs (stable)",
    )


# -- finite union into pigeonhole ----------------------------------------------

def _last_change(t: int, ask: Ask) -> int:
    if t == 0:
        return 0
    n = ask(0)
    for s in range(t - 1, -1, -1):
        for e in range(n):
            if ask(1 + s * n + e):
                return s + 1
    return 0


def finite_union_functional() -> PointwiseFunctional:
    """Color ``s+1`` with ``s+1`` when some member changes between stages s
    and s+1, otherwise with the color of s; point 0 gets 0."""
    return PointwiseFunctional("last-change", _last_change, Kind.FAMILY, Kind.FUNCTION)


def finite_union_phi(family: Family) -> ColoringInstance:
    return CATALOG["finite-union"].image(family)


def _finite_union_pair() -> ReductionPair:
    return ReductionPair(
        name="finite-union", source=ProblemId.FINITE_UNION, target=ProblemId.RT1,
        phi=finite_union_functional(),
        psi=PointwiseFunctional("hole-as-bound", _single(lambda ask: ask(right(0)))),
        strong=True, takes=Variant.HOLE, gives=Variant.BOUND,
        target_arity=1, target_colors=lambda _: None,
        anchor="finite union of finite c.e. sets via last-change coloring",
    )


# -- non-cofinite member into stable pairs with n+1 colors ----------------------

def least_gap_color(x: int, s: int, n: int, read: Ask) -> int:
    """Least e with some least ``y`` in ``[x, s]`` outside ``W_{e,s}``; n if none.

    ``read(p)`` reads the family tape. Element y can only enter a member at
    a stage above y, so only stage deltas from y on are consulted.
    """
    if n <= 0:
        return 0
    for y in range(x, s + 1):
        for e in range(n):
            if not any((read(1 + t * n + e) >> y) & 1 for t in range(y, s)):
                return e
    return n


def ficf_functional() -> PointwiseFunctional:
    def rule(pos: int, ask: Ask) -> int:
        x, s = pair_from_index(pos)
        return least_gap_color(x, s, ask(0), ask)
    return PointwiseFunctional("least-gap", rule, Kind.FAMILY, Kind.FUNCTION)


def _ficf_psi() -> PointwiseFunctional:
    def rule(ask: Ask) -> int:
        h0, h1 = ask(right(0)), ask(right(1))
        read = lambda p: ask(left(p))
        return least_gap_color(h0, h1, read(0), read)
    return PointwiseFunctional("gap-of-first-pair", _single(rule))


def srt2i_pair() -> ReductionPair:
    return ReductionPair(
        name="srt2i", source=ProblemId.FICF, target=ProblemId.SRT2FIN,
        phi=ficf_functional(), psi=_ficf_psi(),
        strong=False, takes=Variant.SET, gives=Variant.INDEX,
        target_arity=2, target_colors=lambda fam: len(fam) + 1, stable=True,
        anchor="non-cofinite member via least-gap stable coloring",
    )


# -- Sigma-level pigeonhole into tuples of length level + 2 ---------------------

def truncated_color(x: int, z: tuple[int, ...], k: int, read: Ask) -> int:
    """Least c < k whose bounded graph formula holds below ``z``; k if none.

    Level 1: ``exists w0 < z0 theta(x, c, w0)``. Level 2:
    ``exists w0 < z0 forall w1 < z1 theta(x, c, w0, w1)``.
    """
    theta = lambda *args: read(1 + cantor_tuple(args))
    for c in range(k):
        if len(z) == 1:
            if any(theta(x, c, w0) for w0 in range(z[0])):
                return c
        elif len(z) == 2:
            if any(all(theta(x, c, w0, w1) for w1 in range(z[1])) for w0 in range(z[0])):
                return c
        else:
            raise UnsupportedLevel(f"level {len(z)} is not supported")
    return k


def lastlemma_functional(level: int) -> PointwiseFunctional:
    r = level + 2

    def rule(pos: int, ask: Ask) -> int:
        t = tuple_from_index(pos, r)
        k = ask(0)
        z = t[2:]
        return 1 if truncated_color(t[0], z, k, ask) == truncated_color(t[1], z, k, ask) else 0
    return PointwiseFunctional(f"truncation-agree/{level}", rule)


def _lastlemma_psi(level: int) -> PointwiseFunctional:
    def rule(ask: Ask) -> int:
        hs = [ask(right(i)) for i in range(level + 1)]
        read = lambda p: ask(left(p))
        return truncated_color(hs[0], tuple(hs[1:]), read(0), read)
    return PointwiseFunctional(f"truncated-hole/{level}", _single(rule))


def lastlemma_pair(level: int) -> ReductionPair:
    if level not in (1, 2):
        raise UnsupportedLevel(f"level {level} is not supported")
    return ReductionPair(
        name=f"lastlemma-{level}", source=ProblemId.RT1, target=ProblemId.RTN2,
        phi=lastlemma_functional(level), psi=_lastlemma_psi(level),
        strong=False, takes=Variant.SET, gives=Variant.HOLE,
        target_arity=level + 2, target_colors=lambda _: 2,
        anchor=f"level-{level} pigeonhole via bounded truncations",
    )


# -- stable pairs into all pairs ------------------------------------------------

def identity_pair() -> ReductionPair:
    return ReductionPair(
        name="identity", source=ProblemId.SRT2K, target=ProblemId.RT22,
        phi=PointwiseFunctional("identity", lambda n, ask: ask(n)),
        psi=_pass_solution("identity"),
        strong=True, takes=Variant.SET, gives=Variant.SET,
        target_arity=2, target_colors=lambda inst: inst.colors, stable=True,
        anchor="stable pairs are pairs",
    )


def mutated(pair: ReductionPair, delta: int) -> ReductionPair:
    """``pair`` with every psi output shifted by ``delta`` (for mutation runs)."""
    base = pair.psi
    psi = PointwiseFunctional(f"{base.name}{delta:+d}",
                              lambda n, ask: base.value_at(n, ask) + delta)
    return replace(pair, psi=psi, mutation=pair.mutation + delta)


CATALOG: dict[str, ReductionPair] = {
    p.name: p for p in (
        _wr1(2), _wr1(2, strong=True), _wr1(3), srt22_pair(), _finite_union_pair(),
        srt2i_pair(), lastlemma_pair(1), lastlemma_pair(2), identity_pair(),
    )
}


def get(name: str) -> ReductionPair:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownReduction(name) from None


def listing() -> list[dict]:
    return [p.describe() for p in CATALOG.values()]


def listing_json() -> str:
    return json.dumps({"reductions": listing(),
                       "problems": [p.value for p in ProblemId]}, indent=2)
