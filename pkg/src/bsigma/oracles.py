"""Honest solvers for target problems.

The lazy solvers read generator spoilers and are used only to supply the
target-side solution a reduction is tested against; reductions never see
a spoiler. The brute-force search is an independent check for small
explicit colorings.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations, count
from typing import Callable, Sequence

from .colorings import ColoringInstance, ColoringSpoiler
from .errors import FixtureError
from .functional import Status, Verdict
from .problems import Family, ProblemId, Solution, stable_homogeneous, validate
from .reductions import ReductionPair
from .streams import Stream


def image_spoiler(pair: ReductionPair, source: ColoringInstance | Family) -> ColoringSpoiler:
    """Ground truth about ``pair.image(source)``, derived from the source's spoiler."""
    sp = source.spoiler
    if sp is None:
        raise FixtureError(f"{source.name} has no spoiler")
    if pair.name in ("wr1", "wr1-set", "wr1-rtn"):
        return _same_color_spoiler(source)
    if pair.name == "srt22":
        return _rainbow_pairs_spoiler(source)
    if pair.name == "finite-union":
        return _last_change_spoiler(source)
    if pair.name == "srt2i":
        return _least_gap_spoiler(source)
    if pair.name.startswith("lastlemma"):
        return _truncation_spoiler(source)
    if pair.name == "identity":
        return sp
    raise FixtureError(f"no oracle for reduction {pair.name}")


def with_spoiler(pair: ReductionPair, source: ColoringInstance | Family) -> ColoringInstance:
    """The Phi-image with its derived spoiler attached."""
    return replace(pair.image(source), spoiler=image_spoiler(pair, source))


def _least_hole(sp: ColoringSpoiler) -> int:
    holes = sorted(h for h in sp.infinite_holes if h in sp.witness_schedule)
    if not holes:
        raise FixtureError("spoiler names no scheduled infinite hole")
    return holes[0]


def _same_color_spoiler(source: ColoringInstance) -> ColoringSpoiler:
    sp = source.spoiler
    h = _least_hole(sp)
    return ColoringSpoiler(infinite_holes=frozenset({1}), witness_schedule={1: sp.witness_schedule[h]})


def new_color_representatives(c0: ColoringInstance) -> Stream:
    """Each domain point whose color has not appeared before it."""
    def source():
        seen: set[int] = set()
        for x in c0.domain_stream():
            c = c0.color(x)
            if c not in seen:
                seen.add(c)
                yield x
    return Stream(source, name=f"reps({c0.name})", increasing=True)


def rainbow_trivial_solver(c0: ColoringInstance) -> Solution:
    """Colors of the new-color representatives: pairwise distinct, infinitely many.

    Uses no spoiler. Each scan step terminates because every color class is finite.
    """
    reps = new_color_representatives(c0)
    return Solution.set(reps.map(lambda x: c0.color(x)))


def _rainbow_pairs_spoiler(source: ColoringInstance) -> ColoringSpoiler:
    last = source.spoiler.extras.get("last_member")
    if last is None:
        raise FixtureError(f"{source.name}: rainbow spoiler lacks class extents")
    return ColoringSpoiler(
        infinite_holes=frozenset({0}),
        witness_schedule={0: new_color_representatives(source)},
        settling=lambda x: last(source.color(x)) + 1,
        limit_color=lambda x: 0,
    )


def _last_change_spoiler(family: Family) -> ColoringSpoiler:
    settle = family.spoiler.settle_stage
    if settle is None:
        raise FixtureError(f"{family.name}: no settle stage")
    return ColoringSpoiler(
        infinite_holes=frozenset({settle}),
        witness_schedule={settle: Stream.where(lambda x: x >= settle, start=settle)},
        member_bound=lambda m: settle + m,
    )


def _least_gap_spoiler(family: Family) -> ColoringSpoiler:
    sp = family.spoiler
    settling = sp.extras["settling"]
    schedule = {c: stable_homogeneous(sp.limit_color, settling, c) for c in sp.infinite_limit_colors}
    return ColoringSpoiler(infinite_holes=sp.infinite_limit_colors, witness_schedule=schedule,
                           settling=settling, limit_color=sp.limit_color)


def _truncation_spoiler(source: ColoringInstance) -> ColoringSpoiler:
    """Homogeneous color-1 set for the truncation-agreement image.

    Members share a true color and each new member lies beyond the witness
    of every earlier one (so the first truncation is exact), and at level 2
    beyond every refuter of a smaller color below each earlier member.
    """
    sp = source.spoiler
    cert = source.matrix.certificate
    truth = sp.ground_truth
    level = source.level
    h = _least_hole(sp)

    def t1(x: int, z0: int) -> int:
        return max((cert.refuter(x, c, w0) for c in range(truth(x)) for w0 in range(z0)), default=0)

    def build():
        chosen: list[int] = []
        for y in count():
            if truth(y) != h:
                continue
            if any(y <= cert.witness(x) for x in chosen):
                continue
            if level == 2 and any(y <= t1(x, z0) for i, x in enumerate(chosen) for z0 in chosen[i + 1:]):
                continue
            chosen.append(y)
            yield y
    return ColoringSpoiler(infinite_holes=frozenset({1}),
                           witness_schedule={1: Stream(build, name=f"truncation-hom[{h}]", increasing=True)})


def solve_with_spoiler(problem: ProblemId, instance: ColoringInstance,
                       spoiler: ColoringSpoiler | None = None) -> Solution:
    """A solution built from ground truth: the least scheduled hole, or its schedule."""
    sp = spoiler if spoiler is not None else instance.spoiler
    if sp is None:
        raise FixtureError(f"{instance.name}: no spoiler to solve from")
    return Solution.set(sp.witness_schedule[_least_hole(sp)])


def solve_hole(instance: ColoringInstance, spoiler: ColoringSpoiler | None = None) -> Solution:
    sp = spoiler if spoiler is not None else instance.spoiler
    if sp is None:
        raise FixtureError(f"{instance.name}: no spoiler to solve from")
    return Solution.hole(_least_hole(sp))


def checked_solution(problem: ProblemId, image: ColoringInstance, solution: Solution,
                     window: int, threshold: int) -> Solution:
    """Validate an oracle's output; a failure is a fixture error, not a reduction failure."""
    verdict = validate(problem, image, solution, window, threshold)
    if verdict.status is not Status.PASS:
        raise FixtureError(f"oracle solution for {image.name} rejected: {verdict.detail}")
    return solution


# -- brute force ---------------------------------------------------------------

@dataclass(frozen=True)
class ExhaustionCertificate:
    """No monochromatic ``m``-subset of ``range(n_points)`` exists for ``arity``-tuples."""

    n_points: int
    arity: int
    m: int
    nodes: int
    capped: bool = False

    def to_json(self) -> dict:
        return {"n_points": self.n_points, "arity": self.arity, "m": self.m,
                "nodes": self.nodes, "capped": self.capped}


SEARCH_CAP = {2: 16, 3: 12}


def brute_homogeneous(color: Callable[[tuple[int, ...]], int], n_points: int, arity: int, m: int,
                      node_cap: int = 2_000_000) -> tuple[int, ...] | ExhaustionCertificate:
    """Lexicographically least monochromatic m-subset of ``range(n_points)``.

    Depth-first over increasing sequences, pruning as soon as a new tuple's
    color differs from the first tuple's.
    """
    cap = SEARCH_CAP.get(arity, 10)
    if n_points > cap:
        return ExhaustionCertificate(n_points, arity, m, 0, capped=True)
    if m < arity:
        return tuple(range(m)) if m <= n_points else ExhaustionCertificate(n_points, arity, m, 0)
    nodes = 0
    chosen: list[int] = []

    def dfs(start: int, target: int | None) -> bool:
        nonlocal nodes
        if len(chosen) == m:
            return True
        for y in range(start, n_points - (m - len(chosen)) + 1):
            nodes += 1
            if nodes > node_cap:
                raise _Capped
            t = target
            ok = True
            for rest in combinations(chosen, arity - 1):
                c = color(rest + (y,))
                if t is None:
                    t = c
                elif c != t:
                    ok = False
                    break
            if ok:
                chosen.append(y)
                if dfs(y + 1, t):
                    return True
                chosen.pop()
        return False

    try:
        found = dfs(0, None)
    except _Capped:
        return ExhaustionCertificate(n_points, arity, m, nodes, capped=True)
    return tuple(chosen) if found else ExhaustionCertificate(n_points, arity, m, nodes)


class _Capped(Exception):
    pass


def brute_verdict(result: tuple[int, ...] | ExhaustionCertificate) -> Verdict:
    if isinstance(result, ExhaustionCertificate):
        if result.capped:
            return Verdict(Status.UNKNOWN, result.to_json(), "search cap exceeded")
        return Verdict.fail(result.to_json(), "no monochromatic subset")
    return Verdict.ok(f"monochromatic {result}")


def window_coloring(instance: ColoringInstance, points: Sequence[int]) -> Callable[[tuple[int, ...]], int]:
    """The instance's coloring transported to ``range(len(points))``."""
    return lambda t: instance.color_fn(tuple(points[i] for i in t))
