"""Colorings of tuples together with their generator-private ground truth."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Mapping

from .coding import tuple_from_index
from .streams import Stream

if TYPE_CHECKING:
    from .machines import DecidableMatrix, EnumSet


@dataclass(eq=False)
class ColoringSpoiler:
    """Ground truth a generator knows about its instance.

    Oracles read it; reductions never do.
    """

    infinite_holes: frozenset[int] = frozenset()
    # color -> increasing stream of members of that color class
    witness_schedule: Mapping[int, Stream] = field(default_factory=dict)
    # first m members of every infinite hole lie below member_bound(m)
    member_bound: Callable[[int], int] | None = None
    # stable colorings: C(x, s) == limit_color(x) for every s >= settling(x)
    settling: Callable[[int], int] | None = None
    limit_color: Callable[[int], int] | None = None
    sigma2_truth: bool | None = None
    class_cap: int | None = None
    # Sigma-level instances: the color each domain point really has
    ground_truth: Callable[[int], int] | None = None
    extras: dict[str, Any] = field(default_factory=dict)


@dataclass(eq=False)
class ColoringInstance:
    """A coloring of ``[X]^arity`` into ``colors`` colors (``None``: unbounded).

    ``color_fn`` takes a strictly increasing tuple. For a stable pair coloring
    the second coordinate plays the role of the stage. ``domain`` is an
    increasing stream (computable X), an EnumSet (c.e. X) or ``None`` for
    all naturals. ``stage_color_fn(x, s)`` approximates partial one-place
    colorings whose graph is only enumerable; it returns ``None`` until x
    has been colored.
    """

    arity: int
    colors: int | None
    color_fn: Callable[[tuple[int, ...]], int]
    domain: Stream | "EnumSet" | None = None
    stable: bool = False
    spoiler: ColoringSpoiler | None = None
    name: str = "coloring"
    stage_color_fn: Callable[[int, int], int | None] | None = None
    matrix: "DecidableMatrix | None" = None
    level: int | None = None

    def color(self, *tup: int) -> int:
        return self.color_fn(tuple(tup))

    @property
    def computable_domain(self) -> bool:
        return self.domain is None or isinstance(self.domain, Stream)

    def in_domain(self, x: int) -> bool:
        if self.domain is None:
            return True
        if isinstance(self.domain, Stream):
            return self.domain.contains(x)
        raise TypeError("membership in a c.e. domain is not decidable; restrict the domain first")

    def domain_below(self, window: int) -> list[int]:
        if self.domain is None:
            return list(range(window))
        if isinstance(self.domain, Stream):
            return self.domain.below(window)
        raise TypeError("c.e. domain: restrict the domain first")

    def domain_stream(self) -> Stream:
        if self.domain is None:
            return Stream.where(lambda x: True, name="naturals")
        if isinstance(self.domain, Stream):
            return self.domain
        raise TypeError("c.e. domain: restrict the domain first")

    def tape(self) -> Callable[[int], int]:
        """Total oracle view of the instance.

        One-place colorings: position x holds color+1 for x in X and 0
        outside X. Tuple colorings: the position is the tuple's index.
        """
        if self.arity == 1:
            def one(x: int) -> int:
                return self.color(x) + 1 if self.in_domain(x) else 0
            return one
        r = self.arity

        def many(pos: int) -> int:
            return self.color_fn(tuple_from_index(pos, r))
        return many
