"""Lazy, memoised integer streams used for infinite sets and solutions."""
from __future__ import annotations

from itertools import count
from typing import Callable, Iterable, Iterator

from .errors import BudgetExhausted


class Stream:
    """A memoised lazy sequence of naturals.

    ``source`` is a zero-argument factory returning a fresh iterator. The
    iterator may be infinite; ``budget`` bounds how many items a single
    request may force.
    """

    def __init__(self, source: Callable[[], Iterator[int]], name: str = "stream",
                 increasing: bool = False):
        self._source = source
        self._it: Iterator[int] | None = None
        self._cache: list[int] = []
        self._done = False
        self.name = name
        self.increasing = increasing
        self.member: Callable[[int], bool] | None = None

    @classmethod
    def of(cls, values: Iterable[int], name: str = "finite", increasing: bool = False) -> "Stream":
        values = list(values)
        return cls(lambda: iter(values), name=name, increasing=increasing)

    @classmethod
    def where(cls, predicate: Callable[[int], bool], name: str = "filter", start: int = 0) -> "Stream":
        stream = cls(lambda: (x for x in count(start) if predicate(x)), name=name, increasing=True)
        stream.member = lambda x: x >= start and predicate(x)
        return stream

    def _force(self, n: int) -> None:
        if self._it is None:
            self._it = self._source()
        while len(self._cache) < n and not self._done:
            try:
                self._cache.append(next(self._it))
            except StopIteration:
                self._done = True

    def take(self, n: int) -> list[int]:
        """First ``n`` items, or fewer if the stream is finite."""
        self._force(n)
        return self._cache[:n]

    def require(self, n: int) -> list[int]:
        """First ``n`` items; a stream that cannot supply them stalls."""
        items = self.take(n)
        if len(items) < n:
            raise BudgetExhausted(f"{self.name}: produced {len(items)} of {n} items")
        return items

    def __getitem__(self, i: int) -> int:
        return self.require(i + 1)[i]

    def __iter__(self) -> Iterator[int]:
        i = 0
        while True:
            self._force(i + 1)
            if i >= len(self._cache):
                return
            yield self._cache[i]
            i += 1

    def below(self, bound: int) -> list[int]:
        """Items smaller than ``bound``; only meaningful for increasing streams."""
        if not self.increasing:
            raise ValueError("below() needs an increasing stream")
        out = []
        for x in self:
            if x >= bound:
                break
            out.append(x)
        return out

    def contains(self, x: int) -> bool:
        """Membership for an increasing stream: scan until an item >= x."""
        if not self.increasing:
            raise ValueError("contains() needs an increasing stream")
        if self.member is not None:
            return self.member(x)
        for y in self:
            if y >= x:
                return y == x
        return False

    def map(self, fn: Callable[[int], int], name: str | None = None) -> "Stream":
        return Stream(lambda: (fn(x) for x in self), name=name or f"map({self.name})")

    def __repr__(self) -> str:
        return f"Stream({self.name}, {self._cache[:8]}{'...' if not self._done else ''})"


NATURALS = Stream(lambda: count(), name="naturals", increasing=True)

