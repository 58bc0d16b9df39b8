"""Union-find over hashable items, used to quotient disjoint unions."""
from __future__ import annotations

from typing import Hashable, Iterable


class UnionFind:
    """Disjoint sets with path halving and union by size.

    Classes are reported in order of first insertion of any of their items,
    which keeps every quotient built on top of it deterministic.
    """

    def __init__(self, items: Iterable[Hashable] = ()):
        self._parent: dict = {}
        self._size: dict = {}
        self._order: dict = {}
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        if item not in self._parent:
            self._parent[item] = item
            self._size[item] = 1
            self._order[item] = len(self._order)

    def __contains__(self, item) -> bool:
        return item in self._parent

    def find(self, item):
        parent = self._parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def classes(self) -> list[list]:
        groups: dict = {}
        for item in self._order:  # insertion order
            groups.setdefault(self.find(item), []).append(item)
        return list(groups.values())


def quotient(left: Iterable, right: Iterable, glue: Iterable[tuple]) -> list[list[tuple]]:
    """Classes of ``left + right`` (tagged 1 and 2) under the equivalence generated by ``glue``.

    ``glue`` holds pairs ``(l, r)`` of a left item and a right item that must
    be identified.
    """
    uf = UnionFind([(1, x) for x in left])
    for y in right:
        uf.add((2, y))
    for l, r in glue:
        uf.union((1, l), (2, r))
    return uf.classes()
