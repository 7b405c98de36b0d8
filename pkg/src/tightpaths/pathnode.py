"""Persistent path representation shared by the depth- and breadth-first searches.

A node stores only the edge that extended its parent, in path order; the full
vertex sequence is rebuilt on demand by replaying the chain from the root.
"""

from __future__ import annotations

from .structures import TightPath


class PathNode:
    __slots__ = ("parent", "tail", "new", "length", "depth")

    def __init__(self, parent: "PathNode | None", tail: tuple, new: tuple, length: int):
        self.parent = parent
        self.tail = tail      # root: full vertex sequence; otherwise the last k vertices
        self.new = new        # vertices this node adds to its parent's vertex set
        self.length = length
        self.depth = 0 if parent is None else parent.depth + 1

    @classmethod
    def root(cls, seq, length: int) -> "PathNode":
        seq = tuple(int(v) for v in seq)
        return cls(None, seq, seq, length)

    def extend(self, ordered_edge: tuple, new: tuple) -> "PathNode":
        return PathNode(self, ordered_edge, new, self.length + 1)

    def chain(self) -> list["PathNode"]:
        out = []
        node = self
        while node is not None:
            out.append(node)
            node = node.parent
        out.reverse()
        return out

    def sequence(self, j: int) -> tuple:
        chain = self.chain()
        seq = list(chain[0].tail)
        for node in chain[1:]:
            del seq[len(seq) - j:]
            seq.extend(node.tail)
        return tuple(seq)

    def path(self, k: int, j: int) -> TightPath:
        return TightPath(self.sequence(j), k, j)

    def added_vertices(self) -> list[int]:
        """Vertices added after the root."""
        out = []
        node = self
        while node.parent is not None:
            out.extend(node.new)
            node = node.parent
        return out

    def base(self) -> "PathNode":
        node = self
        while node.parent is not None:
            node = node.parent
        return node


def move_marks(marks, old: PathNode | None, new: PathNode | None):
    """Update a per-vertex on-path array from ``old``'s vertex set to ``new``'s."""
    a, b = old, new
    drop, add = [], []
    while a is not b:
        if b is None or (a is not None and a.depth >= b.depth):
            drop.append(a)
            a = a.parent
        else:
            add.append(b)
            b = b.parent
    for node in drop:
        marks[list(node.new)] = False
    for node in add:
        marks[list(node.new)] = True
