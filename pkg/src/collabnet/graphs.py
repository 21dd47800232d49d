"""Collaboration graphs, degree sequences, realization and enumeration.

Graphs are immutable values over firms ``0..n-1``.  Edges are stored as
canonical pairs ``(i, j)`` with ``i < j``; enumeration walks a bitmask over
the ``C(n, 2)`` possible edges in ``itertools.combinations`` order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapExceeded, GraphError, NotGraphical

DEFAULT_CAP = 7

Edge = tuple[int, int]


def _canon(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@lru_cache(maxsize=None)
def edge_index(n: int) -> tuple[Edge, ...]:
    """All possible edges on ``n`` nodes, in bitmask order."""
    return tuple(combinations(range(n), 2))


@dataclass(frozen=True)
class CollaborationGraph:
    n: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"firm count must be >= 1, got {self.n}")
        canon = set()
        for e in self.edges:
            i, j = (int(x) for x in e)
            if i == j:
                raise GraphError(f"self-loop at {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge {(i, j)} outside 0..{self.n - 1}")
            canon.add(_canon(i, j))
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "CollaborationGraph":
        edges = [tuple(e) for e in edges]
        seen = set()
        for i, j in edges:
            e = _canon(int(i), int(j))
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(edges))

    @classmethod
    def empty(cls, n: int) -> "CollaborationGraph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "CollaborationGraph":
        return cls(n, frozenset(edge_index(n)))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "CollaborationGraph":
        idx = edge_index(n)
        return cls(n, frozenset(e for b, e in enumerate(idx) if mask >> b & 1))

    @property
    def mask(self) -> int:
        idx = edge_index(self.n)
        return sum(1 << b for b, e in enumerate(idx) if e in self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return _canon(i, j) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def non_edges(self) -> list[Edge]:
        return [e for e in edge_index(self.n) if e not in self.edges]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def add_link(self, i: int, j: int) -> "CollaborationGraph":
        if i == j:
            raise GraphError(f"self-loop at {i}")
        e = _canon(i, j)
        if e in self.edges:
            raise GraphError(f"edge {e} already present")
        return CollaborationGraph(self.n, self.edges | {e})

    def drop_link(self, i: int, j: int) -> "CollaborationGraph":
        if i == j:
            raise GraphError(f"self-loop at {i}")
        e = _canon(i, j)
        if e not in self.edges:
            raise GraphError(f"edge {e} not present")
        return CollaborationGraph(self.n, self.edges - {e})

    def relabel(self, perm: Sequence[int]) -> "CollaborationGraph":
        """Graph with firm ``i`` renamed to ``perm[i]``."""
        return CollaborationGraph(self.n, frozenset(_canon(perm[i], perm[j]) for i, j in self.edges))

    # text / DOT formats

    def to_text(self) -> str:
        lines = [f"n={self.n}"] + [f"{i} {j}" for i, j in self.sorted_edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CollaborationGraph":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("n="):
            raise GraphError("graph text must start with header 'n=<count>'")
        n = int(lines[0][2:])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise GraphError(f"bad edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls.from_edges(n, edges)

    def to_dot(self, name: str = "g", labels: Sequence[str] | None = None) -> str:
        out = [f"graph {name} {{"]
        for i in range(self.n):
            label = labels[i] if labels is not None else str(i)
            out.append(f'  {i} [label="{label}"];')
        for i, j in self.sorted_edges():
            out.append(f"  {i} -- {j};")
        out.append("}")
        return "\n".join(out) + "\n"


def degree_sequence(g: CollaborationGraph) -> np.ndarray:
    return g.degrees()


def add_link(g: CollaborationGraph, i: int, j: int) -> CollaborationGraph:
    return g.add_link(i, j)


def drop_link(g: CollaborationGraph, i: int, j: int) -> CollaborationGraph:
    return g.drop_link(i, j)


def is_graphical(k: Sequence[int]) -> bool:
    """Erdős–Gallai test."""
    k = [int(x) for x in k]
    n = len(k)
    if any(x < 0 or x > n - 1 for x in k):
        return False
    if sum(k) % 2:
        return False
    d = sorted(k, reverse=True)
    prefix = 0
    for r in range(1, n + 1):
        prefix += d[r - 1]
        tail = sum(min(x, r) for x in d[r:])
        if prefix > r * (r - 1) + tail:
            return False
    return True


def realize_degree_sequence(k: Sequence[int]) -> CollaborationGraph:
    """Havel–Hakimi construction (ties broken by lowest firm index)."""
    if not is_graphical(k):
        raise NotGraphical(f"{list(k)} is not graphical")
    k = [int(x) for x in k]
    n = len(k)
    residual = list(k)
    edges = set()
    while True:
        order = sorted(range(n), key=lambda v: (-residual[v], v))
        u = order[0]
        if residual[u] == 0:
            break
        targets = order[1 : residual[u] + 1]
        for v in targets:
            if residual[v] == 0:
                raise NotGraphical(f"{k} is not graphical")
            edges.add(_canon(u, v))
            residual[v] -= 1
        residual[u] = 0
    return CollaborationGraph(n, frozenset(edges))


def enumerate_graphs(n: int, cap: int = DEFAULT_CAP) -> Iterator[CollaborationGraph]:
    """Every labeled graph on ``n`` nodes, once each, in bitmask order."""
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    m = len(edge_index(n))

    def gen():
        for mask in range(1 << m):
            yield CollaborationGraph.from_mask(n, mask)

    return gen()


def enumerate_realizations(k: Sequence[int], cap: int = DEFAULT_CAP) -> Iterator[CollaborationGraph]:
    """Every labeled graph with degree sequence ``k`` (backtracking)."""
    if not is_graphical(k):
        raise NotGraphical(f"{list(k)} is not graphical")
    k = [int(x) for x in k]
    n = len(k)
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")

    def rec(i: int, residual: list[int], edges: list[Edge]):
        if i == n:
            yield CollaborationGraph(n, frozenset(edges))
            return
        need = residual[i]
        later = [j for j in range(i + 1, n) if residual[j] > 0]
        if need > len(later):
            return
        for chosen in combinations(later, need):
            nxt = list(residual)
            nxt[i] = 0
            for j in chosen:
                nxt[j] -= 1
            yield from rec(i + 1, nxt, edges + [(i, j) for j in chosen])

    return rec(0, list(k), [])


def random_realization(
    k: Sequence[int], seed: int, swaps: int | None = None
) -> CollaborationGraph:
    """One realization of ``k``: Havel–Hakimi seed graph randomized by
    degree-preserving double edge swaps.  Deterministic per ``seed``.

    ``swaps`` counts attempted swaps; default ``10 * |edges|``.
    """
    g = realize_degree_sequence(k)
    rng = random.Random(seed)
    edges = sorted(g.edges)
    present = set(edges)
    attempts = 10 * len(edges) if swaps is None else swaps
    if len(edges) < 2:
        return g
    for _ in range(attempts):
        x, y = rng.sample(range(len(edges)), 2)
        a, b = edges[x]
        c, d = edges[y]
        if rng.random() < 0.5:
            c, d = d, c
        # (a,b),(c,d) -> (a,d),(c,b)
        if len({a, b, c, d}) < 4:
            continue
        e1, e2 = _canon(a, d), _canon(c, b)
        if e1 in present or e2 in present:
            continue
        present -= {edges[x], edges[y]}
        present |= {e1, e2}
        edges[x], edges[y] = e1, e2
    return CollaborationGraph(g.n, frozenset(present))
