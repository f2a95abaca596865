"""Quiver values and the mutation operation.

A quiver here is a finite directed multigraph without loops and without
2-cycles (no opposite arrows between one pair of vertices).  Under that
convention the arrow multiset is determined by a skew-symmetric integer
matrix ``b``: ``b[i][j]`` is the number of arrows ``i -> j`` minus the number
of arrows ``j -> i``, so a positive entry means that many parallel arrows
``i -> j`` and the transposed entry is forced.  The matrix is the single
source of truth; the :class:`Arrow` view is derived from it.

Vertices are labelled ``0 .. n-1`` throughout the package.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "QuiverError",
    "LoopArrowError",
    "TwoCycleError",
    "LabelOutOfRangeError",
    "Arrow",
    "Quiver",
    "UndirectedCycle",
    "build_quiver",
    "linear_a",
    "standard_d",
    "oriented_cycle",
    "mutate",
    "apply_sequence",
    "valency",
    "full_subquiver",
    "components",
    "undirected_cycles",
    "iter_undirected_cycles",
]


class QuiverError(ValueError):
    """Malformed quiver data."""


class LoopArrowError(QuiverError):
    """An arrow from a vertex to itself."""


class TwoCycleError(QuiverError):
    """Opposite arrows supplied between the same pair of vertices."""


class LabelOutOfRangeError(QuiverError):
    """A vertex label outside ``0 .. n-1``."""


@dataclass(frozen=True)
class Arrow:
    """``multiplicity`` parallel arrows ``tail -> head``."""

    tail: int
    head: int
    multiplicity: int = 1


@dataclass(frozen=True)
class Quiver:
    """Immutable quiver, stored as a skew-symmetric integer matrix.

    Invariants: the matrix is square with at least one row, the diagonal is
    zero (no loops) and ``b[i][j] == -b[j][i]`` (no 2-cycles survive; arrows
    ``i -> j`` exist exactly when ``b[i][j] > 0``, with that multiplicity).
    """

    b: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.b)
        if n == 0:
            raise QuiverError("a quiver needs at least one vertex")
        for i, row in enumerate(self.b):
            if len(row) != n:
                raise QuiverError("matrix must be square")
            if row[i] != 0:
                raise LoopArrowError(f"nonzero diagonal entry at vertex {i}")
        for i in range(n):
            for j in range(i):
                if self.b[i][j] != -self.b[j][i]:
                    raise QuiverError(
                        f"matrix must be skew-symmetric, broken at ({i}, {j})"
                    )

    @property
    def n(self) -> int:
        return len(self.b)

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise LabelOutOfRangeError(f"vertex {v} not in 0..{self.n - 1}")

    def arrows(self) -> Iterator[Arrow]:
        """Arrows with positive multiplicity, ordered by (tail, head)."""
        for i in range(self.n):
            for j in range(self.n):
                if self.b[i][j] > 0:
                    yield Arrow(i, j, self.b[i][j])

    def neighbours(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return tuple(w for w in range(self.n) if self.b[v][w] != 0)

    def arrow_count(self) -> int:
        """Total number of arrows, counting multiplicity."""
        return sum(x for row in self.b for x in row if x > 0)


def _matrix_from_arrows(n: int, arrows: Iterable) -> tuple[tuple[int, ...], ...]:
    raw = [[0] * n for _ in range(n)]
    for a in arrows:
        if isinstance(a, Arrow):
            t, h, m = a.tail, a.head, a.multiplicity
        else:
            parts = tuple(a)
            if len(parts) == 2:
                t, h, m = parts[0], parts[1], 1
            else:
                t, h, m = parts
        if m <= 0:
            raise QuiverError(f"arrow multiplicity must be positive, got {m}")
        if t == h:
            raise LoopArrowError(f"loop arrow at vertex {t}")
        if not (0 <= t < n and 0 <= h < n):
            raise LabelOutOfRangeError(f"arrow ({t}, {h}) outside 0..{n - 1}")
        raw[t][h] += m
    for i in range(n):
        for j in range(i):
            if raw[i][j] and raw[j][i]:
                raise TwoCycleError(f"arrows both ways between {j} and {i}")
    return tuple(
        tuple(raw[i][j] - raw[j][i] for j in range(n)) for i in range(n)
    )


def build_quiver(n: int, arrows: Iterable = ()) -> Quiver:
    """Assemble a quiver from arrows, summing multiplicities per pair.

    Arrows may be :class:`Arrow` values or ``(tail, head[, multiplicity])``
    tuples.  Loops, opposite pairs, and out-of-range labels are rejected.
    """
    if n < 1:
        raise QuiverError("vertex count must be at least 1")
    return Quiver(_matrix_from_arrows(n, arrows))


def linear_a(k: int) -> Quiver:
    """The linearly oriented path 0 -> 1 -> ... -> k-1."""
    if k < 1:
        raise QuiverError("linear_a needs k >= 1")
    return build_quiver(k, [(i, i + 1) for i in range(k - 1)])


def standard_d(n: int) -> Quiver:
    """The fork quiver: chain 0 -> 1 -> ... -> n-2 plus the arrow n-3 -> n-1.

    This is the reduction target for the type-D mutation class; vertex n-3 is
    the branch vertex with the two fork arrows out of it.
    """
    if n < 4:
        raise QuiverError("standard_d needs n >= 4")
    arrows = [(i, i + 1) for i in range(n - 2)]
    arrows.append((n - 3, n - 1))
    return build_quiver(n, arrows)


def oriented_cycle(k: int) -> Quiver:
    """The directed cycle 0 -> 1 -> ... -> k-1 -> 0."""
    if k < 3:
        raise QuiverError("oriented_cycle needs k >= 3 (k = 2 would be a 2-cycle)")
    return build_quiver(k, [(i, (i + 1) % k) for i in range(k)])


def _mutate_matrix(b: Sequence[Sequence[int]], v: int) -> list[tuple[int, ...]]:
    """Matrix form of mutation at v.

    Entries in row or column v flip sign; any other entry gains
    sign(b[i][v]) * max(b[i][v] * b[v][j], 0).
    """
    n = len(b)
    out = []
    for i in range(n):
        brow = b[i]
        biv = brow[v]
        row = list(brow)
        if i == v:
            row = [-x for x in brow]
        else:
            row[v] = -brow[v]
            if biv:
                bv = b[v]
                for j in range(n):
                    if j == v:
                        continue
                    p = biv * bv[j]
                    if p > 0:
                        row[j] = brow[j] + (p if biv > 0 else -p)
        out.append(tuple(row))
    return out


def _mutate_multiset(Q: Quiver, v: int) -> list[tuple[int, ...]]:
    """Literal rewrite form of mutation at v on the arrow multiset.

    For every pair of r arrows j -> v and s arrows v -> k, add r*s arrows
    j -> k; reverse every arrow incident with v; then cancel opposite pairs
    maximally.  Counting arrows makes the cancellation step canonical.
    """
    n = Q.n
    arrows: Counter = Counter()
    for i in range(n):
        row = Q.b[i]
        for j in range(n):
            if row[j] > 0:
                arrows[(i, j)] = row[j]
    new = Counter(arrows)
    ins = [(t, m) for (t, h), m in arrows.items() if h == v]
    outs = [(h, m) for (t, h), m in arrows.items() if t == v]
    for j, r in ins:
        for k, s in outs:
            new[(j, k)] += r * s
    for (t, h), m in arrows.items():
        if v in (t, h):
            new[(t, h)] -= m
            new[(h, t)] += m
    for (t, h) in list(new.keys()):
        if t < h:
            m = min(new[(t, h)], new[(h, t)])
            if m > 0:
                new[(t, h)] -= m
                new[(h, t)] -= m
    b = [[0] * n for _ in range(n)]
    for (t, h), m in new.items():
        if m:
            b[t][h] = m
            b[h][t] = -m
    return [tuple(row) for row in b]


def mutate(Q: Quiver, v: int) -> Quiver:
    """Mutation at vertex v.

    Both the multiset rewrite and the matrix rule are evaluated on every call
    and must produce the same matrix; a disagreement would be an internal
    error, not bad input.
    """
    Q.check_vertex(v)
    by_matrix = _mutate_matrix(Q.b, v)
    by_multiset = _mutate_multiset(Q, v)
    if by_matrix != by_multiset:
        raise AssertionError(
            f"mutation implementations disagree at vertex {v}: "
            f"{by_matrix!r} vs {by_multiset!r}"
        )
    return Quiver(tuple(by_matrix))


def apply_sequence(Q: Quiver, seq) -> Quiver:
    """Left-to-right composition of mutations.

    ``seq`` is any iterable of vertex labels; objects with a ``steps``
    attribute (mutation sequences from :mod:`qmut.reduce`) are unwrapped.
    """
    steps = getattr(seq, "steps", seq)
    for v in steps:
        Q = mutate(Q, v)
    return Q


def valency(Q: Quiver, v: int) -> int:
    """Number of neighbouring vertices of v (multiplicities do not count)."""
    Q.check_vertex(v)
    return sum(1 for x in Q.b[v] if x != 0)


def full_subquiver(Q: Quiver, vertices: Iterable[int]) -> Quiver:
    """Induced subquiver on a vertex subset.

    Vertex ``i`` of the result is ``sorted(set(vertices))[i]``; the label map
    is order-preserving.
    """
    vs = sorted(set(vertices))
    if not vs:
        raise QuiverError("vertex subset must be non-empty")
    for v in vs:
        Q.check_vertex(v)
    return Quiver(tuple(tuple(Q.b[x][y] for y in vs) for x in vs))


def components(Q: Quiver) -> list[tuple[int, ...]]:
    """Connected components of the underlying graph, ordered by least member."""
    n = Q.n
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in range(n):
                if not seen[w] and Q.b[u][w] != 0:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        out.append(tuple(sorted(comp)))
    return out


@dataclass(frozen=True)
class UndirectedCycle:
    """A cycle of the underlying multigraph.

    ``vertices`` lists the cycle once, without repeating the start;
    ``forward[i]`` says whether the arrow along the step
    ``vertices[i] -> vertices[(i+1) % len]`` agrees with the traversal.
    """

    vertices: tuple[int, ...]
    forward: tuple[bool, ...]

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def oriented(self) -> bool:
        return all(self.forward) or not any(self.forward)


def iter_undirected_cycles(Q: Quiver) -> Iterator[UndirectedCycle]:
    """Yield the cycles of the underlying multigraph.

    Cycles are vertex-simple; a pair of parallel arrows contributes the one
    2-edge cycle on its endpoints.  Each cycle is reported once, rooted at
    its smallest vertex.  Enumeration is exhaustive and intended for small n.
    """
    n = Q.n
    b = Q.b
    for i in range(n):
        for j in range(i + 1, n):
            if abs(b[i][j]) >= 2:
                yield UndirectedCycle((i, j), (b[i][j] > 0, b[j][i] > 0))
    adj = [tuple(w for w in range(n) if b[v][w] != 0) for v in range(n)]

    def walk(s: int, path: list[int], onpath: set[int]) -> Iterator[UndirectedCycle]:
        u = path[-1]
        for w in adj[u]:
            if w == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    verts = tuple(path)
                    fwd = tuple(
                        b[verts[i]][verts[(i + 1) % len(verts)]] > 0
                        for i in range(len(verts))
                    )
                    yield UndirectedCycle(verts, fwd)
            elif w > s and w not in onpath:
                path.append(w)
                onpath.add(w)
                yield from walk(s, path, onpath)
                path.pop()
                onpath.remove(w)

    for s in range(n):
        yield from walk(s, [s], {s})


def undirected_cycles(Q: Quiver) -> list[UndirectedCycle]:
    """All cycles of the underlying multigraph, as a list."""
    return list(iter_undirected_cycles(Q))
