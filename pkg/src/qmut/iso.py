"""Canonical labelling and isomorphism tests for quivers.

The canonical form of a quiver is the lexicographically smallest adjacency
matrix over all vertex orderings compatible with an isomorphism-invariant
ordered partition of the vertices.  The partition starts from per-vertex
invariants (in-valency, out-valency, multiset of incident signed
multiplicities), is refined to a stable ordered partition, and backtracking
individualises the remaining cells.  The resulting byte key is equal for two
quivers exactly when they are isomorphic as directed multigraphs, which is
what class enumeration needs for deduplication.

``find_isomorphism`` is an exhaustive backtracking search used as the test
oracle for the canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .quiver import Quiver

__all__ = [
    "CanonicalQuiver",
    "canonical_form",
    "canonical_key",
    "are_isomorphic",
    "find_isomorphism",
    "permute",
]


@dataclass(frozen=True)
class CanonicalQuiver:
    """A canonical representative plus the relabelling that produced it.

    ``relabeling[old] == new``; applying it to the input reproduces
    ``quiver`` exactly, and ``key`` determines the isomorphism class.
    """

    quiver: Quiver
    relabeling: tuple[int, ...]
    key: bytes


def permute(Q: Quiver, perm: Sequence[int]) -> Quiver:
    """Relabel vertices: vertex v of Q becomes perm[v]."""
    n = Q.n
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a permutation of 0..n-1")
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        row = Q.b[i]
        pi = perm[i]
        for j in range(n):
            b[pi][perm[j]] = row[j]
    return Quiver(tuple(tuple(r) for r in b))


def _matrix_key(mat: tuple[tuple[int, ...], ...]) -> bytes:
    n = len(mat)
    flat = ",".join(str(x) for row in mat for x in row)
    return f"{n}:{flat}".encode("ascii")


def _initial_cells(b, n: int) -> list[list[int]]:
    inv = {}
    for v in range(n):
        row = b[v]
        ins = sum(1 for x in row if x < 0)
        outs = sum(1 for x in row if x > 0)
        mults = tuple(sorted(x for x in row if x))
        inv[v] = (ins, outs, mults)
    groups: dict = {}
    for v in range(n):
        groups.setdefault(inv[v], []).append(v)
    return [sorted(groups[k]) for k in sorted(groups)]


def _refine(b, cells: list[list[int]]) -> list[list[int]]:
    """Stable ordered-partition refinement.

    A cell splits by the multiset of matrix entries towards each current
    cell; sub-cells are ordered by signature, so the cell order depends only
    on structure, never on input labels.
    """
    cells = [list(c) for c in cells]
    while True:
        for idx, cell in enumerate(cells):
            if len(cell) == 1:
                continue
            sig = {
                v: tuple(
                    tuple(sorted(b[v][u] for u in other)) for other in cells
                )
                for v in cell
            }
            first = sig[cell[0]]
            if any(sig[v] != first for v in cell[1:]):
                groups: dict = {}
                for v in cell:
                    groups.setdefault(sig[v], []).append(v)
                cells[idx : idx + 1] = [sorted(groups[k]) for k in sorted(groups)]
                break
        else:
            return cells


def canonical_form(Q: Quiver) -> CanonicalQuiver:
    """Canonical representative of the isomorphism class of Q."""
    b = Q.b
    n = Q.n
    best_mat: Optional[tuple] = None
    best_order: Optional[list[int]] = None

    def walk(cells: list[list[int]]) -> None:
        nonlocal best_mat, best_order
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            order = [c[0] for c in cells]
            mat = tuple(tuple(b[x][y] for y in order) for x in order)
            if best_mat is None or mat < best_mat:
                best_mat, best_order = mat, order
            return
        cell = cells[target]
        for v in cell:
            rest = [u for u in cell if u != v]
            nxt = cells[:target] + [[v], rest] + cells[target + 1 :]
            walk(_refine(b, nxt))

    walk(_refine(b, _initial_cells(b, n)))
    assert best_mat is not None and best_order is not None
    relab = [0] * n
    for pos, old in enumerate(best_order):
        relab[old] = pos
    return CanonicalQuiver(
        quiver=Quiver(best_mat),
        relabeling=tuple(relab),
        key=_matrix_key(best_mat),
    )


def canonical_key(Q: Quiver) -> bytes:
    """Byte key of the canonical form (equal keys iff isomorphic)."""
    return canonical_form(Q).key


def are_isomorphic(q1: Quiver, q2: Quiver) -> bool:
    """Isomorphism of directed multigraphs, decided via canonical keys."""
    if q1.n != q2.n:
        return False
    return canonical_form(q1).key == canonical_form(q2).key


def find_isomorphism(q1: Quiver, q2: Quiver) -> Optional[tuple[int, ...]]:
    """Exhaustive search for a permutation with permute(q1, perm) == q2.

    Backtracks over vertex images with adjacency consistency checks; this is
    the brute-force oracle for ``are_isomorphic`` on small quivers.
    """
    n = q1.n
    if n != q2.n:
        return None
    b1, b2 = q1.b, q2.b

    def vertex_inv(b, v):
        row = b[v]
        return (
            sum(1 for x in row if x < 0),
            sum(1 for x in row if x > 0),
            tuple(sorted(x for x in row if x)),
        )

    inv1 = [vertex_inv(b1, v) for v in range(n)]
    inv2 = [vertex_inv(b2, v) for v in range(n)]
    if sorted(inv1) != sorted(inv2):
        return None

    mapping = [-1] * n
    used = [False] * n

    def rec(i: int) -> bool:
        if i == n:
            return True
        for w in range(n):
            if used[w] or inv2[w] != inv1[i]:
                continue
            if all(b2[mapping[j]][w] == b1[j][i] for j in range(i)):
                mapping[i] = w
                used[w] = True
                if rec(i + 1):
                    return True
                used[w] = False
        mapping[i] = -1
        return False

    if rec(0):
        return tuple(mapping)
    return None
