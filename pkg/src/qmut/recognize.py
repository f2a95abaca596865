"""Structural recognition of type-A and type-D mutation-class members.

A connected quiver with simple arrows belongs to the type-A mutation class
exactly when

  * every cycle of the underlying graph is oriented and has length 3,
  * no vertex has more than four neighbours,
  * a four-valent vertex has its four arrows split two/two between two
    triangles,
  * a three-valent vertex has two arrows on a triangle and its third arrow
    on no triangle.

``check_type_a`` reports these conditions with witnesses.  A *connecting
vertex* of such a quiver is a vertex of valency at most 2 which, when
two-valent, lies on a triangle; connecting vertices are where type-A pieces
may be glued onto a larger quiver.

``classify_type_d`` searches a quiver for the four gluing patterns that make
up the mutation class of the fork quiver :func:`qmut.quiver.standard_d`:

  Type I    two pendant vertices a, b attached to the same vertex c of a
            type-A piece on the remaining vertices, with c connecting;
  Type II   two triangles sharing one arrow d -> c, the off-arrow vertices
            a, b two-valent, and deleting a, b and the shared arrow leaves
            exactly a type-A piece at c and one at d (c, d connecting);
  Type III  a chordless directed 4-cycle c -> a -> d -> b -> c with a, b
            two-valent, deleting a, b again leaving type-A pieces at c and
            at d;
  Type IV   a chordless directed central cycle, each central arrow a -> b
            optionally carrying a spike (an oriented triangle a -> b -> z -> a
            with apex z off the cycle), no other arrows at central vertices,
            and the off-cycle part splitting into one type-A piece per spike
            with the apex connecting.

A quiver may match several patterns at once (the directed 4-cycle is both
Type III and a spikeless Type IV), so the classifier returns every witness,
ordered Type I to Type IV and lexicographically within a type.  Callers that
need one verdict take the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Union

from .quiver import (
    Quiver,
    components,
    full_subquiver,
    iter_undirected_cycles,
    valency,
)

__all__ = [
    "NotTypeAError",
    "TypeAFailure",
    "TypeAReport",
    "check_type_a",
    "connecting_vertices",
    "is_simple",
    "TypeIWitness",
    "TypeIIWitness",
    "TypeIIIWitness",
    "TypeIVWitness",
    "Spike",
    "Witness",
    "classify_type_d",
    "validate_witness",
]


class NotTypeAError(ValueError):
    """The quiver is not in the type-A mutation class."""


@dataclass(frozen=True)
class TypeAFailure:
    """One violated membership condition plus the vertices that witness it.

    ``condition`` is one of ``disconnected``, ``multiple-arrow``, ``cycle``,
    ``valency``, ``valency4``, ``valency3``.
    """

    condition: str
    witness: tuple[int, ...]


@dataclass(frozen=True)
class TypeAReport:
    verdict: bool
    failures: tuple[TypeAFailure, ...]


def is_simple(Q: Quiver) -> bool:
    """True when no pair of vertices carries more than one arrow."""
    return all(abs(x) <= 1 for row in Q.b for x in row)


def _edge(Q: Quiver, x: int, y: int) -> bool:
    return Q.b[x][y] != 0


def check_type_a(Q: Quiver) -> TypeAReport:
    """Decide type-A mutation-class membership by the local conditions."""
    failures: list[TypeAFailure] = []
    comps = components(Q)
    if len(comps) != 1:
        failures.append(
            TypeAFailure("disconnected", tuple(c[0] for c in comps))
        )
    for i in range(Q.n):
        for j in range(i + 1, Q.n):
            if abs(Q.b[i][j]) > 1:
                failures.append(TypeAFailure("multiple-arrow", (i, j)))
    for cyc in iter_undirected_cycles(Q):
        if not (cyc.oriented and cyc.length == 3):
            failures.append(TypeAFailure("cycle", cyc.vertices))
    for v in range(Q.n):
        nbrs = Q.neighbours(v)
        val = len(nbrs)
        if val > 4:
            failures.append(TypeAFailure("valency", (v,)))
        elif val == 4:
            u = nbrs
            pairings = (
                ((u[0], u[1]), (u[2], u[3])),
                ((u[0], u[2]), (u[1], u[3])),
                ((u[0], u[3]), (u[1], u[2])),
            )
            if not any(
                _edge(Q, p[0], p[1]) and _edge(Q, q[0], q[1])
                for p, q in pairings
            ):
                failures.append(TypeAFailure("valency4", (v,)))
        elif val == 3:
            ok = False
            for k in range(3):
                third = nbrs[k]
                x, y = (nbrs[i] for i in range(3) if i != k)
                if (
                    _edge(Q, x, y)
                    and not _edge(Q, third, x)
                    and not _edge(Q, third, y)
                ):
                    ok = True
                    break
            if not ok:
                failures.append(TypeAFailure("valency3", (v,)))
    return TypeAReport(verdict=not failures, failures=tuple(failures))


def connecting_vertices(Q: Quiver) -> tuple[int, ...]:
    """Connecting vertices of a type-A class member.

    Valency at most 1, or valency 2 on a triangle.  Raises
    :class:`NotTypeAError` when ``check_type_a`` fails.
    """
    report = check_type_a(Q)
    if not report.verdict:
        raise NotTypeAError(f"not a type-A class member: {report.failures}")
    out = []
    for v in range(Q.n):
        nbrs = Q.neighbours(v)
        if len(nbrs) <= 1:
            out.append(v)
        elif len(nbrs) == 2 and _edge(Q, nbrs[0], nbrs[1]):
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class TypeIWitness:
    a: int
    b: int
    c: int
    piece: tuple[int, ...]

    kind = "I"


@dataclass(frozen=True)
class TypeIIWitness:
    a: int
    b: int
    c: int
    d: int
    piece_c: tuple[int, ...]
    piece_d: tuple[int, ...]

    kind = "II"


@dataclass(frozen=True)
class TypeIIIWitness:
    a: int
    b: int
    c: int
    d: int
    piece_c: tuple[int, ...]
    piece_d: tuple[int, ...]

    kind = "III"


@dataclass(frozen=True)
class Spike:
    """Oriented triangle arrow[0] -> arrow[1] -> apex -> arrow[0] hanging on
    a central arrow, together with the type-A piece grown from the apex."""

    arrow: tuple[int, int]
    apex: int
    piece: tuple[int, ...]


@dataclass(frozen=True)
class TypeIVWitness:
    central: tuple[int, ...]
    spikes: tuple[Spike, ...]

    kind = "IV"

    @property
    def central_length(self) -> int:
        return len(self.central)


Witness = Union[TypeIWitness, TypeIIWitness, TypeIIIWitness, TypeIVWitness]


def _piece_ok(Q: Quiver, piece: Iterable[int], conn: int) -> bool:
    """The induced subquiver is a type-A class member with conn connecting."""
    vs = sorted(piece)
    sub = full_subquiver(Q, vs)
    if not check_type_a(sub).verdict:
        return False
    return vs.index(conn) in connecting_vertices(sub)


def _components_without(
    Q: Quiver, removed: set[int], cut_edges: frozenset[frozenset[int]] = frozenset()
) -> list[tuple[int, ...]]:
    """Components of the underlying graph after deleting vertices and edges."""
    keep = [v for v in range(Q.n) if v not in removed]
    seen: set[int] = set()
    out = []
    for s in keep:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in keep:
                if (
                    w not in seen
                    and Q.b[u][w] != 0
                    and frozenset((u, w)) not in cut_edges
                ):
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(tuple(sorted(comp)))
    return out


def _search_type_i(Q: Quiver) -> list[TypeIWitness]:
    n = Q.n
    leaves_at: dict[int, list[int]] = {}
    for v in range(n):
        nbrs = Q.neighbours(v)
        if len(nbrs) == 1:
            leaves_at.setdefault(nbrs[0], []).append(v)
    out = []
    for c, leaves in leaves_at.items():
        for a, b in combinations(sorted(leaves), 2):
            piece = tuple(v for v in range(n) if v not in (a, b))
            if _piece_ok(Q, piece, c):
                out.append(TypeIWitness(a, b, c, piece))
    out.sort(key=lambda w: (w.a, w.b, w.c))
    return out


def _split_two_pieces(Q, removed, cut_edges, c, d):
    """Exactly two components with c and d separated, or None."""
    comps = _components_without(Q, removed, cut_edges)
    if len(comps) != 2:
        return None
    comp_c = next((comp for comp in comps if c in comp), None)
    comp_d = next((comp for comp in comps if d in comp), None)
    if comp_c is None or comp_d is None or comp_c == comp_d:
        return None
    return comp_c, comp_d


def _search_type_ii(Q: Quiver) -> list[TypeIIWitness]:
    n = Q.n
    out = []
    for d in range(n):
        for c in range(n):
            if Q.b[d][c] != 1:
                continue
            hooks = [
                x
                for x in range(n)
                if x not in (c, d)
                and Q.b[c][x] == 1
                and Q.b[x][d] == 1
                and valency(Q, x) == 2
            ]
            for a, b in combinations(sorted(hooks), 2):
                split = _split_two_pieces(
                    Q, {a, b}, frozenset((frozenset((c, d)),)), c, d
                )
                if split is None:
                    continue
                comp_c, comp_d = split
                if _piece_ok(Q, comp_c, c) and _piece_ok(Q, comp_d, d):
                    out.append(TypeIIWitness(a, b, c, d, comp_c, comp_d))
    out.sort(key=lambda w: (w.a, w.b, w.c, w.d))
    return out


def _search_type_iii(Q: Quiver) -> list[TypeIIIWitness]:
    n = Q.n
    out = []
    seen: set[tuple[int, int, int, int]] = set()
    for c in range(n):
        for a in range(n):
            if Q.b[c][a] != 1:
                continue
            for d in range(n):
                if d in (a, c) or Q.b[a][d] != 1:
                    continue
                for b in range(n):
                    if b in (a, c, d) or Q.b[d][b] != 1 or Q.b[b][c] != 1:
                        continue
                    # chordless and nothing else at a, b
                    if Q.b[c][d] != 0 or Q.b[a][b] != 0:
                        continue
                    if valency(Q, a) != 2 or valency(Q, b) != 2:
                        continue
                    key = (a, b, c, d) if a < b else (b, a, d, c)
                    if key in seen:
                        continue
                    seen.add(key)
                    a_, b_, c_, d_ = key
                    split = _split_two_pieces(Q, {a_, b_}, frozenset(), c_, d_)
                    if split is None:
                        continue
                    comp_c, comp_d = split
                    if _piece_ok(Q, comp_c, c_) and _piece_ok(Q, comp_d, d_):
                        out.append(
                            TypeIIIWitness(a_, b_, c_, d_, comp_c, comp_d)
                        )
    out.sort(key=lambda w: (w.a, w.b, w.c, w.d))
    return out


def _directed_chordless_cycles(Q: Quiver) -> list[tuple[int, ...]]:
    """Directed cycles (length >= 3) that are full subquivers, rooted at
    their smallest vertex."""
    n = Q.n
    b = Q.b
    found = []

    def extend(s: int, path: list[int], onpath: set[int]) -> None:
        u = path[-1]
        for w in range(n):
            if b[u][w] != 1:
                continue
            if w == s and len(path) >= 3:
                verts = tuple(path)
                inside = sum(
                    1
                    for x in verts
                    for y in verts
                    if b[x][y] > 0
                )
                if inside == len(verts):
                    found.append(verts)
            elif w > s and w not in onpath:
                path.append(w)
                onpath.add(w)
                extend(s, path, onpath)
                path.pop()
                onpath.remove(w)

    for s in range(n):
        extend(s, [s], {s})
    found.sort()
    return found


def _search_type_iv(Q: Quiver) -> list[TypeIVWitness]:
    n = Q.n
    b = Q.b
    out = []
    for central in _directed_chordless_cycles(Q):
        k = len(central)
        central_set = set(central)
        spikes_raw = []
        ok = True
        for i in range(k):
            x, y = central[i], central[(i + 1) % k]
            apexes = [
                z
                for z in range(n)
                if z not in central_set and b[y][z] == 1 and b[z][x] == 1
            ]
            if len(apexes) > 1:
                ok = False
                break
            if apexes:
                spikes_raw.append((i, x, y, apexes[0]))
        if not ok:
            continue
        apexes = [z for (_, _, _, z) in spikes_raw]
        if len(set(apexes)) != len(apexes):
            continue
        allowed = {
            (central[i], central[(i + 1) % k]) for i in range(k)
        }
        for _, x, y, z in spikes_raw:
            allowed.add((y, z))
            allowed.add((z, x))
        for v in central:
            row = b[v]
            bad = False
            for w in range(n):
                if row[w] > 0 and (v, w) not in allowed:
                    bad = True
                    break
                if row[w] < 0 and (w, v) not in allowed:
                    bad = True
                    break
            if bad:
                ok = False
                break
        if not ok:
            continue
        rest = [v for v in range(n) if v not in central_set]
        comps = _components_without(Q, central_set)
        if len(comps) != len(spikes_raw):
            continue
        if sorted(v for comp in comps for v in comp) != rest:
            continue
        spikes = []
        for i, x, y, z in spikes_raw:
            comp = next((c for c in comps if z in c), None)
            if comp is None:
                ok = False
                break
            others = [w for (_, _, _, w) in spikes_raw if w != z]
            if any(w in comp for w in others):
                ok = False
                break
            if not _piece_ok(Q, comp, z):
                ok = False
                break
            spikes.append(Spike((x, y), z, comp))
        if not ok:
            continue
        out.append(TypeIVWitness(central, tuple(spikes)))
    out.sort(key=lambda w: w.central)
    return out


def classify_type_d(Q: Quiver) -> tuple[Witness, ...]:
    """All Type I-IV witnesses of Q, in search order I, II, III, IV.

    An empty result means Q is not in the type-D mutation class.  The type
    grammar presumes at least four vertices, a connected quiver, and simple
    arrows; anything else classifies as empty.
    """
    if Q.n < 4 or not is_simple(Q) or len(components(Q)) != 1:
        return ()
    out: list[Witness] = []
    out.extend(_search_type_i(Q))
    out.extend(_search_type_ii(Q))
    out.extend(_search_type_iii(Q))
    out.extend(_search_type_iv(Q))
    return tuple(out)


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise AssertionError(msg)


def validate_witness(Q: Quiver, w: Witness) -> None:
    """Re-derive every invariant a witness asserts; raise on any failure.

    Deliberately written as direct condition checks, independent of the
    search routines, so tests can cross-examine the searcher's output.
    """
    n = Q.n
    if isinstance(w, TypeIWitness):
        _check(sorted((w.a, w.b) + tuple(w.piece)) == list(range(n)),
               "Type I vertex sets must partition the quiver")
        _check(w.c in w.piece and w.c not in (w.a, w.b), "c must lie in the piece")
        for leaf in (w.a, w.b):
            nbrs = Q.neighbours(leaf)
            _check(nbrs == (w.c,), f"{leaf} must be pendant on c")
            _check(abs(Q.b[leaf][w.c]) == 1, "leaf arrow must be simple")
        _check(_piece_ok(Q, w.piece, w.c), "piece must be type A with c connecting")
    elif isinstance(w, (TypeIIWitness, TypeIIIWitness)):
        _check(
            sorted((w.a, w.b) + tuple(w.piece_c) + tuple(w.piece_d))
            == list(range(n)),
            "vertex sets must partition the quiver",
        )
        _check(w.c in w.piece_c and w.d in w.piece_d, "c, d must sit in their pieces")
        quad = sorted((w.a, w.b, w.c, w.d))
        sub = full_subquiver(Q, quad)
        pos = {v: quad.index(v) for v in (w.a, w.b, w.c, w.d)}
        if isinstance(w, TypeIIWitness):
            expect = {
                (pos[w.d], pos[w.c]),
                (pos[w.c], pos[w.a]),
                (pos[w.a], pos[w.d]),
                (pos[w.c], pos[w.b]),
                (pos[w.b], pos[w.d]),
            }
            cut = frozenset((frozenset((w.c, w.d)),))
        else:
            expect = {
                (pos[w.c], pos[w.a]),
                (pos[w.a], pos[w.d]),
                (pos[w.d], pos[w.b]),
                (pos[w.b], pos[w.c]),
            }
            cut = frozenset()
        got = {(a.tail, a.head) for a in sub.arrows()}
        _check(got == expect, "local picture on {a,b,c,d} is wrong")
        _check(all(abs(x) <= 1 for row in sub.b for x in row), "local arrows simple")
        _check(valency(Q, w.a) == 2 and valency(Q, w.b) == 2,
               "a and b must be two-valent in Q")
        comps = _components_without(Q, {w.a, w.b}, cut)
        _check(sorted(comps) == sorted((w.piece_c, w.piece_d)),
               "deletion must leave exactly the two pieces")
        _check(_piece_ok(Q, w.piece_c, w.c), "c piece must be type A, c connecting")
        _check(_piece_ok(Q, w.piece_d, w.d), "d piece must be type A, d connecting")
    elif isinstance(w, TypeIVWitness):
        k = len(w.central)
        _check(k >= 3, "central cycle must have length >= 3")
        piece_verts = [v for s in w.spikes for v in s.piece]
        _check(sorted(tuple(w.central) + tuple(piece_verts)) == list(range(n)),
               "central cycle and pieces must partition the quiver")
        for i in range(k):
            x, y = w.central[i], w.central[(i + 1) % k]
            _check(Q.b[x][y] == 1, "central cycle arrows must be simple and present")
        sub = full_subquiver(Q, w.central)
        _check(sub.arrow_count() == k, "central cycle must be chordless")
        central_arrows = {(w.central[i], w.central[(i + 1) % k]) for i in range(k)}
        allowed = set(central_arrows)
        for s in w.spikes:
            x, y = s.arrow
            _check((x, y) in central_arrows, "spike must sit on a central arrow")
            _check(s.apex in s.piece and s.apex not in w.central,
                   "apex must be an off-cycle piece vertex")
            _check(Q.b[y][s.apex] == 1 and Q.b[s.apex][x] == 1,
                   "spike triangle arrows must be present and simple")
            allowed.add((y, s.apex))
            allowed.add((s.apex, x))
        for v in w.central:
            for u in range(n):
                if Q.b[v][u] > 0:
                    _check((v, u) in allowed, "extra arrow at a central vertex")
                elif Q.b[v][u] < 0:
                    _check((u, v) in allowed, "extra arrow at a central vertex")
        comps = _components_without(Q, set(w.central))
        _check(sorted(comps) == sorted(s.piece for s in w.spikes),
               "pieces must be exactly the off-cycle components")
        for s in w.spikes:
            _check(_piece_ok(Q, s.piece, s.apex),
                   "each piece must be type A with its apex connecting")
    else:
        raise TypeError(f"unknown witness type: {type(w)!r}")
