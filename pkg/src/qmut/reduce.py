"""Constructive mutation sequences down to the standard quivers.

``linearize_piece`` turns a type-A class member into the linearly oriented
path without ever mutating at a chosen connecting vertex c, and leaves c at
the source end.  It follows the inductive structure of the class: peel a
valency-1 connecting vertex and, if its edge points the wrong way, flip the
whole chain by mutating along it; or split the triangle at a valency-2
connecting vertex, linearise both sides, and merge them by mutating down the
first side's chain.

``reduce_to_standard`` maps any type-D class member to a quiver isomorphic
to :func:`qmut.quiver.standard_d`, dispatching on the first classification
witness:

  Type I    linearise the piece away from c, then reorient the resulting
            tree (sink/source flips reach every orientation of a tree);
  Type II   linearise both pieces away from c and d, then mutate at d and
            down d's chain, which folds the two triangles into the fork,
            then reorient the tree;
  Type III  mutate at the witness vertex a, which yields a Type II quiver,
            and continue as Type II;
  Type IV   per spike, linearise the piece away from the apex and then
            mutate at the apex and down the chain, splicing the spike into
            the central cycle; once the quiver is the oriented n-cycle
            v0 -> v1 -> ... -> v_{n-1} -> v0, mutate at v0 .. v_{n-2}, the
            inverse of the sequence [n-2, ..., 1, 0] that turns the standard
            quiver into the oriented cycle.

All vertex labels are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .iso import canonical_form, permute
from .quiver import Quiver, components, linear_a, mutate, standard_d
from .recognize import (
    NotTypeAError,
    Witness,
    check_type_a,
    classify_type_d,
    connecting_vertices,
)

__all__ = [
    "NotConnectingError",
    "NotTypeDError",
    "MutationSequence",
    "linearize_piece",
    "reduce_to_standard",
    "Certificate",
    "certify",
]


class NotConnectingError(ValueError):
    """The chosen vertex is not a connecting vertex of the piece."""


class NotTypeDError(ValueError):
    """The quiver is not in the type-D mutation class."""


@dataclass(frozen=True)
class MutationSequence:
    """An ordered list of vertices to mutate at, with per-segment tags.

    ``provenance`` pairs a tag naming the construction step with the number
    of steps it contributed; the counts sum to ``len(steps)``.  Mutation is
    an involution, so replaying ``reversed(steps)`` undoes the sequence.
    """

    steps: tuple[int, ...]
    provenance: tuple[tuple[str, int], ...] = ()

    def __len__(self) -> int:
        return len(self.steps)


class _SeqBuilder:
    def __init__(self, Q: Quiver):
        self.state = Q
        self.steps: list[int] = []
        self.segments: list[tuple[str, int]] = []

    def apply(self, tag: str, steps: Iterable[int]) -> None:
        steps = list(steps)
        if not steps:
            return
        for v in steps:
            self.state = mutate(self.state, v)
        self.steps.extend(steps)
        self.segments.append((tag, len(steps)))

    def adopt(self, tag: str, steps: Sequence[int], new_state: Quiver) -> None:
        if steps:
            self.steps.extend(steps)
            self.segments.append((tag, len(steps)))
        self.state = new_state

    def sequence(self) -> MutationSequence:
        return MutationSequence(tuple(self.steps), tuple(self.segments))


def _split_on_cut_edge(
    Q: Quiver, keep: Sequence[int], cut: frozenset[int]
) -> list[tuple[int, ...]]:
    """Components of the subgraph induced on ``keep`` with one edge cut."""
    keep = sorted(keep)
    seen: set[int] = set()
    comps = []
    for s in keep:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in keep:
                if w in seen or Q.b[u][w] == 0:
                    continue
                if frozenset((u, w)) == cut:
                    continue
                seen.add(w)
                comp.append(w)
                stack.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def _linearize(
    Q: Quiver, piece: Iterable[int], c: int
) -> tuple[Quiver, list[int], list[int]]:
    """Linearise the induced type-A piece inside the ambient quiver.

    Mutates only at piece vertices other than c.  Returns the new ambient
    quiver, the steps taken, and the piece vertices in final chain order
    (c first, arrows running away from it).
    """
    S = tuple(sorted(set(piece)))
    if len(S) == 1:
        return Q, [], [c]
    nbrs = [w for w in S if w != c and Q.b[c][w] != 0]
    if len(nbrs) == 1:
        c1 = nbrs[0]
        rest = tuple(v for v in S if v != c)
        Q1, seq1, order1 = _linearize(Q, rest, c1)
        if Q1.b[c][c1] > 0:
            return Q1, seq1, [c] + order1
        # wrong edge orientation: flip the whole chain by mutating along it
        steps = list(order1)
        for v in steps:
            Q1 = mutate(Q1, v)
        return Q1, seq1 + steps, [c] + order1
    if len(nbrs) != 2:
        raise AssertionError(
            f"connecting vertex {c} has valency {len(nbrs)} in its piece"
        )
    u, w = nbrs
    if Q.b[u][c] > 0:
        c_in, c_out = u, w
    else:
        c_in, c_out = w, u
    if not (Q.b[c][c_out] > 0 and Q.b[c_out][c_in] > 0):
        raise AssertionError(f"vertex {c} is not on an oriented triangle")
    rest = [v for v in S if v != c]
    comps = _split_on_cut_edge(Q, rest, frozenset((c_in, c_out)))
    if len(comps) != 2:
        raise AssertionError("cutting the triangle must split the piece in two")
    side_in = next(comp for comp in comps if c_in in comp)
    side_out = next(comp for comp in comps if c_out in comp)
    if side_in == side_out:
        raise AssertionError("triangle neighbours ended up on the same side")
    Q1, seq1, order1 = _linearize(Q, side_in, c_in)
    Q2, seq2, order2 = _linearize(Q1, side_out, c_out)
    # merge: mutate at c_in and then down its chain
    steps = list(order1)
    for v in steps:
        Q2 = mutate(Q2, v)
    return Q2, seq1 + seq2 + steps, [c] + order1 + order2


def linearize_piece(
    piece: Quiver, c: int
) -> tuple[MutationSequence, tuple[int, ...]]:
    """Mutate a type-A class member into the linear path, avoiding c.

    Returns the sequence (which never contains c) and the relabelling that
    carries the mutated quiver onto :func:`qmut.quiver.linear_a` exactly,
    with c at the source.
    """
    report = check_type_a(piece)
    if not report.verdict:
        raise NotTypeAError(f"not a type-A class member: {report.failures}")
    if c not in connecting_vertices(piece):
        raise NotConnectingError(f"vertex {c} is not connecting for this piece")
    final, steps, order = _linearize(piece, range(piece.n), c)
    relab = [0] * piece.n
    for pos, v in enumerate(order):
        relab[v] = pos
    if permute(final, relab) != linear_a(piece.n):
        raise AssertionError("linearisation did not produce the linear path")
    provenance = (("type-a-piece", len(steps)),) if steps else ()
    return MutationSequence(tuple(steps), provenance), tuple(relab)


def _flip_moves(Q: Quiver) -> list[int]:
    """Vertices whose arrows all point one way (mutation just reverses them)."""
    moves = []
    for v in range(Q.n):
        row = Q.b[v]
        has_in = any(x < 0 for x in row)
        has_out = any(x > 0 for x in row)
        if has_in != has_out:
            moves.append(v)
    return moves


def _reorient_tree(Q: Quiver, target_key: bytes) -> tuple[list[int], Quiver]:
    """Shortest sink/source flip sequence into the target isomorphism class.

    Works on tree-underlying quivers, where sink and source mutations are
    plain arrow reversals and reach every orientation.
    """
    n = Q.n
    edge_count = sum(
        1 for i in range(n) for j in range(i + 1, n) if Q.b[i][j] != 0
    )
    if edge_count != n - 1 or len(components(Q)) != 1:
        raise AssertionError("tree reorientation needs a tree-underlying quiver")
    if canonical_form(Q).key == target_key:
        return [], Q
    prev: dict[Quiver, Optional[tuple[Quiver, int]]] = {Q: None}
    frontier = [Q]
    while frontier:
        nxt = []
        for state in frontier:
            for v in _flip_moves(state):
                new = mutate(state, v)
                if new in prev:
                    continue
                prev[new] = (state, v)
                if canonical_form(new).key == target_key:
                    steps = []
                    cur: Quiver = new
                    while prev[cur] is not None:
                        parent, mv = prev[cur]  # type: ignore[misc]
                        steps.append(mv)
                        cur = parent
                    steps.reverse()
                    return steps, new
                nxt.append(new)
        frontier = nxt
    raise AssertionError("tree reorientation target unreachable")


def _reduce_from_type_ii(builder: _SeqBuilder, w) -> None:
    state, steps_c, _order_c = _linearize(builder.state, w.piece_c, w.c)
    builder.adopt("type-a-piece", steps_c, state)
    state, steps_d, order_d = _linearize(builder.state, w.piece_d, w.d)
    builder.adopt("type-a-piece", steps_d, state)
    # fold the shared-arrow triangles into the fork: d, then down d's chain
    builder.apply("shared-arrow-tail", order_d)
    target = canonical_form(standard_d(builder.state.n)).key
    tsteps, tstate = _reorient_tree(builder.state, target)
    builder.adopt("tree-reorient", tsteps, tstate)


def _reduce_from_type_iv(builder: _SeqBuilder, w, spike_order: Iterable[int]) -> None:
    for idx in spike_order:
        spike = w.spikes[idx]
        state, steps_p, order_p = _linearize(
            builder.state, spike.piece, spike.apex
        )
        builder.adopt("type-a-piece", steps_p, state)
        # splice the spike into the central cycle: apex, then down the chain
        builder.apply("spike-collapse", order_p)
    state = builder.state
    n = state.n
    succ = {}
    for i in range(n):
        outs = [j for j in range(n) if state.b[i][j] > 0]
        ins = [j for j in range(n) if state.b[i][j] < 0]
        if len(outs) != 1 or len(ins) != 1:
            raise AssertionError("spike collapse did not yield an oriented cycle")
        succ[i] = outs[0]
    cycle = [0]
    while len(cycle) < n:
        cycle.append(succ[cycle[-1]])
    if succ[cycle[-1]] != 0:
        raise AssertionError("spike collapse did not yield a single n-cycle")
    builder.apply("cycle-to-fork", cycle[:-1])


def reduce_to_standard(Q: Quiver, _spike_order: Optional[Sequence[int]] = None) -> MutationSequence:
    """A mutation sequence from Q to a quiver isomorphic to the fork quiver.

    Dispatches on the first classification witness.  ``_spike_order`` is a
    testing hook: a permutation of spike indices for Type IV reductions,
    which by default run in central-cycle order.
    """
    witnesses = classify_type_d(Q)
    if not witnesses:
        raise NotTypeDError("not a type-D mutation-class member")
    w = witnesses[0]
    builder = _SeqBuilder(Q)
    if w.kind == "I":
        state, steps, _order = _linearize(builder.state, w.piece, w.c)
        builder.adopt("type-a-piece", steps, state)
        target = canonical_form(standard_d(Q.n)).key
        tsteps, tstate = _reorient_tree(builder.state, target)
        builder.adopt("tree-reorient", tsteps, tstate)
    elif w.kind == "II":
        _reduce_from_type_ii(builder, w)
    elif w.kind == "III":
        builder.apply("four-cycle-corner", [w.a])
        inner = classify_type_d(builder.state)
        if not inner or inner[0].kind != "II":
            raise AssertionError("mutating a Type III corner must give Type II")
        _reduce_from_type_ii(builder, inner[0])
    else:
        order = list(_spike_order) if _spike_order is not None else list(
            range(len(w.spikes))
        )
        if sorted(order) != list(range(len(w.spikes))):
            raise ValueError("spike order must be a permutation of the spikes")
        _reduce_from_type_iv(builder, w, order)
    final_key = canonical_form(builder.state).key
    if final_key != canonical_form(standard_d(Q.n)).key:
        raise AssertionError("reduction did not reach the standard quiver")
    return builder.sequence()


@dataclass(frozen=True)
class Certificate:
    """A checkable reduction: witness, sequence, and the final relabelling.

    Applying ``sequence`` to the certified quiver and then ``relabeling``
    yields :func:`qmut.quiver.standard_d` exactly.
    """

    witness: Witness
    sequence: MutationSequence
    relabeling: tuple[int, ...]


def certify(Q: Quiver) -> Certificate:
    """Classify, reduce, and return the isomorphism onto the fork quiver."""
    witnesses = classify_type_d(Q)
    if not witnesses:
        raise NotTypeDError("not a type-D mutation-class member")
    seq = reduce_to_standard(Q)
    final = Q
    for v in seq.steps:
        final = mutate(final, v)
    cf = canonical_form(final)
    cs = canonical_form(standard_d(Q.n))
    if cf.key != cs.key:
        raise AssertionError("certificate does not reach the standard quiver")
    inv_cs = [0] * Q.n
    for old, new in enumerate(cs.relabeling):
        inv_cs[new] = old
    relab = tuple(inv_cs[cf.relabeling[v]] for v in range(Q.n))
    if permute(final, relab) != standard_d(Q.n):
        raise AssertionError("certificate relabelling is wrong")
    return Certificate(witness=witnesses[0], sequence=seq, relabeling=relab)
