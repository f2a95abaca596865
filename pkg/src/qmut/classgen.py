"""Mutation-class enumeration, grammar generation, and cross-validation.

``enumerate_class`` runs a breadth-first search over mutations, deduplicating
by canonical key, so the member set is the mutation class of the seed up to
isomorphism.  ``generate_type_d`` assembles the same class constructively
from the Type I-IV grammar (pieces drawn from enumerated type-A classes),
and ``cross_validate`` compares the two key sets and checks closure of the
classifier under single mutations.  ``transition_table`` tabulates how the
classified type changes when mutating at each structural role, which makes
the case analysis behind the classification empirically checkable.

The BFS frontier can be expanded by a thread pool; the QMUT_THREADS
environment variable (or the ``threads`` argument) bounds the pool size.
Results are deduplicated under a single lock-free merge step per level, so
member sets are identical for serial and parallel runs.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .iso import CanonicalQuiver, canonical_form
from .quiver import (
    Quiver,
    build_quiver,
    linear_a,
    mutate,
    oriented_cycle,
    standard_d,
)
from .recognize import (
    TypeIVWitness,
    Witness,
    check_type_a,
    classify_type_d,
    connecting_vertices,
)

__all__ = [
    "CapExceededError",
    "MutationClass",
    "enumerate_class",
    "generate_type_a",
    "generate_type_d",
    "GenReport",
    "cross_validate",
    "TransitionRow",
    "transition_table",
]

DEFAULT_CAP = 10**6


class CapExceededError(RuntimeError):
    """Enumeration hit the member cap before reaching a fixpoint."""


@dataclass
class MutationClass:
    """A mutation class enumerated up to isomorphism.

    ``members`` maps canonical keys to canonical representatives.  When
    ``exhausted`` is true the set is closed under mutation.  ``edges``
    (optional) records the mutation graph as (member key, vertex) -> key.
    """

    seed: Quiver
    members: dict[bytes, CanonicalQuiver]
    exhausted: bool
    edges: Optional[dict[tuple[bytes, int], bytes]] = None

    @property
    def size(self) -> int:
        return len(self.members)


def _thread_count(threads: Optional[int]) -> int:
    if threads is None:
        raw = os.environ.get("QMUT_THREADS", "")
        try:
            threads = int(raw) if raw else 1
        except ValueError:
            threads = 1
    return max(1, threads)


def _expand(cq: CanonicalQuiver) -> list[tuple[int, CanonicalQuiver]]:
    Q = cq.quiver
    return [(v, canonical_form(mutate(Q, v))) for v in range(Q.n)]


def enumerate_class(
    seed: Quiver,
    cap: int = DEFAULT_CAP,
    record_edges: bool = False,
    threads: Optional[int] = None,
) -> MutationClass:
    """BFS of the mutation class of ``seed``, deduplicated by canonical key.

    Stops at a fixpoint, or earlier with ``exhausted=False`` once ``cap``
    members have been collected.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    nthreads = _thread_count(threads)
    start = canonical_form(seed)
    members: dict[bytes, CanonicalQuiver] = {start.key: start}
    edges: Optional[dict[tuple[bytes, int], bytes]] = {} if record_edges else None
    frontier = [start]
    pool = ThreadPoolExecutor(max_workers=nthreads) if nthreads > 1 else None
    try:
        while frontier:
            if pool is not None:
                expansions = list(pool.map(_expand, frontier))
            else:
                expansions = [_expand(cq) for cq in frontier]
            nxt: list[CanonicalQuiver] = []
            for cq, expansion in zip(frontier, expansions):
                for v, mc in expansion:
                    if edges is not None:
                        edges[(cq.key, v)] = mc.key
                    if mc.key not in members:
                        if len(members) >= cap:
                            return MutationClass(seed, members, False, edges)
                        members[mc.key] = mc
                        nxt.append(mc)
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    return MutationClass(seed, members, True, edges)


def generate_type_a(
    k: int, cap: int = DEFAULT_CAP, threads: Optional[int] = None
) -> dict[bytes, CanonicalQuiver]:
    """The type-A mutation class on k vertices, keyed by canonical key.

    Defined as the enumerated class of the linear path; every member is
    additionally required to pass ``check_type_a`` as a consistency gate.
    """
    cls = enumerate_class(linear_a(k), cap=cap, threads=threads)
    if not cls.exhausted:
        raise CapExceededError(f"type-A class for k={k} exceeded cap {cap}")
    for cq in cls.members.values():
        if not check_type_a(cq.quiver).verdict:
            raise AssertionError(
                f"enumerated type-A member fails the membership conditions: {cq.quiver!r}"
            )
    return cls.members


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """Ordered compositions of ``total`` into ``parts`` positive parts."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cuts in combinations(range(1, total), parts - 1):
        prev = 0
        comp = []
        for c in cuts + (total,):
            comp.append(c - prev)
            prev = c
        yield tuple(comp)


def _shift_arrows(Q: Quiver, offset: int) -> list[tuple[int, int, int]]:
    return [(a.tail + offset, a.head + offset, a.multiplicity) for a in Q.arrows()]


def generate_type_d(
    n: int, cap: int = DEFAULT_CAP, threads: Optional[int] = None
) -> dict[bytes, CanonicalQuiver]:
    """Constructive assembly of the type-D class from the Type I-IV grammar.

    Pieces are drawn from enumerated type-A classes and glued at connecting
    vertices in every admissible way; over-generation is harmless because the
    output is deduplicated by canonical key.  Every assembled quiver must
    classify as some type, as a self-check.
    """
    if n < 4:
        raise ValueError("the type-D class is defined for n >= 4")
    pieces: dict[int, dict[bytes, CanonicalQuiver]] = {
        k: generate_type_a(k, cap=cap, threads=threads) for k in range(1, n - 1)
    }
    conn: dict[bytes, tuple[int, ...]] = {}
    for k in pieces:
        for key, cq in pieces[k].items():
            conn[key] = connecting_vertices(cq.quiver)

    out: dict[bytes, CanonicalQuiver] = {}

    def add(q: Quiver) -> None:
        cq = canonical_form(q)
        if cq.key in out:
            return
        if not classify_type_d(q):
            raise AssertionError(f"assembled quiver fails classification: {q!r}")
        out[cq.key] = cq

    # Type I: pendant pair a, b on a connecting vertex of an (n-2)-piece.
    a, b = n - 2, n - 1
    for key, cq in pieces[n - 2].items():
        base = _shift_arrows(cq.quiver, 0)
        for c in conn[key]:
            for a_out in (True, False):
                for b_out in (True, False):
                    arrows = list(base)
                    arrows.append((c, a, 1) if a_out else (a, c, 1))
                    arrows.append((c, b, 1) if b_out else (b, c, 1))
                    add(build_quiver(n, arrows))

    # Types II and III: two pieces bridged through a, b.
    for p in range(1, n - 2):
        q_size = n - 2 - p
        for key_c, cq_c in pieces[p].items():
            for key_d, cq_d in pieces[q_size].items():
                arrows_c = _shift_arrows(cq_c.quiver, 0)
                arrows_d = _shift_arrows(cq_d.quiver, p)
                for c in conn[key_c]:
                    for d0 in conn[key_d]:
                        d = d0 + p
                        common = arrows_c + arrows_d
                        add(
                            build_quiver(
                                n,
                                common
                                + [(d, c, 1), (c, a, 1), (a, d, 1), (c, b, 1), (b, d, 1)],
                            )
                        )
                        add(
                            build_quiver(
                                n,
                                common
                                + [(c, a, 1), (a, d, 1), (d, b, 1), (b, c, 1)],
                            )
                        )

    # Type IV: central cycle with optional spikes.
    add(oriented_cycle(n))
    for k in range(3, n):
        rest = n - k
        cycle_arrows = [(i, (i + 1) % k, 1) for i in range(k)]
        for s in range(1, k + 1):
            for spike_arrows in combinations(range(k), s):
                for sizes in _compositions(rest, s):
                    choices: list[list[tuple[list, int]]] = []
                    for size in sizes:
                        opts = []
                        for key_p, cq_p in pieces[size].items():
                            for cp in conn[key_p]:
                                opts.append((cq_p.quiver, cp))
                        choices.append(opts)

                    def assemble(idx: int, offset: int, acc: list) -> None:
                        if idx == len(sizes):
                            add(build_quiver(n, cycle_arrows + acc))
                            return
                        for piece_q, cp in choices[idx]:
                            i = spike_arrows[idx]
                            x, y = i, (i + 1) % k
                            apex = cp + offset
                            extra = _shift_arrows(piece_q, offset)
                            extra.append((y, apex, 1))
                            extra.append((apex, x, 1))
                            assemble(idx + 1, offset + piece_q.n, acc + extra)

                    assemble(0, k, [])
    return out


@dataclass
class GenReport:
    """Comparison of the enumerated and grammar-generated type-D classes."""

    n: int
    bfs_size: int
    grammar_size: int
    match: bool
    only_bfs: tuple[bytes, ...]
    only_grammar: tuple[bytes, ...]
    closure_ok: bool = True
    closure_failures: tuple[tuple[bytes, int], ...] = ()


def cross_validate(
    n: int, cap: int = DEFAULT_CAP, threads: Optional[int] = None
) -> GenReport:
    """Compare BFS class of the fork quiver with the grammar-generated set.

    Also checks closure: every single mutation of every enumerated member
    must classify as some type.  Raises :class:`CapExceededError` when the
    BFS does not reach a fixpoint within ``cap``.
    """
    if n < 4:
        raise ValueError("cross-validation is defined for n >= 4")
    cls = enumerate_class(standard_d(n), cap=cap, threads=threads)
    if not cls.exhausted:
        raise CapExceededError(f"class of standard_d({n}) exceeded cap {cap}")
    gen = generate_type_d(n, cap=cap, threads=threads)
    only_bfs = tuple(sorted(set(cls.members) - set(gen)))
    only_grammar = tuple(sorted(set(gen) - set(cls.members)))
    match = not only_bfs and not only_grammar and len(cls.members) == len(gen)

    verdict_memo: dict[bytes, bool] = {
        key: bool(classify_type_d(cq.quiver)) for key, cq in cls.members.items()
    }
    failures = []
    for key, cq in cls.members.items():
        Q = cq.quiver
        for v in range(n):
            mutated = mutate(Q, v)
            mkey = canonical_form(mutated).key
            ok = verdict_memo.get(mkey)
            if ok is None:
                ok = bool(classify_type_d(mutated))
                verdict_memo[mkey] = ok
            if not ok:
                failures.append((key, v))
    return GenReport(
        n=n,
        bfs_size=len(cls.members),
        grammar_size=len(gen),
        match=match,
        only_bfs=only_bfs,
        only_grammar=only_grammar,
        closure_ok=not failures,
        closure_failures=tuple(failures),
    )


@dataclass(frozen=True)
class TransitionRow:
    """Aggregated type transition under one mutation.

    ``source``/``target`` are type tags ("I".."IV", or "-" for unclassified
    targets); cycle lengths are set for Type IV only.  Rows sourced from a
    quiver with several witnesses are flagged ambiguous, once per witness.
    """

    source: str
    source_cycle: Optional[int]
    role: str
    target: str
    target_cycle: Optional[int]
    ambiguous: bool
    count: int


def _role_map(w: Witness, n: int) -> dict[int, str]:
    roles = {}
    if w.kind == "I":
        for v in w.piece:
            roles[v] = "piece"
        roles[w.a] = "a"
        roles[w.b] = "b"
        roles[w.c] = "c"
    elif w.kind in ("II", "III"):
        for v in w.piece_c + w.piece_d:
            roles[v] = "piece"
        roles[w.a] = "a"
        roles[w.b] = "b"
        roles[w.c] = "c"
        roles[w.d] = "d"
    else:
        for s in w.spikes:
            for v in s.piece:
                roles[v] = "piece"
        for s in w.spikes:
            roles[s.apex] = "apex"
        for v in w.central:
            roles[v] = "central"
    assert len(roles) == n
    return roles


def _witness_summary(w: Optional[Witness]) -> tuple[str, Optional[int]]:
    if w is None:
        return ("-", None)
    if isinstance(w, TypeIVWitness):
        return (w.kind, w.central_length)
    return (w.kind, None)


def transition_table(
    n: int, cap: int = DEFAULT_CAP, threads: Optional[int] = None
) -> tuple[TransitionRow, ...]:
    """Tabulate (source type, vertex role) -> first-witness type of the
    mutated quiver, over the whole enumerated class of the fork quiver."""
    if n < 4:
        raise ValueError("transition tables are defined for n >= 4")
    cls = enumerate_class(standard_d(n), cap=cap, threads=threads)
    if not cls.exhausted:
        raise CapExceededError(f"class of standard_d({n}) exceeded cap {cap}")

    target_memo: dict[bytes, tuple[str, Optional[int]]] = {}

    def target_summary(Q: Quiver) -> tuple[str, Optional[int]]:
        key = canonical_form(Q).key
        if key not in target_memo:
            ws = classify_type_d(Q)
            target_memo[key] = _witness_summary(ws[0] if ws else None)
        return target_memo[key]

    counts: Counter = Counter()
    for cq in cls.members.values():
        Q = cq.quiver
        witnesses = classify_type_d(Q)
        ambiguous = len(witnesses) > 1
        mutated_summaries = [target_summary(mutate(Q, v)) for v in range(n)]
        for w in witnesses:
            src, src_cycle = _witness_summary(w)
            roles = _role_map(w, n)
            for v in range(n):
                tgt, tgt_cycle = mutated_summaries[v]
                counts[(src, src_cycle, roles[v], tgt, tgt_cycle, ambiguous)] += 1
    rows = [
        TransitionRow(*key, count)
        for key, count in counts.items()
    ]
    rows.sort(
        key=lambda r: (
            r.source,
            r.source_cycle or 0,
            r.role,
            r.target,
            r.target_cycle or 0,
            r.ambiguous,
        )
    )
    return tuple(rows)
