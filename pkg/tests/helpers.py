"""Shared test utilities: random quivers and brute-force oracles.

The oracles here are deliberately independent of the library's canonical
form: `brute_force_key` minimises over every permutation, and `brute_bfs`
enumerates a mutation class deduplicating with that key.
"""

from __future__ import annotations

import random
from itertools import permutations

from qmut import Quiver, mutate


def random_quiver(rng: random.Random, n: int, bound: int = 3) -> Quiver:
    """Uniform skew-symmetric matrix with entries in [-bound, bound].

    The encoding cannot express loops or 2-cycles, so every draw is valid.
    """
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = rng.randint(-bound, bound)
            b[i][j] = v
            b[j][i] = -v
    return Quiver(tuple(tuple(row) for row in b))


def random_permutation(rng: random.Random, n: int) -> tuple[int, ...]:
    perm = list(range(n))
    rng.shuffle(perm)
    return tuple(perm)


def brute_force_key(Q: Quiver) -> tuple:
    """Minimum relabelled matrix over all n! permutations."""
    n = Q.n
    best = None
    for perm in permutations(range(n)):
        mat = tuple(tuple(Q.b[perm[i]][perm[j]] for j in range(n)) for i in range(n))
        if best is None or mat < best:
            best = mat
    return best


def brute_bfs(seed: Quiver) -> dict[tuple, Quiver]:
    """Mutation class up to isomorphism, deduplicated by brute_force_key."""
    start_key = brute_force_key(seed)
    members = {start_key: seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for Q in frontier:
            for v in range(Q.n):
                M = mutate(Q, v)
                key = brute_force_key(M)
                if key not in members:
                    members[key] = M
                    nxt.append(M)
        frontier = nxt
    return members
