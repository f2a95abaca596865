import itertools

import pytest

from qmut import (
    CapExceededError,
    Quiver,
    build_quiver,
    canonical_form,
    canonical_key,
    check_type_a,
    components,
    cross_validate,
    enumerate_class,
    generate_type_a,
    generate_type_d,
    linear_a,
    oriented_cycle,
    standard_d,
    transition_table,
)

from helpers import brute_bfs


class TestEnumerate:
    def test_two_vertex_class_is_singleton(self):
        assert enumerate_class(linear_a(2)).size == 1

    def test_three_vertex_class(self):
        cls = enumerate_class(linear_a(3))
        assert cls.size == 4
        expected = {
            canonical_key(build_quiver(3, [(0, 1), (1, 2)])),
            canonical_key(build_quiver(3, [(0, 1), (2, 1)])),
            canonical_key(build_quiver(3, [(1, 0), (1, 2)])),
            canonical_key(oriented_cycle(3)),
        }
        assert set(cls.members) == expected

    def test_matches_brute_force_oracle(self):
        for seed in (linear_a(3), linear_a(4), standard_d(4)):
            oracle = brute_bfs(seed)
            cls = enumerate_class(seed)
            assert cls.size == len(oracle)
            assert set(cls.members) == {
                canonical_key(q) for q in oracle.values()
            }

    def test_exhausted_flag_and_cap(self):
        cls = enumerate_class(standard_d(4), cap=3)
        assert not cls.exhausted
        assert cls.size == 3

    def test_seed_is_member(self):
        cls = enumerate_class(standard_d(5))
        assert canonical_form(standard_d(5)).key in cls.members

    def test_closed_under_mutation(self, d_class):
        from qmut import mutate

        cls = d_class(5)
        for cq in cls.members.values():
            for v in range(5):
                assert canonical_form(mutate(cq.quiver, v)).key in cls.members

    def test_mutation_graph_regularity(self):
        cls = enumerate_class(standard_d(4), record_edges=True)
        assert cls.edges is not None
        for key in cls.members:
            out = [e for e in cls.edges if e[0] == key]
            assert len(out) == 4
        assert all(dest in cls.members for dest in cls.edges.values())

    def test_threaded_run_matches_serial(self):
        serial = enumerate_class(standard_d(5))
        threaded = enumerate_class(standard_d(5), threads=4)
        assert set(serial.members) == set(threaded.members)

    def test_env_thread_override(self, monkeypatch):
        monkeypatch.setenv("QMUT_THREADS", "2")
        cls = enumerate_class(standard_d(4))
        assert cls.size == 6


def all_simple_skew(k):
    pairs = list(itertools.combinations(range(k), 2))
    for vals in itertools.product((-1, 0, 1), repeat=len(pairs)):
        b = [[0] * k for _ in range(k)]
        for (i, j), v in zip(pairs, vals):
            b[i][j] = v
            b[j][i] = -v
        yield Quiver(tuple(tuple(row) for row in b))


class TestGenerateTypeA:
    def test_singleton(self):
        members = generate_type_a(1)
        assert len(members) == 1

    def test_three_vertices(self):
        assert len(generate_type_a(3)) == 4

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_equals_exhaustive_scan(self, k):
        scan = set()
        for q in all_simple_skew(k):
            if len(components(q)) == 1 and check_type_a(q).verdict:
                scan.add(canonical_key(q))
        assert scan == set(generate_type_a(k))

    def test_members_pass_check(self):
        for k in (2, 3, 4, 5):
            for cq in generate_type_a(k).values():
                assert check_type_a(cq.quiver).verdict


class TestGenerateTypeD:
    def test_contains_cycle_and_fork(self):
        members = generate_type_d(4)
        assert canonical_key(oriented_cycle(4)) in members
        assert canonical_key(standard_d(4)) in members

    def test_contains_fork_reorientations(self):
        members = generate_type_d(4)
        for a_arrows in ((1, 2), (2, 1)):
            for b_arrows in ((1, 3), (3, 1)):
                q = build_quiver(4, [(0, 1), a_arrows, b_arrows])
                assert canonical_key(q) in members

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            generate_type_d(3)

    def test_sizes_match_enumeration(self, d_class):
        for n in (4, 5, 6):
            assert len(generate_type_d(n)) == d_class(n).size


class TestCrossValidate:
    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_match(self, n):
        report = cross_validate(n)
        assert report.match
        assert report.closure_ok
        assert report.bfs_size == report.grammar_size
        assert report.only_bfs == () and report.only_grammar == ()

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            cross_validate(3)

    def test_cap_exceeded_raises(self):
        with pytest.raises(CapExceededError):
            cross_validate(5, cap=3)


class TestTreeOrientations:
    @pytest.mark.parametrize("n", [4, 5])
    def test_all_orientations_in_class(self, n, d_class):
        cls = d_class(n)
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        for bits in itertools.product((0, 1), repeat=len(edges)):
            arrows = [
                (t, h) if bit == 0 else (h, t)
                for (t, h), bit in zip(edges, bits)
            ]
            assert canonical_key(build_quiver(n, arrows)) in cls.members


class TestTransitions:
    def test_spot_rows_n5(self):
        rows = transition_table(5)
        unamb = [r for r in rows if not r.ambiguous]
        assert unamb, "expected unambiguous rows at n=5"

        def rows_for(source, roles, source_cycle=None):
            out = []
            for r in unamb:
                if r.source != source or r.role not in roles:
                    continue
                if source_cycle is not None and r.source_cycle != source_cycle:
                    continue
                out.append(r)
            return out

        assert all(r.target == "III" for r in rows_for("II", ("a", "b")))
        assert all(r.target == "II" for r in rows_for("III", ("a", "b")))
        assert all(
            r.target == "IV" and r.target_cycle == 3
            for r in rows_for("III", ("c", "d"))
        )
        assert all(
            r.target == "IV" and r.target_cycle == r.source_cycle + 1
            for r in rows_for("IV", ("apex",))
        )
        assert all(r.target == "I" for r in rows_for("I", ("a", "b")))
        assert all(r.target == r.source for r in unamb if r.role == "piece")

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            transition_table(3)
