import json
import random
from pathlib import Path

import pytest

from qmut import (
    GenReport,
    LabelOutOfRangeError,
    QuiverError,
    TwoCycleError,
    TypeIVWitness,
    build_quiver,
    check_type_a,
    classify_type_d,
    linear_a,
    oriented_cycle,
    standard_d,
)
from qmut.classgen import TransitionRow
from qmut.cli import (
    EXIT_CAP,
    EXIT_INPUT,
    EXIT_NEGATIVE,
    EXIT_OK,
    EXIT_USAGE,
    QvSyntaxError,
    UnsupportedFormatError,
    emit,
    gen_report_from_dict,
    gen_report_to_dict,
    main,
    parse_qv,
    quiver_from_dict,
    quiver_to_dict,
    sequence_from_dict,
    sequence_to_dict,
    transition_row_from_dict,
    transition_row_to_dict,
    type_a_report_from_dict,
    type_a_report_to_dict,
    witness_from_dict,
    witness_to_dict,
)
from qmut.reduce import MutationSequence, reduce_to_standard

from helpers import random_quiver

FIXTURES = Path(__file__).parent / "fixtures"


class TestParse:
    def test_simple_arrow(self):
        q = parse_qv("quiver 2\n0 1 1\n")
        assert q.b[0][1] == 1

    def test_two_cycle_is_parse_error(self):
        with pytest.raises(TwoCycleError):
            parse_qv("quiver 2\n0 1 1\n1 0 1\n")

    def test_comment_only_body(self):
        q = parse_qv("quiver 3\n# empty\n")
        assert q.n == 3 and q.arrow_count() == 0

    def test_trailing_comments_and_blanks(self):
        q = parse_qv("# head\nquiver 2  # n\n\n0 1 2  # double\n")
        assert q.b[0][1] == 2

    def test_missing_header(self):
        with pytest.raises(QvSyntaxError):
            parse_qv("0 1 1\n")

    def test_bad_header(self):
        with pytest.raises(QvSyntaxError):
            parse_qv("quiver x\n")

    def test_bad_arrow_line(self):
        with pytest.raises(QvSyntaxError) as err:
            parse_qv("quiver 2\n0 1\n")
        assert "line 2" in str(err.value)

    def test_loop_reports_line(self):
        with pytest.raises(QuiverError) as err:
            parse_qv("quiver 2\n1 1 1\n")
        assert "line 2" in str(err.value)

    def test_out_of_range_label(self):
        with pytest.raises(LabelOutOfRangeError):
            parse_qv("quiver 2\n0 5 1\n")

    def test_zero_multiplicity(self):
        with pytest.raises(QuiverError):
            parse_qv("quiver 2\n0 1 0\n")

    def test_empty_document(self):
        with pytest.raises(QvSyntaxError):
            parse_qv("")


class TestEmit:
    def test_round_trip_is_canonical(self):
        text = "quiver 3\n# note\n1 2 1\n0 1 1\n"
        q = parse_qv(text)
        out = emit(q, "qv")
        assert out == "quiver 3\n0 1 1\n1 2 1\n"
        assert parse_qv(out) == q

    def test_fuzzed_round_trip(self):
        rng = random.Random(17)
        for _ in range(300):
            q = random_quiver(rng, rng.randint(1, 7))
            assert parse_qv(emit(q, "qv")) == q

    def test_fixture_corpus_byte_identity(self):
        for path in sorted(FIXTURES.glob("*.qv")):
            text = path.read_text()
            q = parse_qv(text)
            out = emit(q, "qv")
            assert parse_qv(out) == q
            if path.name != "commented.qv":
                assert out == text, path.name

    def test_commented_fixture_equivalent(self):
        commented = parse_qv((FIXTURES / "commented.qv").read_text())
        assert commented == linear_a(3)

    def test_dot_output(self):
        text = emit(linear_a(2), "dot")
        assert "digraph" in text and "0 -> 1" in text

    def test_dot_repeats_multiple_arrows(self):
        text = emit(build_quiver(2, [(0, 1, 2)]), "dot")
        assert text.count("0 -> 1") == 2

    def test_dot_declares_isolated_vertices(self):
        text = emit(build_quiver(2, []), "dot")
        assert "0;" in text and "1;" in text

    def test_unknown_format(self):
        with pytest.raises(UnsupportedFormatError):
            emit(linear_a(2), "xml")

    def test_report_only_json(self):
        with pytest.raises(UnsupportedFormatError):
            emit({"kind": "classify-report"}, "dot")


class TestJsonRoundTrips:
    def test_quiver(self):
        rng = random.Random(19)
        for _ in range(50):
            q = random_quiver(rng, rng.randint(1, 6))
            assert quiver_from_dict(quiver_to_dict(q)) == q

    def test_witnesses_all_types(self, d_class):
        for n in (4, 5):
            for cq in d_class(n).members.values():
                for w in classify_type_d(cq.quiver):
                    assert witness_from_dict(witness_to_dict(w)) == w

    def test_type_a_report(self):
        report = check_type_a(standard_d(4))
        assert type_a_report_from_dict(type_a_report_to_dict(report)) == report

    def test_sequence(self):
        seq = reduce_to_standard(oriented_cycle(5))
        assert sequence_from_dict(sequence_to_dict(seq)) == seq
        empty = MutationSequence((), ())
        assert sequence_from_dict(sequence_to_dict(empty)) == empty

    def test_gen_report(self):
        report = GenReport(
            n=4,
            bfs_size=6,
            grammar_size=6,
            match=True,
            only_bfs=(),
            only_grammar=(b"4:0,1",),
            closure_ok=True,
            closure_failures=((b"4:0,1", 2),),
        )
        assert gen_report_from_dict(gen_report_to_dict(report)) == report

    def test_transition_row(self):
        row = TransitionRow("IV", 4, "central", "IV", 3, False, 12)
        assert transition_row_from_dict(transition_row_to_dict(row)) == row

    def test_json_text_round_trips(self):
        doc = quiver_to_dict(standard_d(4))
        text = emit(doc, "json")
        assert json.loads(text) == doc


def write_quiver(tmp_path, Q, name="q.qv"):
    path = tmp_path / name
    path.write_text(emit(Q, "qv"))
    return str(path)


class TestMain:
    def test_standard(self, capsys):
        assert main(["standard", "--type", "D", "--n", "4"]) == EXIT_OK
        assert capsys.readouterr().out == emit(standard_d(4), "qv")

    def test_standard_cycle(self, capsys):
        assert main(["standard", "--type", "cycle", "--n", "5"]) == EXIT_OK
        assert capsys.readouterr().out == emit(oriented_cycle(5), "qv")

    def test_standard_bad_n(self, capsys):
        assert main(["standard", "--type", "D", "--n", "3"]) == EXIT_INPUT

    def test_mutate_at(self, tmp_path, capsys):
        path = write_quiver(tmp_path, linear_a(3))
        assert main(["mutate", path, "--at", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert parse_qv(out) == parse_qv("quiver 3\n0 2 1\n1 0 1\n2 1 1\n")

    def test_mutate_seq_involution(self, tmp_path, capsys):
        path = write_quiver(tmp_path, standard_d(4))
        assert main(["mutate", path, "--seq", "2,2"]) == EXIT_OK
        assert capsys.readouterr().out == emit(standard_d(4), "qv")

    def test_mutate_out_of_range_label(self, tmp_path, capsys):
        path = write_quiver(tmp_path, linear_a(3))
        assert main(["mutate", path, "--seq", "0,7"]) == EXIT_INPUT
        assert "error" in capsys.readouterr().err

    def test_mutate_missing_file(self, capsys):
        assert main(["mutate", "/nonexistent.qv", "--at", "0"]) == EXIT_INPUT

    def test_classify_positive(self, tmp_path, capsys):
        path = write_quiver(tmp_path, standard_d(4))
        assert main(["classify", path]) == EXIT_OK
        out = capsys.readouterr().out
        assert "in-type-d: yes" in out

    def test_classify_negative(self, tmp_path, capsys):
        path = write_quiver(tmp_path, linear_a(5))
        assert main(["classify", path]) == EXIT_NEGATIVE
        out = capsys.readouterr().out
        assert "in-type-d: no" in out

    def test_classify_json_has_type_i(self, tmp_path, capsys):
        path = write_quiver(tmp_path, standard_d(4))
        assert main(["classify", path, "--json", "--all-witnesses"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["in_type_d"] is True
        assert any(w["type"] == "I" for w in doc["witnesses"])
        assert {"a": 2, "b": 3, "c": 1, "piece": [0, 1], "type": "I"} in doc[
            "witnesses"
        ]

    def test_enumerate(self, tmp_path, capsys):
        path = write_quiver(tmp_path, standard_d(4))
        assert main(["enumerate", path]) == EXIT_OK
        assert "members: 6" in capsys.readouterr().out

    def test_enumerate_cap_exceeded(self, tmp_path, capsys):
        path = write_quiver(tmp_path, standard_d(4))
        assert main(["enumerate", path, "--cap", "2"]) == EXIT_CAP

    def test_enumerate_out_is_stable(self, tmp_path, capsys):
        path = write_quiver(tmp_path, standard_d(4))
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        assert main(["enumerate", path, "--out", str(out1), "--edges"]) == EXIT_OK
        assert main(["enumerate", path, "--out", str(out2), "--edges"]) == EXIT_OK
        capsys.readouterr()
        names1 = sorted(p.name for p in out1.iterdir())
        names2 = sorted(p.name for p in out2.iterdir())
        assert names1 == names2
        assert "edges.tsv" in names1
        for name in names1:
            assert (out1 / name).read_text() == (out2 / name).read_text()
        members = [p for p in names1 if p.startswith("member_")]
        assert len(members) == 6

    def test_reduce_positive(self, tmp_path, capsys):
        path = write_quiver(tmp_path, oriented_cycle(5))
        assert main(["reduce", path]) == EXIT_OK
        out = capsys.readouterr().out
        assert "steps: 0 1 2 3" in out

    def test_reduce_negative(self, tmp_path, capsys):
        path = write_quiver(tmp_path, linear_a(5))
        assert main(["reduce", path]) == EXIT_NEGATIVE

    def test_reduce_json(self, tmp_path, capsys):
        path = write_quiver(tmp_path, oriented_cycle(5))
        assert main(["reduce", path, "--json"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["sequence"]["steps"] == [0, 1, 2, 3]
        assert doc["final"]["n"] == 5

    def test_gen(self, capsys):
        assert main(["gen", "--type", "A", "--n", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("# 4 members\n")
        assert out.count("quiver 3") == 4

    def test_verify(self, capsys):
        assert main(["verify", "--n", "4"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "match=yes" in out and "closure=ok" in out

    def test_verify_json(self, capsys):
        assert main(["verify", "--n", "4", "--json"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["match"] is True and doc["closure_ok"] is True
        assert doc["bfs_size"] == doc["grammar_size"] == 6

    def test_verify_transitions(self, capsys):
        assert main(["verify", "--n", "4", "--transitions"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "count=" in out

    def test_verify_small_n(self, capsys):
        assert main(["verify", "--n", "3"]) == EXIT_INPUT

    def test_usage_error(self, capsys):
        assert main(["mutate"]) == EXIT_USAGE
        assert main(["nonsense"]) == EXIT_USAGE
        assert main([]) == EXIT_USAGE

    def test_help_exits_ok(self, capsys):
        assert main(["--help"]) == EXIT_OK
