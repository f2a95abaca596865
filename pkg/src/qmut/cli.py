"""Command-line interface, the .qv file format, and report serialisation.

Exit codes: 0 success / positive verdict, 1 usage error, 2 I/O or parse
error, 3 negative verdict (not in the class), 4 enumeration cap exceeded.
See docs/formats.md for the file format and the JSON report schema.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .classgen import (
    CapExceededError,
    GenReport,
    TransitionRow,
    cross_validate,
    enumerate_class,
    generate_type_a,
    generate_type_d,
    transition_table,
)
from .quiver import (
    LabelOutOfRangeError,
    LoopArrowError,
    Quiver,
    QuiverError,
    TwoCycleError,
    apply_sequence,
    build_quiver,
    linear_a,
    oriented_cycle,
    standard_d,
)
from .recognize import (
    Spike,
    TypeAFailure,
    TypeAReport,
    TypeIIIWitness,
    TypeIIWitness,
    TypeIVWitness,
    TypeIWitness,
    Witness,
    check_type_a,
    classify_type_d,
)
from .reduce import MutationSequence, NotTypeDError, certify

__all__ = [
    "QvSyntaxError",
    "UnsupportedFormatError",
    "parse_qv",
    "emit",
    "main",
    "entry",
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_INPUT",
    "EXIT_NEGATIVE",
    "EXIT_CAP",
]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NEGATIVE = 3
EXIT_CAP = 4


class QvSyntaxError(QuiverError):
    """Malformed .qv text; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedFormatError(ValueError):
    """The requested output format does not apply to this object."""


def parse_qv(text: str) -> Quiver:
    """Parse the .qv format: a ``quiver <n>`` header, then one
    ``<tail> <head> <multiplicity>`` line per arrow.  ``#`` starts a
    comment, blank lines are ignored."""
    header: Optional[int] = None
    arrows = []
    directions: dict[frozenset, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "quiver" or len(fields) != 2:
                raise QvSyntaxError(lineno, "expected header 'quiver <n>'")
            try:
                header = int(fields[1])
            except ValueError:
                raise QvSyntaxError(lineno, f"vertex count {fields[1]!r} is not an integer")
            if header < 1:
                raise QvSyntaxError(lineno, "vertex count must be at least 1")
            continue
        if len(fields) != 3:
            raise QvSyntaxError(lineno, "expected '<tail> <head> <multiplicity>'")
        try:
            t, h, m = (int(f) for f in fields)
        except ValueError:
            raise QvSyntaxError(lineno, f"non-integer arrow fields: {line!r}")
        try:
            _validate_arrow_fields(header, t, h, m)
        except QuiverError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
        pair = frozenset((t, h))
        seen = directions.get(pair)
        if seen is not None and seen[0] != t:
            raise TwoCycleError(
                f"line {lineno}: opposite arrow to line {seen[1]} "
                f"({seen[0]} -> {h if seen[0] == t else t})"
            )
        directions.setdefault(pair, (t, lineno))
        arrows.append((t, h, m))
    if header is None:
        raise QvSyntaxError(1, "missing 'quiver <n>' header")
    return build_quiver(header, arrows)


def _validate_arrow_fields(n: int, t: int, h: int, m: int) -> None:
    if m < 1:
        raise QuiverError(f"multiplicity must be positive, got {m}")
    if t == h:
        raise LoopArrowError(f"loop arrow at vertex {t}")
    if not (0 <= t < n and 0 <= h < n):
        raise LabelOutOfRangeError(f"arrow ({t}, {h}) outside 0..{n - 1}")


def _quiver_to_qv(Q: Quiver) -> str:
    lines = [f"quiver {Q.n}"]
    for a in Q.arrows():
        lines.append(f"{a.tail} {a.head} {a.multiplicity}")
    return "\n".join(lines) + "\n"


def _quiver_to_dot(Q: Quiver) -> str:
    lines = ["digraph quiver {"]
    for v in range(Q.n):
        lines.append(f"  {v};")
    for a in Q.arrows():
        for _ in range(a.multiplicity):
            lines.append(f"  {a.tail} -> {a.head};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON document shapes (see docs/formats.md)

def quiver_to_dict(Q: Quiver) -> dict:
    return {
        "kind": "quiver",
        "n": Q.n,
        "arrows": [[a.tail, a.head, a.multiplicity] for a in Q.arrows()],
    }


def quiver_from_dict(doc: dict) -> Quiver:
    return build_quiver(doc["n"], [tuple(a) for a in doc["arrows"]])


def type_a_report_to_dict(report: TypeAReport) -> dict:
    return {
        "verdict": report.verdict,
        "failures": [
            {"condition": f.condition, "witness": list(f.witness)}
            for f in report.failures
        ],
    }


def type_a_report_from_dict(doc: dict) -> TypeAReport:
    return TypeAReport(
        verdict=doc["verdict"],
        failures=tuple(
            TypeAFailure(f["condition"], tuple(f["witness"]))
            for f in doc["failures"]
        ),
    )


def witness_to_dict(w: Witness) -> dict:
    if isinstance(w, TypeIWitness):
        return {"type": "I", "a": w.a, "b": w.b, "c": w.c, "piece": list(w.piece)}
    if isinstance(w, (TypeIIWitness, TypeIIIWitness)):
        return {
            "type": w.kind,
            "a": w.a,
            "b": w.b,
            "c": w.c,
            "d": w.d,
            "piece_c": list(w.piece_c),
            "piece_d": list(w.piece_d),
        }
    if isinstance(w, TypeIVWitness):
        return {
            "type": "IV",
            "central": list(w.central),
            "spikes": [
                {
                    "arrow": list(s.arrow),
                    "apex": s.apex,
                    "piece": list(s.piece),
                }
                for s in w.spikes
            ],
        }
    raise TypeError(f"unknown witness: {w!r}")


def witness_from_dict(doc: dict) -> Witness:
    kind = doc["type"]
    if kind == "I":
        return TypeIWitness(doc["a"], doc["b"], doc["c"], tuple(doc["piece"]))
    if kind in ("II", "III"):
        cls = TypeIIWitness if kind == "II" else TypeIIIWitness
        return cls(
            doc["a"],
            doc["b"],
            doc["c"],
            doc["d"],
            tuple(doc["piece_c"]),
            tuple(doc["piece_d"]),
        )
    if kind == "IV":
        return TypeIVWitness(
            tuple(doc["central"]),
            tuple(
                Spike(tuple(s["arrow"]), s["apex"], tuple(s["piece"]))
                for s in doc["spikes"]
            ),
        )
    raise ValueError(f"unknown witness type: {kind!r}")


def sequence_to_dict(seq: MutationSequence) -> dict:
    return {
        "steps": list(seq.steps),
        "provenance": [{"tag": t, "count": c} for t, c in seq.provenance],
    }


def sequence_from_dict(doc: dict) -> MutationSequence:
    return MutationSequence(
        tuple(doc["steps"]),
        tuple((p["tag"], p["count"]) for p in doc["provenance"]),
    )


def gen_report_to_dict(report: GenReport) -> dict:
    return {
        "kind": "verify-report",
        "n": report.n,
        "bfs_size": report.bfs_size,
        "grammar_size": report.grammar_size,
        "match": report.match,
        "only_bfs": [k.decode("ascii") for k in report.only_bfs],
        "only_grammar": [k.decode("ascii") for k in report.only_grammar],
        "closure_ok": report.closure_ok,
        "closure_failures": [
            [k.decode("ascii"), v] for k, v in report.closure_failures
        ],
    }


def gen_report_from_dict(doc: dict) -> GenReport:
    return GenReport(
        n=doc["n"],
        bfs_size=doc["bfs_size"],
        grammar_size=doc["grammar_size"],
        match=doc["match"],
        only_bfs=tuple(k.encode("ascii") for k in doc["only_bfs"]),
        only_grammar=tuple(k.encode("ascii") for k in doc["only_grammar"]),
        closure_ok=doc["closure_ok"],
        closure_failures=tuple(
            (k.encode("ascii"), v) for k, v in doc["closure_failures"]
        ),
    )


def transition_row_to_dict(row: TransitionRow) -> dict:
    return {
        "source": row.source,
        "source_cycle": row.source_cycle,
        "role": row.role,
        "target": row.target,
        "target_cycle": row.target_cycle,
        "ambiguous": row.ambiguous,
        "count": row.count,
    }


def transition_row_from_dict(doc: dict) -> TransitionRow:
    return TransitionRow(
        doc["source"],
        doc["source_cycle"],
        doc["role"],
        doc["target"],
        doc["target_cycle"],
        doc["ambiguous"],
        doc["count"],
    )


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(obj, fmt: str) -> str:
    """Serialise a quiver or a report dict to qv, dot, or json text."""
    if isinstance(obj, Quiver):
        if fmt == "qv":
            return _quiver_to_qv(obj)
        if fmt == "dot":
            return _quiver_to_dot(obj)
        if fmt == "json":
            return _json_text(quiver_to_dict(obj))
        raise UnsupportedFormatError(f"unknown format {fmt!r} for a quiver")
    if isinstance(obj, dict):
        if fmt == "json":
            return _json_text(obj)
        raise UnsupportedFormatError(f"reports only serialise to json, not {fmt!r}")
    raise UnsupportedFormatError(f"cannot serialise {type(obj).__name__!r}")


# ---------------------------------------------------------------------------
# command implementations

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_quiver(path: str) -> Quiver:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_qv(fh.read())


def _cmd_standard(args) -> int:
    kind = args.type
    if kind == "A":
        Q = linear_a(args.n)
    elif kind == "D":
        Q = standard_d(args.n)
    else:
        Q = oriented_cycle(args.n)
    sys.stdout.write(emit(Q, "qv"))
    return EXIT_OK


def _cmd_mutate(args) -> int:
    Q = _read_quiver(args.file)
    if args.at is not None:
        seq = [args.at]
    else:
        try:
            seq = [int(p) for p in args.seq.split(",") if p.strip() != ""]
        except ValueError:
            raise QuiverError(f"bad mutation sequence {args.seq!r}")
    out = apply_sequence(Q, seq)
    sys.stdout.write(emit(out, "qv"))
    return EXIT_OK


def _classify_doc(Q: Quiver, witnesses, report: TypeAReport) -> dict:
    return {
        "kind": "classify-report",
        "quiver": quiver_to_dict(Q),
        "type_a": type_a_report_to_dict(report),
        "witnesses": [witness_to_dict(w) for w in witnesses],
        "in_type_d": bool(witnesses),
    }


def _witness_text(w: Witness) -> str:
    if isinstance(w, TypeIWitness):
        return f"I a={w.a} b={w.b} c={w.c} piece={list(w.piece)}"
    if isinstance(w, (TypeIIWitness, TypeIIIWitness)):
        return (
            f"{w.kind} a={w.a} b={w.b} c={w.c} d={w.d} "
            f"piece_c={list(w.piece_c)} piece_d={list(w.piece_d)}"
        )
    spikes = ", ".join(
        f"{s.arrow[0]}->{s.arrow[1]} apex={s.apex} piece={list(s.piece)}"
        for s in w.spikes
    )
    return f"IV central={list(w.central)} spikes=[{spikes}]"


def _cmd_classify(args) -> int:
    Q = _read_quiver(args.file)
    report = check_type_a(Q)
    witnesses = classify_type_d(Q)
    shown = witnesses if args.all_witnesses else witnesses[:1]
    if args.json:
        sys.stdout.write(emit(_classify_doc(Q, shown, report), "json"))
    else:
        sys.stdout.write(f"type-a: {'pass' if report.verdict else 'fail'}\n")
        for f in report.failures:
            sys.stdout.write(f"  {f.condition} witness={list(f.witness)}\n")
        sys.stdout.write(f"witnesses: {len(witnesses)}\n")
        for w in shown:
            sys.stdout.write(f"  {_witness_text(w)}\n")
        sys.stdout.write(f"in-type-d: {'yes' if witnesses else 'no'}\n")
    return EXIT_OK if witnesses else EXIT_NEGATIVE


def _cmd_enumerate(args) -> int:
    Q = _read_quiver(args.file)
    cls = enumerate_class(Q, cap=args.cap, record_edges=args.edges)
    sys.stdout.write(
        f"members: {cls.size} exhausted: {'yes' if cls.exhausted else 'no'}\n"
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        keys = sorted(cls.members)
        index = {key: i for i, key in enumerate(keys)}
        width = max(4, len(str(len(keys) - 1)))
        for i, key in enumerate(keys):
            path = os.path.join(args.out, f"member_{i:0{width}d}.qv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(emit(cls.members[key].quiver, "qv"))
        if cls.edges is not None:
            with open(os.path.join(args.out, "edges.tsv"), "w", encoding="utf-8") as fh:
                for (key, v), dest in sorted(cls.edges.items()):
                    fh.write(f"{index[key]}\t{v}\t{index[dest]}\n")
    return EXIT_OK if cls.exhausted else EXIT_CAP


def _cmd_reduce(args) -> int:
    Q = _read_quiver(args.file)
    try:
        cert = certify(Q)
    except NotTypeDError:
        sys.stdout.write("not in the type-D mutation class\n")
        return EXIT_NEGATIVE
    final = apply_sequence(Q, cert.sequence)
    if args.json:
        doc = {
            "kind": "reduce-report",
            "witness": witness_to_dict(cert.witness),
            "sequence": sequence_to_dict(cert.sequence),
            "relabeling": list(cert.relabeling),
            "final": quiver_to_dict(final),
        }
        sys.stdout.write(emit(doc, "json"))
    else:
        sys.stdout.write(f"witness: {_witness_text(cert.witness)}\n")
        sys.stdout.write(
            "steps: " + " ".join(str(v) for v in cert.sequence.steps) + "\n"
        )
        for tag, count in cert.sequence.provenance:
            sys.stdout.write(f"  segment {tag}: {count}\n")
        sys.stdout.write(f"relabeling: {list(cert.relabeling)}\n")
        sys.stdout.write(emit(final, "qv"))
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.type == "A":
        members = generate_type_a(args.n, cap=args.cap)
    else:
        members = generate_type_d(args.n, cap=args.cap)
    keys = sorted(members)
    sys.stdout.write(f"# {len(keys)} members\n")
    for i, key in enumerate(keys):
        sys.stdout.write(f"# member {i}\n")
        sys.stdout.write(emit(members[key].quiver, "qv"))
        if i + 1 < len(keys):
            sys.stdout.write("\n")
    return EXIT_OK


def _transition_text(rows) -> str:
    def tag(name, cycle):
        return f"{name}({cycle})" if cycle is not None else name

    lines = []
    for r in rows:
        flag = " ambiguous" if r.ambiguous else ""
        lines.append(
            f"{tag(r.source, r.source_cycle)} {r.role} -> "
            f"{tag(r.target, r.target_cycle)} count={r.count}{flag}"
        )
    return "\n".join(lines) + "\n"


def _cmd_verify(args) -> int:
    report = cross_validate(args.n, cap=args.cap)
    rows = transition_table(args.n, cap=args.cap) if args.transitions else None
    if args.json:
        doc = gen_report_to_dict(report)
        if rows is not None:
            doc["transitions"] = [transition_row_to_dict(r) for r in rows]
        sys.stdout.write(emit(doc, "json"))
    else:
        sys.stdout.write(
            f"n={report.n} bfs={report.bfs_size} grammar={report.grammar_size} "
            f"match={'yes' if report.match else 'no'} "
            f"closure={'ok' if report.closure_ok else 'broken'}\n"
        )
        for k in report.only_bfs[:5]:
            sys.stdout.write(f"  only-bfs {k.decode('ascii')}\n")
        for k in report.only_grammar[:5]:
            sys.stdout.write(f"  only-grammar {k.decode('ascii')}\n")
        if rows is not None:
            sys.stdout.write(_transition_text(rows))
    return EXIT_OK if report.match and report.closure_ok else EXIT_NEGATIVE


def _build_parser() -> _Parser:
    parser = _Parser(prog="qmut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("standard", help="print a seed quiver")
    p.add_argument("--type", choices=("A", "D", "cycle"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_standard)

    p = sub.add_parser("mutate", help="mutate a quiver at a vertex or sequence")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--at", type=int)
    group.add_argument("--seq")
    p.set_defaults(func=_cmd_mutate)

    p = sub.add_parser("classify", help="type-A report and type-D witnesses")
    p.add_argument("file")
    p.add_argument("--all-witnesses", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("enumerate", help="BFS the mutation class of a seed")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--edges", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("reduce", help="mutation sequence to the fork quiver")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("gen", help="grammar-generated class members")
    p.add_argument("--type", choices=("A", "D"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=10**6)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("verify", help="cross-validate enumeration vs grammar")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--transitions", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    """Run the CLI; returns the exit code documented in docs/formats.md."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        code = exc.code
        return int(code) if isinstance(code, int) else EXIT_OK
    try:
        return args.func(args)
    except CapExceededError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except (QuiverError, UnsupportedFormatError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
