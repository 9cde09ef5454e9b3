"""Command line: ``mlsrigid <command> ...``.

Exit status 0 means every check passed, 1 a negative verdict, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .generate import ConfigError, RunConfig, cmd_fuzz_distinguish, cmd_gen, cmd_roundtrip
from .metric_graph import GraphFormatError, compute_core, format_length, graph_from_json, graph_to_dict, to_dot
from .paths_words import ContractError, cyclically_reduce, format_steps, parse_path, path_length, reduce
from .reconstruct import (
    SpectrumInconsistent,
    certify_isometry,
    isometric,
    reconstruct_core,
)
from .rtree import InsufficientRadius, build_cover_ball, classify_action, cover_ball_to_dot, translation_length
from .spectrum import (
    MissingClassError,
    build_marking,
    canonical_classes,
    format_word,
    make_oracle,
    mls,
    oracle_from_dump,
    parse_word,
    spectrum_dump,
)


class InputError(Exception):
    """Malformed input; the message says where."""


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_graph(path: str):
    try:
        return graph_from_json(_read(path))
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_json(path_or_text: str, what: str):
    text = path_or_text if path_or_text.lstrip().startswith(("{", "[")) else _read(path_or_text)
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: {exc.msg} at line {exc.lineno} column {exc.colno}") from None


def _parse_phi(data, rank: int):
    if not isinstance(data, dict):
        raise InputError("phi: expected an object mapping generators to words")
    phi = {}
    for key, value in data.items():
        try:
            (i, e), = parse_word(key)
        except ValueError:
            raise InputError(f"phi/{key}: key must be a generator gK") from None
        if e < 0 or not isinstance(value, str):
            raise InputError(f"phi/{key}: expected a word string")
        try:
            phi[i] = parse_word(value)
        except ValueError as exc:
            raise InputError(f"phi/{key}: {exc}") from None
    missing = [i for i in range(rank) if i not in phi]
    if missing or len(phi) != rank:
        raise InputError(f"phi: must define exactly g0..g{rank - 1}")
    return phi


def _parse_dump(data):
    if not isinstance(data, list):
        raise InputError("spectrum: expected a list of {\"word\", \"length\"} objects")
    rows = []
    for k, row in enumerate(data):
        if not isinstance(row, dict) or not isinstance(row.get("word"), str) or "length" not in row:
            raise InputError(f"spectrum/{k}: expected {{\"word\", \"length\"}}")
        try:
            parse_word(row["word"])
            Fraction(str(row["length"]))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"spectrum/{k}: {exc}") from None
        rows.append({"word": row["word"], "length": str(row["length"])})
    return rows


def _emit(args, report) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.json:
        Path(args.json).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_dot(args, text: str) -> None:
    if args.dot:
        Path(args.dot).write_text(text)


def _config(args, **extra) -> RunConfig:
    fields = dict(
        seed=args.seed,
        rank=args.rank,
        min_rank=getattr(args, "min_rank", None),
        vertices=getattr(args, "vertices", None),
        max_num=getattr(args, "max_num", 9),
        max_den=getattr(args, "max_den", 4),
        word_bound=getattr(args, "word_bound", 3),
        trials=getattr(args, "trials", 1),
        perturb=getattr(args, "perturb", False),
        timing=getattr(args, "timing", False),
    )
    fields.update(extra)
    return RunConfig(**fields)


# -- commands --------------------------------------------------------------

def run_gen(args) -> int:
    cfg = _config(args)
    g = cmd_gen(cfg)
    _emit(args, graph_to_dict(g))
    c = compute_core(g)
    _emit_dot(args, to_dot(g, [c.vertex_map[v] for v in c.branch_points]))
    return 0


def _core_dict(c) -> dict:
    return {
        "rank": c.rank,
        "graph": graph_to_dict(c.graph),
        "branch_points": sorted(c.branch_points),
        "host_vertices": list(c.vertex_map),
        "host_edges": [[str(h) for h in chain] for chain in c.edge_map],
    }


def run_core(args) -> int:
    g = _load_graph(args.graph)
    c = compute_core(g)
    report = _core_dict(c)
    report["action"] = str(classify_action(c))
    _emit(args, report)
    _emit_dot(args, to_dot(c.graph, c.branch_points, name="core"))
    return 0


def run_spectrum(args) -> int:
    g = _load_graph(args.graph)
    c = compute_core(g)
    rows = spectrum_dump(build_marking(c), args.word_bound) if c.rank else [{"word": "", "length": "0"}]
    _emit(args, rows)
    return 0


def run_reduce(args) -> int:
    g = _load_graph(args.graph)
    try:
        p = parse_path(g, args.path, args.start)
    except (ValueError, IndexError) as exc:
        raise InputError(f"path: {exc}") from None
    r = reduce(p)
    report = {"input": format_steps(p.steps), "reduced": format_steps(r.steps),
              "length": format_length(path_length(g, r))}
    if args.cyclic:
        if not r.is_closed:
            raise InputError("path: cyclic reduction needs a closed path")
        gamma, conj = cyclically_reduce(r)
        report.update({"cyclic": format_steps(gamma.steps), "conjugator": format_steps(conj.steps),
                       "cyclic_length": format_length(path_length(g, gamma))})
    _emit(args, report)
    return 0


def run_reconstruct(args) -> int:
    source = _load_graph(args.source)
    src_core = compute_core(source)
    rank = src_core.rank
    if args.hidden:
        hidden = _load_graph(args.hidden)
        hid_core = compute_core(hidden)
        if hid_core.rank != rank:
            _emit(args, {"verdict": "rank mismatch", "rank": [rank, hid_core.rank]})
            return 1
    else:
        hid_core = None
        rows = _parse_dump(_load_json(args.spectrum, "spectrum"))
        dump_rank = 1 + max((i for r in rows for i, _ in parse_word(r["word"])), default=-1)
        if dump_rank > rank or (rank and dump_rank == 0):
            _emit(args, {"verdict": "rank mismatch", "rank": [rank, dump_rank]})
            return 1
    phi = _parse_phi(_load_json(args.phi, "phi"), rank) if args.phi else None
    src_m = build_marking(src_core) if rank else None
    try:
        if hid_core is not None:
            oracle = make_oracle(hid_core, build_marking(hid_core), phi) if rank else None
        else:
            oracle = oracle_from_dump(rows, rank, phi) if rank else None
    except IndexError as exc:
        raise InputError(f"phi: {exc}") from None
    report = {"source_rank": rank}
    try:
        if rank == 0:
            report.update({"verdict": "reconstructed", "core": {"vertices": 0, "edges": [], "branch_points": []},
                           "certificate": []})
            result = None
        else:
            result = reconstruct_core(rank, src_core, src_m, oracle)
            report.update(result.to_dict())
            report["verdict"] = "reconstructed"
    except SpectrumInconsistent as exc:
        report.update({"verdict": "inconsistent", "reason": str(exc), "entry": exc.entry})
        _emit(args, report)
        return 1
    except MissingClassError as exc:
        raise InputError(f"spectrum: {exc.args[0]} (dump it with a larger --word-bound)") from None
    if oracle is not None:
        report["queries"] = oracle.queries
    status = 0
    if hid_core is not None:
        ok = hid_core.is_empty if result is None else certify_isometry(result, hid_core)
        report["isometric_to_hidden"] = ok
        status = 0 if ok else 1
    _emit(args, report)
    if result is not None:
        _emit_dot(args, to_dot(result.core.graph, result.core.branch_points, name="reconstructed"))
    return status


def run_compare(args) -> int:
    c1, c2 = compute_core(_load_graph(args.g1)), compute_core(_load_graph(args.g2))
    ok = isometric(c1.graph, c2.graph)
    _emit(args, {"isometric": ok, "rank": [c1.rank, c2.rank]})
    return 0 if ok else 1


def run_tree_translen(args) -> int:
    g = _load_graph(args.graph)
    c = compute_core(g)
    if c.rank == 0:
        raise InputError("graph: a tree has trivial fundamental group")
    m = build_marking(c)
    radius = args.radius if args.radius is not None else args.word_bound + 1
    words = [parse_word(w) for w in args.words] if args.words else canonical_classes(c.rank, args.word_bound)
    try:
        ball = build_cover_ball(c, m, radius)
        rows = []
        for w in words:
            t, ell = translation_length(ball, w), mls(m, w)
            rows.append({"word": format_word(w), "translationLength": format_length(t),
                         "mls": format_length(ell), "equal": t == ell})
    except InsufficientRadius as exc:
        raise InputError(f"radius: {exc}") from None
    except IndexError as exc:
        raise InputError(f"word: {exc}") from None
    ok = all(r["equal"] for r in rows)
    _emit(args, {"radius": radius, "vertices": ball.num_vertices, "action": str(classify_action(c, m)),
                 "rows": rows, "ok": ok})
    _emit_dot(args, cover_ball_to_dot(ball))
    return 0 if ok else 1


def run_roundtrip(args) -> int:
    report = cmd_roundtrip(_config(args))
    _emit(args, report)
    return 0 if report["ok"] else 1


def run_fuzz(args) -> int:
    report = cmd_fuzz_distinguish(_config(args), _load_graph(args.g1), _load_graph(args.g2))
    _emit(args, report)
    return 0 if report["witness"] is None and report["verdict"] != "different rank" else 1


# -- parser ----------------------------------------------------------------

def _common(p, seed=False, rank=False):
    p.add_argument("--json", metavar="PATH", help="write the JSON report here instead of stdout")
    p.add_argument("--dot", metavar="PATH", help="also write a DOT rendering")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if rank:
        p.add_argument("--rank", type=int, default=2, help="rank (upper bound where a range is sampled)")
        p.add_argument("--min-rank", type=int, default=None)
        p.add_argument("--vertices", type=int, default=None)
        p.add_argument("--max-num", type=int, default=9, help="largest length numerator")
        p.add_argument("--max-den", type=int, default=4, help="largest length denominator")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlsrigid", description="Marked length spectrum rigidity for metric graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="random connected metric graph")
    _common(p, seed=True, rank=True)
    p.set_defaults(func=run_gen)

    p = sub.add_parser("core", help="core of a graph and its branch points")
    p.add_argument("graph")
    _common(p)
    p.set_defaults(func=run_core)

    p = sub.add_parser("spectrum", help="lengths of all conjugacy classes up to a word length")
    p.add_argument("graph")
    p.add_argument("--word-bound", type=int, default=3)
    _common(p)
    p.set_defaults(func=run_spectrum)

    p = sub.add_parser("reduce", help="reduce an edge path such as \"e0 e1' e1\"")
    p.add_argument("graph")
    p.add_argument("path")
    p.add_argument("--start", type=int, default=None, help="start vertex of an empty path")
    p.add_argument("--cyclic", action="store_true", help="also cyclically reduce")
    _common(p)
    p.set_defaults(func=run_reduce)

    p = sub.add_parser("reconstruct", help="rebuild a hidden core from its length function")
    p.add_argument("source")
    hid = p.add_mutually_exclusive_group(required=True)
    hid.add_argument("--hidden", metavar="GRAPH", help="hidden graph JSON")
    hid.add_argument("--spectrum", metavar="DUMP", help="spectrum dump of the hidden graph")
    p.add_argument("--phi", metavar="JSON", help="generator map {\"g0\": \"word\", ...}, file or literal")
    _common(p)
    p.set_defaults(func=run_reconstruct)

    p = sub.add_parser("compare", help="are the two cores isometric")
    p.add_argument("g1")
    p.add_argument("g2")
    _common(p)
    p.set_defaults(func=run_compare)

    p = sub.add_parser("tree-translen", help="translation lengths in the universal cover against the spectrum")
    p.add_argument("graph")
    p.add_argument("words", nargs="*", help="words to evaluate (default: all classes up to the bound)")
    p.add_argument("--word-bound", type=int, default=2)
    p.add_argument("--radius", type=int, default=None)
    _common(p)
    p.set_defaults(func=run_tree_translen)

    p = sub.add_parser("roundtrip", help="seeded reconstruction trials")
    _common(p, seed=True, rank=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--perturb", action="store_true", help="change one hidden core length by 1/7")
    p.add_argument("--timing", action="store_true", help="record wall time (reports stop being reproducible)")
    p.set_defaults(func=run_roundtrip)

    p = sub.add_parser("fuzz", help="search for a conjugacy class with different lengths")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--word-bound", type=int, default=3)
    _common(p, seed=True)
    p.set_defaults(func=run_fuzz, rank=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ConfigError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
