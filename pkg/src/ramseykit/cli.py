"""Command-line front end.

Exit codes: 0 for success or a positive verdict, 1 for a failing or
undecided verdict, 2 for usage and format errors. Every subcommand can write
a JSON run report with --report.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__, io
from .arrows import arrow_check, degree_search
from .structures import (chain, chains_enumerator, cliques_enumerator,
                         cofinal_chain, canonical_code, graphs_enumerator)
from .trees import (antichain_x, build_w0, check_w0_properties, devlin_color,
                    enumerate_devlin_types, prune_perfect, PruningError)
from .ultra import (ConstantColoring, PerCoordColorings, los_eval,
                    internal_color, transfer_shadow)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _enumerator(name: str, cap: int):
    if name == "chains":
        return list(chains_enumerator(cap))
    if name == "graphs":
        return list(graphs_enumerator(cap))
    if name == "cliques":
        return list(cliques_enumerator(cap))
    raise io.FormatError(f"unknown class {name!r} (chains, graphs, cliques)")


def _cmd_arrow_check(args, report):
    C = io.parse_structure(_read(args.ambient))
    B = io.parse_structure(_read(args.big))
    A = io.parse_structure(_read(args.small))
    verdict = arrow_check(C, B, A, args.k, args.l, threads=args.threads)
    report["result"] = {
        "holds": verdict.holds,
        "vacuous": verdict.vacuous,
        "nodes_explored": verdict.nodes_explored,
    }
    if verdict.holds:
        print(f"Holds: every {args.k}-coloring admits an {args.l}-chromatic copy")
        return 0
    tag = " (no copy of the big structure)" if verdict.vacuous else ""
    print(f"Fails{tag}: witness coloring found")
    if args.witness:
        _write(args.witness, io.serialize_coloring(verdict.witness))
        print(f"witness written to {args.witness}")
    return 1


def _cmd_degree_search(args, report):
    A = io.parse_structure(_read(args.small))
    B = io.parse_structure(_read(args.big))
    candidates = _enumerator(args.klass, args.size_cap)
    found = degree_search(A, candidates, args.k, B, args.lmax, args.size_cap)
    if found is None:
        report["result"] = {"found": False}
        print(f"no l <= {args.lmax} admits a witness within size {args.size_cap}")
        return 1
    l, C = found
    report["result"] = {"found": True, "l": l, "witness_size": C.size,
                        "witness_code": canonical_code(C).hex()}
    print(f"l = {l} with witness of size {C.size}")
    if args.out:
        _write(args.out, io.serialize_structure(C))
    return 0


def _cmd_devlin_enumerate(args, report):
    depth = None if args.depth == "auto" else int(args.depth)
    codes = sorted(enumerate_devlin_types(args.n, depth))
    report["result"] = {"n": args.n, "count": len(codes),
                        "codes": [c.hex() for c in codes]}
    for code in codes:
        print(code.hex())
    print(f"{len(codes)} Devlin embedding types for n={args.n}")
    if depth is not None and depth < 2 * args.n - 2:
        print(f"note: depth {depth} cannot host any n={args.n} type "
              f"(needs {2 * args.n - 2})")
    return 0


def _cmd_devlin_color(args, report):
    nodes = io.parse_tree_set(_read(args.set))
    color = devlin_color(nodes, args.n)
    report["result"] = {"color": color}
    print("sentinel" if color is None else str(color))
    return 0


def _cmd_tree_prune(args, report):
    nodes = io.parse_tree_set(_read(args.infile))
    try:
        pruned = prune_perfect(nodes, args.levels)
    except PruningError as exc:
        report["result"] = {"found": False, "error": str(exc)}
        print(f"pruning failed: {exc}")
        return 1
    report["result"] = {"found": True, "size": len(pruned)}
    text = io.serialize_tree_set(pruned)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_w0(args, report):
    w = build_w0(args.depth)
    checks = check_w0_properties(w, args.depth)
    report["result"] = {"size": len(w), "properties": {str(k): v for k, v in checks.items()}}
    text = io.serialize_tree_set(w)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.check:
        for key in sorted(checks):
            print(f"property ({key}): {'ok' if checks[key] else 'FAIL'}")
        if not all(checks.values()):
            return 1
    return 0


def _cmd_ultra_eval(args, report):
    seq = io.parse_sequence(_read(args.seq))
    phi = io.parse_formula(_read(args.formula))
    elements = io.parse_elements(_read(args.elems)) if args.elems else ()
    verdict = los_eval(seq, phi, elements, args.horizon)
    report["result"] = {
        "tag": verdict.tag,
        "threshold": verdict.threshold,
        "bitmap": "".join("1" if b else "0" for b in verdict.bitmap),
    }
    if verdict.decided:
        side = "holds" if verdict.holds else "fails"
        print(f"{side} cofinitely from index {verdict.threshold}")
        return 0 if verdict.holds else 1
    print("undecided up to the horizon")
    return 1


def _cmd_ultra_color(args, report):
    seq = io.parse_sequence(_read(args.seq))
    colorings = io.parse_coloring_rules(_read(args.colorings), seq.signature)
    elements = io.parse_elements(_read(args.copy))
    color = internal_color(colorings, elements, seq, args.horizon)
    report["result"] = {"color": color}
    print("undecided" if color is None else str(color))
    return 0 if color is not None else 1


def _cmd_transfer_shadow(args, report):
    seq = io.parse_sequence(_read(args.seq))
    A = io.parse_structure(_read(args.small))
    B = io.parse_structure(_read(args.big))
    if args.colorings:
        colorings = io.parse_coloring_rules(_read(args.colorings), seq.signature)
    else:
        colorings = PerCoordColorings(A, args.k, ConstantColoring(0))
    rep = transfer_shadow(seq, colorings, A, B, args.k, args.d, horizon=args.horizon)
    report["result"] = {
        "selected_all_from": rep.selected_all_from,
        "certified_from": rep.certified_from,
        "s0": sorted(rep.s0) if rep.s0 is not None else None,
        "s0_count": rep.s0_count,
    }
    if rep.part_a:
        print(f"size-{args.d} color sets exist from checked index {rep.selected_all_from}")
    if rep.certified_from is not None:
        print(f"certified for every index >= {rep.certified_from} by an arrow check")
    if rep.s0 is not None:
        print(f"stabilized S0 = {sorted(rep.s0)} recurring {rep.s0_count} times")
    return 0 if rep.part_a else 1


def _cmd_chain_build(args, report):
    enumeration = _enumerator(args.klass, args.length + 1)
    members = cofinal_chain(enumeration, args.length)
    report["result"] = {
        "sizes": [m.size for m in members],
        "codes": [canonical_code(m).hex() for m in members],
    }
    for t, m in enumerate(members):
        print(f"B_{t}: size {m.size} code {canonical_code(m).hex()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ramseykit",
                                description="structural Ramsey workbench")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--report", help="write a JSON run report here")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None,
                        help="seed for randomized suites; recorded in reports")

    sp = sub.add_parser("arrow-check", help="decide a partition arrow")
    sp.add_argument("--ambient", required=True)
    sp.add_argument("--big", required=True)
    sp.add_argument("--small", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-l", type=int, required=True)
    sp.add_argument("--witness", help="write a failing coloring here")
    common(sp)
    sp.set_defaults(fn=_cmd_arrow_check)

    sp = sub.add_parser("degree-search", help="search a Ramsey degree bound")
    sp.add_argument("--small", required=True)
    sp.add_argument("--big", required=True)
    sp.add_argument("--class", dest="klass", default="chains")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--lmax", type=int, default=4)
    sp.add_argument("--size-cap", type=int, default=8)
    sp.add_argument("--out", help="write the witness structure here")
    common(sp)
    sp.set_defaults(fn=_cmd_degree_search)

    sp = sub.add_parser("devlin-enumerate", help="enumerate Devlin types")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--depth", default="auto")
    common(sp)
    sp.set_defaults(fn=_cmd_devlin_enumerate)

    sp = sub.add_parser("devlin-color", help="Devlin color of a node set")
    sp.add_argument("--set", required=True)
    sp.add_argument("-n", type=int, required=True)
    common(sp)
    sp.set_defaults(fn=_cmd_devlin_color)

    sp = sub.add_parser("tree-prune", help="extract a skew level subtree")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(fn=_cmd_tree_prune)

    sp = sub.add_parser("w0", help="build the skew level tree")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--out")
    sp.add_argument("--check", action="store_true")
    common(sp)
    sp.set_defaults(fn=_cmd_w0)

    sp = sub.add_parser("ultra-eval", help="cofinite evaluation of a formula")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--elems")
    sp.add_argument("--horizon", type=int, default=50)
    common(sp)
    sp.set_defaults(fn=_cmd_ultra_eval)

    sp = sub.add_parser("ultra-color", help="internal color of a copy")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--colorings", required=True)
    sp.add_argument("--copy", required=True)
    sp.add_argument("--horizon", type=int, default=50)
    common(sp)
    sp.set_defaults(fn=_cmd_ultra_color)

    sp = sub.add_parser("transfer-shadow", help="window check of the transfer bound")
    sp.add_argument("--seq", required=True)
    sp.add_argument("-A", "--small", dest="small", required=True)
    sp.add_argument("-B", "--big", dest="big", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--colorings")
    sp.add_argument("--horizon", type=int, default=40)
    common(sp)
    sp.set_defaults(fn=_cmd_transfer_shadow)

    sp = sub.add_parser("chain-build", help="build a cofinal embedding chain")
    sp.add_argument("--class", dest="klass", default="chains")
    sp.add_argument("--length", type=int, required=True)
    common(sp)
    sp.set_defaults(fn=_cmd_chain_build)

    return p


_INPUT_KEYS = ("ambient", "big", "small", "set", "infile", "seq", "formula",
               "elems", "copy", "colorings")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help.
        return int(exc.code or 0)
    started = time.monotonic()
    report = {"result": {}}
    try:
        code = args.fn(args, report)
    except (io.FormatError, FileNotFoundError, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.report:
        inputs = {}
        for key in _INPUT_KEYS:
            path = getattr(args, key, None)
            if path:
                try:
                    inputs[path] = io.digest_file(path)
                except OSError:
                    pass
        arguments = {
            k: v for k, v in sorted(vars(args).items())
            if k not in ("fn", "report") and not callable(v)
        }
        run = io.RunReport(
            subcommand=args.cmd,
            arguments=arguments,
            inputs=inputs,
            result=report["result"],
            elapsed_s=round(time.monotonic() - started, 6),
        )
        _write(args.report, run.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
