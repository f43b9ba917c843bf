"""Command line front end.

Every command writes under ``--out`` (default ``out``) with fixed file
names, puts wall-clock numbers in a separate ``timing.json`` so the main
report replays byte for byte, and exits 0 only when every certificate it
was asked for passes (1 on a failed certificate, 2 on usage errors).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import complex_core as cc
from .link_analysis import (build_link, check_npc, check_ultraconvex, from_dot, girth, hop_distance, to_dot)
from .spine_homology import (build_spine, cycle_class, enumerate_short_cycles, hnt_check, link_to_spine,
                             spine_to_dot)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _dump(cx, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    cc.dump(cx, path)
    return path


def _load_complex(args) -> cc.PE2Complex:
    if getattr(args, "complex", None):
        return cc.load(args.complex)
    if getattr(args, "k", None):
        from .templates import build_xk
        return build_xk(args.k)
    raise UsageError("give --complex <path> or --k <k>")


def _vertex(cx, args) -> str:
    v = getattr(args, "vertex", None) or cx.vertices[0]
    if v not in cx.vertices:
        raise UsageError(f"unknown vertex {v!r}")
    return v


# -- commands ----------------------------------------------------------------------

def cmd_build_xk(args, out: Path) -> int:
    from .templates import build_xk, n_id
    if args.k < 1:
        raise UsageError("k must be at least 1")
    X = build_xk(args.k)
    _dump(X, out / f"X_{args.k}.complex")
    link = build_link(X, "v")
    rep = {"command": "build-xk", "k": args.k, "counts": list(X.counts()), "validate": cc.validate(X).ok,
           "link": {"nodes": len(link.nodes), "edges": len(link.edges),
                    "bipartite": link.bipartition() is not None, "girth": girth(link)},
           "n_pair_distances": [hop_distance(link, (n_id(1, j), 1), (n_id(1, j), -1))
                                for j in range(1, args.k + 1)]}
    _write_json(out / "build_xk.json", rep)
    return EXIT_OK if rep["validate"] else EXIT_FAIL


def cmd_check_npc(args, out: Path) -> int:
    cx = _load_complex(args)
    val = cc.validate(cx)
    cert = check_npc(cx)
    rep = {"command": "check-npc", "validate": val.ok, "violations": val.violations[:20], "npc": cert.to_json()}
    _write_json(out / "npc.json", rep)
    ok = val.ok and cert.passed and (cert.strict or not args.strict)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_link(args, out: Path) -> int:
    cx = _load_complex(args)
    link = build_link(cx, _vertex(cx, args))
    path = Path(args.dot) if args.dot else out / "link.dot"
    _write_text(path, to_dot(link))
    back = from_dot(path.read_text(encoding="utf-8"))
    same = back.nodes == link.nodes and back.edges == link.edges
    _write_json(out / "link.json", {"command": "link", "vertex": link.vertex, "nodes": len(link.nodes),
                                    "edges": len(link.edges), "dot": str(path), "round_trip": same})
    return EXIT_OK if same else EXIT_FAIL


def cmd_ultraconvex(args, out: Path) -> int:
    cx = _load_complex(args)
    rose = list(args.rose)
    try:
        sub = cc.Subcomplex1.of(cx, rose)
    except cc.ComplexError as exc:
        raise UsageError(str(exc))
    cert = check_ultraconvex(cx, sub)
    _write_json(out / "ultraconvex.json", {"command": "ultraconvex", "rose": rose, "certificate": cert.to_json()})
    return EXIT_OK if cert.passed else EXIT_FAIL


def short_cycle_report(cx, max_len: int = 6) -> dict:
    from .covering import middle_cycles
    link = build_link(cx, cx.vertices[0])
    spine = build_spine(cx)
    mor = link_to_spine(link, spine, cx)
    cycles = enumerate_short_cycles(link, max_len)
    by_len: dict[int, int] = {}
    zero = 0
    listing = []
    for c in cycles:
        by_len[len(c)] = by_len.get(len(c), 0) + 1
        vec = cycle_class(mor, c)
        if not vec.any():
            zero += 1
        listing.append({"nodes": c.named(link), "h1": [int(x) for x in vec]})
    rep = {"max_len": max_len, "count_by_length": {str(k): v for k, v in sorted(by_len.items())},
           "null_homologous": zero, "immersion": mor.immersion, "spine_rank": spine.rank, "cycles": listing}
    k = int(dict(cx.meta).get("k", 0) or 0)
    if dict(cx.meta).get("kind") == "X_k" and k:
        mids = middle_cycles(link, cx, k)
        rep["middle_cycles"] = {"count": len(mids), "lengths": [len(c) for c in mids],
                                "hnt": [hnt_check(c, mor) for c in mids],
                                "nonzero": [bool(cycle_class(mor, c).any()) for c in mids]}
    return rep


def cmd_spine(args, out: Path) -> int:
    cx = _load_complex(args)
    spine = build_spine(cx)
    _write_text(out / "spine.dot", spine_to_dot(spine))
    link = build_link(cx, cx.vertices[0])
    mor = link_to_spine(link, spine, cx)
    _write_json(out / "spine.json", {"command": "spine", "rank": spine.rank, "type1": len(spine.type1),
                                     "type2": len(spine.type2), "legs": len(spine.legs),
                                     "immersion": mor.immersion, "tree": spine.tree_description()})
    return EXIT_OK if mor.immersion else EXIT_FAIL


def cmd_short_cycles(args, out: Path) -> int:
    cx = _load_complex(args)
    rep = short_cycle_report(cx, args.max)
    rep["command"] = "short-cycles"
    _write_json(out / "short_cycles.json", rep)
    ok = rep["null_homologous"] == 0 and all(rep.get("middle_cycles", {}).get("hnt", [True]))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_pipeline_yk(args, out: Path, timing: dict) -> int:
    from .pipeline import StageError, pipeline_yk
    if args.k < 1:
        raise UsageError("k must be at least 1")
    try:
        run = pipeline_yk(args.k, monodromy=not args.no_monodromy)
    except StageError as exc:
        _write_json(out / "pipeline_error.json", {"command": "pipeline-yk", "k": args.k, "stage": exc.stage,
                                                  "error": str(exc)})
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    d = out / f"Y_{args.k}"
    _dump(run.Y, d / "Y.complex")
    _dump(run.template, d / "X.complex")
    if run.monodromy is not None:
        _write_text(d / "monodromy.txt", run.monodromy_text())
    report_path = Path(args.report) if args.report else d / "report.json"
    _write_json(report_path, run.report)
    timing.update(run.timing)
    return EXIT_OK


def cmd_monodromy(args, out: Path) -> int:
    from .pipeline import pipeline_yk
    rep = json.loads(Path(args.from_pipeline).read_text(encoding="utf-8"))
    k = rep["inputs"]["k"]
    run = pipeline_yk(k)
    text = run.monodromy_text()
    _write_text(out / f"monodromy_Y_{k}.txt", text)
    expected = rep.get("monodromy", {}).get("sha256")
    same = expected is None or expected == run.report["monodromy"]["sha256"]
    _write_json(out / "monodromy.json", {"command": "monodromy", "k": k, "replay_matches_report": same,
                                         **run.report["monodromy"]})
    return EXIT_OK if same else EXIT_FAIL


def _action_from_file(path) -> "object":
    from .semidirect import MonodromyAction
    from .words import load_monodromy
    autos, names = load_monodromy(Path(path).read_text(encoding="utf-8"))
    if any(a.inverse_images is None for a in autos.values()):
        raise UsageError(f"{path}: monodromy file lacks inverse images")
    act = MonodromyAction(tuple(autos.values()), tuple(names), tuple(autos))
    if not act.verify():
        raise UsageError(f"{path}: recorded inverses do not compose to the identity")
    return act


def _default_action():
    from .pipeline import pipeline_yk
    return pipeline_yk(1).monodromy.action


def cmd_chain(args, out: Path) -> int:
    from .pipeline import StageError, build_chain
    try:
        K, rep, assembly = build_chain(args.ks, args.base, args.base_k, presentations=args.presentations)
    except StageError as exc:
        _write_json(out / "chain_error.json", {"command": "chain", "error": str(exc)})
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL if "rank mismatch" not in str(exc) else EXIT_USAGE
    _dump(K, out / "K.complex")
    rep["command"] = "chain"
    if assembly is not None:
        from .graph_of_groups import dump_presentations
        _write_text(out / "presentations.txt", dump_presentations(assembly.presentations()))
        rep["presentations"] = {name: p.counts() for name, p in assembly.groups.items()}
    _write_json(out / "chain.json", rep)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def _terminal(spec: str, monodromy):
    from .graph_of_groups import example1_terminal, example2_terminal, example3_terminal
    name, _, arg = spec.partition(":")
    if name == "example1":
        return example1_terminal(int(arg or 2))
    if name == "example2":
        act = _action_from_file(monodromy[0]) if monodromy else _default_action()
        return example2_terminal(act)
    if name == "example3":
        return example3_terminal(arg or "alpha")
    raise UsageError(f"unknown terminal {spec!r}; use example1:<k>, example2 or example3[:alpha]")


def transvection_block(rank: int):
    """A_i = B_i = F_rank with b_j acting by a_j -> a_j a_{j+1}; theta(b_j) = a_j of the previous level."""
    from .graph_of_groups import Block
    from .semidirect import MonodromyAction
    from .words import FreeAutomorphism
    autos = []
    for j in range(1, rank + 1):
        ims, inv = [], []
        for i in range(1, rank + 1):
            if i == j and rank > 1:
                nxt = j % rank + 1
                ims.append((i, nxt))
                inv.append((i, -nxt))
            else:
                ims.append((i,))
                inv.append((i,))
        autos.append(FreeAutomorphism(tuple(ims), tuple(inv)))
    act = MonodromyAction(tuple(autos))
    return Block(act, tuple((j,) for j in range(1, rank + 1)))


def assemble_from_args(n: int, terminal_spec: str, monodromy=()):
    from .graph_of_groups import Block, assemble_chain
    term = _terminal(terminal_spec, monodromy if terminal_spec.startswith("example2") else ())
    blocks = []
    rank = len(term.A0)
    files = list(monodromy)[1:] if terminal_spec.startswith("example2") else list(monodromy)
    for i in range(n):
        if i < len(files):
            act = _action_from_file(files[i])
            blocks.append(Block(act, tuple((j,) for j in range(1, act.base_rank + 1))))
            rank = act.kernel_rank
        else:
            blocks.append(transvection_block(rank))
    return assemble_chain(n, blocks, term)


def cmd_presentations(args, out: Path) -> int:
    from .graph_of_groups import RankError, dump_presentations
    if args.n < 0:
        raise UsageError("n must be non-negative")
    try:
        ch = assemble_from_args(args.n, args.terminal, args.monodromy or ())
    except RankError as exc:
        raise UsageError(str(exc))
    _write_text(out / "presentations.txt", dump_presentations(ch.presentations()))
    _write_text(out / "vertex_groups_top.txt", dump_presentations(ch.top.vertices))
    _write_text(out / "vertex_groups_bottom.txt", dump_presentations(ch.bottom.vertices))
    problems = ch.top.check() + ch.bottom.check()
    rep = {"command": "presentations", "n": args.n, "terminal": args.terminal, "top": ch.top.summary(),
           "bottom": ch.bottom.summary(), "groups": {k: p.counts() for k, p in ch.groups.items()},
           "bookkeeping": ch.bookkeeping, "structural_problems": problems, "assumptions": ch.assumptions,
           "not_runtime_tested": "equality in the amalgams H_i, G_i (structural, argued by hand)"}
    _write_json(out / "presentations.json", rep)
    return EXIT_OK if not problems and ch.bookkeeping["consistent"] else EXIT_FAIL


def cmd_bass_test(args, out: Path) -> int:
    from .semidirect import bass_diagonal_test, bass_factor_test, embed_homomorphism_test
    act = _action_from_file(args.monodromy) if args.monodromy else _default_action()
    theta = tuple((j,) for j in range(1, act.base_rank + 1))
    reps = [f(act, theta, samples=args.samples, seed=args.seed, base_len=args.base_len).to_json()
            for f in (bass_factor_test, bass_diagonal_test, embed_homomorphism_test)]
    ok = all(r["violations"] == 0 for r in reps)
    _write_json(out / "bass.json", {"command": "bass-test", "theta": "b_j -> c_j", "reports": reps, "passed": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bs_demo(args, out: Path) -> int:
    from .bs12 import bs_demo
    rep = bs_demo()
    _write_json(out / "bs_demo.json", rep)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def _emit_table(out: Path, stem: str, table, fit, extra=None) -> dict:
    from .distortion_lab import fit_report_json
    from .plotting import plot_growth, plot_loglog
    _write_text(out / f"{stem}.csv", table.to_csv())
    data = dict(fit) if fit else {}
    if extra:
        data.update(extra)
    _write_text(out / f"{stem}_fit.json", fit_report_json(data) + "\n")
    plot_growth(table, fit, out / f"{stem}.png")
    plot_loglog(table, out / f"{stem}_loglog.png")
    return data


def cmd_distort(args, out: Path) -> int:
    from . import distortion_lab as dl
    if args.what == "example1":
        t = dl.GrowthTable(label=f"unipotent witness k={args.k}")
        for n in range(1, args.nmax + 1):
            kern, amb = dl.example1_witness(args.k, n)
            t.add(n, amb, kern)
        fit = dl.fit_growth(t)
        _emit_table(out, f"example1_k{args.k}", t, fit, {"monotone": t.is_monotone()})
        return EXIT_OK if t.is_monotone() else EXIT_FAIL
    if args.what == "step":
        act = _action_from_file(args.monodromy[0]) if args.monodromy else _default_action()
        t, _ = dl.hyperbolic_step_table(act, range(1, args.nmax + 1), seed=args.seed)
        fit = dl.fit_growth(t)
        _emit_table(out, "step", t, fit, {"monotone": t.is_monotone()})
        return EXIT_OK if t.is_monotone() else EXIT_FAIL
    if args.what == "chain":
        name, _, kk = args.base.partition(":")
        if name != "example1":
            raise UsageError("chain base must be example1:<k>")
        k = int(kk or 1)
        acts = [_action_from_file(f) for f in args.monodromy] if args.monodromy else [_default_action()]
        if len(acts) != 1:
            raise UsageError("tables are built for a single hyperbolic step; pass one monodromy file")
        act = acts[0]
        try:
            t, info = dl.chain_table(k, act, args.nmax, cap=args.cap)
        except ValueError as exc:
            raise UsageError(str(exc))
        fit = dl.fit_growth(t)
        lip = max(len(w) for a in act.autos for w in a.images + a.inverse_images)
        upper = dl.upper_model_check(t, [r["g1_length"] for r in info], lip)
        _emit_table(out, "chain", t, fit, {"upper_model": upper, "monotone": t.is_monotone(), "rows_info": info})
        return EXIT_OK if upper["passed"] and t.is_monotone() else EXIT_FAIL
    if args.what == "fit":
        if not args.csv:
            raise UsageError("distort fit needs a CSV path")
        t = dl.GrowthTable.from_csv(Path(args.csv).read_text(encoding="utf-8"), label=Path(args.csv).stem)
        try:
            fit = dl.fit_growth(t)
        except dl.FitError as exc:
            raise UsageError(str(exc))
        _emit_table(out, "fit", t, fit)
        return EXIT_OK
    raise UsageError(f"unknown distort target {args.what!r}")


EXPORT_FORMATS = {"complex": ("txt", "json"), "link": ("dot", "json"), "spine": ("dot", "json"),
                  "presentations": ("txt", "json")}


def cmd_export(args, out: Path) -> int:
    if args.what not in EXPORT_FORMATS:
        raise UsageError(f"unknown export target {args.what!r}")
    if args.format not in EXPORT_FORMATS[args.what]:
        raise UsageError(f"format {args.format!r} not available for {args.what}; "
                         f"use one of {', '.join(EXPORT_FORMATS[args.what])}")
    if args.what == "presentations":
        from .graph_of_groups import dump_presentations
        ch = assemble_from_args(args.n, args.terminal)
        if args.format == "txt":
            _write_text(out / "export_presentations.txt", dump_presentations(ch.presentations()) +
                        "\n# top segment\n" + dump_presentations(ch.top.vertices) +
                        "\n# bottom segment\n" + dump_presentations(ch.bottom.vertices))
        else:
            _write_json(out / "export_presentations.json",
                        {"top": ch.top.summary(), "bottom": ch.bottom.summary(),
                         "groups": {k: p.to_text() for k, p in ch.groups.items()}})
        return EXIT_OK
    cx = _load_complex(args)
    if args.what == "complex":
        if args.format == "txt":
            text = cc.dumps(cx)
            _write_text(out / "export.complex", text)
            return EXIT_OK if cc.dumps(cc.loads(text)) == text else EXIT_FAIL
        _write_json(out / "export_complex.json", {
            "vertices": list(cx.vertices),
            "edges": [[e.id, e.tail, e.head, str(e.length), e.label] for e in cx.edges],
            "faces": [[f.id, [cc._fmt_step(s) for s in f.boundary], [cc.format_angle(a) for a in f.angles], f.shape]
                      for f in cx.faces]})
        return EXIT_OK
    if args.what == "link":
        link = build_link(cx, _vertex(cx, args))
        if args.format == "dot":
            text = to_dot(link)
            _write_text(out / "export_link.dot", text)
            back = from_dot(text)
            return EXIT_OK if (back.nodes, back.edges) == (link.nodes, link.edges) else EXIT_FAIL
        _write_json(out / "export_link.json", {"vertex": link.vertex, "nodes": [f"{e}{'+' if s > 0 else '-'}"
                                                                               for e, s in link.nodes],
                                               "edges": [[e.face, e.corner, str(e.weight)] for e in link.edges]})
        return EXIT_OK
    spine = build_spine(cx)
    if args.format == "dot":
        _write_text(out / "export_spine.dot", spine_to_dot(spine))
    else:
        _write_json(out / "export_spine.json", {"rank": spine.rank, "tree": spine.tree_description()})
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="npcchain", description=__doc__.splitlines()[0])
    p.add_argument("--out", default="out", help="output directory (default: out)")
    sub = p.add_subparsers(dest="command", required=True)

    def complex_args(sp, k=True):
        sp.add_argument("--complex", help="structured-text complex file")
        if k:
            sp.add_argument("--k", type=int, help="use the template X_k instead of a file")

    s = sub.add_parser("build-xk", help="build the template complex X_k")
    s.add_argument("--k", type=int, required=True)

    s = sub.add_parser("check-npc", help="validate and run the link condition")
    complex_args(s)
    s.add_argument("--strict", action="store_true", help="also require every link loop > 2 pi")

    s = sub.add_parser("link", help="export a vertex link as DOT")
    complex_args(s)
    s.add_argument("--vertex")
    s.add_argument("--dot", help="DOT output path (default: <out>/link.dot)")

    s = sub.add_parser("ultraconvex", help="ultra-convexity of a rose")
    complex_args(s)
    s.add_argument("--rose", required=True, nargs="+", help="edge ids (ids contain commas, so space separated)")

    s = sub.add_parser("spine", help="spine graph and its H1 basis")
    complex_args(s)

    s = sub.add_parser("short-cycles", help="all link cycles up to a length, with H1 images")
    complex_args(s)
    s.add_argument("--max", type=int, default=6)

    s = sub.add_parser("pipeline-yk", help="build and certify Y_k")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--report", help="report path (default: <out>/Y_<k>/report.json)")
    s.add_argument("--no-monodromy", action="store_true")

    s = sub.add_parser("monodromy", help="replay a pipeline report and export its monodromy")
    s.add_argument("--from-pipeline", required=True, help="pipeline report.json")

    s = sub.add_parser("chain", help="glue Y_k pieces onto a base complex")
    s.add_argument("--ks", type=int, nargs="+", required=True)
    s.add_argument("--base", choices=("gamma", "y1"), default="gamma")
    s.add_argument("--base-k", type=int, help="rank of the Gamma base (default: first k)")
    s.add_argument("--presentations", action="store_true", help="also emit H_i, L_i, G_i, C_n, D_n")

    s = sub.add_parser("presentations", help="assemble both segment graphs of groups")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--terminal", default="example1:2")
    s.add_argument("--monodromy", nargs="*", help="monodromy files for the first blocks")

    s = sub.add_parser("bass-test", help="Bass-condition property tests")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--monodromy", help="monodromy file (default: the Y_1 monodromy)")
    s.add_argument("--base-len", type=int, default=2, help="max base word length in samples (default 2)")

    sub.add_parser("bs-demo", help="the BS(1,2) double counterexample")

    s = sub.add_parser("distort", help="distortion tables, fits and figures")
    s.add_argument("what", choices=("example1", "step", "chain", "fit"))
    s.add_argument("csv", nargs="?")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--nmax", type=int, default=18)
    s.add_argument("--monodromy", nargs="*")
    s.add_argument("--base", default="example1:1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int, default=2 ** 26)

    s = sub.add_parser("export", help="DOT / JSON / text exports")
    s.add_argument("what")
    s.add_argument("--format", required=True)
    complex_args(s)
    s.add_argument("--vertex")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--terminal", default="example1:2")
    return p


COMMANDS = {
    "build-xk": cmd_build_xk, "check-npc": cmd_check_npc, "link": cmd_link, "ultraconvex": cmd_ultraconvex,
    "spine": cmd_spine, "short-cycles": cmd_short_cycles, "monodromy": cmd_monodromy, "chain": cmd_chain,
    "presentations": cmd_presentations, "bass-test": cmd_bass_test, "bs-demo": cmd_bs_demo,
    "distort": cmd_distort, "export": cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    timing = {}
    t0 = time.perf_counter()
    try:
        if args.command == "pipeline-yk":
            code = cmd_pipeline_yk(args, out, timing)
        else:
            code = COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, cc.ComplexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    timing["total_seconds"] = round(time.perf_counter() - t0, 3)
    _write_json(out / "timing.json", {"command": args.command, **timing})
    return code


if __name__ == "__main__":
    sys.exit(main())
