"""End-to-end construction of Y_k and the glued chain complexes.

``pipeline_yk`` runs template -> link -> spine -> functional -> cover ->
deleted cell -> Morse data -> monodromy, certifying every stage, and
returns a report that depends only on k (timing is kept apart).
"""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .complex_core import (SQRT2, PE2Complex, Subcomplex1, amalgamate, delete_open_cells, dumps,
                           euler_characteristic, rescale, validate)
from .covering import (CocycleSpec, build_branched_cover, check_deck_invariance, check_projection, choose_N,
                       choose_lambda, collect_C, compute_M, edge_voltages, make_cocycle, rose_distance_report,
                       select_rose, sheet_id)
from .link_analysis import build_link, check_npc, check_ultraconvex, girth
from .morse import (Monodromy, check_morse_conditions, extract_monodromy, kernel_rank, labeling_from_names,
                    relator_check, surjectivity_witnesses)
from .spine_homology import build_spine, link_to_spine
from .templates import a_id, build_gamma_diagonal, build_xk, gamma_rose
from .words import dump_monodromy


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class YkRun:
    k: int
    report: dict
    template: PE2Complex
    cover: PE2Complex
    Y: PE2Complex
    rose: Subcomplex1
    monodromy: Monodromy | None
    timing: dict = field(default_factory=dict)

    def monodromy_text(self) -> str:
        if self.monodromy is None:
            return ""
        act = self.monodromy.action
        names = list(self.monodromy.basis)
        return dump_monodromy(dict(zip(act.base_names, act.autos)), names)


def _require(ok: bool, stage: str, message: str):
    if not ok:
        raise StageError(stage, message)


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def pipeline_yk(k: int, monodromy: bool = True) -> YkRun:
    if k < 1:
        raise ValueError("k must be at least 1")
    clock = {}
    t0 = time.perf_counter()

    def lap(name):
        clock[name] = round(time.perf_counter() - t0, 3)

    X = build_xk(k)
    _require(validate(X).ok, "template", "X_k fails validation")
    link = build_link(X, "v")
    spine = build_spine(X)
    mor = link_to_spine(link, spine, X)
    _require(mor.immersion, "spine", "link -> spine map is not an immersion")
    lap("template")

    C = collect_C(link, mor, X, k)
    lam = choose_lambda(spine.rank, C)
    ell = sorted({sum(a * b for a, b in zip(lam, c)) for c in C})
    _require(0 not in ell, "functional", "functional vanishes on a short cycle class")
    cocycle = make_cocycle(spine, lam)
    M = compute_M(link, edge_voltages(link, X, cocycle))
    N = choose_N(M, k, ell)
    spec = CocycleSpec(lam, cocycle, ell, M, N)
    lap("functional")

    cov = build_branched_cover(X, cocycle, N)
    _require(check_deck_invariance(cov), "cover", "deck shift is not an automorphism")
    _require(check_projection(cov), "cover", "projection does not recover the template")
    cover_link = build_link(cov.complex, cov.vertex)
    g = girth(cover_link)
    _require(g is not None and g >= 8, "cover", f"lifted link girth {g} < 8")
    rose = select_rose(cov, M, k)
    lap("cover")

    deleted = sheet_id(a_id(1), 0)
    Y = delete_open_cells(cov.complex, deleted).with_meta(kind=f"Y_{k}", deleted=deleted)
    val = validate(Y)
    _require(val.ok, "Y", f"validation failed: {val.violations[:3]}")
    npc = check_npc(Y)
    _require(npc.passed and npc.strict, "Y", f"not strictly NPC: {npc.to_json()}")
    rose_y = Subcomplex1.of(Y, rose.edges)
    uc = check_ultraconvex(Y, rose_y)
    _require(uc.passed, "Y", f"rose not ultra-convex: {uc.witness}")
    chi = euler_characteristic(Y)
    lab = labeling_from_names(Y)
    morse = check_morse_conditions(Y, lab)
    _require(morse["C1"], "morse", "directional links are not all trees")
    rank = kernel_rank(Y, lab)
    _require(rank == 8 * N - 1, "morse", f"kernel rank {rank} != 8N-1")
    lap("Y")

    report = {
        "command": "pipeline-yk",
        "inputs": {"k": k},
        "seed": None,
        "parameters": {
            "spine_tree": spine.tree_description(),
            "spine_rank": spine.rank,
            "short_cycle_classes": len(C),
            "lambda": list(lam),
            "ell_values": ell,
            "M": M,
            "N": N,
            "deleted_cell": deleted,
            "rose": list(rose.edges),
        },
        "counts": {
            "template": list(X.counts()),
            "cover": list(cov.complex.counts()),
            "Y": list(Y.counts()),
            "euler_characteristic_Y": chi,
            "kernel_rank": rank,
            "ell": rank,
        },
        "certificates": {
            "validate": val.ok,
            "npc": npc.to_json(),
            "ultraconvex": uc.to_json(),
            "rose_distances_over_pi": rose_distance_report(Y, rose_y, cov.vertex),
            "C0": morse["C0"],
            "C1": morse["C1"],
            "cover_link_girth": g,
            "deck_invariance": True,
            "projection": True,
        },
        "complex_sha256": {"template": _sha(dumps(X)), "Y": _sha(dumps(Y))},
    }
    report["parameters"]["cocycle"] = spec.to_json()
    mono = None
    if monodromy:
        mono = extract_monodromy(Y, lab, rose_y)
        bad = relator_check(Y, lab, mono)
        _require(not bad, "monodromy", f"relators not killed: {bad[:3]}")
        inv_ok = mono.action.verify()
        _require(inv_ok, "monodromy", "Phi o Phi^-1 != id")
        wit = surjectivity_witnesses(lab, mono)
        auts = mono.action.autos
        report["monodromy"] = {
            "relators_checked": len(Y.faces),
            "relators_failed": 0,
            "inverse_verified_on": rank,
            "surjectivity_witnesses": len(wit),
            "image_lengths": [[len(w) for w in a.images] for a in auts],
            "max_image_length": max(len(w) for a in auts for w in a.images),
        }
        run = YkRun(k, report, X, cov.complex, Y, rose_y, mono, clock)
        report["monodromy"]["sha256"] = _sha(run.monodromy_text())
        lap("monodromy")
        return run
    return YkRun(k, report, X, cov.complex, Y, rose_y, None, clock)


# -- chains ------------------------------------------------------------------------

def glue_onto(base: PE2Complex, base_vertex: str, base_rose, piece: PE2Complex, piece_vertex: str,
              piece_rose, tag: str) -> PE2Complex:
    """Identify the rose of ``base`` with the ultra-convex rose of ``piece``, petal by petal."""
    if len(base_rose) != len(piece_rose):
        raise StageError("chain", f"rank mismatch: base rose has rank {len(base_rose)}, "
                                  f"piece rose has rank {len(piece_rose)}")
    uc = check_ultraconvex(piece, Subcomplex1.of(piece, piece_rose))
    if not uc.passed:
        raise StageError("chain", f"piece rose is not ultra-convex: {uc.witness}")
    iso = {base_vertex: piece_vertex}
    iso.update(zip(base_rose, piece_rose))
    return amalgamate(base, piece, iso, tag=tag)


def attach_edges(run: YkRun, r: int, prefix: str = "") -> tuple[str, ...]:
    """The first r horizontal edges of a piece, sheet 0 first: a_2^(0), a_3^(0), ..."""
    ids = set(e.id for e in run.Y.edges)
    order = [sheet_id(a_id(j), p) for p in range(run.report["parameters"]["N"]) for j in range(1, 9)]
    order = [e for e in order if e in ids]
    if r > len(order):
        raise StageError("chain", f"piece has only {len(order)} horizontal edges, {r} requested")
    return tuple(prefix + e for e in order[:r])


def build_chain(ks, base: str = "gamma", base_k: int | None = None, presentations: bool = False,
                runs: dict | None = None):
    """Glue Y_{k_1}, Y_{k_2}, ... in turn onto a base complex and certify the result.

    base "gamma": the diagonal Gamma_{base_k}; pieces are scaled by sqrt 2 so
    their rose petals match the diagonal loops.  base "y1": Y_1 itself, glued
    along its first horizontal edges.  Piece i+1 is glued onto the first
    k_{i+1} horizontal edges of piece i.  Returns (K, report, assembly), the
    assembly being None unless presentations were asked for and the ranks
    allow the algebraic chain (rank B_i = rank A_{i-1}).
    """
    ks = list(ks)
    if not ks or min(ks) < 1:
        raise StageError("chain", "need at least one k >= 1")
    runs = {} if runs is None else runs

    def get(k):
        if k not in runs or (presentations and runs[k].monodromy is None):
            runs[k] = pipeline_yk(k, monodromy=presentations)
        return runs[k]

    if base == "gamma":
        bk = base_k or ks[0]
        K = build_gamma_diagonal(bk)
        vertex, rose, scale = "v", gamma_rose(bk), SQRT2
        base_desc = f"Gamma_{bk} (diagonal)"
    elif base == "y1":
        r1 = get(1)
        K = r1.Y
        vertex, rose, scale = "v̂", attach_edges(r1, ks[0]), None
        base_desc = "Y_1"
    else:
        raise StageError("chain", f"unknown base {base!r}")
    base_npc = check_npc(K)
    steps = []
    for i, k in enumerate(ks, 1):
        run = get(k)
        piece = rescale(run.Y, scale) if scale is not None else run.Y
        if len(rose) != k:
            raise StageError("chain", f"rank mismatch: step {i} glues Y_{k} onto a rose of rank {len(rose)}")
        tag = f"Y{k}#{i}:"
        K = glue_onto(K, vertex, rose, piece, "v̂", run.rose.edges, tag=tag)
        val = validate(K)
        if not val.ok:
            raise StageError("chain", f"glued complex fails validation: {val.violations[:3]}")
        cert = check_npc(K)
        steps.append({"step": i, "piece": f"Y_{k}", "glued_along": list(rose), "counts": list(K.counts()),
                      "npc": cert.to_json()})
        if i < len(ks):
            rose = attach_edges(run, ks[i], prefix=tag)
    last = steps[-1]["npc"]
    rep = {"base": base_desc, "base_npc": base_npc.to_json(), "ks": ks,
           "scale": str(scale) if scale is not None else "1", "steps": steps, "counts": steps[-1]["counts"],
           "npc": last, "passed": all(s["npc"]["passed"] for s in steps),
           "strict": all(s["npc"]["strict"] for s in steps)}
    assembly = None
    if presentations:
        assembly, why = _chain_presentations(ks, base, base_k, runs)
        if assembly is None:
            rep["presentations_skipped"] = why
    return K, rep, assembly


def _chain_presentations(ks, base, base_k, runs):
    from .graph_of_groups import Block, RankError, assemble_chain, example1_terminal, example2_terminal
    term = example1_terminal(base_k or ks[0]) if base == "gamma" else example2_terminal(runs[1].monodromy.action)
    blocks = []
    for i, k in enumerate(ks):
        mono = runs[k].monodromy
        if i == 0 and base == "gamma":
            theta = tuple((j,) for j in range(1, k + 1))
        else:
            prev = runs[ks[i - 1]] if i else runs[1]
            theta = tuple((prev.monodromy.basis.index(e) + 1,) for e in attach_edges(prev, k))
        blocks.append(Block(mono.action, theta))
    try:
        return assemble_chain(len(ks), blocks, term), None
    except RankError as exc:
        return None, str(exc)


def chain_y_on_gamma(k: int, run: YkRun | None = None) -> tuple[PE2Complex, dict]:
    """Y_k (scaled by sqrt 2) glued along its rose to the diagonal rose of Gamma_k."""
    K, rep, _ = build_chain([k], "gamma", k, runs={k: run} if run else None)
    rep["piece"] = f"sqrt(2) Y_{k}"
    return K, rep


def chain_strict(n: int = 1, run: YkRun | None = None) -> tuple[PE2Complex, dict]:
    """K_0 = Y_1, then n further copies of Y_1, each glued along its rose to one
    horizontal edge of the previous piece; strictness is re-certified after every step."""
    K, rep, _ = build_chain([1] * n, "y1", runs={1: run} if run else None)
    if not rep["base_npc"]["strict"]:
        raise StageError("chain", "K_0 is not strictly NPC")
    for s in rep["steps"]:
        if not s["npc"]["strict"]:
            raise StageError("chain", f"strictness lost at step {s['step']}")
    return K, rep
