"""One test per acceptance criterion; each prints a PASS/FAIL line (collected in the terminal summary)."""
import json
import math
import time

import pytest

from npcchain import distortion_lab as dl
from npcchain.bs12 import bs_demo
from npcchain.complex_core import euler_characteristic, validate
from npcchain.covering import middle_cycles
from npcchain.link_analysis import build_link, hop_distance
from npcchain.pipeline import build_chain, chain_strict, pipeline_yk
from npcchain.semidirect import bass_diagonal_test, bass_factor_test, embed_homomorphism_test
from npcchain.spine_homology import build_spine, cycle_class, enumerate_short_cycles, hnt_check, link_to_spine
from npcchain.templates import build_xk, n_id

MMAX = 18


@pytest.fixture(scope="module")
def step_table(y1_action):
    return dl.hyperbolic_step_table(y1_action, range(1, MMAX + 1))


def test_criterion_01_template(verdict):
    v = verdict(1, "template counts, bipartite link without 2-cycles")
    t0 = time.perf_counter()
    for k in (1, 2, 3):
        X = build_xk(k)
        assert X.counts() == (1, 8 * k + 8, 16 * k) and validate(X).ok
        link = build_link(X, "v")
        assert len(link.nodes) == 16 * k + 16 and len(link.edges) == 48 * k
        assert link.bipartition() is not None  # no odd cycles
        pairs = [frozenset((e.u, e.w)) for e in link.edges]
        assert all(len(p) == 2 for p in pairs) and len(set(pairs)) == len(pairs)  # no loops, no 2-cycles
    dt = time.perf_counter() - t0
    assert dt < 5
    v.ok(f"{dt:.2f}s")


def test_criterion_02_short_cycles(verdict):
    v = verdict(2, "short link cycles are homologically nontrivial, middle 8-cycles satisfy HNT")
    counts = {}
    t0 = time.perf_counter()
    for k in (1, 2, 3):
        X = build_xk(k)
        link = build_link(X, "v")
        mor = link_to_spine(link, build_spine(X), X)
        cycles = enumerate_short_cycles(link, 6)
        assert {len(c) for c in cycles} == {4, 6}
        assert all(cycle_class(mor, c).any() for c in cycles)
        mids = middle_cycles(link, X, k)
        assert len(mids) == 2 * k and all(len(c) == 8 and hnt_check(c, mor) for c in mids)
        counts[k] = len(cycles)
    dt = time.perf_counter() - t0
    assert dt < 120
    v.ok(f"cycles {counts}, {dt:.2f}s")


def test_criterion_03_n_distance(verdict):
    v = verdict(3, "dist(n+_{1,j}, n-_{1,j}) >= 6")
    seen = []
    for k in (1, 2, 3):
        link = build_link(build_xk(k), "v")
        for j in range(1, k + 1):
            d = hop_distance(link, (n_id(1, j), 1), (n_id(1, j), -1))
            assert d is not None and d >= 6
            seen.append(d)
    v.ok(f"distances {sorted(set(seen))}")


def test_criterion_04_pipeline_k1(verdict):
    v = verdict(4, "Y_1 certified strict NPC, replay bit-identical")
    t0 = time.perf_counter()
    run = pipeline_yk(1)
    dt = time.perf_counter() - t0
    rep = run.report
    cert = rep["certificates"]
    assert cert["validate"] and cert["npc"]["passed"] and cert["npc"]["strict"]
    assert cert["ultraconvex"]["passed"] and cert["C1"]
    N = rep["parameters"]["N"]
    assert rep["counts"]["kernel_rank"] == 8 * N - 1
    assert euler_characteristic(run.Y) == 0 == rep["counts"]["euler_characteristic_Y"]
    assert cert["cover_link_girth"] >= 8
    again = pipeline_yk(1)
    assert json.dumps(again.report, sort_keys=True) == json.dumps(rep, sort_keys=True)
    assert dt < 600
    v.ok(f"N={N}, Y={rep['counts']['Y']}, {dt:.2f}s")


def test_criterion_05_monodromy(verdict, y1):
    v = verdict(5, "relators vanish under psi, Phi o Phi^-1 = id, surjectivity witnesses")
    mono = y1.report["monodromy"]
    assert mono["relators_failed"] == 0 and mono["relators_checked"] == len(y1.Y.faces)
    assert y1.monodromy.action.verify()
    assert mono["inverse_verified_on"] == 8 * y1.report["parameters"]["N"] - 1
    assert mono["surjectivity_witnesses"] >= 1
    v.ok(f"{mono['relators_checked']} relators, basis {mono['inverse_verified_on']}")


def test_criterion_06_example1(verdict):
    v = verdict(6, "unipotent lengths exact, witness fits polynomial of degree k")
    x1 = list(dl.example1_iterates(2, 1, 200))
    x2 = list(dl.example1_iterates(2, 2, 200))
    assert x1 == [1] * 201 and x2 == [n + 1 for n in range(201)]
    for i in (1, 2, 3, 4):
        assert list(dl.example1_iterates(4, i, 100)) == dl.example1_recurrence(i, 100)
    slopes = {}
    for k in (2, 3):
        t = dl.GrowthTable(label=f"k={k}")
        for n in range(1, 41):
            kern, amb = dl.example1_witness(k, n)
            t.add(n, amb, kern)
        fit = dl.fit_growth(t)
        assert fit["depth"] == 0 and abs(fit["slope"] - k) <= 0.15
        slopes[k] = round(fit["slope"], 3)
    v.ok(f"slopes {slopes}")


def test_criterion_07_hyperbolic_step(verdict, step_table):
    v = verdict(7, "hyperbolic step |Phi_g(b)| fits exponential")
    table, _ = step_table
    assert [r.x for r in table.rows] == list(range(1, MMAX + 1))
    assert table.is_monotone()
    fit = dl.fit_growth(table)
    assert fit["depth"] == 1 and fit["base"] > 1
    v.ok(f"depth {fit['depth']}, base {fit['base']:.2f}, |Phi(b)| at m={MMAX}: {table.rows[-1].kernel}")


def test_criterion_08_chain(verdict, y1_action, step_table):
    v = verdict(8, "two-stage chain fits exp(poly) with the base degree, upper model holds")
    table, info = dl.chain_table(1, y1_action, MMAX, cap=2 ** 26)
    fit = dl.fit_growth(table)
    base_degree = 1
    assert fit["depth"] == 1 and abs(fit["slope"] - base_degree) <= 0.25
    lip = max(len(w) for a in y1_action.autos for w in a.images + a.inverse_images)
    up = dl.upper_model_check(table, [i["g1_length"] for i in info], lip)
    assert up["passed"]
    # g_1 = x_1^n, so the second stage is the forward series of the step table
    fwd = [d["length"] for d in step_table[1] if d["g"] and d["g"][0] == 1]
    assert [r.kernel for r in table.rows] == fwd
    built = sum(1 for i in info if i["mode"] == "built")
    v.ok(f"slope {fit['slope']:.3f}, {built} rows built under 2^26, {len(info) - built} tracked")


def test_criterion_09_bass(verdict, y1_action):
    v = verdict(9, "Bass property tests, 1000 samples each")
    theta = ((1,),)
    reps = [f(y1_action, theta, samples=1000, seed=0, base_len=2)
            for f in (bass_factor_test, bass_diagonal_test, embed_homomorphism_test)]
    assert [r.violations for r in reps] == [0, 0, 0]
    v.ok("0 violations in 3 x 1000")


def test_criterion_10_bs_double(verdict):
    v = verdict(10, "BS(1,2) double: one commutator trivial, the other not")
    t0 = time.perf_counter()
    rep = bs_demo()
    dt = time.perf_counter() - t0
    assert rep["[(tv)(tu)^-1, a]"]["trivial"]
    assert not rep["[s1 s2^-1, a]"]["trivial"]
    assert dt < 1
    v.ok(f"{dt * 1000:.1f}ms")


def test_criterion_11_chaining(verdict, y1):
    v = verdict(11, "glueing re-certifies NPC (Y_2 on Gamma_2) and strictness (Y_1 chain)")
    K, rep, _ = build_chain([2], "gamma", 2)
    assert validate(K).ok and rep["npc"]["passed"]
    Ks, srep = chain_strict(2, run=y1)
    assert srep["base_npc"]["strict"] and srep["strict"]
    v.ok(f"Y_2 on Gamma_2 {rep['counts']}, strict chain {srep['steps'][-1]['counts']}")
