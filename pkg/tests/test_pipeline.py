import json

import pytest

from npcchain.complex_core import validate
from npcchain.pipeline import StageError, build_chain, chain_strict, pipeline_yk


def test_report_values(y1):
    rep = y1.report
    assert rep["parameters"]["N"] == 11 and rep["parameters"]["M"] == 6
    assert rep["counts"]["Y"] == [1, 175, 174]
    assert rep["counts"]["kernel_rank"] == 87
    assert rep["certificates"]["npc"]["strict"]
    assert rep["certificates"]["npc"]["shortest_loop_over_pi"]["v̂"] == "8/3"
    assert rep["parameters"]["deleted_cell"] == "a_1^(0)"


def test_replay_is_bit_identical(y1):
    again = pipeline_yk(1)
    assert json.dumps(again.report, sort_keys=True) == json.dumps(y1.report, sort_keys=True)
    assert "timing" not in json.dumps(y1.report)


def test_strict_chain_two_steps(y1):
    K, rep = chain_strict(2, run=y1)
    assert rep["strict"] and len(rep["steps"]) == 2
    assert validate(K).ok
    assert rep["steps"][1]["glued_along"] == ["Y1#1:a_2^(0)"]


def test_rank_mismatch(y1):
    with pytest.raises(StageError, match="rank mismatch"):
        build_chain([1], "gamma", 2, runs={1: y1})


def test_y1_on_gamma1(y1):
    K, rep, _ = build_chain([1], "gamma", 1, runs={1: y1})
    assert rep["passed"] and not rep["strict"]
    assert rep["scale"] == "1*sqrt(2)"


def test_chain_presentations_gamma(y1):
    _, rep, assembly = build_chain([1], "gamma", 1, presentations=True, runs={1: y1})
    assert assembly is not None and assembly.bookkeeping["consistent"]


def test_chain_presentations_skipped_on_rank_gap(y1):
    _, rep, assembly = build_chain([1], "y1", presentations=True, runs={1: y1})
    assert assembly is None and "rank" in rep["presentations_skipped"]
