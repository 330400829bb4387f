import json
import math

import pytest

import mgtkit

FREE_AB = json.dumps({
    "kind": "free-product",
    "factors": [
        {"kind": "free", "rank": 1, "labels": ["a"]},
        {"kind": "free", "rank": 1, "labels": ["b"]},
    ],
})


def test_version():
    assert mgtkit.__version__ == "0.1.0"


def test_word_normal_form():
    assert mgtkit.normalize_word(FREE_AB, "a*b*b^-1*a") == "a^2"
    assert mgtkit.normalize_word(FREE_AB, "a*a^-1") == "e"


def test_ball_growth():
    words = mgtkit.ball_words(FREE_AB, 2)
    # 1 + 4 + 4*3 elements of the rank-two free product
    assert len(words) == 17
    assert words[0] == "e"
    assert len(set(words)) == 17


def test_shannon_entropy():
    assert mgtkit.shannon_entropy([(1, 2), (1, 2)]) == math.log(2.0)
    skew = mgtkit.shannon_entropy([(1, 4), (3, 4)])
    want = 0.25 * math.log(4.0) + 0.75 * math.log(4.0 / 3.0)
    assert abs(skew - want) < 1e-12


def test_run_experiment_entropy():
    rep = mgtkit.run_experiment({"kind": "entropy", "seed": 3, "samples": 50_000})
    assert rep["pass"] is True
    assert rep["payload"]["closed_form_exact"] is True
    again = mgtkit.run_experiment({"kind": "entropy", "seed": 3, "samples": 50_000})
    assert again["payload"] == rep["payload"]


def test_run_experiment_rejects_unknown_fields():
    with pytest.raises(ValueError):
        mgtkit.run_experiment({"kind": "entropy", "sed": 3})


def test_groupoid_validation():
    rep = mgtkit.run_experiment({
        "kind": "groupoid-build",
        "params": {"builtin": "wreath:2"},
    })
    assert rep["pass"] is True
    assert rep["payload"]["n_morphisms"] == 64
    assert rep["payload"]["n_objects"] == 8

    # two isolated units
    direct = mgtkit.validate_groupoid({
        "objects": [
            {"id": 0, "weight": {"num": 1, "den": 2}},
            {"id": 1, "weight": {"num": 1, "den": 2}},
        ],
        "morphisms": [
            {"id": 0, "src": 0, "rng": 0},
            {"id": 1, "src": 1, "rng": 1},
        ],
        "units": [0, 1],
        "inverse": [0, 1],
        "composition": [[0, 0, 0], [1, 1, 1]],
    })
    assert direct["ok"] is True
    assert direct["n_morphisms"] == 2
    assert direct["ergodic"] is False


def test_solve_cocycle_roundtrip():
    rep = mgtkit.run_experiment({
        "kind": "cocycle-solve",
        "seed": 12,
        "params": {"instances": 5, "max_points": 4, "max_target": 3},
    })
    assert rep["pass"] is True
    assert rep["payload"]["recovered"] == 5


def test_acceptance_filter():
    rep = mgtkit.acceptance_report(filter="index-cocycle")
    assert rep["all_pass"] is True
    assert [c["name"] for c in rep["criteria"]] == ["index-cocycle"]
