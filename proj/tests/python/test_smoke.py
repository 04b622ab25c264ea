# Copyright 2026 The treeshap-hd Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import pathlib

import numpy as np
import pytest

import treeshap_hd as th

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def small_model():
    # x0 < 0.5 ? (x1 < 0.3 ? 1 : 2) : (x2 < 0.7 ? 3 : (x0 < 0.8 ? 4 : 5))
    tree = [
        {"kind": "split", "feature": 0, "threshold": 0.5, "cmp": "lt", "left": 1, "right": 2, "cover": 10},
        {"kind": "split", "feature": 1, "threshold": 0.3, "cmp": "lt", "left": 3, "right": 4, "cover": 4},
        {"kind": "split", "feature": 2, "threshold": 0.7, "cmp": "lt", "left": 5, "right": 6, "cover": 6},
        {"kind": "leaf", "weight": 1.0, "cover": 1},
        {"kind": "leaf", "weight": 2.0, "cover": 3},
        {"kind": "leaf", "weight": 3.0, "cover": 2},
        {"kind": "split", "feature": 0, "threshold": 0.8, "cmp": "lt", "left": 7, "right": 8, "cover": 4},
        {"kind": "leaf", "weight": 4.0, "cover": 1},
        {"kind": "leaf", "weight": 5.0, "cover": 3},
    ]
    stump = [
        {"kind": "split", "feature": 3, "threshold": 0.0, "cmp": "le", "left": 1, "right": 2, "cover": 2},
        {"kind": "leaf", "weight": -0.5, "cover": 1},
        {"kind": "leaf", "weight": 0.5, "cover": 1},
    ]
    doc = {"n_features": 4, "base_score": 0.25, "trees": [tree, stump]}
    return th.parse_model(json.dumps(doc))


@pytest.fixture
def data():
    rng = np.random.default_rng(7)
    return rng.uniform(-1, 1.5, size=(6, 4)), rng.uniform(-1, 1.5, size=(5, 4))


def test_model_roundtrip():
    model = small_model()
    assert model.n_features == 4
    assert model.n_trees == 2
    assert model.max_path_depth == 3
    again = th.parse_model(model.to_json())
    x = np.array([[0.1, 0.2, 0.9, 1.0], [0.9, 0.9, 0.9, -1.0]])
    np.testing.assert_array_equal(model.predict(x), again.predict(x))
    np.testing.assert_allclose(model.predict(x), [1.75, 4.75])


@pytest.mark.parametrize("functional", ["shapley", "banzhaf", "shapley_interaction"])
def test_background_matches_bruteforce(data, functional):
    x, bg = data
    model = small_model()
    res = th.explain(model, x, bg, functional=functional)
    for r in range(x.shape[0]):
        want, _ = th.bruteforce(model, x[r], bg, functional=functional)
        np.testing.assert_allclose(res["values"][r], want, atol=1e-12)


def test_local_accuracy(data):
    x, bg = data
    model = small_model()
    for mode, background in (("background", bg), ("path_dependent", None)):
        res = th.explain(model, x, background, mode=mode)
        total = res["base_value"] + res["values"].sum(axis=1)
        np.testing.assert_allclose(total, model.predict(x), atol=1e-12)


def test_interaction_rows_sum_to_shapley(data):
    x, bg = data
    model = small_model()
    phi = th.explain(model, x, bg)["values"]
    inter = th.explain(model, x, bg, functional="shapley_interaction")["values"]
    assert inter.shape == (6, 4, 4)
    np.testing.assert_allclose(inter.sum(axis=2), phi, atol=1e-12)


def test_dense_baseline_agrees(data):
    x, bg = data
    model = small_model()
    fast = th.explain(model, x, bg, functional="banzhaf")
    dense = th.explain_dense(model, x, bg, functional="banzhaf")
    np.testing.assert_allclose(fast["values"], dense["values"], atol=1e-13)
    assert dense["stats"]["cube_entries"] > 0


def test_fast_mult_counts():
    k = 5
    rng = np.random.default_rng(3)
    diag = th.diagonal(k, 2)
    f = rng.normal(size=1 << k)
    out, adds, muls = th.strassen_like_mult(diag, f)
    assert adds == k * (1 << k)
    assert muls == 1 << k
    np.testing.assert_allclose(out, th.reconstruct_dense(diag) @ f, atol=1e-13)


def test_cube_value():
    # positions 0 and 1 positive, 2 negative
    assert th.cube_value(0b011, 0b100, 1.0, "shapley", 0) == pytest.approx(1.0 / 6.0)
    assert th.cube_value(0b011, 0b100, 1.0, "shapley", 2) == pytest.approx(-1.0 / 3.0)
    assert th.cube_value(0b011, 0b100, 2.0, "banzhaf", 1) == pytest.approx(0.5)


def test_lightgbm_fixture():
    model = th.load_lightgbm(str(DATA / "lgbm_ensemble.txt"))
    rows = np.loadtxt(DATA / "lgbm_ensemble_predictions.csv", delimiter=",", skiprows=1)
    x, expected = rows[:, :-1], rows[:, -1]
    np.testing.assert_allclose(model.predict(x), expected, rtol=1e-9, atol=1e-9)


def test_errors(data):
    x, bg = data
    model = small_model()
    with pytest.raises(th.ValidationFailure):
        th.explain(model, x[:, :3], bg)
    with pytest.raises(th.ValidationFailure):
        th.explain(model, x, bg, functional="owen")
    with pytest.raises(th.BudgetFailure):
        th.explain(model, x, bg, memory_budget=64)
    with pytest.raises(th.BudgetFailure):
        th.explain(model, x, bg, depth_cap=1)
    with pytest.raises(th.ValidationFailure):
        th.parse_model("{")


def test_bench_json():
    out = json.loads(th.bench([4, 13], method="both", leaves=1, trials=1))
    records = {(r["depth"], r["method"]): r for r in out["records"]}
    # one shared downward zeta plus one upward zeta per position
    assert records[(4, "hd")]["adds"] == 5 * 4 * 8
    assert records[(4, "hd")]["muls"] == 4 * 16
    assert records[(13, "dense_baseline")]["status"] == "skipped"
