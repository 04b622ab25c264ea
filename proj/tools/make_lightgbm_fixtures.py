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

"""Regenerates the LightGBM fixtures under tests/data.

Requires the `lightgbm` package. The fixtures are committed so the C++ test
suite does not depend on it.
"""
import pathlib

import lightgbm as lgb
import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def write_rows(path, X, preds):
    with open(path, "w") as fh:
        fh.write(",".join(f"x{i}" for i in range(X.shape[1])) + ",prediction\n")
        for row, p in zip(X, preds):
            fh.write(",".join(repr(float(v)) for v in row) + f",{float(p)!r}\n")


def stump():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([1.0, 2.0, 3.0, 5.0])
    params = dict(objective="regression", num_leaves=4, max_depth=2, min_data_in_leaf=1,
                  min_data_in_bin=1, min_sum_hessian_in_leaf=0.0, learning_rate=1.0,
                  boost_from_average=False, verbose=-1, seed=1, deterministic=True)
    booster = lgb.train(params, lgb.Dataset(X, y, params={"min_data_in_bin": 1}), num_boost_round=1)
    booster.save_model(OUT / "lgbm_stump.txt")
    write_rows(OUT / "lgbm_stump_predictions.csv", X, booster.predict(X, raw_score=True))


def ensemble():
    rng = np.random.default_rng(7)
    X = rng.uniform(-1.0, 1.0, size=(400, 5))
    y = np.sin(3 * X[:, 0]) + X[:, 1] * X[:, 2] + 0.5 * (X[:, 3] > 0.2) + 0.1 * rng.normal(size=400)
    params = dict(objective="regression", num_leaves=31, max_depth=6, min_data_in_leaf=5,
                  learning_rate=0.2, verbose=-1, seed=3, deterministic=True)
    booster = lgb.train(params, lgb.Dataset(X, y), num_boost_round=12)
    booster.save_model(OUT / "lgbm_ensemble.txt")
    Xt = rng.uniform(-1.0, 1.0, size=(128, 5))
    write_rows(OUT / "lgbm_ensemble_predictions.csv", Xt, booster.predict(Xt, raw_score=True))


def categorical():
    rng = np.random.default_rng(11)
    X = np.column_stack([rng.integers(0, 4, size=200).astype(float), rng.uniform(size=200)])
    y = (X[:, 0] == 2).astype(float) + X[:, 1]
    params = dict(objective="regression", num_leaves=4, min_data_in_leaf=5, verbose=-1,
                  min_data_per_group=5, cat_smooth=1.0, seed=5)
    ds = lgb.Dataset(X, y, categorical_feature=[0])
    booster = lgb.train(params, ds, num_boost_round=1)
    booster.save_model(OUT / "lgbm_categorical.txt")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    stump()
    ensemble()
    categorical()
