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

"""Exact Shapley, Banzhaf and pairwise interaction values for tree ensembles."""

from ._core import (
    BudgetFailure,
    Error,
    Model,
    ValidationFailure,
    bench,
    bruteforce,
    cube_value,
    diagonal,
    explain,
    explain_dense,
    load_lightgbm,
    load_model,
    parse_lightgbm,
    parse_model,
    reconstruct_dense,
    strassen_like_mult,
)

__all__ = [
    "BudgetFailure",
    "Error",
    "Model",
    "ValidationFailure",
    "bench",
    "bruteforce",
    "cube_value",
    "diagonal",
    "explain",
    "explain_dense",
    "load_lightgbm",
    "load_model",
    "parse_lightgbm",
    "parse_model",
    "reconstruct_dense",
    "strassen_like_mult",
]
