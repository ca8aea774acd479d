# Copyright 2026 The hgdiff Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Hypergraph diffusion operators and equivariant diffusion networks."""

from hgdiff._hgdiff import (
    HgdiffError,
    Hypergraph,
    ce_homophily,
    edge_potential_grad,
    edge_potential_prox,
    edge_potential_value,
    gen_csbm,
    power_sum_decode,
    power_sum_encode,
    run_command,
    run_diffusion,
)

__all__ = [
    "HgdiffError",
    "Hypergraph",
    "ce_homophily",
    "edge_potential_grad",
    "edge_potential_prox",
    "edge_potential_value",
    "gen_csbm",
    "power_sum_decode",
    "power_sum_encode",
    "run_command",
    "run_diffusion",
]
