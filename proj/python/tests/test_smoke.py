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

import json

import numpy as np
import pytest

import hgdiff


def test_worked_lec_gradient():
    g = hgdiff.edge_potential_grad("lec", [0.7, 0.5, 0.3], p=2.0, y=[1.0, -1.0, 0.0])
    np.testing.assert_allclose(g, [0.4, -0.4, 0.0], atol=1e-12)


def test_ce_prox_matches_closed_form():
    # Two nodes, ordered pairs: the mean stays put and the gap shrinks by 1 + 8 eta.
    h = np.array([1.0, 0.0])
    z = hgdiff.edge_potential_prox("ce", h, eta=0.25)
    np.testing.assert_allclose(z, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)


def test_power_sum_round_trip():
    z = [0.1, 0.4, 0.9]
    back = sorted(hgdiff.power_sum_decode(hgdiff.power_sum_encode(z, 3), 3))
    np.testing.assert_allclose(back, z, atol=1e-9)


def test_hypergraph_and_homophily():
    h = hgdiff.Hypergraph([[2, 0, 1], [3, 1]], 4)
    assert h.num_nodes == 4
    assert h.num_edges == 2
    assert h.edges() == [[0, 1, 2], [1, 3]]
    assert h.degrees() == [1, 2, 1, 1]
    assert hgdiff.ce_homophily(h, [0, 0, 0, 0]) == pytest.approx(1.0)


def test_invalid_hypergraph_raises():
    with pytest.raises(ValueError):
        hgdiff.Hypergraph([[0, 5]], 3)


def test_gd_diffusion_objective_never_increases():
    h, labels = hgdiff.gen_csbm(alpha=2, nodes_per_class=20, num_hyperedges=10, edge_size=5, seed=3)
    x = np.random.default_rng(0).normal(size=(h.num_nodes, 2))
    H, trace, _ = hgdiff.run_diffusion(h, x, kind="ce", mode="gd", eta=1e-3, max_iters=30, stop_tol=0.0)
    assert H.shape == (40, 2)
    assert len(trace) == 31
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert len(labels) == 40


def test_run_command_check(tmp_path):
    cfg = tmp_path / "check.json"
    cfg.write_text(json.dumps({"seed": 1, "suites": ["lec_worked_example", "power_sum_roundtrip"]}))
    code, _, err = hgdiff.run_command("check", str(cfg), out=str(tmp_path / "out"))
    assert code == 0, err
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["passed"]


def test_run_command_config_error(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"seed": 1, "bogus": 1}))
    code, _, err = hgdiff.run_command("check", str(cfg), out=str(tmp_path / "out"))
    assert code == 2
    assert "bogus" in err
