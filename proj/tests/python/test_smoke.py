# Copyright 2026 The CLiD Audit Authors
#
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
import math
from pathlib import Path

import pytest

import clid_audit

ROOT = Path(__file__).resolve().parents[2]


def test_schedule_endpoints():
    s = clid_audit.linear_schedule()
    assert s.total_steps == 100
    assert s.beta(1) == pytest.approx(1e-4)
    assert s.beta(100) == pytest.approx(0.05)
    assert s.alpha_bar(100) == pytest.approx(0.078, abs=1e-3)


def test_forward_diffuse_closed_form():
    s = clid_audit.linear_schedule()
    xt = clid_audit.forward_diffuse([1.0, -2.0], 50, [0.5, 0.25], s)
    ab = s.alpha_bar(50)
    assert xt[0] == pytest.approx(math.sqrt(ab) * 1.0 + math.sqrt(1 - ab) * 0.5)
    assert xt[1] == pytest.approx(math.sqrt(ab) * -2.0 + math.sqrt(1 - ab) * 0.25)


def test_roc_auc_with_ties():
    r = clid_audit.roc_auc([0.9, 0.5, 0.5, 0.1], [True, True, False, False])
    assert r["auc"] == pytest.approx(0.875)
    assert r["fpr"][0] == 0.0 and r["tpr"][-1] == 1.0


def test_roc_auc_rejects_length_mismatch():
    with pytest.raises(ValueError):
        clid_audit.roc_auc([0.1, 0.2], [True])


def test_theorem_forms_agree():
    q_mem = [[0.3, 0.1], [0.2, 0.4]]
    q_out = [[0.1, 0.2], [0.4, 0.3]]
    p = [[0.25, 0.25], [0.25, 0.25]]
    c = clid_audit.theorem_check(q_mem, q_out, p)
    assert c["equal"]
    assert c["form_a"] == pytest.approx(c["form_b"], abs=1e-12)


def test_sha256_known_vector():
    assert clid_audit.sha256_hex("abc") == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    )


def test_canonical_config_fills_defaults():
    cfg = json.loads(clid_audit.canonical_config(str(ROOT / "tests" / "cli" / "tiny.json")))
    assert cfg["seed"] == 3
    for key in ("world", "model", "training", "plan", "attacks", "evaluation"):
        assert key in cfg
    assert cfg["model"]["beta_start"] == pytest.approx(1e-4)


def test_pipeline_is_repeatable(tmp_path):
    config = str(ROOT / "tests" / "cli" / "tiny.json")
    clid_audit.run_pipeline(config, str(tmp_path / "a"))
    clid_audit.run_pipeline(config, str(tmp_path / "b"))
    first = (tmp_path / "a" / "reports" / "metrics.json").read_bytes()
    second = (tmp_path / "b" / "reports" / "metrics.json").read_bytes()
    assert first == second
    metrics = json.loads(first)
    assert metrics


def test_missing_config_raises(tmp_path):
    with pytest.raises(clid_audit.RuntimeFailure):
        clid_audit.run_pipeline(str(tmp_path / "absent.json"), str(tmp_path / "run"))
