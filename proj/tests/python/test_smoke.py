# Copyright 2026 The hrli Authors
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

import pytest

import hrli


def test_protocol_version():
    assert hrli.protocol_version == 1


def test_synth_gridworld_report():
    report = hrli.synth("gridworld", "G F (adj & major)")
    assert report["states"] == 6799
    assert len(report["propositions"]) == 18


def test_synth_errors_map_to_exceptions():
    with pytest.raises(hrli.ParseError):
        hrli.synth("gridworld", "G F nothing")
    with pytest.raises(hrli.ConfigError):
        hrli.synth("moon", "G F adj")
    with pytest.raises(hrli.SynthesisError):
        hrli.synth("gridworld", "G (!major) & G F major")
    for cls in (hrli.ConfigError, hrli.ParseError, hrli.SynthesisError, hrli.CapacityError, hrli.ServiceError):
        assert issubclass(cls, hrli.HrliError)


def test_scenario_presets():
    assert hrli.scenario_presets() == ["identical", "incompatible", "compatible", "adaptation"]


def test_simulate_is_deterministic():
    first = hrli.simulate("adaptation", 0.05, seed=3, max_moves=40)
    second = hrli.simulate("adaptation", 0.05, seed=3, max_moves=40)
    assert first == second
    assert first[0]["type"] == "run"
    assert first[-1]["type"] == "summary"


def test_experiment_rows():
    rows = hrli.experiment("adaptation", alphas=[0.0, 0.2], runs=2, max_moves=60)
    assert [(r["alpha"], r["run"]) for r in rows] == [(0.0, 0), (0.0, 1), (0.2, 0), (0.2, 1)]
    for r in rows:
        assert r["joint_events"] <= min(r["robot_events"], r["human_events"])


def test_session_service_round_trip():
    service = hrli.SessionService()
    assert [p["name"] for p in service.presets()["presets"]][0] == "gridworld"
    view = service.create("gridworld", seed=4)
    sid = view["session_id"]
    assert view["to_move"] == "human"
    moved = service.move(sid, view["legal_moves"][0]["move_id"])
    assert moved["turn"] == 2
    assert service.view(sid)["checksum"] == moved["checksum"]
    with pytest.raises(hrli.ServiceError) as err:
        service.move(sid, 99)
    assert err.value.code == "illegal_move"
    assert err.value.status == 422
    lines = service.record(sid)
    assert lines[0]["type"] == "run"
    assert sum(1 for line in lines if line["type"] == "move") == 2


def test_imports_staged_extension_when_requested():
    import os

    stage = os.environ.get("HRLI_PYTHON_STAGE")
    if not stage:
        pytest.skip("no staged build requested")
    assert hrli._hrli.__file__.startswith(stage)
