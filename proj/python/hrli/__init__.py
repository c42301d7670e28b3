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

"""Permissive strategy templates for human-robot interaction.

Thin Python layer over the native ``_hrli`` module: JSON payloads are decoded
into plain dictionaries.
"""

import json

from . import _hrli
from ._hrli import CapacityError, ConfigError, HrliError, ParseError, SynthesisError, protocol_version

__all__ = [
    "CapacityError",
    "ConfigError",
    "HrliError",
    "ParseError",
    "ServiceError",
    "SessionService",
    "SynthesisError",
    "experiment",
    "protocol_version",
    "scenario_presets",
    "simulate",
    "synth",
]


def synth(domain, task):
    """Synthesize templates for ``task`` on ``domain`` and return the size/timing report."""
    return json.loads(_hrli.synth(domain, task))


def simulate(scenario, alpha, seed=1000, max_moves=0):
    """Run one seeded session of a preset; returns the decoded log lines."""
    return [json.loads(line) for line in _hrli.simulate(scenario, alpha, seed, max_moves).splitlines()]


def experiment(scenario, alphas=(), runs=0, seed_base=1000, max_moves=0):
    """Run a preset sweep; returns one metrics dictionary per run."""
    text = _hrli.experiment(scenario, list(alphas), runs, seed_base, max_moves)
    return [json.loads(line) for line in text.splitlines()]


def scenario_presets():
    return list(_hrli.scenario_presets())


class ServiceError(HrliError):
    """Error response of the session service; ``code`` is the protocol error code."""

    def __init__(self, status, payload):
        error = payload.get("error", {})
        super().__init__(error.get("message", "service error"))
        self.status = status
        self.code = error.get("code")
        self.payload = payload


class SessionService:
    """In-process session service speaking the same protocol as the HTTP server."""

    def __init__(self, presets=("gridworld",)):
        self._native = _hrli.SessionService(list(presets))

    def _call(self, method, path, body=None):
        text = self._native.request(method, path, "" if body is None else json.dumps(body))
        status = self._native.last_status
        if path.endswith("/record") and status == 200:
            return [json.loads(line) for line in text.splitlines()]
        payload = json.loads(text)
        if status != 200:
            raise ServiceError(status, payload)
        return payload

    def presets(self):
        return self._call("GET", "/api/v1/presets")

    def create(self, preset, **fields):
        return self._call("POST", "/api/v1/sessions", dict(fields, preset=preset))

    def view(self, session_id):
        return self._call("GET", f"/api/v1/sessions/{session_id}")

    def move(self, session_id, move_id):
        return self._call("POST", f"/api/v1/sessions/{session_id}/moves", {"move_id": move_id})

    def record(self, session_id):
        return self._call("GET", f"/api/v1/sessions/{session_id}/record")
