from __future__ import annotations

import json

import pytest

from manetsim import scenario_from_dict


def make_scenario(**overrides):
    """Scenario builder with small, fast defaults."""
    doc = {
        "node_count": 2,
        "seed": 7,
        "area": [1000.0, 1000.0],
        "radio_range_m": 250.0,
        "speed_range": [0.0, 0.0],
        "sim_duration_s": 10.0,
    }
    doc.update(overrides)
    return scenario_from_dict(doc)


def chain_positions(n: int, spacing: float = 200.0):
    """Static line topology where only consecutive nodes are in range."""
    return [[i * spacing, 0.0] for i in range(n)]


def scenario_json(**overrides) -> str:
    doc = {"node_count": 2, "seed": 7}
    doc.update(overrides)
    return json.dumps(doc)


@pytest.fixture
def two_node_flow():
    return make_scenario(
        positions=[[0.0, 0.0], [100.0, 0.0]],
        traffic_flows=[[0, 1, 4, 8000]],
    )
