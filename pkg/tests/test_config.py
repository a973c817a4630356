import pytest

from manetsim import (Protocol, ScenarioParseError, ScenarioValidationError,
                      load_scenario)
from manetsim.adversary import AttackType

from conftest import scenario_json


def test_minimal_two_node_document():
    config = load_scenario(scenario_json())
    assert config.node_count == 2
    assert config.seed == 7
    assert config.protocol is Protocol.AODV


def test_node_count_invariant_names_field():
    with pytest.raises(ScenarioValidationError) as err:
        load_scenario(scenario_json(node_count=1))
    assert err.value.field_name == "node_count"


def test_attackers_pass_through():
    config = load_scenario(scenario_json(
        node_count=20, protocol="SRABC",
        attackers=[{"node": i, "kind": "BLACKHOLE"} for i in (3, 7, 11, 15)]))
    assert len(config.attackers) == 4
    assert all(kind.type is AttackType.BLACKHOLE for _, kind in config.attackers)
    assert config.protocol is Protocol.SRABC


def test_unknown_key_rejected():
    with pytest.raises(ScenarioParseError) as err:
        load_scenario(scenario_json(radio_rangem=250))
    assert err.value.field_name == "radio_rangem"


def test_missing_required_field():
    with pytest.raises(ScenarioParseError) as err:
        load_scenario('{"node_count": 2}')
    assert err.value.field_name == "seed"


def test_not_json():
    with pytest.raises(ScenarioParseError):
        load_scenario("node_count: 2")


@pytest.mark.parametrize("overrides,field", [
    ({"radio_range_m": 0}, "radio_range_m"),
    ({"sim_duration_s": -1}, "sim_duration_s"),
    ({"traffic_flows": [[0, 0, 4, 8000]]}, "traffic_flows"),
    ({"traffic_flows": [[0, 5, 4, 8000]]}, "traffic_flows"),
    ({"fuzzy_bounds": [0.1, 0.1]}, "fuzzy_bounds"),
    ({"speed_range": [5, 1]}, "speed_range"),
    ({"seed": -1}, "seed"),
    ({"protocol": "OLSR"}, "protocol"),
    ({"attackers": [{"node": 9, "kind": "BLACKHOLE"}]}, "attackers"),
    ({"positions": [[0, 0]]}, "positions"),
], ids=["range", "duration", "self-flow", "endpoint", "fuzzy", "speeds",
        "seed", "protocol", "attacker-id", "positions"])
def test_invariants_name_offending_field(overrides, field):
    with pytest.raises((ScenarioValidationError, ScenarioParseError)) as err:
        load_scenario(scenario_json(**overrides))
    assert err.value.field_name == field


def test_attack_param_validation():
    with pytest.raises(ScenarioValidationError):
        load_scenario(scenario_json(
            node_count=4,
            attackers=[{"node": 1, "kind": "GREYHOLE",
                        "params": {"drop_prob": 1.5}}]))
    with pytest.raises(ScenarioValidationError):
        load_scenario(scenario_json(
            node_count=4,
            attackers=[{"node": 1, "kind": "SYBIL",
                        "params": {"identity_count": 1}}]))
    with pytest.raises(ScenarioValidationError):
        load_scenario(scenario_json(
            node_count=4, attackers=[{"node": 1, "kind": "R2L"}]))


def test_greyhole_roundtrip():
    config = load_scenario(scenario_json(
        node_count=4,
        attackers=[{"node": 2, "kind": "GREYHOLE",
                    "params": {"drop_prob": 0.25}}]))
    node, kind = config.attackers[0]
    assert node == 2
    assert kind.drop_prob == 0.25
