import math
import random

import pytest

from manetsim import Position, neighbors, step_mobility
from manetsim.mobility import draw_waypoint
from manetsim.rng import MOBILITY_DOMAIN, node_stream

import oracles

AREA = (1000.0, 1000.0)


def pos(x, y):
    return Position(x, y, (x, y), 0.0, 0.0)


def test_neighbors_in_range():
    positions = {0: pos(0, 0), 1: pos(100, 0)}
    assert neighbors(0, positions, 250) == [1]
    assert neighbors(1, positions, 250) == [0]


def test_neighbors_out_of_range():
    positions = {0: pos(0, 0), 1: pos(300, 0)}
    assert neighbors(0, positions, 250) == []
    assert neighbors(1, positions, 250) == []


def test_neighbors_grid_matches_brute_force():
    positions = {5 * r + c: pos(200.0 * c, 200.0 * r)
                 for r in range(5) for c in range(5)}
    raw = {i: (p.x, p.y) for i, p in positions.items()}
    oracle = oracles.all_pairs_in_range(raw, 250.0)
    for i in positions:
        assert neighbors(i, positions, 250.0) == sorted(oracle[i])


def test_neighbors_symmetry_random():
    rng = random.Random(99)
    positions = {i: pos(rng.uniform(0, 1000), rng.uniform(0, 1000))
                 for i in range(30)}
    for a in positions:
        for b in neighbors(a, positions, 250.0):
            assert a in neighbors(b, positions, 250.0)


def test_neighbors_unknown_id():
    with pytest.raises(KeyError):
        neighbors(3, {0: pos(0, 0)}, 250.0)


def test_step_paused_unchanged():
    state = Position(10.0, 20.0, (500.0, 500.0), 0.0, pause_until=100.0)
    out = step_mobility(state, 1.0, random.Random(0), AREA, (1.0, 5.0), 2.0,
                        now=5.0)
    assert (out.x, out.y) == (10.0, 20.0)


def test_step_linear_motion():
    state = Position(0.0, 0.0, (100.0, 0.0), 10.0, 0.0)
    out = step_mobility(state, 1.0, random.Random(0), AREA, (0.0, 10.0), 2.0,
                        now=0.0)
    assert out.x == pytest.approx(10.0)
    assert out.y == pytest.approx(0.0)


def test_step_arrival_then_pause():
    state = Position(95.0, 0.0, (100.0, 0.0), 10.0, 0.0)
    out = step_mobility(state, 1.0, random.Random(0), AREA, (0.0, 10.0), 2.0,
                        now=0.0)
    assert (out.x, out.y) == (100.0, 0.0)
    assert out.pause_until > 0.0


def test_waypoint_draw_monte_carlo_mean():
    rng = node_stream(42, 0, MOBILITY_DOMAIN)
    n = 10_000
    sx = sy = 0.0
    for _ in range(n):
        x, y = draw_waypoint(rng, AREA)
        sx += x
        sy += y
    assert abs(sx / n - 500.0) < 0.02 * AREA[0]
    assert abs(sy / n - 500.0) < 0.02 * AREA[1]


def test_containment_over_long_walk():
    rng = random.Random(4)
    state = Position(500.0, 500.0, (500.0, 500.0), 0.0, 0.0)
    t = 0.0
    for _ in range(20_000):
        step_mobility(state, 0.1, rng, AREA, (0.0, 10.0), 0.5, now=t)
        t += 0.1
        assert 0.0 <= state.x <= AREA[0]
        assert 0.0 <= state.y <= AREA[1]


def test_speed_within_range_or_paused():
    rng = random.Random(11)
    state = Position(500.0, 500.0, (500.0, 500.0), 0.0, 0.0)
    t = 0.0
    for _ in range(5000):
        step_mobility(state, 0.1, rng, AREA, (2.0, 7.0), 0.3, now=t)
        t += 0.1
        assert state.speed == 0.0 or 2.0 <= state.speed <= 7.0


def test_static_when_speed_range_zero():
    state = Position(500.0, 500.0, (500.0, 500.0), 0.0, 0.0)
    for t in range(100):
        step_mobility(state, 0.1, random.Random(5), AREA, (0.0, 0.0), 1.0,
                      now=t * 0.1)
    assert (state.x, state.y) == (500.0, 500.0)
