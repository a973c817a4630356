"""Random-waypoint mobility and unit-disk adjacency."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass


@dataclass
class Position:
    x: float
    y: float
    waypoint: tuple[float, float]
    speed: float
    pause_until: float


def initial_position(rng: random.Random, area: tuple[float, float]) -> Position:
    """Uniform starting point; the first waypoint is drawn on the first step."""
    x = rng.uniform(0.0, area[0])
    y = rng.uniform(0.0, area[1])
    return Position(x, y, (x, y), 0.0, 0.0)


def draw_waypoint(rng: random.Random, area: tuple[float, float]) -> tuple[float, float]:
    return (rng.uniform(0.0, area[0]), rng.uniform(0.0, area[1]))


def step_mobility(state: Position, dt: float, rng: random.Random,
                  area: tuple[float, float], speed_range: tuple[float, float],
                  pause_time_s: float, now: float) -> Position:
    """Advance one mobility tick of the random-waypoint model.

    Nodes head to their waypoint at their drawn speed, pause on arrival,
    then draw a fresh uniform waypoint and speed. Draw order per leg is
    fixed: waypoint x, waypoint y, speed.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if now < state.pause_until:
        return state
    if (state.x, state.y) == state.waypoint:
        if speed_range[1] <= 0.0:
            return state  # static scenario, nothing to draw
        state.waypoint = draw_waypoint(rng, area)
        state.speed = rng.uniform(speed_range[0], speed_range[1])
        if state.waypoint == (state.x, state.y):
            return state
    if state.speed <= 0.0:
        return state
    wx, wy = state.waypoint
    dx = wx - state.x
    dy = wy - state.y
    dist = math.sqrt(dx * dx + dy * dy)
    step = state.speed * dt
    if step >= dist:
        state.x, state.y = wx, wy
        state.speed = 0.0
        state.pause_until = now + dt + pause_time_s
    else:
        state.x += dx / dist * step
        state.y += dy / dist * step
    return state


def distance(a: Position, b: Position) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy)


def neighbors(node_id: int, positions: dict[int, Position],
              radio_range_m: float) -> list[int]:
    """Nodes within radio range of node_id, ascending, excluding itself."""
    if node_id not in positions:
        raise KeyError(f"unknown node id {node_id}")
    me = positions[node_id]
    out = [other for other, pos in positions.items()
           if other != node_id and distance(me, pos) <= radio_range_m]
    out.sort()
    return out
