import math

import numpy as np
import pytest

from kinnav.agents import (STOP, AgentAction, ConstantAgent, NoPathError,
                           OracleAgent, RandomAgent)
from kinnav.maps import random_maze
from kinnav.motion import Pose, VelocityCommand
from kinnav.robots import SPOT
from kinnav.task import Episode, NavEnv, SensorConfig
from kinnav.world import OccupancyGrid, distance_field


def open_grid(n=40, cs=0.25):
    return OccupancyGrid(np.zeros((n, n), dtype=bool), cs)


def run_episode(grid, field, start, goal, agent, max_iters=500):
    env = NavEnv(grid, SPOT, sensor=SensorConfig(expose_pose=True))
    six, siy = grid.world_to_cell(start.x, start.y)
    ep = Episode(0, "t", start, goal, float(field.values[siy, six]))
    obs = env.reset(ep, field)
    memory = agent.reset()
    done = False
    dgeos = [env.prev_dgeo]
    for _ in range(max_iters):
        action, memory = agent.act(obs, memory)
        obs, _, done, info = env.step(action)
        dgeos.append(info["dgeo"])
        if done:
            break
    return env.result(), dgeos


def test_oracle_stop_at_goal():
    grid = open_grid()
    goal = grid.cell_center(20, 20)
    field = distance_field(grid, goal, SPOT.footprint_radius)
    agent = OracleAgent(field, SPOT)
    obs_pose = Pose(goal[0], goal[1] - 0.2, 0.0)
    env = NavEnv(grid, SPOT, sensor=SensorConfig(expose_pose=True))
    ep = Episode(0, "t", obs_pose, goal, 1.0)
    obs = env.reset(ep, field)
    action, _ = agent.act(obs, None)
    assert action.stop
    assert action.cmd == VelocityCommand(0.0, 0.0, 0.0)


def test_oracle_three_step_straight_approach():
    grid = open_grid(60)
    goal = grid.cell_center(30, 30)
    start_cell = (26, 30)  # 4 cells = 1.0 m straight ahead of the goal
    start = Pose(*grid.cell_center(*start_cell), 0.0)
    field = distance_field(grid, goal, SPOT.footprint_radius)
    agent = OracleAgent(field, SPOT)
    env = NavEnv(grid, SPOT, sensor=SensorConfig(expose_pose=True))
    ep = Episode(0, "t", start, goal, 1.0)
    obs = env.reset(ep, field)
    action, memory = agent.act(obs, None)
    assert (action.cmd.vx, action.cmd.vy, action.cmd.w) == \
        pytest.approx((0.5, 0.0, 0.0), abs=1e-9)
    n = 0
    done = False
    while not done and n < 5:
        action, memory = agent.act(obs, memory)
        obs, _, done, info = env.step(action)
        n += 1
    assert done and info["reason"] == "success"
    assert n <= 3


def test_oracle_requires_pose():
    grid = open_grid()
    goal = grid.cell_center(20, 20)
    field = distance_field(grid, goal, SPOT.footprint_radius)
    agent = OracleAgent(field, SPOT)
    env = NavEnv(grid, SPOT)  # pose not exposed
    ep = Episode(0, "t", Pose(1.125, 1.125, 0.0), goal, 5.0)
    obs = env.reset(ep, field)
    with pytest.raises(ValueError):
        agent.act(obs, None)


def test_oracle_no_path_error():
    grid = open_grid(40)
    goal = grid.cell_center(20, 20)
    field = distance_field(grid, goal, SPOT.footprint_radius)
    agent = OracleAgent(field, SPOT)

    class FakeObs:
        goal_vector = (5.0, 0.0)
        pose = Pose(goal[0], goal[1], 0.0)  # at goal cell: descent path empty

    with pytest.raises(NoPathError):
        agent._target(FakeObs.pose)


def test_oracle_monotone_dgeo_on_maze():
    grid = random_maze(64, 64, 0.25, seed=12)
    clear = grid.center_clearance()
    ok = np.argwhere((~grid.cells) & (clear >= SPOT.footprint_radius))
    gy, gx = ok[3]
    goal = grid.cell_center(int(gx), int(gy))
    field = distance_field(grid, goal, SPOT.footprint_radius)
    finite = np.argwhere(np.isfinite(field.values) & (field.values > 2.0)
                         & (field.values < 20.0))
    assert len(finite), "no usable start on this seed"
    sy, sx = finite[len(finite) // 2]
    start = Pose(*grid.cell_center(int(sx), int(sy)), 1.0)
    res, dgeos = run_episode(grid, field, start, goal, OracleAgent(field, SPOT))
    assert res.success
    assert res.spl >= 0.90
    # strictly decreasing until the terminal stop step
    for a, b in zip(dgeos[:-2], dgeos[1:-1]):
        assert b < a - 1e-12


def test_random_agent_within_limits_and_deterministic():
    agent = RandomAgent(SPOT, np.random.default_rng(123))
    draws = []
    for _ in range(100_000):
        action, _ = agent.act(None, None)
        assert not action.stop
        draws.append((action.cmd.vx, action.cmd.vy, action.cmd.w))
    arr = np.array(draws)
    assert np.all(np.abs(arr[:, 0]) <= SPOT.lin_limit)
    assert np.all(np.abs(arr[:, 1]) <= SPOT.lin_limit)
    assert np.all(np.abs(arr[:, 2]) <= SPOT.ang_limit)
    # means near zero, 3 sigma/sqrt(n) for a uniform distribution
    n = len(arr)
    for i, half in enumerate((SPOT.lin_limit, SPOT.lin_limit, SPOT.ang_limit)):
        sigma = half / math.sqrt(3)
        assert abs(arr[:, i].mean()) < 3 * sigma / math.sqrt(n)
    again = RandomAgent(SPOT, np.random.default_rng(123))
    replay = [again.act(None, None)[0].cmd for _ in range(50)]
    assert [(c.vx, c.vy, c.w) for c in replay] == draws[:50]


def test_constant_agent_under_env():
    grid = open_grid(80)
    goal = grid.cell_center(60, 40)
    field = distance_field(grid, goal, SPOT.footprint_radius)
    agent = ConstantAgent(VelocityCommand(0.5, 0.0, 0.0))
    start = Pose(*grid.cell_center(20, 40), 0.0)
    res, _ = run_episode(grid, field, start, goal, agent)
    # drives straight past the goal and runs out the budget
    assert res.num_actions > 1


def test_memory_round_trip():
    class CountingAgent:
        def reset(self):
            return 0

        def act(self, obs, memory):
            return AgentAction(VelocityCommand(0.1, 0.0, 0.0)), memory + 1

    grid = open_grid(80)
    goal = grid.cell_center(60, 40)
    field = distance_field(grid, goal, SPOT.footprint_radius)
    env = NavEnv(grid, SPOT)
    start = Pose(*grid.cell_center(20, 40), 0.0)
    ep = Episode(0, "t", start, goal, 10.0)
    obs = env.reset(ep, field)
    agent = CountingAgent()
    memory = agent.reset()
    for k in range(10):
        action, memory = agent.act(obs, memory)
        obs, _, done, _ = env.step(action)
        assert memory == k + 1
