"""PointGoal episode loop: observations, reward, termination, and metrics."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import world as world_mod
from .motion import (Pose, VelocityCommand, clamp_command, dynamic_lite_step,
                     kinematic_step, wrap_angle)
from .noise import apply_noise

# Real-world protocol: a step counts as a collision when the footprint comes
# within this margin of any obstacle.
PROXIMITY_MARGIN = 0.20

TRAJ_FIELDS = ("step", "x", "y", "theta", "cmd_vx", "cmd_vy", "cmd_w",
               "applied_vx", "applied_vy", "applied_w", "dgeo", "reward",
               "blocked", "clearance")


class EpisodeFinishedError(RuntimeError):
    """step() was called after the episode terminated."""


class InvalidEpisodeError(ValueError):
    """Episode data violates its invariants."""


@dataclass(frozen=True)
class Episode:
    """One navigation problem: start pose, goal point, and its geodesic length."""

    episode_id: int
    scene_id: str
    start: Pose
    goal: tuple
    geodesic_distance: float


@dataclass(frozen=True)
class RewardConfig:
    """Reward-term constants; geodesic progress always enters with weight 1."""

    coll: float = -0.03
    fall: float = -5.0
    success: float = 10.0
    slack: float = -0.002
    backward: float = -0.03


@dataclass(frozen=True)
class SensorConfig:
    """Depth-scan fan and goal-vector sensor settings."""

    n_rays: int = 64
    fov: float = math.pi / 2
    max_range: float = 10.0
    expose_pose: bool = False


class Observation:
    """Egocentric observation: goal polar vector plus a lazily computed depth fan.

    `pose` is only populated for privileged agents when the environment is
    configured with expose_pose; learned policies must not rely on it.
    """

    __slots__ = ("goal_vector", "pose", "_depth_fn", "_depth")

    def __init__(self, goal_vector, depth_fn, pose=None):
        self.goal_vector = goal_vector
        self.pose = pose
        self._depth_fn = depth_fn
        self._depth = None

    @property
    def depth(self):
        if self._depth is None:
            self._depth = self._depth_fn()
        return self._depth


def depth_fan(grid, pose, cfg):
    """Raycast fan over the field of view, centered on the robot heading."""
    angles = pose.theta + np.linspace(-cfg.fov / 2, cfg.fov / 2, cfg.n_rays)
    return np.array([world_mod.raycast(grid, (pose.x, pose.y), a, cfg.max_range)
                     for a in angles])


def observe(grid, pose, goal, cfg):
    dx = goal[0] - pose.x
    dy = goal[1] - pose.y
    rho = math.hypot(dx, dy)
    phi = wrap_angle(math.atan2(dy, dx) - pose.theta)
    return Observation(
        (rho, phi),
        lambda: depth_fan(grid, pose, cfg),
        pose=pose if cfg.expose_pose else None,
    )


def reward(prev_dgeo, new_dgeo, blocked, cmd, terminal, cfg):
    """Shaped navigation reward: geodesic progress plus the fixed penalty terms."""
    r = (prev_dgeo - new_dgeo) + cfg.slack
    if blocked:
        r += cfg.coll
    if terminal == "fall":
        r += cfg.fall
    elif terminal == "success":
        r += cfg.success
    if cmd.vx < 0:
        r += cfg.backward
    return r


def compute_spl(success, geodesic, path_length):
    """Success weighted by path length: S * l / max(p, l)."""
    if not geodesic > 0:
        raise InvalidEpisodeError("geodesic distance must be positive")
    if path_length < 0:
        raise InvalidEpisodeError("path length must be non-negative")
    if not success:
        return 0.0
    return geodesic / max(path_length, geodesic)


@dataclass
class EpisodeResult:
    success: bool
    spl: float
    num_actions: int
    num_collisions: int
    path_length: float
    total_reward: float
    termination_reason: str
    trajectory: list = field(default_factory=list)


class NavEnv:
    """One PointGoal environment: grid + robot + backend + episode state.

    Owned by a single execution context at a time; stepping is synchronous.
    The agent issues a VelocityCommand (or AgentAction with a stop flag) once
    per control period `dt`.
    """

    def __init__(self, grid, spec, backend="kinematic", dyn_config=None,
                 noise_model=None, rng=None, sensor=None, reward_cfg=None,
                 dt=1.0, swept=False):
        if backend not in ("kinematic", "dynamic-lite"):
            raise ValueError(f"unknown backend {backend!r}")
        if backend == "dynamic-lite" and dyn_config is None:
            raise ValueError("dynamic-lite backend needs a DynamicLiteConfig")
        if noise_model is not None and rng is None:
            raise ValueError("noise injection needs an rng")
        self.grid = grid
        self.spec = spec
        self.backend = backend
        self.dyn_config = dyn_config
        self.noise_model = noise_model
        self.rng = rng
        self.sensor = sensor or SensorConfig()
        self.reward_cfg = reward_cfg or RewardConfig()
        self.dt = dt
        self.swept = swept
        self.episode = None

    def reset(self, episode, dist_field=None):
        if dist_field is None:
            dist_field = world_mod.distance_field(
                self.grid, episode.goal, self.spec.footprint_radius)
        self.episode = episode
        self.field = dist_field
        self.pose = episode.start
        self.actual_vel = VelocityCommand(0.0, 0.0, 0.0)
        self.prev_dgeo = dist_field.value_at(episode.start.x, episode.start.y)
        self.done = False
        self.reason = None
        self.num_actions = 0
        self.num_collisions = 0
        self.path_length = 0.0
        self.total_reward = 0.0
        self.trajectory = []
        if self.grid.collision_checker(self.spec.footprint_radius).blocked(
                episode.start.x, episode.start.y):
            raise InvalidEpisodeError(f"start pose of episode {episode.episode_id} in collision")
        return self._observe()

    def _observe(self):
        return observe(self.grid, self.pose, self.episode.goal, self.sensor)

    def _goal_distance(self):
        return math.hypot(self.episode.goal[0] - self.pose.x,
                          self.episode.goal[1] - self.pose.y)

    def _is_slow(self, cmd):
        return (max(abs(cmd.vx), abs(cmd.vy)) < 0.1 * self.spec.lin_limit
                and abs(cmd.w) < 0.1 * self.spec.ang_limit)

    def step(self, action):
        """Clamp -> noise -> backend step -> reward -> termination -> metrics."""
        if self.episode is None:
            raise EpisodeFinishedError("call reset() first")
        if self.done:
            raise EpisodeFinishedError("episode already terminated")
        stop = bool(getattr(action, "stop", False))
        cmd = getattr(action, "cmd", action)
        cmd = clamp_command(cmd, self.spec)

        fell = False
        blocked = False
        if stop:
            applied = VelocityCommand(0.0, 0.0, 0.0)
            new_pose = self.pose
        else:
            applied = cmd
            if self.noise_model is not None:
                applied = apply_noise(cmd, self.noise_model, self.rng)
            if self.backend == "kinematic":
                new_pose, blocked = kinematic_step(
                    self.grid, self.pose, applied, self.dt, self.spec, swept=self.swept)
            else:
                new_pose, self.actual_vel, events = dynamic_lite_step(
                    self.grid, self.pose, self.actual_vel, applied,
                    self.dyn_config, self.spec, dt=self.dt)
                applied = self.actual_vel
                blocked = any(e[0] == "contact" for e in events)
                fell = any(e[0] == "fall" for e in events)

        step_dist = math.hypot(new_pose.x - self.pose.x, new_pose.y - self.pose.y)
        self.pose = new_pose
        self.num_actions += 1
        self.path_length += step_dist

        new_dgeo = self.field.value_at(self.pose.x, self.pose.y)
        within = self._goal_distance() <= self.spec.success_radius

        terminal = "none"
        if fell:
            self.done, self.reason, terminal = True, "fall", "fall"
        elif within and (stop or self._is_slow(cmd)):
            self.done, self.reason, terminal = True, "success", "success"
        elif stop:
            # explicit stop away from the goal ends the episode unsuccessfully
            self.done, self.reason = True, "stop"
        elif self.num_actions >= self.spec.max_steps:
            self.done, self.reason = True, "step_budget"

        r = reward(self.prev_dgeo, new_dgeo, blocked, cmd, terminal, self.reward_cfg)
        r_geo = self.prev_dgeo - new_dgeo
        self.prev_dgeo = new_dgeo
        self.total_reward += r

        clear = self.grid.clearance(self.pose.x, self.pose.y)
        if clear - self.spec.footprint_radius < PROXIMITY_MARGIN:
            self.num_collisions += 1

        self.trajectory.append({
            "step": self.num_actions, "x": self.pose.x, "y": self.pose.y,
            "theta": self.pose.theta, "cmd_vx": cmd.vx, "cmd_vy": cmd.vy,
            "cmd_w": cmd.w, "applied_vx": applied.vx, "applied_vy": applied.vy,
            "applied_w": applied.w, "dgeo": new_dgeo, "reward": r,
            "blocked": int(blocked), "clearance": clear,
        })
        info = {"blocked": blocked, "dgeo": new_dgeo, "r_geo": r_geo,
                "clearance": clear, "reason": self.reason}
        return self._observe(), r, self.done, info

    def result(self):
        success = self.reason == "success"
        return EpisodeResult(
            success=success,
            spl=compute_spl(success, self.episode.geodesic_distance, self.path_length),
            num_actions=self.num_actions,
            num_collisions=self.num_collisions,
            path_length=self.path_length,
            total_reward=self.total_reward,
            termination_reason=self.reason,
            trajectory=self.trajectory,
        )


def write_trajectory(records, path_or_stream):
    """CSV trajectory log, one row per step, 6 significant digits."""
    def _write(f):
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRAJ_FIELDS)
        for rec in records:
            writer.writerow([rec["step"]] +
                            [f"{rec[k]:.6g}" for k in TRAJ_FIELDS[1:12]] +
                            [rec["blocked"], f"{rec['clearance']:.6g}"])

    if hasattr(path_or_stream, "write"):
        _write(path_or_stream)
    else:
        with open(path_or_stream, "w", newline="") as f:
            _write(f)


def read_trajectory(path_or_stream):
    def _read(f):
        rows = list(csv.DictReader(f))
        out = []
        for row in rows:
            rec = {k: float(row[k]) for k in TRAJ_FIELDS if k not in ("step", "blocked")}
            rec["step"] = int(row["step"])
            rec["blocked"] = int(row["blocked"])
            out.append(rec)
        return out

    if hasattr(path_or_stream, "read"):
        return _read(path_or_stream)
    with open(path_or_stream, newline="") as f:
        return _read(f)
