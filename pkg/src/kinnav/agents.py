"""Reference agents and the pluggable policy interface.

All agents implement act(observation, memory) -> (AgentAction, memory); memory
is opaque to the harness and round-tripped untouched, so recurrent external
policies can carry hidden state. The oracle is privileged: it reads the robot
pose off the observation (available only when the environment exposes it) and
the goal distance field it was constructed with.
"""

import math
from dataclasses import dataclass

from .motion import VelocityCommand, clamp_command, wrap_angle


class NoPathError(RuntimeError):
    """Oracle has no reachable route to the goal."""


@dataclass(frozen=True)
class AgentAction:
    cmd: VelocityCommand
    stop: bool = False


STOP = AgentAction(VelocityCommand(0.0, 0.0, 0.0), stop=True)


class OracleAgent:
    """Steepest-descent agent on the goal distance field; upper-bound reference.

    Moves from cell center to cell center along the descent path, merging
    colinear moves up to the velocity limit, and stops inside the success
    radius. Never commands into inflated cells, so it never collides under the
    kinematic backend.
    """

    def __init__(self, dist_field, spec, dt=1.0):
        self.field = dist_field
        self.spec = spec
        self.dt = dt

    def reset(self):
        return None

    def act(self, obs, memory=None):
        if obs.goal_vector[0] <= self.spec.success_radius:
            return STOP, memory
        pose = obs.pose
        if pose is None:
            raise ValueError("oracle needs a pose-exposing observation")
        target = self._target(pose)
        dxw = target[0] - pose.x
        dyw = target[1] - pose.y
        dist = math.hypot(dxw, dyw)
        speed = min(self.spec.lin_limit, dist / self.dt)
        ux, uy = dxw / dist, dyw / dist
        c = math.cos(pose.theta)
        s = math.sin(pose.theta)
        vx = (c * ux + s * uy) * speed
        vy = (-s * ux + c * uy) * speed
        err = wrap_angle(math.atan2(dyw, dxw) - pose.theta)
        w = min(max(err / self.dt, -self.spec.ang_limit), self.spec.ang_limit)
        cmd = clamp_command(VelocityCommand(vx, vy, w), self.spec)
        return AgentAction(cmd), memory

    def _target(self, pose):
        field = self.field
        grid = field.grid
        ix, iy = grid.world_to_cell(pose.x, pose.y)
        cx, cy = grid.cell_center(ix, iy)
        budget = self.spec.lin_limit * self.dt
        at_center = math.hypot(pose.x - cx, pose.y - cy) < 1e-9
        if at_center and math.isfinite(field.values[iy, ix]):
            path = field.descent_path(ix, iy)
            if len(path) < 2:
                raise NoPathError(f"no descent from cell ({ix}, {iy})")
            # merge colinear descent moves while they fit in one step
            first = grid.cell_center(*path[1])
            fx, fy = first[0] - pose.x, first[1] - pose.y
            target = first
            for cell in path[2:]:
                nx, ny = grid.cell_center(*cell)
                tx, ty = nx - pose.x, ny - pose.y
                d = math.hypot(tx, ty)
                colinear = abs(fx * ty - fy * tx) < 1e-9 and (fx * tx + fy * ty) > 0
                if not colinear or d > budget + 1e-12:
                    break
                target = (nx, ny)
            return target
        # off the lattice (or in an inflated cell): head for the best nearby center
        best = None
        best_d = math.inf
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                nx, ny = ix + dx, iy + dy
                if 0 <= nx < grid.width and 0 <= ny < grid.height:
                    v = field.values[ny, nx]
                    if math.isfinite(v):
                        px, py = grid.cell_center(nx, ny)
                        step = math.hypot(pose.x - px, pose.y - py)
                        d = v + step
                        if d < best_d and step > 1e-9:
                            best_d = d
                            best = (px, py)
        if best is None:
            raise NoPathError(f"no reachable cell near ({pose.x}, {pose.y})")
        return best


class RandomAgent:
    """Uniform random commands within the clamp limits; never stops."""

    def __init__(self, spec, rng):
        self.spec = spec
        self.rng = rng

    def reset(self):
        return None

    def act(self, obs, memory=None):
        vx, vy = self.rng.uniform(-self.spec.lin_limit, self.spec.lin_limit, size=2)
        w = self.rng.uniform(-self.spec.ang_limit, self.spec.ang_limit)
        return AgentAction(VelocityCommand(vx, vy, w)), memory


class ConstantAgent:
    """Scripted fixed-velocity agent; handy for interface and plumbing tests."""

    def __init__(self, cmd):
        self.cmd = cmd

    def reset(self):
        return None

    def act(self, obs, memory=None):
        return AgentAction(self.cmd), memory
