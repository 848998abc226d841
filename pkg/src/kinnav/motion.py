"""Velocity commands, the kinematic teleport backend, and the dynamic-lite surrogate."""

import math
from dataclasses import dataclass


class InvalidCommandError(ValueError):
    """Command contains NaN components."""


class InconsistentStateError(RuntimeError):
    """Stepping was attempted from a pose already in collision."""


def wrap_angle(theta):
    """Normalize an angle to (-pi, pi]."""
    t = math.remainder(theta, math.tau)
    if t <= -math.pi:
        t += math.tau
    return t


@dataclass(frozen=True)
class Pose:
    """Planar robot state: world position plus heading in (-pi, pi]."""

    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class VelocityCommand:
    """Body-frame CoM velocity action: forward vx, lateral vy, angular w."""

    vx: float
    vy: float
    w: float


def clamp_command(cmd, spec):
    """Clip each component to the robot's symmetric limit. Idempotent."""
    if math.isnan(cmd.vx) or math.isnan(cmd.vy) or math.isnan(cmd.w):
        raise InvalidCommandError(f"command has NaN component: {cmd}")
    lin, ang = spec.lin_limit, spec.ang_limit
    return VelocityCommand(
        min(max(cmd.vx, -lin), lin),
        min(max(cmd.vy, -lin), lin),
        min(max(cmd.w, -ang), ang),
    )


def kinematic_step(grid, pose, cmd, dt, spec, swept=False):
    """Teleport to the Euler-integrated next state, or hold position on collision.

    The candidate position uses the start-of-step heading. If the footprint disc
    would overlap occupied space there, the position is kept and blocked=True;
    the heading still updates. With swept=True the straight segment is also
    sampled for collisions (off by default: endpoint-only).
    """
    checker = grid.collision_checker(spec.footprint_radius)
    if checker.blocked(pose.x, pose.y):
        raise InconsistentStateError(f"pose {pose} starts in collision")
    c = math.cos(pose.theta)
    s = math.sin(pose.theta)
    nx = pose.x + (cmd.vx * c - cmd.vy * s) * dt
    ny = pose.y + (cmd.vx * s + cmd.vy * c) * dt
    nth = wrap_angle(pose.theta + cmd.w * dt)
    blocked = checker.blocked(nx, ny)
    if not blocked and swept:
        dist = math.hypot(nx - pose.x, ny - pose.y)
        n = int(math.ceil(dist / (0.5 * grid.cell_size)))
        for k in range(1, n):
            t = k / n
            if checker.blocked(pose.x + (nx - pose.x) * t, pose.y + (ny - pose.y) * t):
                blocked = True
                break
    if blocked:
        return Pose(pose.x, pose.y, nth), True
    return Pose(nx, ny, nth), False


@dataclass(frozen=True)
class DynamicLiteConfig:
    """First-order velocity-lag surrogate for a physics-stepped backend.

    tau is the velocity tracking time constant; each control step is split into
    `substeps` physics substeps. On contact the position update either slides
    along the free axis-aligned component or holds. A fall fires when the
    prevented penetration in one substep exceeds fall_penetration.
    """

    tau: float
    substeps: int = 240
    slide_on_contact: bool = True
    fall_penetration: float = 0.05

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")


# Two controller personalities, mirroring a tight tracker used for training
# and a sluggish non-sliding one used for evaluation.
PROFILES = {
    "profile-A": DynamicLiteConfig(tau=0.30, slide_on_contact=True),
    "profile-B": DynamicLiteConfig(tau=0.60, slide_on_contact=False),
}


def dynamic_lite_step(grid, pose, actual_vel, cmd, config, spec, dt=1.0):
    """Advance one control step of the dynamic-lite backend.

    Returns (new pose, new actual velocity, events); events is a list of
    ('contact', substep) and ('fall', substep) tuples. A fall ends the step.
    """
    checker = grid.collision_checker(spec.footprint_radius)
    if checker.blocked(pose.x, pose.y):
        raise InconsistentStateError(f"pose {pose} starts in collision")
    delta = dt / config.substeps
    # gain capped at 1: for delta >= tau the lag collapses to exact tracking
    # (an uncapped explicit update would be unstable for delta > 2*tau)
    alpha = min(delta / config.tau, 1.0)
    slide = config.slide_on_contact
    x, y, th = pose.x, pose.y, pose.theta
    vx, vy, w = actual_vel.vx, actual_vel.vy, actual_vel.w
    cvx, cvy, cw = cmd.vx, cmd.vy, cmd.w
    cos, sin = math.cos, math.sin
    events = []
    blocked = checker.blocked
    for k in range(config.substeps):
        vx += alpha * (cvx - vx)
        vy += alpha * (cvy - vy)
        w += alpha * (cw - w)
        c = cos(th)
        s = sin(th)
        nx = x + (vx * c - vy * s) * delta
        ny = y + (vx * s + vy * c) * delta
        if blocked(nx, ny):
            events.append(("contact", k))
            if slide:
                if not blocked(nx, y):
                    x = nx
                elif not blocked(x, ny):
                    y = ny
            pen = checker.penetration(nx, ny)
            if pen > config.fall_penetration:
                events.append(("fall", k))
                th += w * delta
                break
        else:
            x, y = nx, ny
        th += w * delta
    return Pose(x, y, wrap_angle(th)), VelocityCommand(vx, vy, w), events
