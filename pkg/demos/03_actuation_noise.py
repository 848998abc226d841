"""Actuation noise: bundled reference models, injection, and fitting.

The package ships the Spot command-tracking residual parameters in both
collection modes (coupled: all axes commanded together; decoupled: one axis
at a time). This demo injects noise into a clean command stream and then
fits a fresh model from the noisy log to show the round trip.

Run with: python3 demos/03_actuation_noise.py
"""

import math

import numpy as np

from kinnav import VelocityCommand, apply_noise, fit_noise_model, reference_model

for mode in ("coupled", "decoupled"):
    m = reference_model(mode)
    print(f"{mode} reference model ({m.sample_count} samples):")
    print(f"  mu    = ({m.mu[0]:+.4f} m/s, {m.mu[1]:+.4f} m/s, "
          f"{math.degrees(m.mu[2]):+.4f} deg/s)")
    print(f"  sigma = ({m.sigma[0]:.4f} m/s, {m.sigma[1]:.4f} m/s, "
          f"{math.degrees(m.sigma[2]):.4f} deg/s)")

model = reference_model("coupled")
rng = np.random.default_rng(0)
cmd = VelocityCommand(0.4, 0.0, 0.1)
print(f"\nthe same command through the actuators five times ({cmd}):")
for _ in range(5):
    out = apply_noise(cmd, model, rng)
    print(f"  realized ({out.vx:+.4f}, {out.vy:+.4f}, {out.w:+.4f})")

# Fit a model back from a synthetic command/measurement log, the same way a
# real log from the robot would be processed.
log = []
for _ in range(6000):
    c = rng.uniform(-0.5, 0.5, 3)
    realized = apply_noise(VelocityCommand(*c), model, rng)
    log.append((tuple(c), (realized.vx, realized.vy, realized.w)))
fit = fit_noise_model(log, "coupled")
print("\nrecovered from a 6000-sample synthetic log:")
print(f"  mu    = ({fit.mu[0]:+.4f}, {fit.mu[1]:+.4f}, {fit.mu[2]:+.4f}) "
      f"(true {model.mu[0]:+.4f}, {model.mu[1]:+.4f}, {model.mu[2]:+.4f})")
print(f"  sigma = ({fit.sigma[0]:.4f}, {fit.sigma[1]:.4f}, {fit.sigma[2]:.4f}) "
      f"(true {model.sigma[0]:.4f}, {model.sigma[1]:.4f}, {model.sigma[2]:.4f})")
