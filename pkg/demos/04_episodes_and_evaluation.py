"""End-to-end evaluation: generate episodes, run the oracle, plot a route.

Writes its artifacts (map, dataset, results, SVG) to demo_out/.

Run with: python3 demos/04_episodes_and_evaluation.py
"""

import os

from kinnav import (EvalConfig, emit_plot, run_batch, sample_episodes,
                    save_world, write_dataset)
from kinnav.harness import save_run
from kinnav.maps import random_maze
from kinnav.robots import SPOT
from kinnav.task import read_trajectory

out = "demo_out"
os.makedirs(out, exist_ok=True)

grid = random_maze(64, 64, 0.25, seed=7)
map_path = os.path.join(out, "maze.map")
with open(map_path, "w") as f:
    f.write(save_world(grid))

# Rejection sampling keeps only episodes whose geodesic length is 1-30 m,
# whose path is meaningfully longer than the straight line (no trivial
# episodes), and whose route is clear under the largest robot's footprint.
ds = sample_episodes(grid, 25, seed=1, largest_spec=SPOT, scene_id="maze.map")
ds_path = os.path.join(out, "episodes.jsonl")
write_dataset(ds, ds_path)
lengths = [ep.geodesic_distance for ep in ds.episodes]
print(f"generated {len(ds.episodes)} episodes, geodesic lengths "
      f"{min(lengths):.1f}-{max(lengths):.1f} m")

traj_dir = os.path.join(out, "traj")
config = EvalConfig(map_path, ds_path, seeds=(0,), workers=1)
summary, rows = run_batch(config, traj_dir=traj_dir)
save_run(os.path.join(out, "run_kinematic"), summary, rows)
print(f"\noracle agent, kinematic backend ({summary['label']}):")
for k in ("sr_pct", "spl_mean", "actions_mean", "collisions_mean"):
    print(f"  {k:16s} {summary[k]:.3f}")

# Render the first few trajectories over the map.
svg_path = os.path.join(out, "routes.svg")
trajs = []
for ep, row in zip(ds.episodes[:4], rows[:4]):
    records = read_trajectory(os.path.join(traj_dir, f"traj_s0_e{ep.episode_id}.csv"))
    trajs.append((records, bool(row["success"])))
with open(svg_path, "w") as f:
    f.write(emit_plot(grid, trajs,
                      start=(ds.episodes[0].start.x, ds.episodes[0].start.y),
                      goal=ds.episodes[0].goal))
print(f"\nwrote {svg_path} with {len(trajs)} routes")
