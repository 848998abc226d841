"""Tour of the world layer: maps, clearance, geodesic fields, ray casting.

Run with: python3 demos/01_worlds_and_distance_fields.py
"""

import math

import numpy as np

from kinnav import distance_field, load_world, raycast, save_world
from kinnav.maps import random_maze

grid = random_maze(32, 32, 0.25, seed=4)
print("A procedurally generated corridor maze (8 m x 8 m, 0.25 m cells):\n")
print(save_world(grid))

# Clearance: how far a point is from the nearest obstacle (the map edge
# counts as a wall, the world is closed).
free = np.argwhere(~grid.cells)
cy, cx = free[len(free) // 2]
px, py = grid.cell_center(int(cx), int(cy))
print(f"clearance at a corridor center ({px:.2f}, {py:.2f}): "
      f"{grid.clearance(px, py):.3f} m")

# A distance field anchors every cell to its geodesic distance from a goal,
# over the grid inflated by the robot's footprint radius.
roomy = np.argwhere((~grid.cells) & (grid.center_clearance() >= 0.3))
goal = grid.cell_center(int(roomy[0][1]), int(roomy[0][0]))
field = distance_field(grid, goal, robot_radius=0.3)
finite = np.isfinite(field.values)
print(f"\ndistance field to goal {tuple(round(g, 2) for g in goal)}:")
print(f"  reachable cells: {finite.sum()} / {grid.width * grid.height}")
print(f"  farthest reachable point: {field.values[finite].max():.2f} m")

# Greedy descent on the field recovers a shortest grid path.
sy, sx = free[len(free) // 3]
path = field.descent_path(int(sx), int(sy))
print(f"  descent path from cell ({sx}, {sy}): {len(path)} cells, "
      f"{field.values[sy, sx]:.2f} m")

# Ray casting is exact grid traversal -- the depth sensor primitive.
print("\ndepth fan from the corridor center (8 rays over 90 degrees):")
for a in np.linspace(-math.pi / 4, math.pi / 4, 8):
    d = raycast(grid, (px, py), a, max_range=10.0)
    print(f"  angle {math.degrees(a):+6.1f} deg -> {d:.3f} m")
