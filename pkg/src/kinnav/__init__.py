"""kinnav: a high-throughput 2D PointGoal-navigation simulator and evaluation harness.

A kinematic teleport backend, a velocity-lag "dynamic-lite" surrogate backend,
actuation-noise modeling, episode generation, SR/SPL evaluation, cross-fidelity
gap tables, and throughput benchmarking on 2D occupancy grids.
"""

from .agents import AgentAction, ConstantAgent, OracleAgent, RandomAgent
from .episodes import (EpisodeDataset, read_dataset, sample_episodes,
                       validate_episode, write_dataset)
from .harness import (EvalConfig, GapTable, bench_throughput, run_batch,
                      sim2sim_gap)
from .maps import random_maze, random_obstacles
from .motion import (PROFILES, DynamicLiteConfig, Pose, VelocityCommand,
                     clamp_command, dynamic_lite_step, kinematic_step,
                     wrap_angle)
from .noise import (NoiseModel, apply_noise, fit_noise_model, load_noise_model,
                    reference_model, save_noise_model)
from .plotting import emit_plot
from .robots import A1, ALIENGO, ROBOTS, SPOT, RobotSpec, derive_robot_params, get_robot
from .task import (Episode, EpisodeResult, NavEnv, Observation, RewardConfig,
                   SensorConfig, compute_spl, observe, reward)
from .world import (DistanceField, OccupancyGrid, distance_field, load_world,
                    raycast, save_world)

__version__ = "0.1.0"
