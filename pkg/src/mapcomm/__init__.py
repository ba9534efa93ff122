"""Task-driven, communication-aware map compression for grid navigation.

A Sensor agent sweeps an unknown traversability grid, compresses its local
map with codebook abstractions chosen to help an Actor agent's path
planning, and transmits them over a noisy channel; the Actor fuses its own
observations and the abstractions with an iterative Kalman decoder.
"""

from .abstraction import (
    AbstractionTemplate,
    Codebook,
    ObservationOperator,
    bits_for,
    builtin_codebook_16,
    instantiate_operator,
    load_codebook,
    raw_window_operator,
    save_codebook,
)
from .channel import RngStreams, Transmission, transmit
from .encoder import EncoderParams, SelectionResult, select_abstraction
from .estimator import (
    BeliefState,
    NoiseModel,
    actor_decode_step,
    kalman_update,
    project,
    sensor_decode_step,
)
from .grid import GridMap, Window, depth_to_inclination, load_raster, window_at
from .oracle import HistoryStack, QPResult, solve_history_qp
from .planner import KERNEL, Path, PlannerParams, cell_cost, plan
from .relevance import WeightField, path_weights
from .sim import (
    RunMetrics,
    ScenarioConfig,
    accumulated_cost,
    bits_ratio,
    cost_ratio,
    lawnmower_path,
    moving_target_trace,
    run_scenario,
)
from .synthetic import smooth_obstacle_map

__version__ = "0.1.0"
