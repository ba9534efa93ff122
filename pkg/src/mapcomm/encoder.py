"""Sensor-side abstraction selection by exhaustive codebook search.

For each candidate template, the Sensor simulates the Actor-side update
under the most likely (zero) noise realization, scores the weighted
reconstruction error over its sensed cells plus a communication penalty
proportional to the compressed-cell count, and transmits the argmin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abstraction import Codebook, instantiate_operator
from .estimator import BeliefState, NoiseModel, hypothetical_projected_mean
from .relevance import WeightField

__all__ = ["EncoderParams", "SelectionResult", "select_abstraction"]


@dataclass(frozen=True)
class EncoderParams:
    """Selection cost shaping.

    ``lambda_coefficient`` prices each compressed cell (penalty =
    lambda_coefficient * k).  ``squared_weights`` selects whether the
    weighted error is sum((W e)^2) (default) or sum(W e^2).
    """

    lambda_coefficient: float = 0.02
    squared_weights: bool = True

    def __post_init__(self):
        if self.lambda_coefficient < 0:
            raise ValueError("lambda_coefficient must be non-negative")


@dataclass(frozen=True)
class SelectionResult:
    theta: int
    cost: float
    per_template: tuple  # (theta, cost, k) diagnostics, codebook order
    observation: np.ndarray  # exact (noise-free) measurement of the chosen template
    k: int


def select_abstraction(
    sensor_belief: BeliefState,
    sensed_true: np.ndarray,
    sensed_cells: np.ndarray,
    weights: WeightField,
    sensor_pos: tuple[int, int],
    map_shape: tuple[int, int],
    codebook: Codebook,
    params: EncoderParams,
    channel_noise: NoiseModel,
) -> SelectionResult:
    """Pick the codebook template minimizing weighted error + bit penalty.

    ``sensed_true`` holds ground-truth values (full-length vector) and
    ``sensed_cells`` the indices the Sensor has observed so far; the error
    term is evaluated only there, since truth is undefined elsewhere.
    Hypothetical updates never mutate ``sensor_belief``.
    """
    if len(codebook) == 0:
        raise ValueError("empty codebook")
    sensed_cells = np.asarray(sensed_cells, dtype=np.int64)
    w = weights.weights[sensed_cells]
    truth = sensed_true[sensed_cells]
    best = None
    per_template = []
    for template in codebook.templates:
        op = instantiate_operator(template, map_shape, sensor_pos)
        obs = op.apply(sensed_true)
        estimate = hypothetical_projected_mean(
            sensor_belief, op, obs, channel_noise
        )
        err = truth - estimate[sensed_cells]
        if params.squared_weights:
            error_term = float(np.sum((w * err) ** 2))
        else:
            error_term = float(np.sum(w * err**2))
        cost = error_term + params.lambda_coefficient * template.k
        per_template.append((template.id, cost, op.rows))
        # ties broken by lowest template id
        if best is None or (cost, template.id) < (best[1], best[0]):
            best = (template.id, cost, op, obs)
    theta, cost, op, obs = best
    return SelectionResult(
        theta=theta,
        cost=cost,
        per_template=tuple(per_template),
        observation=obs,
        k=op.rows,
    )
