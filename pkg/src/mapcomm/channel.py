"""Noisy communication channel with per-agent seeded noise streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abstraction import Codebook, ObservationOperator, bits_for

__all__ = ["Transmission", "RngStreams", "transmit"]


@dataclass(frozen=True)
class Transmission:
    """One message over the channel: perturbed payload plus bit pricing."""

    payload: np.ndarray
    source: object  # template id or the raw marker
    bits: int
    noise_applied: np.ndarray


class RngStreams:
    """Independent substreams spawned from one scenario seed.

    Channel noise, Actor perception noise, and the moving-target walk each
    own a substream so the realizations stay reproducible and uncoupled.
    """

    def __init__(self, seed: int):
        root = np.random.SeedSequence(seed)
        channel_ss, actor_ss, target_ss, map_ss = root.spawn(4)
        self.channel = np.random.default_rng(channel_ss)
        self.actor = np.random.default_rng(actor_ss)
        self.target = np.random.default_rng(target_ss)
        self.map = np.random.default_rng(map_ss)


def transmit(
    observation: np.ndarray,
    op: ObservationOperator,
    codebook: Codebook,
    channel_variance: float,
    rng: np.random.Generator,
) -> Transmission:
    """Send one observation vector through the Gaussian channel."""
    observation = np.asarray(observation, dtype=float)
    if channel_variance > 0:
        noise = rng.normal(0.0, np.sqrt(channel_variance), size=observation.shape)
    else:
        noise = np.zeros_like(observation)
    return Transmission(
        payload=observation + noise,
        source=op.source,
        bits=bits_for(op, codebook),
        noise_applied=noise,
    )
