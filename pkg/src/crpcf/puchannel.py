"""ON-OFF renewal process for the supplementary channels.

Each :class:`ChannelProcess` owns its own random stream and builds its sample
path lazily as the simulator queries it at non-decreasing times.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .core import PuTrafficModel

DEDICATED_CHANNEL = 0


class Phase(enum.Enum):
    ON = "on"
    OFF = "off"

    def flipped(self) -> "Phase":
        return Phase.OFF if self is Phase.ON else Phase.ON


class QueryOrderError(RuntimeError):
    """A channel was queried at a time earlier than a previous query."""


def channel_rng(seed: int, channel_id: int) -> np.random.Generator:
    """Independent PCG64 stream for ``channel_id`` under master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(channel_id,))))


def sample_phase(model: PuTrafficModel, phase: Phase, rng: np.random.Generator,
                 u: float | None = None) -> float:
    """Draw an ON or OFF holding time by inverse transform.

    ``u`` overrides the uniform draw and must lie in (0, 1].
    """
    mean = model.z_on if phase is Phase.ON else model.z_off
    if math.isinf(mean):
        return math.inf
    if u is None:
        u = 1.0 - rng.random()
    return -mean * math.log(u)


class ChannelProcess:
    """Realized PU occupancy of one channel.

    Channel 0 is the dedicated channel and is free at every instant.
    """

    def __init__(self, channel_id: int, model: PuTrafficModel | None = None, seed: int = 0,
                 initial_phase: Phase | None = None):
        self.channel_id = channel_id
        self.model = model
        self._last_query = -math.inf
        if self.dedicated:
            self.rng = None
            self.phase = Phase.OFF
            self.phase_start = 0.0
            self.phase_end = math.inf
            return
        self.rng = channel_rng(seed, channel_id)
        if initial_phase is None:
            # stationary start; memorylessness makes a fresh draw the exact residual
            initial_phase = Phase.OFF if self.rng.random() < model.gamma() else Phase.ON
        self.phase = initial_phase
        self.phase_start = 0.0
        self.phase_end = sample_phase(model, initial_phase, self.rng)

    @property
    def dedicated(self) -> bool:
        return self.channel_id == DEDICATED_CHANNEL or self.model is None

    def _seek(self, t: float) -> None:
        if t < self._last_query:
            raise QueryOrderError(
                f"channel {self.channel_id}: query at t={t} precedes earlier query at "
                f"t={self._last_query}")
        self._last_query = t
        while self.phase_end <= t:
            self.phase = self.phase.flipped()
            self.phase_start = self.phase_end
            self.phase_end = self.phase_start + sample_phase(self.model, self.phase, self.rng)

    def is_free_at(self, t: float) -> bool:
        """True if no PU occupies the channel at time ``t``."""
        self._seek(t)
        return self.phase is Phase.OFF

    def off_survives(self, t_start: float, window: float) -> bool:
        """True if the channel stays free over ``[t_start, t_start + window]``."""
        if window < 0:
            raise ValueError(f"window must be >= 0, got {window}")
        self._seek(t_start)
        return self.phase is Phase.OFF and self.phase_end > t_start + window

    def residual(self, t: float) -> float:
        """Time left in the phase the channel is in at ``t``."""
        self._seek(t)
        return self.phase_end - t


def make_channels(num_supp_channels: int, model: PuTrafficModel, seed: int) -> list[ChannelProcess]:
    """Dedicated channel plus ``num_supp_channels`` independent PU channels."""
    channels = [ChannelProcess(DEDICATED_CHANNEL)]
    channels.extend(ChannelProcess(i, model, seed) for i in range(1, num_supp_channels + 1))
    return channels
