"""Protocol parameters, PU traffic model and the per-round timing arithmetic.

All durations are microseconds, all frame sizes are bytes and the rate is in
bits per microsecond (1 Mbps == 1 bit/us).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

BITS_PER_BYTE = 8


class InvalidParameter(ValueError):
    """A parameter violates a model invariant. ``field`` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _check_nonneg(name, value):
    if not (value >= 0) or math.isinf(value):
        raise InvalidParameter(name, f"must be a finite value >= 0, got {value!r}")


def _check_count(name, value, minimum):
    if isinstance(value, bool) or int(value) != value:
        raise InvalidParameter(name, f"must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParameter(name, f"must be >= {minimum}, got {value!r}")


@dataclass(frozen=True)
class ProtocolParams:
    """Frame sizes, timing constants, rate and population of one collector cell.

    Defaults are the reference operating point used throughout the experiments.
    """

    beacon_len: float = 100
    poll_len: float = 50
    payload_len: float = 1024
    header_len: float = 50
    sifs: float = 16
    prop_delay: float = 1
    tau_sense: float = 300
    tau_switch: float = 120
    rate: float = 1.0
    num_sm: int = 600
    packets_per_sm: int = 15
    num_supp_channels: int = 15

    def __post_init__(self):
        for name in ("beacon_len", "poll_len", "payload_len", "header_len",
                     "sifs", "prop_delay", "tau_sense", "tau_switch"):
            _check_nonneg(name, getattr(self, name))
        if not (self.rate > 0) or math.isinf(self.rate):
            raise InvalidParameter("rate", f"must be finite and > 0, got {self.rate!r}")
        if self.tau_sense < self.tau_switch:
            raise InvalidParameter(
                "tau_sense",
                f"tau_sense ({self.tau_sense}) must not be shorter than "
                f"tau_switch ({self.tau_switch}); SMs switch back to H_0 while the LC senses",
            )
        _check_count("num_sm", self.num_sm, 1)
        _check_count("packets_per_sm", self.packets_per_sm, 1)
        _check_count("num_supp_channels", self.num_supp_channels, 0)

    def replace(self, **changes) -> "ProtocolParams":
        return dataclasses.replace(self, **changes)

    @property
    def total_packets(self) -> int:
        return self.num_sm * self.packets_per_sm


@dataclass(frozen=True)
class PuTrafficModel:
    """Exponential ON-OFF occupancy of one supplementary channel.

    ``z_off`` may be ``math.inf`` to model a channel the PU never reclaims.
    """

    z_on: float = 8000
    z_off: float = 25000

    def __post_init__(self):
        if not (self.z_on > 0) or math.isinf(self.z_on):
            raise InvalidParameter("z_on", f"must be finite and > 0, got {self.z_on!r}")
        if not (self.z_off > 0):
            raise InvalidParameter("z_off", f"must be > 0, got {self.z_off!r}")

    def gamma(self) -> float:
        """Long-run fraction of time the channel is free."""
        if math.isinf(self.z_off):
            return 1.0
        return self.z_off / (self.z_off + self.z_on)

    @property
    def off_rate(self) -> float:
        """Rate at which a free channel gets reclaimed (1 / mean OFF time)."""
        return 1.0 / self.z_off

    def with_gamma(self, gamma: float) -> "PuTrafficModel":
        """Same mean OFF time, ON time rescaled so that ``gamma()`` == gamma."""
        if not 0 < gamma < 1:
            raise InvalidParameter("gamma", f"must lie in (0, 1), got {gamma!r}")
        return PuTrafficModel(z_on=self.z_off * (1 - gamma) / gamma, z_off=self.z_off)


def frame_tx_time(len_bytes: float, rate: float) -> float:
    """Airtime in us of a ``len_bytes`` frame at ``rate`` bits/us."""
    return len_bytes * BITS_PER_BYTE / rate


def periodic_duration_pcf(params: ProtocolParams) -> float:
    """One poll + data exchange on the dedicated channel."""
    p = params
    return (p.sifs + frame_tx_time(p.poll_len, p.rate) + p.prop_delay
            + p.sifs + frame_tx_time(p.payload_len + p.header_len, p.rate) + p.prop_delay)


def periodic_duration_crpcf(params: ProtocolParams) -> float:
    """Like the PCF round, with the two SIFS gaps stretched to sense and switch times."""
    p = params
    return (p.tau_sense + frame_tx_time(p.poll_len, p.rate) + p.prop_delay
            + p.tau_switch + frame_tx_time(p.payload_len + p.header_len, p.rate) + p.prop_delay)


def exposure_window(params: ProtocolParams) -> float:
    """Time a sensed-free channel must stay free for the round's upload to land."""
    return periodic_duration_crpcf(params) - params.tau_sense
