"""Polling MAC models for smart-meter data collection: plain PCF and cognitive-radio PCF."""

from .analytic import AnalyticReport, OptimalPayload, crpcf_throughput, optimal_payload, pcf_throughput
from .core import (InvalidParameter, ProtocolParams, PuTrafficModel, frame_tx_time,
                   periodic_duration_crpcf, periodic_duration_pcf)
from .puchannel import ChannelProcess, Phase, sample_phase
from .scheduler import RoundAllocation, SmState, initialize_round, lcfs_allocate
from .sim import Protocol, SimConfig, SimReport, run_replications, simulate, simulate_crpcf, simulate_pcf

__version__ = "0.1.0"
