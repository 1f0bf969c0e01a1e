"""Least Completed First Served channel allocation."""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field

from .core import ProtocolParams
from .puchannel import DEDICATED_CHANNEL


@dataclass
class SmState:
    sm_id: int
    packets_completed: int = 0
    assigned_channel: int | None = None
    switch_count: int = 0


@dataclass(frozen=True)
class RoundAllocation:
    round_index: int
    assignments: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.assignments)

    def __bool__(self):
        return bool(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    @property
    def sm_ids(self) -> list[int]:
        return [sm for sm, _ in self.assignments]

    @property
    def channel_ids(self) -> list[int]:
        return [ch for _, ch in self.assignments]


def lcfs_allocate(sms, free_channels, packets_per_sm: int, round_index: int = 0) -> RoundAllocation:
    """Hand the free channels to the unfinished SMs with the fewest completed packets.

    Ties go to the lower ``sm_id``. The first selected SM gets the dedicated
    channel, the rest take the remaining free channels in ascending order.
    An empty allocation means every SM is done.
    """
    if not sms:
        raise ValueError("sms must be non-empty")
    if DEDICATED_CHANNEL not in free_channels:
        raise ValueError("free_channels must contain the dedicated channel 0")
    channels = sorted(set(free_channels))

    unfinished = [s for s in sms if s.packets_completed < packets_per_sm]
    k = min(len(channels), len(unfinished))
    chosen = heapq.nsmallest(k, unfinished, key=lambda s: (s.packets_completed, s.sm_id))
    # channels[0] is the dedicated channel
    return RoundAllocation(round_index, tuple((s.sm_id, ch) for s, ch in zip(chosen, channels)))


def initialize_round(params: ProtocolParams, free_channels=None) -> RoundAllocation:
    """First allocation of a fresh run; all channels are assumed free unless given."""
    if free_channels is None:
        free_channels = range(params.num_supp_channels + 1)
    sms = [SmState(i) for i in range(params.num_sm)]
    return lcfs_allocate(sms, free_channels, params.packets_per_sm, round_index=0)


def _lcfs_key(sm: SmState):
    return (sm.packets_completed, sm.sm_id)


class LcfsQueue:
    """Incremental LCFS ordering for long runs.

    Produces the same allocations as :func:`lcfs_allocate` but keeps the
    unfinished SMs sorted, so a round costs O(k log M) instead of O(M).
    Call :meth:`commit` after updating the allocated SMs' counters.
    """

    def __init__(self, sms, packets_per_sm: int):
        self.sms = sms
        self.packets_per_sm = packets_per_sm
        self._order = sorted((s for s in sms if s.packets_completed < packets_per_sm), key=_lcfs_key)
        self._pending: list[SmState] = []

    def __len__(self):
        return len(self._order) + len(self._pending)

    def least_completed(self) -> int:
        """Smallest packet count among unfinished SMs (``packets_per_sm`` if none remain)."""
        if self._pending:
            raise RuntimeError("commit() the previous allocation first")
        return self._order[0].packets_completed if self._order else self.packets_per_sm

    def allocate(self, free_channels, round_index: int = 0) -> RoundAllocation:
        if self._pending:
            raise RuntimeError("commit() the previous allocation first")
        if DEDICATED_CHANNEL not in free_channels:
            raise ValueError("free_channels must contain the dedicated channel 0")
        channels = sorted(set(free_channels))
        k = min(len(channels), len(self._order))
        chosen = self._order[:k]
        del self._order[:k]
        self._pending = chosen
        return RoundAllocation(round_index, tuple((s.sm_id, ch) for s, ch in zip(chosen, channels)))

    def commit(self) -> None:
        for sm in self._pending:
            if sm.packets_completed < self.packets_per_sm:
                bisect.insort(self._order, sm, key=_lcfs_key)
        self._pending = []
