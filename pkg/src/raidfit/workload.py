"""Synthetic FCFS stream of virtual-array allocation requests.

The generator is a plain Mersenne Twister (``random.Random``) so that runs
reproduce across interpreters and machines for a given seed. Each request
consumes exactly two uniform draws: one for the RAID level, one for the
size, which keeps replay stable no matter what the consumer does with the
request afterwards.
"""

import math
import random
from dataclasses import dataclass

__all__ = [
    "KAPPA5_PRESETS",
    "WorkloadConfig",
    "VaRequest",
    "RequestStream",
    "make_stream",
    "raid_level_for",
    "round_up_to_strip",
]

# Per-GB access intensity of RAID5 arrays for the three workload classes
# (accesses per second per GB). RAID1 intensity is kappa_ratio times higher.
KAPPA5_PRESETS = {"bandwidth": 8.5, "balanced": 3.3, "capacity": 2.1}


@dataclass(frozen=True)
class WorkloadConfig:
    """Knobs of the request generator.

    ``periods`` are deterministic load multipliers; the first entry is the
    peak period and must be 1. Sizes are exponential with the per-level
    mean, rounded up to whole strips.
    """

    f1: float = 0.25
    mean_size_r1_gb: float = 0.25
    mean_size_r5_gb: float = 0.75
    kappa5: float = 8.5
    kappa_ratio: float = 10.0
    read_fraction: float = 1.0
    periods: tuple = (1.0,)
    strip_kb: int = 256
    seed: int = 1

    def __post_init__(self):
        if not 0.0 <= self.f1 <= 1.0:
            raise ValueError("f1 must be in [0, 1]")
        if not 0.0 <= self.read_fraction <= 1.0:
            raise ValueError("read_fraction must be in [0, 1]")
        if self.mean_size_r1_gb <= 0 or self.mean_size_r5_gb <= 0:
            raise ValueError("mean sizes must be positive")
        if self.kappa5 <= 0 or self.kappa_ratio <= 0:
            raise ValueError("access intensities must be positive")
        if self.strip_kb <= 0:
            raise ValueError("strip_kb must be positive")
        if not self.periods:
            raise ValueError("at least one period is required")
        if self.periods[0] != 1.0:
            raise ValueError("the first period is the peak and must be 1.0")
        for m in self.periods:
            if not 0.0 < m <= 1.0:
                raise ValueError("period multipliers must be in (0, 1]")

    @property
    def kappa1(self) -> float:
        return self.kappa_ratio * self.kappa5

    def kappa_for(self, raid_level: int) -> float:
        return self.kappa1 if raid_level == 1 else self.kappa5

    @property
    def granule_gb(self) -> float:
        # strip_kb KiB expressed in (binary) GB; 256 KB == 1/4096 GB
        return self.strip_kb / (1024.0 * 1024.0)


@dataclass(frozen=True)
class VaRequest:
    """One allocation request: a virtual array of a single RAID level."""

    index: int
    raid_level: int
    size_gb: float
    arrival_rate: float
    read_fraction: float
    period_rates: tuple

    @property
    def write_fraction(self) -> float:
        return 1.0 - self.read_fraction


def raid_level_for(u: float, f1: float) -> int:
    """Level choice from one uniform draw: u <= f1 selects mirroring."""
    return 1 if u <= f1 else 5


def round_up_to_strip(size_gb: float, strip_kb: int) -> float:
    """Round a size up to a whole number of strips, at least one."""
    granule = strip_kb / (1024.0 * 1024.0)
    units = math.ceil(size_gb / granule)
    return max(units, 1) * granule


class RequestStream:
    """Unbounded, replayable request sequence for one seed.

    Two streams built from the same config and seed yield identical
    requests; the stream is single-owner mutable state.
    """

    def __init__(self, config: WorkloadConfig, seed=None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self._rng = random.Random(self.seed)
        self._index = 0

    def __iter__(self):
        return self

    def __next__(self) -> VaRequest:
        return self.next_request()

    def next_request(self) -> VaRequest:
        cfg = self.config
        level = raid_level_for(self._rng.random(), cfg.f1)
        mean = cfg.mean_size_r1_gb if level == 1 else cfg.mean_size_r5_gb
        # inverse-transform exponential; u < 1 so the log argument is safe
        raw = -mean * math.log(1.0 - self._rng.random())
        size = round_up_to_strip(raw, cfg.strip_kb)
        rate = cfg.kappa_for(level) * size
        self._index += 1
        return VaRequest(
            index=self._index,
            raid_level=level,
            size_gb=size,
            arrival_rate=rate,
            read_fraction=cfg.read_fraction,
            period_rates=tuple(rate * m for m in cfg.periods),
        )

    def take(self, n: int) -> list:
        return [self.next_request() for _ in range(n)]


def make_stream(config: WorkloadConfig, seed=None) -> RequestStream:
    """Build a stream; ``seed`` overrides the config seed when given."""
    return RequestStream(config, seed=seed)
