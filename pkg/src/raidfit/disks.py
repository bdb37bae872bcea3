"""Drive constants and the service times derived from them.

Everything downstream works in milliseconds for times, accesses per second
for rates, and GB for sizes; unit conversions happen at this boundary only.
Zoned recording is collapsed into a single mean transfer time.
"""

from dataclasses import dataclass

__all__ = [
    "DiskSpec",
    "ServiceTimes",
    "service_times",
    "max_bandwidth",
    "capacity_bandwidth_ratio",
    "IBM_18ES",
    "DISK_PRESETS",
]


@dataclass(frozen=True)
class DiskSpec:
    """Physical constants of one drive model plus the array size."""

    capacity_gb: float
    seek_ms: float
    rotation_ms: float
    settle_ms: float
    transfer_ms: float
    count: int = 1

    def __post_init__(self):
        if self.capacity_gb <= 0:
            raise ValueError("capacity_gb must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        for name in ("seek_ms", "rotation_ms", "settle_ms", "transfer_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.seek_ms + self.rotation_ms / 2.0 + self.transfer_ms <= 0:
            raise ValueError("single-read time must come out positive")


@dataclass(frozen=True)
class ServiceTimes:
    """Mean single-read, single-write and read-modify-write times in ms."""

    x_sr_ms: float
    x_sw_ms: float
    x_rmw_ms: float


def service_times(spec: DiskSpec) -> ServiceTimes:
    """Service times for random single-block accesses under FCFS scheduling.

    Read = seek + half a rotation + transfer. A write adds head settling on
    top of the read; a read-modify-write adds a full rotation.
    """
    x_sr = spec.seek_ms + spec.rotation_ms / 2.0 + spec.transfer_ms
    return ServiceTimes(x_sr, x_sr + spec.settle_ms, x_sr + spec.rotation_ms)


def max_bandwidth(spec: DiskSpec) -> float:
    """Peak random-access rate of one drive, in accesses per second."""
    return 1000.0 / service_times(spec).x_sr_ms


def capacity_bandwidth_ratio(spec: DiskSpec) -> float:
    """GB of capacity per access/second of bandwidth for one drive."""
    return spec.capacity_gb / max_bandwidth(spec)


# 9.17 GB 7200 RPM SCSI drive; the bundled experiment presets use an array
# of 12 identical ones.
IBM_18ES = DiskSpec(
    capacity_gb=9.17,
    seek_ms=7.16,
    rotation_ms=8.33,
    settle_ms=0.14,
    transfer_ms=0.16,
    count=12,
)

DISK_PRESETS = {"ibm-18es": IBM_18ES}
