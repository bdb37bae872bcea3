"""Closed-form queueing and reliability models for shared disk pools.

These back the ``analyze`` CLI subcommand: M/M/1 response times for
dedicated versus shared disk partitionings, a worked single-failure
response-time scenario on a mirrored layout, exact reliability of the two
partitionings, and the declustering-ratio choice that matches a workload's
capacity/bandwidth ratio to the drive's.
"""

from dataclasses import dataclass

from .disks import DiskSpec, capacity_bandwidth_ratio
from .loads import declustering_row

__all__ = [
    "SaturationError",
    "Mm1Input",
    "mm1_response",
    "mm1_response_at",
    "PartitionComparison",
    "compare_partitionings",
    "DegradedScenario",
    "degraded_response_example",
    "mirrored_reliability",
    "parity_reliability",
    "layout_reliability",
    "epsilon_coefficient",
    "choose_alpha",
]


class SaturationError(ValueError):
    """Utilization at or above 1: the queue has no finite response time."""


@dataclass(frozen=True)
class Mm1Input:
    """Open single-server queue: Poisson arrivals, exponential service."""

    arrival_rate: float        # accesses per second
    service_time_ms: float

    @property
    def utilization(self) -> float:
        return self.arrival_rate * self.service_time_ms / 1000.0


def mm1_response(inp: Mm1Input) -> float:
    """Mean response time in ms: service time over (1 - utilization)."""
    rho = inp.utilization
    if rho >= 1.0:
        raise SaturationError(f"utilization {rho:.3f} >= 1")
    return inp.service_time_ms / (1.0 - rho)


def mm1_response_at(rho: float, service_time_ms: float = 1.0) -> float:
    """Response time at a given utilization (handy for what-ifs)."""
    if rho >= 1.0:
        raise SaturationError(f"utilization {rho:.3f} >= 1")
    return service_time_ms / (1.0 - rho)


@dataclass(frozen=True)
class PartitionComparison:
    """Mean response times (ms) of the two ways to host two array types."""

    dedicated_r1_ms: float       # mirrors on their own n disks
    dedicated_r5_ms: float       # parity array on the remaining N - n
    shared_ms: float             # both striped over all N disks
    shared_priority_r1_ms: float  # shared pool, mirror traffic served first


def compare_partitionings(lambda_r1, lambda_r5, n_disks, n_r1_disks,
                          service_time_ms) -> PartitionComparison:
    """Dedicated subsets versus one shared pool, plus the priority variant.

    In the shared pool both streams see the combined utilization; giving
    mirror traffic priority means only its own stream delays it.
    """
    if not 0 < n_r1_disks < n_disks:
        raise ValueError("the dedicated split needs 0 < n < N")
    r_ded_r1 = mm1_response(Mm1Input(lambda_r1 / n_r1_disks, service_time_ms))
    r_ded_r5 = mm1_response(Mm1Input(lambda_r5 / (n_disks - n_r1_disks), service_time_ms))
    r_shared = mm1_response(Mm1Input((lambda_r1 + lambda_r5) / n_disks, service_time_ms))
    r_priority = mm1_response(Mm1Input(lambda_r1 / n_disks, service_time_ms))
    return PartitionComparison(r_ded_r1, r_ded_r5, r_shared, r_priority)


@dataclass(frozen=True)
class DegradedScenario:
    """Worked single-failure example: 8 disks hosting twelve mirrored pairs.

    Responses are in units of the disk service time. One disk dies; one
    survivor ends up serving four VD loads, another five, the rest stay at
    the baseline of three.
    """

    normal: float
    response_4x: float
    response_5x: float
    degraded_mean: float
    per_va: dict


# How each mirrored pair's reads are answered after the failure; pairs not
# listed keep the normal response.
_HOT_4X_VAS = ("E",)
_HOT_5X_VAS = ("B", "I")
_SPLIT_4X_VAS = ("A", "L")
_SPLIT_5X_VAS = ("F",)
_ALL_VAS = tuple("ABCDEFGHIJKL")


def degraded_response_example(rho_vd: float) -> DegradedScenario:
    """Evaluate the mirrored-pool failure scenario at one per-VD utilization.

    The published average divides by the 7 survivors, weights the two
    overloaded disks by their load ratios 4/3 and 5/3, and enters the five
    lightly loaded survivors at their bare service time; it is reproduced
    here as-is. The per-array responses use the loaded baseline.
    """
    if rho_vd < 0:
        raise ValueError("rho_vd must be non-negative")
    if 5.0 * rho_vd >= 1.0:
        raise SaturationError("the hottest survivor saturates at rho_vd >= 0.2")
    normal = 1.0 / (1.0 - 3.0 * rho_vd)
    r4 = 1.0 / (1.0 - 4.0 * rho_vd)
    r5 = 1.0 / (1.0 - 5.0 * rho_vd)
    mean = (1.0 + (4.0 / 3.0) * r4 + (5.0 / 3.0) * r5 + 4.0) / 7.0
    per_va = {}
    for va in _ALL_VAS:
        if va in _HOT_4X_VAS:
            per_va[va] = r4
        elif va in _HOT_5X_VAS:
            per_va[va] = r5
        elif va in _SPLIT_4X_VAS:
            per_va[va] = (normal + r4) / 2.0
        elif va in _SPLIT_5X_VAS:
            per_va[va] = (normal + r5) / 2.0
        else:
            per_va[va] = normal
    return DegradedScenario(normal, r4, r5, mean, per_va)


def mirrored_reliability(r: float, pairs: int = 1) -> float:
    """Probability that every one of ``pairs`` mirrored pairs survives."""
    _check_r(r)
    return (1.0 - (1.0 - r) ** 2) ** pairs


def parity_reliability(r: float, width: int) -> float:
    """Probability a single-parity array of ``width`` disks loses at most one."""
    _check_r(r)
    return r ** width + width * (1.0 - r) * r ** (width - 1)


# The two 8-disk layouts compared throughout: dedicated = one mirrored
# pair plus a 6-disk parity array on separate disks; shared = four pairs
# and an 8-disk parity array interleaved over the same pool.
_LAYOUTS = {
    "dedicated": lambda r: mirrored_reliability(r, 1) * parity_reliability(r, 6),
    "shared": lambda r: mirrored_reliability(r, 4) * parity_reliability(r, 8),
}


def layout_reliability(r: float, layout: str) -> float:
    """Exact survival probability of one of the named 8-disk layouts."""
    try:
        return _LAYOUTS[layout](r)
    except KeyError:
        raise ValueError(f"unknown layout {layout!r}; valid: {', '.join(_LAYOUTS)}") from None


def epsilon_coefficient(layout: str, epsilon: float) -> float:
    """Leading failure-probability coefficient: (1 - R) / eps^2 at r = 1 - eps."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    return (1.0 - layout_reliability(1.0 - epsilon, layout)) / epsilon ** 2


def choose_alpha(spec: DiskSpec, kappa: float, read_fraction: float, candidates) -> float:
    """Declustering ratio whose workload CBR lands closest to the drive's."""
    candidates = list(candidates)
    if not candidates:
        raise ValueError("need at least one candidate alpha")
    target = capacity_bandwidth_ratio(spec)
    return min(
        candidates,
        key=lambda a: (abs(declustering_row(a, spec, kappa, read_fraction).cbr - target), a),
    )


def _check_r(r):
    if not 0.0 <= r <= 1.0:
        raise ValueError("disk reliability must be in [0, 1]")
