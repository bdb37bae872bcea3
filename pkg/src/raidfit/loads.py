"""Per-VD bandwidth and capacity demands of a virtual array.

Covers width selection, the normal-mode load of each supported RAID level,
the degraded-mode (one failed disk) load of mirrored and single-parity
arrays including declustered parity groups, and the effective (redundant)
size. Utilization is dimensionless: rate in accesses/second times service
time in ms, divided by 1000.
"""

import math
from dataclasses import dataclass

from .disks import DiskSpec, ServiceTimes

__all__ = [
    "K_DFT",
    "UPDATE_METHODS",
    "ArrayGeometry",
    "LoadProfile",
    "DeclusteringRow",
    "normal_total",
    "normal_load",
    "degraded_load",
    "effective_size",
    "select_width",
    "build_profile",
    "declustering_row",
]

# Tolerated disk failures per RAID level; mirroring is handled separately.
K_DFT = {0: 0, 5: 1, 6: 2, 7: 3}

# Small-write update strategies for parity-protected levels. A reads the
# old data and check blocks back through the controller, B/C do the
# read-modify-write at the disks (same disk cost), D writes through a
# composite head so an update costs no more than a plain write.
UPDATE_METHODS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class ArrayGeometry:
    """Width, parity-group span and failure tolerance of one array.

    ``parity_group`` may be fractional when derived from a declustering
    ratio; it is only ever reported rounded.
    """

    width: int
    parity_group: float
    k_dft: int = 1

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be at least 1")
        if self.k_dft not in (0, 1, 2, 3):
            raise ValueError("k_dft must be between 0 and 3")
        if not 1.0 <= self.parity_group <= self.width:
            raise ValueError("parity_group must lie in [1, width]")

    @property
    def alpha(self) -> float:
        """Fraction of survivors touched per reconstruction read."""
        if self.width <= 1:
            return 1.0
        return (self.parity_group - 1.0) / (self.width - 1.0)


@dataclass(frozen=True)
class LoadProfile:
    """Resolved demands of one request under a chosen geometry."""

    rho_total_normal: float
    rho_per_vd_normal: float
    rho_per_vd_degraded: float
    capacity_per_vd_gb: float
    period_scaling: tuple


def _util(rate_acc_s: float, time_ms: float) -> float:
    return rate_acc_s * time_ms / 1000.0


def normal_total(req, st: ServiceTimes, k: int, method: str = "B") -> float:
    """Array-wide normal-mode utilization, before dividing by the width."""
    f_r = req.read_fraction
    f_w = 1.0 - f_r
    if req.raid_level == 1:
        # every logical write lands on both mirrors; reads on one
        return _util(req.arrival_rate, f_r * st.x_sr_ms + 2.0 * f_w * st.x_sw_ms)
    if k == 0:
        return _util(req.arrival_rate, f_r * st.x_sr_ms + f_w * st.x_sw_ms)
    if method == "A":
        write_ms = (k + 1) * f_w * (st.x_sr_ms + st.x_sw_ms)
    elif method in ("B", "C"):
        write_ms = (k + 1) * f_w * st.x_rmw_ms
    elif method == "D":
        write_ms = (k + 1) * f_w * st.x_sw_ms
    else:
        raise ValueError(f"unknown update method {method!r} (expected one of {UPDATE_METHODS})")
    return _util(req.arrival_rate, f_r * st.x_sr_ms + write_ms)


def normal_load(req, st: ServiceTimes, geom: ArrayGeometry, method: str = "B"):
    """Array-wide and per-VD utilization with all disks healthy.

    Returns ``(rho_total, rho_per_vd)``; the per-VD figure assumes reads
    spread evenly over the width.
    """
    total = normal_total(req, st, geom.k_dft, method)
    return total, total / geom.width


def degraded_load(req, st: ServiceTimes, geom: ArrayGeometry) -> float:
    """Per-surviving-disk utilization with one failed disk.

    Mirrored pairs: the survivor absorbs the whole read stream while the
    write load stays put. Single-parity arrays with parity group G over
    width W: reads grow by (1 + alpha); each logical write turns into the
    read-modify-write / reconstruct traffic spread over the W - 1
    survivors. Every VD of the array is charged this figure because it is
    unknown which disk will fail.
    """
    f_r = req.read_fraction
    f_w = 1.0 - f_r
    if req.raid_level == 1:
        return _util(req.arrival_rate, f_r * st.x_sr_ms + f_w * st.x_sw_ms)
    if geom.k_dft != 1:
        raise ValueError("degraded load is modeled for mirrored and single-parity arrays only")
    w = geom.width
    g = geom.parity_group
    if w < 2:
        raise ValueError("degraded mode needs width >= 2")
    if g < 2:
        raise ValueError("degraded mode needs a parity group spanning >= 2 disks")
    lam = req.arrival_rate / w
    rho_read = _util(lam * f_r * (1.0 + geom.alpha), st.x_sr_ms)
    rho_write = _util(
        lam * f_w / (w - 1),
        2.0 * (w - 2) * st.x_rmw_ms + 2.0 * st.x_sw_ms + (g - 2.0) * st.x_sr_ms,
    )
    return rho_read + rho_write


def effective_size(req, geom: ArrayGeometry) -> float:
    """Size on disk including redundancy, in GB.

    Mirroring doubles the data. A k-failure-tolerant array spanning its
    whole parity group costs W/(W-k); a declustered one costs (1 + 1/G),
    which for G = W differs from the exact form by under 1% at the widths
    used here.
    """
    if req.raid_level == 1:
        return 2.0 * req.size_gb
    w = geom.width
    k = geom.k_dft
    if w <= k:
        raise ValueError("width must exceed the failure tolerance")
    if geom.parity_group >= w:
        return req.size_gb * w / (w - k)
    return req.size_gb * (1.0 + 1.0 / geom.parity_group)


def select_width(rho_total_normal, size_gb, rho_max, v_max_gb, n_disks, k) -> int:
    """Number of VDs needed so no disk carries more than the per-VD caps.

    The bandwidth width uses the peak-period normal-mode load; the
    capacity width adds k disks for check data. The result is the larger
    of the two, clipped to the array size. Mirrored pairs bypass this
    (their width is fixed at 2).
    """
    if not 0.0 < rho_max <= 1.0:
        raise ValueError("rho_max must be in (0, 1]")
    if v_max_gb <= 0:
        raise ValueError("v_max_gb must be positive")
    w_bw = math.ceil(rho_total_normal / rho_max)
    w_cap = math.ceil(size_gb / v_max_gb) + k
    return max(1, min(max(w_bw, w_cap), n_disks))


def build_profile(req, st: ServiceTimes, geom: ArrayGeometry, method: str = "B") -> LoadProfile:
    """Bundle the normal/degraded demands and per-VD capacity of a request."""
    total, per_vd = normal_load(req, st, geom, method)
    degraded = degraded_load(req, st, geom)
    v_eff = effective_size(req, geom)
    if req.arrival_rate > 0:
        scaling = tuple(r / req.arrival_rate for r in req.period_rates)
    else:
        scaling = tuple(1.0 for _ in req.period_rates)
    return LoadProfile(
        rho_total_normal=total,
        rho_per_vd_normal=per_vd,
        rho_per_vd_degraded=degraded,
        capacity_per_vd_gb=v_eff / geom.width,
        period_scaling=scaling,
    )


# Reference array for the declustering tradeoff table: 0.8 GB of data
# driving 7.61 accesses/second in normal mode at an intensity of 8.5
# accesses/second per GB, laid out over every disk in the pool.
REF_DATA_GB = 0.8
REF_RATE_ACC_S = 7.61
REF_KAPPA = 8.5


@dataclass(frozen=True)
class DeclusteringRow:
    """One row of the capacity/bandwidth tradeoff versus declustering ratio."""

    alpha: float
    parity_group: int
    parity_group_exact: float
    capacity_gb: float
    bandwidth: float
    cbr: float


def declustering_row(alpha, spec: DiskSpec, kappa: float = REF_KAPPA,
                     read_fraction: float = 1.0) -> DeclusteringRow:
    """Capacity, degraded-mode bandwidth need and their ratio at one alpha.

    Defined for all-read traffic, where a single failure inflates the
    bandwidth requirement by exactly (1 + alpha). The reported parity
    group is rounded to the nearest whole disk; the capacity uses the
    exact fractional group.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    if read_fraction != 1.0:
        raise ValueError("the tradeoff table is defined for all-read workloads")
    w = spec.count
    g = 1.0 + alpha * (w - 1)
    bandwidth = REF_RATE_ACC_S * (kappa / REF_KAPPA) * (1.0 + alpha)
    capacity = REF_DATA_GB * (1.0 + 1.0 / g)
    return DeclusteringRow(
        alpha=alpha,
        parity_group=math.floor(g + 0.5),
        parity_group_exact=g,
        capacity_gb=capacity,
        bandwidth=bandwidth,
        cbr=capacity / bandwidth,
    )
