"""Virtual-array packing simulator and analytic models for mixed-RAID disk pools."""

__version__ = "0.1.0"

from .allocator import (
    POLICY_KINDS,
    AllocationFailure,
    ArrayState,
    Policy,
    VaDemand,
    objective_minmax,
    objective_variance,
)
from .disks import (
    DISK_PRESETS,
    IBM_18ES,
    DiskSpec,
    ServiceTimes,
    capacity_bandwidth_ratio,
    max_bandwidth,
    service_times,
)
from .experiment import (
    ClusteringSpec,
    ExperimentConfig,
    ExperimentReport,
    SweepReport,
    default_policies,
    run_experiment,
    run_once,
    sweep,
)
from .loads import (
    ArrayGeometry,
    DeclusteringRow,
    LoadProfile,
    build_profile,
    declustering_row,
    degraded_load,
    effective_size,
    normal_load,
    normal_total,
    select_width,
)
from .workload import (
    KAPPA5_PRESETS,
    RequestStream,
    VaRequest,
    WorkloadConfig,
    make_stream,
)
