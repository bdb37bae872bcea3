"""FCFS allocation experiment with common random numbers.

Every policy in an iteration consumes the identical request sequence
(same iteration seed); the random placement policy draws its disks from a
separate generator so it cannot perturb the stream. A run allocates
requests one at a time and stops at the first array that does not fit.
"""

import random
import statistics
from dataclasses import dataclass, field, replace

from .allocator import POLICY_KINDS, AllocationFailure, ArrayState, Policy, VaDemand
from .analysis import choose_alpha
from .disks import IBM_18ES, DiskSpec, service_times
from .loads import K_DFT, ArrayGeometry, build_profile, normal_total, select_width
from .workload import WorkloadConfig, make_stream

__all__ = [
    "SWEEP_DIMENSIONS",
    "ClusteringSpec",
    "ExperimentConfig",
    "RunResult",
    "PolicyStats",
    "ExperimentReport",
    "SweepReport",
    "default_policies",
    "iteration_seed",
    "placement_seed",
    "run_once",
    "run_experiment",
    "sweep",
]

SWEEP_DIMENSIONS = ("beta", "rho_max", "v_max", "alpha")

# Candidate ratios when the declustering is matched to the drive CBR.
_ALPHA_CANDIDATES = (0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0)


def iteration_seed(master_seed: int, iteration: int) -> int:
    """Seed of one iteration's request stream (shared by all policies)."""
    return master_seed + 1_000_003 * iteration


def placement_seed(iter_seed: int) -> int:
    """Seed of the random policy's disk picker for one run."""
    return iter_seed + 500_009


@dataclass(frozen=True)
class ClusteringSpec:
    """Parity-group handling for single-parity arrays.

    off    - parity group spans the selected width.
    fixed  - arrays span the whole pool with the given declustering ratio.
    auto   - as fixed, but the ratio is chosen to match the drive CBR.
    """

    mode: str = "off"
    alpha: float = None
    candidates: tuple = _ALPHA_CANDIDATES

    def __post_init__(self):
        if self.mode not in ("off", "fixed", "auto"):
            raise ValueError("clustering mode must be off, fixed or auto")
        if self.mode == "fixed":
            if self.alpha is None or not 0.0 < self.alpha <= 1.0:
                raise ValueError("fixed clustering needs alpha in (0, 1]")
        if self.mode == "auto" and not self.candidates:
            raise ValueError("auto clustering needs candidate ratios")


def default_policies(beta: float = 1.0) -> tuple:
    """All seven policies in report order."""
    return tuple(Policy(kind=k, beta=beta) for k in POLICY_KINDS)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment depends on.

    ``v_max_gb`` defaults to 2% of a single drive's capacity, the setting
    under which capacity-driven widths match the reported mean widths.
    ``bw_budget`` is the per-disk utilization ceiling after reserving a
    fraction for sequential traffic.
    """

    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    disk: DiskSpec = IBM_18ES
    policies: tuple = field(default_factory=default_policies)
    mode: str = "degraded"
    iterations: int = 100
    rho_max: float = 0.05
    v_max_gb: float = None
    update_method: str = "B"
    clustering: ClusteringSpec = field(default_factory=ClusteringSpec)
    bw_budget: float = 1.0
    stop_after_failures: int = 1

    def __post_init__(self):
        if self.mode not in ("normal", "degraded"):
            raise ValueError("mode must be normal or degraded")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.mode == "degraded" and self.disk.count < 3:
            raise ValueError("degraded-mode experiments need at least 3 disks")
        if not 0.0 < self.rho_max <= 1.0:
            raise ValueError("rho_max must be in (0, 1]")
        if self.v_max_gb is not None and self.v_max_gb <= 0:
            raise ValueError("v_max_gb must be positive")
        if not self.policies:
            raise ValueError("need at least one policy")
        if self.stop_after_failures < 1:
            raise ValueError("stop_after_failures must be >= 1")

    @property
    def v_max(self) -> float:
        return self.v_max_gb if self.v_max_gb is not None else self.disk.capacity_gb / 50.0


@dataclass(frozen=True)
class RunResult:
    """Outcome of one policy's pass over one request stream."""

    policy: Policy
    seed: int
    allocated_r1: int
    allocated_r5: int
    failure_reason: str
    bw_util_mean: float
    bw_util_std: float
    cap_util_mean: float
    cap_util_std: float
    state: ArrayState
    requests: tuple

    @property
    def total(self) -> int:
        return self.allocated_r1 + self.allocated_r5


def _geometry_for(req, config: ExperimentConfig, st) -> ArrayGeometry:
    if req.raid_level == 1:
        return ArrayGeometry(width=2, parity_group=2.0, k_dft=1)
    k = K_DFT[req.raid_level]
    n = config.disk.count
    mode = config.clustering.mode
    if mode == "off":
        rho_total = normal_total(req, st, k, config.update_method)
        w = select_width(rho_total, req.size_gb, config.rho_max, config.v_max, n, k)
        return ArrayGeometry(width=w, parity_group=float(w), k_dft=k)
    if mode == "fixed":
        alpha = config.clustering.alpha
    else:
        alpha = choose_alpha(config.disk, config.workload.kappa5, 1.0,
                             config.clustering.candidates)
    return ArrayGeometry(width=n, parity_group=1.0 + alpha * (n - 1), k_dft=k)


def run_once(config: ExperimentConfig, policy: Policy, seed: int, requests=None) -> RunResult:
    """Allocate the seeded stream in FCFS order until it jams.

    The run ends after ``config.stop_after_failures`` consecutive failed
    arrays; the default of 1 is the stop-at-first-failure rule of the
    comparison experiments, larger values give a skip-and-continue mode
    for exploration. ``requests`` substitutes a finite, pre-built request
    sequence for the stream (used in tests); running one dry then counts
    every request as allocated with no failure reason.
    """
    st = service_times(config.disk)
    periods = config.workload.periods
    state = ArrayState.from_spec(config.disk, n_periods=len(periods), bw_budget=config.bw_budget)
    stream = iter(requests) if requests is not None else make_stream(config.workload, seed=seed)
    rng = random.Random(placement_seed(seed)) if policy.kind == "random" else None
    degraded = config.mode == "degraded"
    r1 = r5 = 0
    reason = None
    consecutive = 0
    consumed = []
    while True:
        try:
            req = next(stream)
        except StopIteration:
            break
        consumed.append((req.raid_level, req.size_gb, req.arrival_rate))
        geom = _geometry_for(req, config, st)
        profile = build_profile(req, st, geom, config.update_method)
        rho_vd = profile.rho_per_vd_degraded if degraded else profile.rho_per_vd_normal
        demand = VaDemand(
            va_index=req.index,
            raid_level=req.raid_level,
            width=geom.width,
            bw_per_period=tuple(rho_vd * m for m in profile.period_scaling),
            cap_gb=profile.capacity_per_vd_gb,
        )
        try:
            state.try_place(demand, policy, rng)
        except AllocationFailure as exc:
            reason = exc.reason
            consecutive += 1
            if consecutive >= config.stop_after_failures:
                break
            continue
        consecutive = 0
        if req.raid_level == 1:
            r1 += 1
        else:
            r5 += 1
    peak = state.u_bw[0]
    return RunResult(
        policy=policy,
        seed=seed,
        allocated_r1=r1,
        allocated_r5=r5,
        failure_reason=reason,
        bw_util_mean=statistics.fmean(peak),
        bw_util_std=statistics.pstdev(peak),
        cap_util_mean=statistics.fmean(state.u_cap),
        cap_util_std=statistics.pstdev(state.u_cap),
        state=state,
        requests=tuple(consumed),
    )


@dataclass(frozen=True)
class PolicyStats:
    """Aggregates of one policy over all iterations."""

    policy: Policy
    best_count: int
    mean_r1: float
    mean_r5: float
    mean_total: float
    bw_util_mean: float
    bw_util_std: float
    cap_util_mean: float
    cap_util_std: float
    failure_reasons: dict
    totals: tuple

    @property
    def label(self) -> str:
        return self.policy.kind

    @property
    def binding_resource(self) -> str:
        """'c' when capacity stopped most runs, else 'b'."""
        cap = self.failure_reasons.get("capacity", 0)
        bw = self.failure_reasons.get("bandwidth", 0)
        return "c" if cap > bw else "b"


@dataclass(frozen=True)
class ExperimentReport:
    """Per-policy means over the iterations, plus tie-aware best counts."""

    iterations: int
    master_seed: int
    mode: str
    rows: tuple

    def row(self, kind: str) -> PolicyStats:
        for r in self.rows:
            if r.policy.kind == kind:
                return r
        raise KeyError(kind)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every policy over the same streams and aggregate.

    Iteration j draws its stream from iteration_seed(master, j); ties for
    the best total credit every tied policy.
    """
    master = config.workload.seed
    n_pol = len(config.policies)
    best = [0] * n_pol
    r1s = [[] for _ in range(n_pol)]
    r5s = [[] for _ in range(n_pol)]
    totals = [[] for _ in range(n_pol)]
    bw_m = [[] for _ in range(n_pol)]
    bw_s = [[] for _ in range(n_pol)]
    cap_m = [[] for _ in range(n_pol)]
    cap_s = [[] for _ in range(n_pol)]
    reasons = [{} for _ in range(n_pol)]
    for j in range(config.iterations):
        seed_j = iteration_seed(master, j)
        results = [run_once(config, p, seed_j) for p in config.policies]
        top = max(r.total for r in results)
        for i, res in enumerate(results):
            if res.total == top:
                best[i] += 1
            r1s[i].append(res.allocated_r1)
            r5s[i].append(res.allocated_r5)
            totals[i].append(res.total)
            bw_m[i].append(res.bw_util_mean)
            bw_s[i].append(res.bw_util_std)
            cap_m[i].append(res.cap_util_mean)
            cap_s[i].append(res.cap_util_std)
            if res.failure_reason is not None:
                reasons[i][res.failure_reason] = reasons[i].get(res.failure_reason, 0) + 1
    rows = tuple(
        PolicyStats(
            policy=config.policies[i],
            best_count=best[i],
            mean_r1=statistics.fmean(r1s[i]),
            mean_r5=statistics.fmean(r5s[i]),
            mean_total=statistics.fmean(totals[i]),
            bw_util_mean=statistics.fmean(bw_m[i]),
            bw_util_std=statistics.fmean(bw_s[i]),
            cap_util_mean=statistics.fmean(cap_m[i]),
            cap_util_std=statistics.fmean(cap_s[i]),
            failure_reasons=dict(reasons[i]),
            totals=tuple(totals[i]),
        )
        for i in range(n_pol)
    )
    return ExperimentReport(
        iterations=config.iterations,
        master_seed=master,
        mode=config.mode,
        rows=rows,
    )


@dataclass(frozen=True)
class SweepReport:
    """One experiment report per swept value."""

    dimension: str
    values: tuple
    reports: tuple


def _config_for(config: ExperimentConfig, dimension: str, value):
    if dimension == "beta":
        pols = tuple(
            replace(p, beta=value) if p.kind in ("min-max", "min-variance") else p
            for p in config.policies
        )
        return replace(config, policies=pols)
    if dimension == "rho_max":
        return replace(config, rho_max=value)
    if dimension == "v_max":
        return replace(config, v_max_gb=value)
    if dimension == "alpha":
        return replace(config, clustering=ClusteringSpec(mode="fixed", alpha=value))
    raise ValueError(f"unknown sweep dimension {dimension!r}; valid: {', '.join(SWEEP_DIMENSIONS)}")


def sweep(config: ExperimentConfig, dimension: str, values) -> SweepReport:
    """Rerun the experiment once per value of the swept parameter."""
    values = tuple(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    reports = tuple(run_experiment(_config_for(config, dimension, v)) for v in values)
    return SweepReport(dimension=dimension, values=values, reports=reports)
