"""Per-disk utilization bookkeeping and the seven placement policies.

A virtual array asks for ``width`` identical slices (one per VD) that must
land on distinct disks. Placement is all-or-nothing: a failed attempt
leaves the state untouched. Feasibility is strict (utilization must stay
below the budget in every period, capacity below 1) and is checked for
every policy.
"""

import hashlib
import random
from dataclasses import dataclass

from .disks import DiskSpec, service_times

__all__ = [
    "POLICY_KINDS",
    "Policy",
    "VaDemand",
    "AllocationFailure",
    "ArrayState",
    "objective_minmax",
    "objective_variance",
]

# Report/CLI order follows the comparison tables: objective-driven methods
# first, then the bandwidth-only heuristics, then the oblivious ones.
POLICY_KINDS = (
    "min-max",
    "min-variance",
    "worst-fit",
    "best-fit",
    "round-robin",
    "first-fit",
    "random",
)

_GREEDY_KINDS = ("min-max", "min-variance")


class AllocationFailure(Exception):
    """A virtual array could not be placed; carries the binding resource."""

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


@dataclass(frozen=True)
class Policy:
    """Placement policy selector.

    ``beta`` weighs capacity against bandwidth utilization in the
    objective-driven policies. ``combined_best_fit`` switches best-fit to
    rank disks by their larger utilization of either resource instead of
    bandwidth alone (an alternative reading, off by default).
    """

    kind: str
    beta: float = 1.0
    combined_best_fit: bool = False

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; valid: {', '.join(POLICY_KINDS)}")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True)
class VaDemand:
    """Per-VD resource demand of one virtual array (all VDs identical)."""

    va_index: int
    raid_level: int
    width: int
    bw_per_period: tuple
    cap_gb: float


class ArrayState:
    """Bandwidth/capacity ledger for the disk pool.

    ``u_bw[p][n]`` is disk n's bandwidth utilization in period p (period 0
    is the peak); ``u_cap[n]`` its capacity utilization. The bandwidth
    budget is 1 minus any fraction reserved for sequential traffic.
    Heterogeneous pools are expressed through per-disk capacities and
    service-time scale factors applied to incoming demands.
    """

    def __init__(self, capacities_gb, n_periods=1, bw_scales=None, bw_budget=1.0):
        self.capacities_gb = list(capacities_gb)
        self.n_disks = len(self.capacities_gb)
        if self.n_disks < 1:
            raise ValueError("need at least one disk")
        if not 0.0 < bw_budget <= 1.0:
            raise ValueError("bw_budget must be in (0, 1]")
        self.n_periods = n_periods
        self.bw_budget = bw_budget
        self.bw_scales = list(bw_scales) if bw_scales is not None else [1.0] * self.n_disks
        if len(self.bw_scales) != self.n_disks:
            raise ValueError("one bandwidth scale per disk")
        self.u_bw = [[0.0] * self.n_disks for _ in range(n_periods)]
        self.u_cap = [0.0] * self.n_disks
        self.placements = {}
        self.rr_cursor = -1

    @classmethod
    def from_spec(cls, spec: DiskSpec, n_periods=1, overrides=None, bw_budget=1.0):
        """Pool of ``spec.count`` drives; ``overrides`` maps disk index to a
        different DiskSpec (capacity and service-time scaling)."""
        caps = [spec.capacity_gb] * spec.count
        scales = [1.0] * spec.count
        if overrides:
            ref = service_times(spec).x_sr_ms
            for idx, other in overrides.items():
                caps[idx] = other.capacity_gb
                scales[idx] = service_times(other).x_sr_ms / ref
        return cls(caps, n_periods=n_periods, bw_scales=scales, bw_budget=bw_budget)

    # -- feasibility ----------------------------------------------------

    def _fits(self, disk, bw, cap_gb):
        if self.u_cap[disk] + cap_gb / self.capacities_gb[disk] >= 1.0:
            return False
        scale = self.bw_scales[disk]
        budget = self.bw_budget
        u = self.u_bw
        for p in range(self.n_periods):
            if u[p][disk] + bw[p] * scale >= budget:
                return False
        return True

    def _fail(self, demand, disks):
        """Classify which resource blocked the attempt and raise."""
        n_bw = n_cap = 0
        for d in disks:
            if self.u_cap[d] + demand.cap_gb / self.capacities_gb[d] >= 1.0:
                n_cap += 1
            scale = self.bw_scales[d]
            if any(self.u_bw[p][d] + demand.bw_per_period[p] * scale >= self.bw_budget
                   for p in range(self.n_periods)):
                n_bw += 1
        reason = "capacity" if n_cap > n_bw else "bandwidth"
        raise AllocationFailure(reason, f"VA {demand.va_index}: no room ({reason} bound)")

    # -- placement ------------------------------------------------------

    def try_place(self, demand: VaDemand, policy: Policy, rng: random.Random = None):
        """Place every VD of one array on a distinct disk, atomically.

        Returns the chosen disk indices in placement order. Raises
        AllocationFailure (state unchanged) when the policy cannot find
        ``width`` feasible disks.
        """
        w = demand.width
        n = self.n_disks
        if len(demand.bw_per_period) != self.n_periods:
            raise ValueError("demand must carry one bandwidth figure per period")
        if w > n:
            raise AllocationFailure(
                "insufficient_distinct_disks",
                f"VA {demand.va_index}: width {w} exceeds {n} disks",
            )
        bw = demand.bw_per_period
        cap_gb = demand.cap_gb
        kind = policy.kind

        if kind == "round-robin":
            start = (self.rr_cursor + 1) % n
            disks = [(start + j) % n for j in range(w)]
            if not all(self._fits(d, bw, cap_gb) for d in disks):
                self._fail(demand, disks)
        elif kind == "random":
            if rng is None:
                raise ValueError("the random policy needs an rng")
            disks = rng.sample(range(n), w)
            if not all(self._fits(d, bw, cap_gb) for d in disks):
                self._fail(demand, disks)
        else:
            feasible = [d for d in range(n) if self._fits(d, bw, cap_gb)]
            if len(feasible) < w:
                self._fail(demand, range(n))
            if kind == "first-fit":
                disks = feasible[:w]
            elif kind == "best-fit":
                if policy.combined_best_fit:
                    key = lambda d: max(self.u_bw[0][d], self.u_cap[d])
                else:
                    key = lambda d: self.u_bw[0][d]
                disks = sorted(feasible, key=lambda d: (-key(d), d))[:w]
            elif kind == "worst-fit":
                disks = sorted(feasible, key=lambda d: (self.u_bw[0][d], d))[:w]
            else:
                disks = self._greedy_pick(feasible, w, bw, cap_gb, policy)

        self._commit(demand, disks, kind)
        return tuple(disks)

    def _greedy_pick(self, feasible, w, bw, cap_gb, policy):
        """Place VDs one at a time, each on the disk minimizing the
        post-placement objective.

        The min-max objective ties whenever a placement leaves the global
        maximum untouched, so ties break first by the candidate disk's own
        post-placement value (spreading the slice like worst-fit would),
        then by index. Without that refinement the method degenerates into
        first-fit early in a run.
        """
        beta = policy.beta
        n = self.n_disks
        scales = self.bw_scales
        caps = self.capacities_gb
        ux = list(self.u_bw[0])
        uc = list(self.u_cap)
        minmax = policy.kind == "min-max"
        if not minmax:
            sx = sum(ux)
            sxx = sum(x * x for x in ux)
            sc = sum(uc)
            scc = sum(c * c for c in uc)
        avail = list(feasible)
        chosen = []
        for _ in range(w):
            best_d = -1
            best_val = None
            for d in avail:
                dx = bw[0] * scales[d]
                dc = cap_gb / caps[d]
                if minmax:
                    nx = ux[d] + dx
                    nc = beta * (uc[d] + dc)
                    own = nx if nx > nc else nc
                    top = own
                    for i in range(n):
                        if i == d:
                            continue
                        x = ux[i]
                        c = beta * uc[i]
                        m = x if x > c else c
                        if m > top:
                            top = m
                    val = (top, own)
                else:
                    nx = ux[d] + dx
                    nc = uc[d] + dc
                    sx2 = sx + dx
                    sxx2 = sxx + nx * nx - ux[d] * ux[d]
                    sc2 = sc + dc
                    scc2 = scc + nc * nc - uc[d] * uc[d]
                    var_x = sxx2 / n - (sx2 / n) ** 2
                    var_c = scc2 / n - (sc2 / n) ** 2
                    val = var_x + beta * var_c
                if best_val is None or val < best_val:
                    best_val = val
                    best_d = d
            dx = bw[0] * scales[best_d]
            dc = cap_gb / caps[best_d]
            if not minmax:
                sx += dx
                sxx += (ux[best_d] + dx) ** 2 - ux[best_d] ** 2
                sc += dc
                scc += (uc[best_d] + dc) ** 2 - uc[best_d] ** 2
            ux[best_d] += dx
            uc[best_d] += dc
            avail.remove(best_d)
            chosen.append(best_d)
        return chosen

    def _commit(self, demand, disks, kind):
        for d in disks:
            scale = self.bw_scales[d]
            for p in range(self.n_periods):
                self.u_bw[p][d] += demand.bw_per_period[p] * scale
            self.u_cap[d] += demand.cap_gb / self.capacities_gb[d]
        self.placements[demand.va_index] = (
            demand.raid_level,
            tuple(disks),
            demand.bw_per_period,
            demand.cap_gb,
        )
        if kind == "round-robin":
            self.rr_cursor = disks[-1]

    # -- inspection -----------------------------------------------------

    def state_hash(self) -> str:
        """Digest of the full bookkeeping state (for rollback checks)."""
        payload = repr((self.u_bw, self.u_cap, sorted(self.placements.items()), self.rr_cursor))
        return hashlib.sha256(payload.encode()).hexdigest()

    def placement_log(self):
        """Rows of (va_index, raid_level, disk, peak_bw_demand, cap_demand_gb)."""
        rows = []
        for va in sorted(self.placements):
            level, disks, bw, cap_gb = self.placements[va]
            for d in disks:
                rows.append((va, level, d, bw[0], cap_gb))
        return rows

    def replay_placements(self) -> "ArrayState":
        """Rebuild a fresh state from the placement map (bookkeeping check)."""
        fresh = ArrayState(self.capacities_gb, self.n_periods, self.bw_scales, self.bw_budget)
        for va in sorted(self.placements):
            level, disks, bw, cap_gb = self.placements[va]
            for d in disks:
                scale = fresh.bw_scales[d]
                for p in range(fresh.n_periods):
                    fresh.u_bw[p][d] += bw[p] * scale
                fresh.u_cap[d] += cap_gb / fresh.capacities_gb[d]
            fresh.placements[va] = self.placements[va]
        return fresh


def objective_minmax(state: ArrayState, beta: float) -> float:
    """Largest per-disk utilization at the peak period, capacity weighted by beta."""
    peak = state.u_bw[0]
    return max(max(x, beta * c) for x, c in zip(peak, state.u_cap))


def objective_variance(state: ArrayState, beta: float) -> float:
    """Population variance of bandwidth plus beta times that of capacity."""
    n = state.n_disks
    peak = state.u_bw[0]
    mx = sum(peak) / n
    mc = sum(state.u_cap) / n
    var_x = sum((x - mx) ** 2 for x in peak) / n
    var_c = sum((c - mc) ** 2 for c in state.u_cap) / n
    return var_x + beta * var_c
