"""Delimited and aligned-text report emitters.

CSV is comma-separated with a header row and '.' decimals regardless of
locale. Lines starting with '#' are comments; the CLI uses one to embed
the run's manifest hash so outputs can be traced back to their inputs.
"""

import hashlib
import json

__all__ = [
    "experiment_csv",
    "experiment_text",
    "sweep_csv",
    "sweep_text",
    "placement_csv",
    "stream_csv",
    "manifest_hash",
    "prepend_comment",
]

_EXPERIMENT_HEADER = (
    "policy,best,mean_r1,mean_r5,mean_total,"
    "bw_util_mean,bw_util_std,cap_util_mean,cap_util_std,binding"
)


def _experiment_lines(report):
    for row in report.rows:
        yield (
            f"{row.label},{row.best_count},{row.mean_r1:.2f},{row.mean_r5:.2f},"
            f"{row.mean_total:.2f},{row.bw_util_mean:.4f},{row.bw_util_std:.4f},"
            f"{row.cap_util_mean:.4f},{row.cap_util_std:.4f},{row.binding_resource}"
        )


def experiment_csv(report) -> str:
    return "\n".join([_EXPERIMENT_HEADER, *_experiment_lines(report)]) + "\n"


def experiment_text(report) -> str:
    """Aligned policy-comparison table (counts and utilization percentages)."""
    lines = [
        f"mode={report.mode} iterations={report.iterations} seed={report.master_seed}",
        f"{'policy':13s} {'best':>5s} {'R1':>7s} {'R5':>7s} {'R1&R5':>7s} "
        f"{'bw%':>6s} {'+-':>5s} {'cap%':>6s} {'+-':>5s} bound",
    ]
    for row in report.rows:
        lines.append(
            f"{row.label:13s} {row.best_count:5d} {row.mean_r1:7.1f} {row.mean_r5:7.1f} "
            f"{row.mean_total:7.1f} {row.bw_util_mean * 100:6.1f} {row.bw_util_std * 100:5.1f} "
            f"{row.cap_util_mean * 100:6.1f} {row.cap_util_std * 100:5.1f}  ({row.binding_resource})"
        )
    return "\n".join(lines) + "\n"


def sweep_csv(sr) -> str:
    lines = ["dimension,value," + _EXPERIMENT_HEADER]
    for value, report in zip(sr.values, sr.reports):
        for line in _experiment_lines(report):
            lines.append(f"{sr.dimension},{value:g},{line}")
    return "\n".join(lines) + "\n"


def sweep_text(sr) -> str:
    """Totals per swept value, annotated (b)/(c) for the binding resource."""
    labels = [row.label for row in sr.reports[0].rows]
    head = f"{sr.dimension:>10s}  " + "  ".join(f"{l:>16s}" for l in labels)
    lines = [head]
    for value, report in zip(sr.values, sr.reports):
        cells = "  ".join(
            f"{row.mean_total:12.1f} ({row.binding_resource})" for row in report.rows
        )
        lines.append(f"{value:10g}  {cells}")
    return "\n".join(lines) + "\n"


def placement_csv(state) -> str:
    lines = ["va_index,raid_level,disk,bw_demand,cap_demand_gb"]
    for va, level, disk, bw, cap_gb in state.placement_log():
        lines.append(f"{va},{level},{disk},{bw:.6f},{cap_gb:.9f}")
    return "\n".join(lines) + "\n"


def stream_csv(requests) -> str:
    lines = ["index,raid_level,size_gb,arrival_rate"]
    for req in requests:
        lines.append(f"{req.index},{req.raid_level},{req.size_gb:.9f},{req.arrival_rate:.6f}")
    return "\n".join(lines) + "\n"


def manifest_hash(manifest: dict) -> str:
    """Digest of the canonical JSON form (the manifest determines outputs)."""
    canonical = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def prepend_comment(body: str, comment: str) -> str:
    return f"# {comment}\n{body}"
