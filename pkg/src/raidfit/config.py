"""Config files, named presets and dict <-> dataclass conversion.

The config file is one JSON document mirroring ExperimentConfig. Presets
are plain override dicts applied below the file and CLI flags, so
``experiment --preset policy-comparison`` runs with zero further config.
"""

import json

from .allocator import POLICY_KINDS, Policy
from .disks import DISK_PRESETS, DiskSpec
from .experiment import ClusteringSpec, ExperimentConfig, default_policies
from .workload import KAPPA5_PRESETS, WorkloadConfig

__all__ = [
    "EXPERIMENT_PRESETS",
    "parse_policy",
    "parse_policies",
    "config_from_dict",
    "config_to_dict",
    "load_config_file",
    "merge_dicts",
    "build_config",
]

# Named starting points. "policy-comparison" is the all-policies,
# all-reads, degraded-mode setup behind the main comparison table.
EXPERIMENT_PRESETS = {
    "defaults": {},
    "policy-comparison": {
        "mode": "degraded",
        "iterations": 100,
        "workload": {"read_fraction": 1.0, "f1": 0.25},
        "policies": list(POLICY_KINDS),
    },
}


def parse_policy(entry) -> Policy:
    """Accept 'min-max', 'min-max:beta=0.5' or a {'kind': ...} mapping."""
    if isinstance(entry, Policy):
        return entry
    if isinstance(entry, dict):
        return Policy(**entry)
    name = entry.strip()
    beta = 1.0
    if ":" in name:
        name, _, opts = name.partition(":")
        for opt in opts.split(";"):
            key, _, val = opt.partition("=")
            if key.strip() != "beta":
                raise ValueError(f"unknown policy option {key!r}")
            beta = float(val)
    if name not in POLICY_KINDS:
        raise ValueError(f"unknown policy {name!r}; valid: {', '.join(POLICY_KINDS)}")
    return Policy(kind=name, beta=beta)


def parse_policies(spec) -> tuple:
    if isinstance(spec, str):
        spec = [s for s in spec.split(",") if s.strip()]
    return tuple(parse_policy(e) for e in spec)


def _disk_from(entry) -> DiskSpec:
    if isinstance(entry, DiskSpec):
        return entry
    if isinstance(entry, str):
        try:
            return DISK_PRESETS[entry]
        except KeyError:
            raise ValueError(
                f"unknown disk preset {entry!r}; valid: {', '.join(DISK_PRESETS)}"
            ) from None
    return DiskSpec(**entry)


def _workload_from(entry) -> WorkloadConfig:
    if isinstance(entry, WorkloadConfig):
        return entry
    entry = dict(entry)
    cls = entry.pop("workload_class", None)
    if cls is not None:
        if cls not in KAPPA5_PRESETS:
            raise ValueError(
                f"unknown workload class {cls!r}; valid: {', '.join(KAPPA5_PRESETS)}"
            )
        entry.setdefault("kappa5", KAPPA5_PRESETS[cls])
    if "periods" in entry:
        entry["periods"] = tuple(entry["periods"])
    return WorkloadConfig(**entry)


def _clustering_from(entry) -> ClusteringSpec:
    if isinstance(entry, ClusteringSpec):
        return entry
    entry = dict(entry)
    if "candidates" in entry:
        entry["candidates"] = tuple(entry["candidates"])
    return ClusteringSpec(**entry)


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    kwargs = {}
    if "workload" in data:
        kwargs["workload"] = _workload_from(data.pop("workload"))
    if "disk" in data:
        kwargs["disk"] = _disk_from(data.pop("disk"))
    if "policies" in data:
        kwargs["policies"] = parse_policies(data.pop("policies"))
    if "clustering" in data:
        kwargs["clustering"] = _clustering_from(data.pop("clustering"))
    for key in ("mode", "iterations", "rho_max", "v_max_gb", "update_method", "bw_budget",
                "stop_after_failures"):
        if key in data:
            kwargs[key] = data.pop(key)
    if data:
        raise ValueError(f"unknown config keys: {', '.join(sorted(data))}")
    return ExperimentConfig(**kwargs)


def config_to_dict(config: ExperimentConfig) -> dict:
    """JSON-safe snapshot that round-trips through config_from_dict."""
    w = config.workload
    d = config.disk
    return {
        "workload": {
            "f1": w.f1,
            "mean_size_r1_gb": w.mean_size_r1_gb,
            "mean_size_r5_gb": w.mean_size_r5_gb,
            "kappa5": w.kappa5,
            "kappa_ratio": w.kappa_ratio,
            "read_fraction": w.read_fraction,
            "periods": list(w.periods),
            "strip_kb": w.strip_kb,
            "seed": w.seed,
        },
        "disk": {
            "capacity_gb": d.capacity_gb,
            "seek_ms": d.seek_ms,
            "rotation_ms": d.rotation_ms,
            "settle_ms": d.settle_ms,
            "transfer_ms": d.transfer_ms,
            "count": d.count,
        },
        "policies": [
            {"kind": p.kind, "beta": p.beta, "combined_best_fit": p.combined_best_fit}
            for p in config.policies
        ],
        "mode": config.mode,
        "iterations": config.iterations,
        "rho_max": config.rho_max,
        "v_max_gb": config.v_max_gb,
        "update_method": config.update_method,
        "clustering": {
            "mode": config.clustering.mode,
            "alpha": config.clustering.alpha,
            "candidates": list(config.clustering.candidates),
        },
        "bw_budget": config.bw_budget,
        "stop_after_failures": config.stop_after_failures,
    }


def load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold one JSON object")
    return data


def merge_dicts(base: dict, override: dict) -> dict:
    """Deep merge; override wins, nested dicts merge key by key."""
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_dicts(out[key], value)
        else:
            out[key] = value
    return out


def build_config(preset: str = None, file_data: dict = None, overrides: dict = None) -> ExperimentConfig:
    """Layer preset < config file < explicit overrides into a config."""
    data = {}
    if preset is not None:
        try:
            data = dict(EXPERIMENT_PRESETS[preset])
        except KeyError:
            raise ValueError(
                f"unknown preset {preset!r}; valid: {', '.join(EXPERIMENT_PRESETS)}"
            ) from None
    if file_data:
        data = merge_dicts(data, file_data)
    if overrides:
        data = merge_dicts(data, overrides)
    return config_from_dict(data)
