"""Command line front end: experiments, sweeps, analytic models, stream dumps.

Every experiment or sweep writes a CSV, an aligned-text table and a
manifest; the manifest (config snapshot, seed, tool version) fully
determines the outputs, and its hash is embedded in each file so a report
can always be traced back and reproduced via --from-manifest.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from . import __version__, analysis
from .config import (
    EXPERIMENT_PRESETS,
    build_config,
    config_from_dict,
    config_to_dict,
    load_config_file,
    parse_policies,
)
from .disks import DISK_PRESETS, capacity_bandwidth_ratio, max_bandwidth, service_times
from .experiment import SWEEP_DIMENSIONS, run_experiment, sweep
from .loads import declustering_row
from .reporting import (
    experiment_csv,
    experiment_text,
    manifest_hash,
    prepend_comment,
    stream_csv,
    sweep_csv,
    sweep_text,
)
from .workload import KAPPA5_PRESETS, WorkloadConfig, make_stream

OUT_ENV_VAR = "RAIDFIT_OUT"

_TABLE_ALPHAS = (0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


# -- parser ---------------------------------------------------------------


def _add_config_flags(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--preset", choices=sorted(EXPERIMENT_PRESETS), help="named starting config")
    p.add_argument("--workload", choices=sorted(KAPPA5_PRESETS),
                   help="workload class (sets the per-GB intensity)")
    p.add_argument("--mode", choices=("normal", "degraded"))
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--policies", help="comma list, e.g. min-max,round-robin")
    p.add_argument("--beta", type=float, help="capacity weight for the objective policies")
    p.add_argument("--rho-max", type=float, help="per-VD bandwidth utilization cap")
    p.add_argument("--v-max", type=float, help="per-VD capacity cap in GB")
    p.add_argument("--read-fraction", type=float)
    p.add_argument("--f1", type=float, help="fraction of mirrored requests")
    p.add_argument("--disk", help="disk preset name (default ibm-18es)")
    p.add_argument("--clustering", choices=("off", "fixed", "auto"))
    p.add_argument("--alpha", type=float, help="declustering ratio for --clustering fixed")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV_VAR} or .)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="raidfit",
        description="Virtual-array packing simulator for mixed-RAID disk pools",
    )
    parser.add_argument("--version", action="version", version=f"raidfit {__version__}")
    subs = parser.add_subparsers(dest="command")

    p = subs.add_parser("experiment", help="run the policy-comparison experiment")
    _add_config_flags(p)
    p.add_argument("--from-manifest", help="re-run a previous experiment manifest")
    p.set_defaults(func=cmd_experiment)

    p = subs.add_parser("sweep", help="rerun the experiment over one parameter")
    p.add_argument("dimension", choices=SWEEP_DIMENSIONS)
    p.add_argument("values", help="comma list of values, e.g. 0,0.5,1")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("analyze", help="print one of the analytic models")
    models = p.add_subparsers(dest="model")

    m = models.add_parser("mm1", help="open single-queue response time")
    m.add_argument("--rho", type=float, help="utilization (alternative to rates)")
    m.add_argument("--arrival-rate", type=float, help="accesses per second")
    m.add_argument("--service-time", type=float, default=1.0, help="ms (default 1)")
    m.set_defaults(func=cmd_analyze_mm1)

    m = models.add_parser("reliability", help="dedicated vs shared pool survival")
    m.add_argument("--epsilon", type=float, default=1e-3, help="per-disk failure probability")
    m.set_defaults(func=cmd_analyze_reliability)

    m = models.add_parser("declustering", help="capacity/bandwidth tradeoff table")
    m.add_argument("--alphas", help="comma list of ratios")
    m.add_argument("--kappa", type=float, default=8.5, help="per-GB intensity")
    m.add_argument("--disk", help="disk preset name (default ibm-18es)")
    m.set_defaults(func=cmd_analyze_declustering)

    m = models.add_parser("degraded-response", help="worked single-failure scenario")
    m.add_argument("--rho-vd", type=float, default=0.1)
    m.set_defaults(func=cmd_analyze_degraded)

    m = models.add_parser("partitioning", help="dedicated vs shared response times")
    m.add_argument("--lambda-r1", type=float, required=True)
    m.add_argument("--lambda-r5", type=float, required=True)
    m.add_argument("--disks", type=int, default=8)
    m.add_argument("--dedicated", type=int, default=2, help="disks dedicated to mirrors")
    m.add_argument("--service-time", type=float, default=1.0)
    m.set_defaults(func=cmd_analyze_partitioning)

    p = subs.add_parser("dump-stream", help="write generated requests as CSV")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workload", choices=sorted(KAPPA5_PRESETS), default="bandwidth")
    p.add_argument("--f1", type=float, default=0.25)
    p.add_argument("--read-fraction", type=float, default=1.0)
    p.add_argument("--out", help="file path (default stdout)")
    p.set_defaults(func=cmd_dump_stream)

    return parser


# -- config assembly ------------------------------------------------------


def _overrides_from(args) -> dict:
    over = {}
    wl = {}
    if args.workload is not None:
        wl["kappa5"] = KAPPA5_PRESETS[args.workload]
    if args.seed is not None:
        wl["seed"] = args.seed
    if args.read_fraction is not None:
        wl["read_fraction"] = args.read_fraction
    if args.f1 is not None:
        wl["f1"] = args.f1
    if wl:
        over["workload"] = wl
    if args.mode is not None:
        over["mode"] = args.mode
    if args.iterations is not None:
        over["iterations"] = args.iterations
    if args.policies is not None:
        over["policies"] = [p.strip() for p in args.policies.split(",") if p.strip()]
    if args.rho_max is not None:
        over["rho_max"] = args.rho_max
    if args.v_max is not None:
        over["v_max_gb"] = args.v_max
    if args.disk is not None:
        over["disk"] = args.disk
    if args.clustering is not None or args.alpha is not None:
        mode = args.clustering or ("fixed" if args.alpha is not None else "off")
        cl = {"mode": mode}
        if args.alpha is not None:
            cl["alpha"] = args.alpha
        over["clustering"] = cl
    return over


def _config_from_args(args):
    file_data = load_config_file(args.config) if args.config else None
    config = build_config(preset=args.preset, file_data=file_data, overrides=_overrides_from(args))
    if args.beta is not None:
        pols = tuple(
            replace(p, beta=args.beta) if p.kind in ("min-max", "min-variance") else p
            for p in config.policies
        )
        config = replace(config, policies=pols)
    return config


def _out_dir(args) -> str:
    out = args.out or os.environ.get(OUT_ENV_VAR) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _write_outputs(out_dir, stem, csv_body, text_body, manifest):
    digest = manifest_hash(manifest)
    manifest = dict(manifest, hash=digest)
    paths = {
        "csv": os.path.join(out_dir, f"{stem}.csv"),
        "txt": os.path.join(out_dir, f"{stem}.txt"),
        "manifest": os.path.join(out_dir, f"{stem}-manifest.json"),
    }
    with open(paths["csv"], "w", encoding="utf-8") as fh:
        fh.write(prepend_comment(csv_body, f"manifest-sha256: {digest}"))
    with open(paths["txt"], "w", encoding="utf-8") as fh:
        fh.write(prepend_comment(text_body, f"manifest-sha256: {digest}"))
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


# -- commands -------------------------------------------------------------


def cmd_experiment(args) -> int:
    if args.from_manifest:
        with open(args.from_manifest, encoding="utf-8") as fh:
            stored = json.load(fh)
        config = config_from_dict(stored["config"])
    else:
        config = _config_from_args(args)
    report = run_experiment(config)
    manifest = {
        "tool": "raidfit",
        "version": __version__,
        "command": "experiment",
        "config": config_to_dict(config),
        "outputs": ["experiment.csv", "experiment.txt"],
    }
    text = experiment_text(report)
    paths = _write_outputs(_out_dir(args), "experiment", experiment_csv(report), text, manifest)
    sys.stdout.write(text)
    print(f"wrote {paths['csv']}, {paths['txt']}, {paths['manifest']}")
    return 0


def cmd_sweep(args) -> int:
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ValueError("sweep needs at least one value")
    config = _config_from_args(args)
    sr = sweep(config, args.dimension, values)
    manifest = {
        "tool": "raidfit",
        "version": __version__,
        "command": "sweep",
        "dimension": args.dimension,
        "values": values,
        "config": config_to_dict(config),
        "outputs": ["sweep.csv", "sweep.txt"],
    }
    text = sweep_text(sr)
    paths = _write_outputs(_out_dir(args), "sweep", sweep_csv(sr), text, manifest)
    sys.stdout.write(text)
    print(f"wrote {paths['csv']}, {paths['txt']}, {paths['manifest']}")
    return 0


def cmd_analyze_mm1(args) -> int:
    if args.rho is None and args.arrival_rate is None:
        raise ValueError("give --rho or --arrival-rate")
    if args.rho is not None:
        rho = args.rho
        resp = analysis.mm1_response_at(rho, args.service_time)
    else:
        inp = analysis.Mm1Input(args.arrival_rate, args.service_time)
        rho = inp.utilization
        resp = analysis.mm1_response(inp)
    print("open single-queue response")
    print(f"  service time : {args.service_time:g} ms")
    print(f"  utilization  : {rho:.4f}")
    print(f"  response     : {resp:.4f} ms ({resp / args.service_time:.4f} x service time)")
    return 0


def cmd_analyze_reliability(args) -> int:
    eps = args.epsilon
    r = 1.0 - eps
    print(f"pool survival at per-disk failure probability {eps:g}")
    for layout in ("dedicated", "shared"):
        rel = analysis.layout_reliability(r, layout)
        coef = analysis.epsilon_coefficient(layout, eps)
        print(f"  {layout:10s}: R = {rel:.12f}   (1-R)/eps^2 = {coef:.4f}")
    return 0


def cmd_analyze_declustering(args) -> int:
    spec = DISK_PRESETS[args.disk] if args.disk else DISK_PRESETS["ibm-18es"]
    alphas = (
        tuple(float(a) for a in args.alphas.split(",") if a.strip())
        if args.alphas
        else _TABLE_ALPHAS
    )
    target = capacity_bandwidth_ratio(spec)
    best = analysis.choose_alpha(spec, args.kappa, 1.0, alphas)
    print(f"drive: {max_bandwidth(spec):.1f} acc/s, {spec.capacity_gb:g} GB, CBR {target:.3f}")
    print(f"{'alpha':>7s} {'G':>3s} {'capacity':>9s} {'bandwidth':>10s} {'CBR':>7s}")
    for a in alphas:
        row = declustering_row(a, spec, kappa=args.kappa)
        mark = "  <- closest to drive CBR" if a == best else ""
        print(
            f"{row.alpha:7g} {row.parity_group:3d} {row.capacity_gb:9.2f} "
            f"{row.bandwidth:10.2f} {row.cbr:7.3f}{mark}"
        )
    return 0


def cmd_analyze_degraded(args) -> int:
    sc = analysis.degraded_response_example(args.rho_vd)
    print(f"single failure on the mirrored example pool at rho_vd = {args.rho_vd:g}")
    print("  (responses in units of the disk service time)")
    print(f"  normal mode        : {sc.normal:.4f}")
    print(f"  survivor at 4 loads: {sc.response_4x:.4f}")
    print(f"  survivor at 5 loads: {sc.response_5x:.4f}")
    print(f"  degraded mean      : {sc.degraded_mean:.4f}")
    per = ", ".join(f"{k}={v:.3f}" for k, v in sorted(sc.per_va.items()))
    print(f"  per array          : {per}")
    return 0


def cmd_analyze_partitioning(args) -> int:
    cmp = analysis.compare_partitionings(
        args.lambda_r1, args.lambda_r5, args.disks, args.dedicated, args.service_time
    )
    print(f"{args.disks} disks, {args.dedicated} dedicated to mirrors (times in ms)")
    print(f"  dedicated  R1: {cmp.dedicated_r1_ms:.4f}   R5: {cmp.dedicated_r5_ms:.4f}")
    print(f"  shared     R : {cmp.shared_ms:.4f}")
    print(f"  shared, R1 prioritized: {cmp.shared_priority_r1_ms:.4f}")
    return 0


def cmd_dump_stream(args) -> int:
    cfg = WorkloadConfig(
        f1=args.f1,
        kappa5=KAPPA5_PRESETS[args.workload],
        read_fraction=args.read_fraction,
        seed=args.seed,
    )
    body = stream_csv(make_stream(cfg).take(args.count))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(body)
    return 0


if __name__ == "__main__":
    sys.exit(main())
