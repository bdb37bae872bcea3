from raidfit.allocator import ArrayState, Policy, VaDemand
from raidfit.experiment import ExperimentConfig, run_experiment
from raidfit.reporting import (
    experiment_csv,
    experiment_text,
    manifest_hash,
    placement_csv,
    prepend_comment,
    stream_csv,
)
from raidfit.workload import WorkloadConfig, make_stream


def small_report():
    cfg = ExperimentConfig(
        workload=WorkloadConfig(seed=2, read_fraction=1.0),
        policies=(Policy("min-max"),),
        iterations=2,
    )
    return run_experiment(cfg)


def test_experiment_csv_shape():
    lines = experiment_csv(small_report()).strip().splitlines()
    assert lines[0].startswith("policy,best,mean_r1,mean_r5,mean_total")
    assert lines[1].split(",")[0] == "min-max"
    assert len(lines) == 2


def test_experiment_text_mirrors_comparison_columns():
    text = experiment_text(small_report())
    for column in ("best", "R1", "R5", "R1&R5"):
        assert column in text


def test_placement_csv_rows():
    state = ArrayState([10.0, 10.0])
    state.try_place(VaDemand(3, 1, 2, (0.1,), 0.5), Policy("first-fit"))
    lines = placement_csv(state).strip().splitlines()
    assert lines[0] == "va_index,raid_level,disk,bw_demand,cap_demand_gb"
    assert lines[1].startswith("3,1,0,0.100000")
    assert len(lines) == 3


def test_stream_csv_columns():
    body = stream_csv(make_stream(WorkloadConfig(seed=1)).take(2))
    lines = body.strip().splitlines()
    assert lines[0] == "index,raid_level,size_gb,arrival_rate"
    assert len(lines) == 3


def test_manifest_hash_is_order_insensitive_and_stable():
    a = {"x": 1, "y": [1, 2]}
    b = {"y": [1, 2], "x": 1}
    assert manifest_hash(a) == manifest_hash(b)
    assert manifest_hash(a) != manifest_hash({"x": 2, "y": [1, 2]})
    assert len(manifest_hash(a)) == 64


def test_prepend_comment():
    assert prepend_comment("body\n", "note") == "# note\nbody\n"
