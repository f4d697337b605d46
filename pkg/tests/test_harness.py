import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dronemfp.errors import ConfigurationError
from dronemfp.harness import (
    ALGORITHM_ORDER,
    STATUS_ORDER,
    ExperimentConfig,
    StatusSummary,
    _er_jobs,
    emit_outputs,
    read_outputs,
    recount,
    run_campaign,
    summarize,
    trace_horizon,
)
from dronemfp.mission import ALGORITHMS, MissionLog, MissionSpec, MissionStatus, VertexColor, preprocess
from dronemfp.scenarios import ErConfig, generate_er, generate_wind_trace

SMALL = dict(c_values=(1.0, 2.0), graphs_per_c=3, budget_fractions=(0.2, 0.5, 1.0))


@pytest.fixture(scope="module")
def small():
    return run_campaign(ExperimentConfig(**SMALL))


def _log(status):
    return MissionLog("osp", 1, 1.0, status=MissionStatus(status))


def test_summarize_empty():
    s = summarize([])
    assert s.counts == (0, 0, 0, 0)
    assert s.percentages == (0.0, 0.0, 0.0, 0.0)


def test_summarize_three_to_one():
    s = summarize([_log("SUCCESS")] * 3 + [_log("FAIL")])
    assert s.percent("SUCCESS") == 75.0
    assert s.percent("FAIL") == 25.0
    assert s.total == 4


@given(st.lists(st.sampled_from([s.value for s in STATUS_ORDER]), max_size=40), st.randoms())
def test_summarize_order_independent(statuses, rnd):
    logs = [_log(s) for s in statuses]
    shuffled = logs[:]
    rnd.shuffle(shuffled)
    assert summarize(logs) == summarize(shuffled)
    pct = summarize(logs).percentages
    if logs:
        assert abs(sum(pct) - 100.0) <= 0.2


def test_summarize_rejects_unfinished():
    with pytest.raises(ConfigurationError):
        summarize([MissionLog("osp", 1, 1.0)])


def test_all_green_graph_has_no_missions():
    cfg = ExperimentConfig(budget=1e12, c_values=(2.0,), graphs_per_c=1, budget_fractions=(1.0,))
    result = run_campaign(cfg)
    assert result.missions == []
    s = result.scenarios[0]
    assert s.colors[1.0].percent("GREEN") == 100.0
    assert all(st.total == 0 for st in s.status.values())


def test_campaign_conservation(small):
    for s in small.scenarios:
        for b in s.budgets:
            gray = s.colors[b].counts[1]
            for a in ALGORITHM_ORDER:
                assert s.status[(b, a)].total == gray
            assert s.status[(b, "dsp")].count("CANCELED") == 0
            assert s.status[(b, "gsp")].count("CANCELED") == 0
            assert s.colors[b].total == 25 * s.graphs


def test_campaign_recount(small):
    for s in small.scenarios:
        assert recount(small.missions, s.name, s.budgets).status == s.status


def test_campaign_matches_direct_runs(small):
    cfg = small.config
    by_key = {(m.scenario, m.graph, m.destination, m.algorithm, m.budget): m for m in small.missions}
    for job in _er_jobs(cfg):
        g = generate_er(ErConfig(cfg.n, job.c, cfg.area, job.graph_seed))
        tr = generate_wind_trace(job.trace_seed, trace_horizon(g, cfg.speed, cfg.slot_duration), cfg.slot_duration)
        for f in cfg.budgets:
            colors = preprocess(g, cfg.drone, f * cfg.budget, cfg.payload, cfg.speed, cfg.class_count)
            gray = [v for v, c in colors.items() if c is VertexColor.GRAY]
            for v in gray:
                spec = MissionSpec(v, f * cfg.budget, cfg.payload, cfg.speed, cfg.class_count)
                for name in ALGORITHM_ORDER:
                    log = ALGORITHMS[name](g, tr, cfg.drone, spec)
                    rec = by_key.pop((job.label, job.index, v, name, f))
                    assert rec.status == log.status.value
                    assert rec.consumed == log.consumed
    assert by_key == {}


def test_campaign_deterministic(small, tmp_path):
    again = run_campaign(ExperimentConfig(**SMALL))
    assert [s.status for s in again.scenarios] == [s.status for s in small.scenarios]
    emit_outputs(small, tmp_path / "a")
    emit_outputs(again, tmp_path / "b")
    for p in sorted((tmp_path / "a").iterdir()):
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()


def test_parallel_workers_agree(small):
    par = run_campaign(ExperimentConfig(**SMALL, workers=2))
    assert [s.status for s in par.scenarios] == [s.status for s in small.scenarios]
    assert par.missions == small.missions


def test_emit_shape_and_round_trip(small, tmp_path):
    paths = emit_outputs(small, tmp_path)
    names = sorted(p.name for p in paths)
    assert names == sorted(
        ["er_c1_status.csv", "er_c1_colors.csv", "er_c2_status.csv", "er_c2_colors.csv", "missions.jsonl", "campaign.json"]
    )
    rows = (tmp_path / "er_c1_status.csv").read_text().splitlines()
    assert rows[0] == "budget,algorithm,status,count,percent"
    assert len(rows) - 1 == 3 * 3 * 4
    assert len((tmp_path / "er_c1_colors.csv").read_text().splitlines()) - 1 == 3 * 3
    parsed = read_outputs(tmp_path, [s.name for s in small.scenarios])
    for a, b in zip(parsed, small.scenarios):
        assert a.same_tables(b)
    records = [json.loads(line) for line in (tmp_path / "missions.jsonl").read_text().splitlines()]
    for s in small.scenarios:
        assert recount(records, s.name, s.budgets).status == s.status
    manifest = json.loads((tmp_path / "campaign.json").read_text())
    assert manifest["scenarios"]["er_c2"]["graphs"] == 3


def test_emit_to_unwritable_path(small, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_outputs(small, blocker / "sub")


def test_skipped_graphs_are_counted():
    cfg = ExperimentConfig(c_values=(0.5,), graphs_per_c=4, max_resamples=1, budget_fractions=(1.0,))
    s = run_campaign(cfg).scenarios[0]
    assert s.graphs + s.skipped == 4
    assert s.skipped >= 3


def test_tessellation_campaign_small():
    cfg = ExperimentConfig.tessellation_defaults(hours=3)
    result = run_campaign(cfg)
    assert [s.name for s in result.scenarios] == ["VG", "DG", "HG"]
    for s in result.scenarios:
        assert s.graphs == 1
        for b in s.budgets:
            starts = len(range(0, 12, cfg.start_stride))
            assert s.status[(b, "osp")].total == s.colors[b].counts[1] * starts


def test_config_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text(
        "[campaign]\nc_values = 1, 2\ngraphs_per_c = 2\nbudget_fractions = 0.5,1.0\n"
        "class_count = 8\n\n[drone]\nframe_mass = 12\n"
    )
    cfg = ExperimentConfig.from_config(p, seed=5)
    assert cfg.c_values == (1.0, 2.0) and cfg.graphs_per_c == 2 and cfg.class_count == 8
    assert cfg.drone.frame_mass == 12.0 and cfg.seed == 5
    p.write_text("[campaign]\nscenario = tessellation\n")
    tess = ExperimentConfig.from_config(p)
    assert tess.speed == 10.0 and tess.payload == 2.0
    p.write_text("[campaign]\nbogus = 1\n")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_config(p)
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_config(tmp_path / "missing.ini")


@pytest.mark.parametrize(
    "bad",
    [
        dict(budget_fractions=(0.0, 1.0)),
        dict(budget_fractions=(1.5,)),
        dict(graphs_per_c=0),
        dict(class_count=3),
        dict(scenario="grid"),
        dict(kinds=("XG",)),
        dict(payload=8.0),
    ],
)
def test_config_validation(bad):
    with pytest.raises((ConfigurationError, ValueError)):
        ExperimentConfig(**bad)


def test_status_summary_addition():
    a = StatusSummary((1, 2, 3, 4))
    assert (a + a).counts == (2, 4, 6, 8)
