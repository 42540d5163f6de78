import os
import pathlib

import pytest

import pmkit

DATA = pathlib.Path(os.environ.get("PMKIT_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture(scope="module")
def desk_log():
    cfg = pmkit.parse_sim_config((DATA / "covas_desk.config").read_text())
    return pmkit.simulate(cfg)


def test_desk_simulation(desk_log):
    assert len(desk_log) == 216
    stats = pmkit.log_stats(desk_log)
    assert stats["cases"] == 216
    assert abs(stats["mean_events_per_case"] - 7.6) <= 0.2
    waves = pmkit.compare_waves(desk_log)
    assert waves["first"]["cases"] == 133
    assert waves["second"]["cases"] == 63
    assert "wave 1: 133 cases" in waves["table"]
    peak = pmkit.occupancy(desk_log)["peak"]
    assert peak[1] == 39


def test_replay(desk_log):
    net = pmkit.covas_model()
    assert pmkit.replay_log(net, desk_log)["fitness"] == 1.0
    noisy = pmkit.inject_noise(desk_log, 0.043, 7)
    assert abs(pmkit.replay_log(net, noisy)["fitness"] - 0.98) <= 0.01
    assert pmkit.inject_noise(desk_log, 0.0, 1) == desk_log


def test_round_trip(desk_log, tmp_path):
    path = tmp_path / "log.xes"
    pmkit.write_log(desk_log, str(path))
    back = pmkit.read_log(str(path))
    assert back == desk_log
    first = back.traces[0]
    assert first.case_id == "case-0001"
    assert first.events[0].activity == "Start"
    assert first.events[0].timestamp.endswith("Z")
    assert "ards" in first.attributes


def test_model_and_dfg(desk_log):
    net = pmkit.covas_model()
    assert pmkit.validate_net(net) == []
    assert net.final_marking == "{p19:1}"
    dfg = pmkit.discover_dfg(desk_log)
    assert dfg["nodes"]["Start"] == 216
    assert dfg["dot"].startswith("digraph")


def test_errors():
    assert issubclass(pmkit.ParseError, pmkit.Error)
    assert issubclass(pmkit.Error, RuntimeError)
    with pytest.raises(pmkit.ParseError):
        pmkit.parse_xes("<log><trace>")
    with pytest.raises(pmkit.ConfigError):
        pmkit.parse_sim_config("config_version = 1\nbogus = 2\n")
    with pytest.raises(pmkit.Error):
        pmkit.read_log("/nonexistent/log.xes")
