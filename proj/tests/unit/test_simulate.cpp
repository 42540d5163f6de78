#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pmkit/analytics.hpp"
#include "pmkit/conformance.hpp"
#include "pmkit/error.hpp"
#include "pmkit/log_io.hpp"
#include "pmkit/simulate.hpp"
#include "pmkit/timeutil.hpp"

using namespace pmkit;

namespace {

std::string desk_config_text() {
    return read_text_file(std::string(PMKIT_DATA_DIR) + "/covas_desk.config");
}

std::string config_error(const std::string& text) {
    try {
        parse_sim_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const Trace& t, std::string_view activity) {
    for (const auto& e : t.events)
        if (e.activity == activity) return true;
    return false;
}

}  // namespace

TEST_CASE("config parsing") {
    SimConfig c = parse_sim_config(
        "config_version = 1\n"
        "# comment\n"
        "case_count = 12   # trailing\n"
        "seed = 9\n"
        "branch.t4 = 0.25\n"
        "delay.default = uniform 1 2\n"
        "delay.End = fixed 0.5\n"
        "wave.b.start = 2020-07-01T00:00:00Z\n"
        "wave.b.end = 2020-08-01T00:00:00Z\n"
        "wave.b.share = 0.5\n"
        "wave.a.start = 2020-03-01T00:00:00Z\n"
        "wave.a.end = 2020-04-01T00:00:00Z\n"
        "wave.a.share = 0.5\n"
        "wave.a.mean_duration_hours = 100\n");
    CHECK(c.case_count == 12);
    CHECK(c.seed == 9);
    CHECK(c.branch_weights.at("t4") == 0.25);
    CHECK(c.default_delay == DelaySpec{DelaySpec::Kind::Uniform, 1, 2});
    CHECK(c.delays.at("End") == DelaySpec{DelaySpec::Kind::Fixed, 0.5, 0.0});
    REQUIRE(c.waves.size() == 2);
    CHECK(c.waves[0].name == "a");
    CHECK(c.waves[0].mean_duration_hours == 100.0);
    CHECK_FALSE(c.peak.has_value());

    const SimConfig desk = parse_sim_config(desk_config_text());
    CHECK(desk.case_count == 216);
    REQUIRE(desk.peak.has_value());
    CHECK(desk.peak->count == 39);
}

TEST_CASE("config errors name the line") {
    CHECK(config_error("case_count = 3\n") == "config is missing config_version");
    CHECK(config_error("config_version = 1\nbogus = 1\n") == "config line 2: unknown key 'bogus'");
    CHECK(config_error("config_version = 1\nseed = 1\nseed = 2\n").find("config line 3: duplicate key") == 0);
    CHECK(config_error("config_version = 1\n\ncase_count = -4\n").find("config line 3") == 0);
    CHECK(config_error("config_version = 1\ndelay.End = gamma 1 2\n").find("config line 2") == 0);
    CHECK(config_error("config_version = 1\nnot a pair\n").find("config line 2") == 0);
    CHECK(config_error("config_version = 2\n") == "config line 1: unsupported config_version 2");
    CHECK(config_error("config_version = 1\nards_probability = 1.5\n").find("ards_probability") != std::string::npos);
    CHECK(config_error("config_version = 1\ndelay.End = lognormal 0 1\n").find("delay.End") != std::string::npos);
    CHECK(config_error("config_version = 1\nwave.a.start = 2020-01-01T00:00:00Z\n").find("needs start, end") !=
          std::string::npos);
    CHECK(config_error("config_version = 1\n"
                       "wave.a.start = 2020-01-01T00:00:00Z\nwave.a.end = 2020-02-01T00:00:00Z\nwave.a.share = 0.6\n")
              .find("shares sum") != std::string::npos);
    CHECK(config_error("config_version = 1\npeak.count = 3\n").find("peak.instant") != std::string::npos);
}

TEST_CASE("all skips give the shortest trace") {
    SimConfig c;
    c.case_count = 1;
    c.branch_weights = {{"t0", 1}, {"startSymptoms", 0}, {"t1", 1}, {"endSymptoms", 0}, {"t4", 1}, {"ICUadmission", 0}};
    const EventLog log = simulate(c, covas_model());
    REQUIRE(log.traces.size() == 1);
    const Trace& t = log.traces[0];
    std::vector<std::string> acts;
    for (const auto& e : t.events) acts.push_back(e.activity);
    REQUIRE(acts.size() == 6);
    CHECK(acts[0] == "Start");
    CHECK(acts[1] == "Hospitalization");
    CHECK(acts[2] == "startOxygen");
    CHECK(acts[3] == "endOxygen");
    CHECK((acts[4] == "DischAlive" || acts[4] == "DischDead"));
    CHECK(acts[5] == "End");
    CHECK(t.case_id == "case-0001");
    CHECK(t.is_complete());
}

TEST_CASE("simulation invariants") {
    SimConfig c;
    c.case_count = 300;
    c.seed = 77;
    c.ongoing_fraction = 0.1;
    c.ards_probability = 0.3;
    const PetriNet net = covas_model();
    const EventLog log = simulate(c, net);
    REQUIRE(log.traces.size() == 300);
    std::size_t ongoing = 0;
    for (const auto& t : log.traces) {
        CAPTURE(t.case_id);
        REQUIRE_FALSE(t.events.empty());
        for (std::size_t i = 1; i < t.events.size(); ++i) CHECK(t.events[i - 1].timestamp < t.events[i].timestamp);
        CHECK(t.flag("ards").has_value());
        if (!t.is_complete()) {
            ++ongoing;
            continue;
        }
        CHECK(replay_trace(net, t).fitness == 1.0);
    }
    CHECK(ongoing == 30);
    // Ongoing traces are proper prefixes and still replay without deviation.
    CHECK(replay_log(net, log).log_fitness == 1.0);
    CHECK(write_xes(simulate(c, net)) == write_xes(log));
    c.seed = 78;
    CHECK(write_xes(simulate(c, net)) != write_xes(log));
}

TEST_CASE("branch frequencies converge to configured weights") {
    SimConfig c;
    c.case_count = 2000;
    c.seed = 5;
    c.branch_weights = {{"startSymptoms", 0.2}, {"t0", 0.8}, {"ICUadmission", 0.5}, {"t4", 0.5},
                        {"DischAlive", 0.75},   {"DischDead", 0.25}};
    const EventLog log = simulate(c, covas_model());
    const double n = static_cast<double>(log.traces.size());
    auto within = [&](std::string_view activity, double p) {
        std::size_t hits = 0;
        for (const auto& t : log.traces) hits += contains(t, activity);
        const double sigma = std::sqrt(p * (1 - p) / n);
        CAPTURE(activity);
        CHECK(std::abs(static_cast<double>(hits) / n - p) <= 3 * sigma);
    };
    within("startSymptoms", 0.2);
    within("ICUadmission", 0.5);
    within("DischAlive", 0.75);
}

TEST_CASE("deadlocks and unreachable targets raise config errors") {
    PetriNet n;
    n.places = {"a", "b", "c"};
    n.transitions = {{"x", "X"}};
    n.arcs = {{"a", "x"}, {"x", "b"}};
    n.initial_marking = {{"a", 1}};
    n.final_marking = {{"c", 1}};
    SimConfig c;
    try {
        simulate(c, n);
        FAIL("expected deadlock");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("{b:1}") != std::string::npos);
    }
    SimConfig peak = parse_sim_config(desk_config_text());
    peak.peak->count = 500;
    CHECK_THROWS_AS(simulate(peak, covas_model()), ConfigError);
}

TEST_CASE("noise injection") {
    SimConfig c;
    c.case_count = 50;
    const EventLog log = simulate(c, covas_model());
    CHECK(inject_noise(log, NoiseSpec{0.0, 3}) == log);
    const EventLog all = inject_noise(log, NoiseSpec{1.0, 3});
    for (std::size_t i = 0; i < log.traces.size(); ++i) {
        REQUIRE(all.traces[i].events.size() == 2);
        CHECK(all.traces[i].events.front() == log.traces[i].events.front());
        CHECK(all.traces[i].events.back() == log.traces[i].events.back());
    }
    const EventLog some = inject_noise(log, NoiseSpec{0.3, 3});
    CHECK(some == inject_noise(log, NoiseSpec{0.3, 3}));
    CHECK(some != log);
    CHECK_THROWS_AS(inject_noise(log, NoiseSpec{1.5, 3}), Error);
}

TEST_CASE("desk configuration meets its targets") {
    const SimConfig cfg = parse_sim_config(desk_config_text());
    const PetriNet net = covas_model();
    const EventLog log = simulate(cfg, net);
    CHECK(log.traces.size() == 216);
    const auto cmp = compare_waves(log, parse_iso8601("2020-07-01"));
    CHECK(cmp.first.case_count == 133);
    CHECK(cmp.second.case_count == 63);
    REQUIRE(cmp.first.mean_case_duration);
    CHECK(std::abs(cmp.first.mean_case_duration->count() / 3600 - (33 * 24 + 6)) <= 12);
    CHECK(std::abs(cmp.second.mean_case_duration->count() / 3600 - (23 * 24 + 1)) <= 12);
    std::size_t events = 0;
    for (const auto& t : log.traces) events += t.events.size();
    CHECK(std::abs(static_cast<double>(events) / 216 - 7.6) <= 0.2);
    const auto occ = occupancy(log, "startVentilation", "endVentilation");
    REQUIRE(occ.peak);
    CHECK(occ.peak->count == 39);
    CHECK(replay_log(net, log).log_fitness == 1.0);
    const EventLog noisy = inject_noise(log, cfg.noise);
    CHECK(std::abs(replay_log(net, noisy).log_fitness - 0.98) <= 0.01);
}

TEST_CASE("calibration finds a drop rate near the target") {
    SimConfig c;
    c.case_count = 60;
    const PetriNet net = covas_model();
    const EventLog log = simulate(c, net);
    const auto cal = calibrate_drop_probability(log, net, 0.9, 11, 20);
    CHECK(cal.drop_probability > 0.0);
    CHECK(cal.drop_probability < 1.0);
    CHECK(std::abs(cal.fitness - 0.9) < 0.02);
    CHECK(replay_log(net, inject_noise(log, NoiseSpec{cal.drop_probability, 11})).log_fitness == cal.fitness);
}
