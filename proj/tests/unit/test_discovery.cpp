#include "doctest.h"
#include "generators.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "pmkit/discovery.hpp"
#include "pmkit/timeutil.hpp"

using namespace pmkit;

namespace {

bool subgraph(const Dfg& small, const Dfg& big) {
    for (const auto& [a, n] : small.nodes)
        if (!big.nodes.count(a) || !(big.nodes.at(a) == n)) return false;
    for (const auto& [k, e] : small.edges)
        if (!big.edges.count(k) || !(big.edges.at(k) == e)) return false;
    return true;
}

Threshold random_threshold(testgen::Gen& g) {
    if (testgen::coin(g)) return Threshold::count(testgen::pick(g, 0, 6));
    return Threshold::fraction(static_cast<double>(testgen::pick(g, 0, 100)) / 100.0);
}

}  // namespace

TEST_CASE("duration summary keeps exact order statistics") {
    DurationSummary s;
    CHECK(s.mean().count() == 0);
    CHECK(s.median().count() == 0);
    for (int m : {5, 1, 3, 2}) s.add(std::chrono::minutes(m));
    CHECK(s.count() == 4);
    CHECK(s.mean().count() == doctest::Approx(165.0));
    CHECK(s.median().count() == doctest::Approx(150.0));
    CHECK(s.min() == std::chrono::minutes(1));
    CHECK(s.max() == std::chrono::minutes(5));
    s.add(std::chrono::minutes(4));
    CHECK(s.median().count() == doctest::Approx(180.0));
}

TEST_CASE("property: discover_dfg equals the adjacent-pair oracle") {
    testgen::Gen g(17);
    for (int round = 0; round < 150; ++round) {
        const EventLog log = testgen::random_log(g);
        const Dfg dfg = discover_dfg(log);
        const auto expected = oracle::adjacent_pairs(log);
        CAPTURE(round);
        REQUIRE(dfg.nodes.size() == expected.node_frequency.size());
        for (const auto& [a, n] : dfg.nodes) {
            CHECK(n.frequency == expected.node_frequency.at(a));
            CHECK(n.case_frequency == expected.node_case_frequency.at(a));
        }
        REQUIRE(dfg.edges.size() == expected.edge_frequency.size());
        for (const auto& [k, e] : dfg.edges) {
            CHECK(e.frequency == expected.edge_frequency.at(k));
            std::vector<std::int64_t> ms;
            for (auto d : e.durations.samples()) ms.push_back(d.count());
            CHECK(ms == expected.edge_durations_ms.at(k));
        }
        CHECK(dfg.start_activities == expected.starts);
        CHECK(dfg.end_activities == expected.ends);
    }
}

TEST_CASE("property: merging partition graphs equals discovering the whole log") {
    testgen::Gen g(23);
    for (int round = 0; round < 50; ++round) {
        EventLog log = testgen::random_log(g);
        EventLog left, right;
        for (std::size_t i = 0; i < log.traces.size(); ++i) (i % 2 ? left : right).traces.push_back(log.traces[i]);
        Dfg merged = discover_dfg(left);
        merged.merge(discover_dfg(right));
        CHECK(merged == discover_dfg(log));
    }
}

TEST_CASE("threshold parsing") {
    CHECK(parse_threshold("12")->kind == Threshold::Kind::Count);
    CHECK(parse_threshold("12")->value == 12);
    CHECK(parse_threshold("0.05")->kind == Threshold::Kind::Fraction);
    CHECK(parse_threshold("5%")->value == doctest::Approx(0.05));
    CHECK(parse_threshold("1e-1")->kind == Threshold::Kind::Fraction);
    for (const char* bad : {"", "-1", "abc", "5%%", "1.2.3", "%"}) {
        CAPTURE(bad);
        CHECK_FALSE(parse_threshold(bad).has_value());
    }
    CHECK(Threshold::fraction(0.5).cutoff(10) == 5.0);
    CHECK(Threshold::count(3).cutoff(10) == 3.0);
}

TEST_CASE("filter_dfg drops rare nodes with their edges") {
    EventLog log;
    Timestamp t0 = parse_iso8601("2020-01-01");
    auto add = [&](std::string id, std::vector<std::string> acts) {
        Trace t;
        t.case_id = std::move(id);
        Timestamp at = t0;
        for (auto& a : acts) {
            t.events.push_back(Event{a, at, {}, {}});
            at += std::chrono::hours(1);
        }
        log.traces.push_back(std::move(t));
    };
    for (int i = 0; i < 10; ++i) add("c" + std::to_string(i), {"A", "B"});
    add("rare", {"A", "X", "B"});
    const Dfg full = discover_dfg(log);
    const Dfg f = filter_dfg(full, Threshold::count(2), Threshold::count(0));
    CHECK(f.nodes.count("X") == 0);
    CHECK(f.edges.size() == 1);
    CHECK(f.edges.count({"A", "B"}) == 1);
    const Dfg e = filter_dfg(full, Threshold::count(0), default_min_edge_frequency());
    CHECK(e.nodes.size() == 3);
    CHECK(e.edges.size() == 3);  // 1 >= 0.05 * 10
    CHECK(filter_dfg(full, Threshold::count(0), Threshold::fraction(0.2)).edges.size() == 1);
}

TEST_CASE("property: filter_dfg is idempotent and monotone") {
    testgen::Gen g(31);
    for (int round = 0; round < 150; ++round) {
        const Dfg dfg = discover_dfg(testgen::random_log(g, 20, 10));
        const Threshold node = random_threshold(g), edge = random_threshold(g);
        const Dfg once = filter_dfg(dfg, node, edge);
        CAPTURE(round);
        CHECK(subgraph(once, dfg));
        // Idempotence holds for counts; fractions are relative to the current
        // maximum, which filtering can only keep or remove with its node.
        if (node.kind == Threshold::Kind::Count && edge.kind == Threshold::Kind::Count)
            CHECK(filter_dfg(once, node, edge) == once);
        Threshold stricter = Threshold::count(0);
        if (node.kind == Threshold::Kind::Count) stricter = Threshold::count(static_cast<std::size_t>(node.value) + 2);
        else stricter = Threshold::fraction(std::min(1.0, node.value + 0.2));
        CHECK(subgraph(filter_dfg(dfg, stricter, edge), once));
        Threshold stricter_edge = edge.kind == Threshold::Kind::Count
                                      ? Threshold::count(static_cast<std::size_t>(edge.value) + 2)
                                      : Threshold::fraction(std::min(1.0, edge.value + 0.2));
        CHECK(subgraph(filter_dfg(dfg, node, stricter_edge), once));
    }
}

TEST_CASE("dot and json rendering") {
    EventLog log;
    Trace t;
    t.case_id = "c";
    t.events = {Event{"A \"x\"", parse_iso8601("2020-01-01"), {}, {}},
                Event{"B", parse_iso8601("2020-01-02T01:00:00Z"), {}, {}}};
    log.traces.push_back(t);
    const Dfg dfg = discover_dfg(log);
    const std::string dot = dfg_to_dot(dfg);
    CHECK(dot.find("digraph dfg") == 0);
    CHECK(dot.find("\"A \\\"x\\\" (1)\"") != std::string::npos);
    CHECK(dot.find("n0 -> n1 [label=\"1\"]") != std::string::npos);
    CHECK(dfg_to_dot(dfg, DfgAnnotation::MeanDuration).find("1d 01h 00m") != std::string::npos);
    auto j = nlohmann::json::parse(dfg_to_json(dfg));
    CHECK(j["edges"][0]["frequency"] == 1);
    CHECK(j["edges"][0]["duration_seconds"]["mean"] == 90000.0);
    CHECK(j["start_activities"]["A \"x\""] == 1);
}
