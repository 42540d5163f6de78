#include <algorithm>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "pmkit/error.hpp"
#include "pmkit/event_log.hpp"
#include "pmkit/timeutil.hpp"

using namespace pmkit;

namespace {

Trace make(std::string id, std::vector<std::pair<std::string, std::string>> events, std::optional<bool> complete = {}) {
    Trace t;
    t.case_id = std::move(id);
    for (auto& [a, ts] : events) t.events.push_back(Event{a, parse_iso8601(ts), {}, {}});
    if (complete) t.attributes.emplace(std::string(kCompleteKey), *complete);
    return t;
}

}  // namespace

TEST_CASE("attribute text conversions") {
    CHECK(to_text(AttributeValue{std::int64_t{-4}}) == "-4");
    CHECK(to_text(AttributeValue{true}) == "true");
    CHECK(to_text(AttributeValue{std::string("x")}) == "x");
    CHECK(to_text(AttributeValue{parse_iso8601("2020-01-02")}) == "2020-01-02T00:00:00Z");
    CHECK(from_text("12", AttributeKind::Integer) == AttributeValue{std::int64_t{12}});
    CHECK(from_text("1.5", AttributeKind::Real) == AttributeValue{1.5});
    CHECK(from_text("false", AttributeKind::Boolean) == AttributeValue{false});
    CHECK_FALSE(from_text("maybe", AttributeKind::Boolean).has_value());
    CHECK_FALSE(from_text("1x", AttributeKind::Integer).has_value());
    CHECK_FALSE(from_text("", AttributeKind::Real).has_value());
    for (auto k : {AttributeKind::String, AttributeKind::Integer, AttributeKind::Real, AttributeKind::Boolean,
                   AttributeKind::Instant})
        CHECK(parse_kind(kind_name(k)) == k);
    CHECK_FALSE(parse_kind("blob").has_value());
}

TEST_CASE("trace flags and durations") {
    Trace t = make("a", {{"x", "2020-01-01T00:00:00Z"}, {"y", "2020-01-02T06:00:00Z"}});
    CHECK(t.is_complete());
    CHECK(t.duration() == std::chrono::hours(30));
    t.attributes.emplace(std::string(kCompleteKey), false);
    CHECK_FALSE(t.is_complete());
    t.attributes.emplace(std::string(kArdsKey), std::string("yes"));
    CHECK_FALSE(t.flag(kArdsKey).has_value());
    CHECK_FALSE(Trace{}.duration().has_value());
}

TEST_CASE("check_log reports structural problems") {
    EventLog log;
    log.traces.push_back(make("a", {{"x", "2020-01-02"}, {"y", "2020-01-01"}}));
    CHECK_THROWS_AS(check_log(log), StructuralError);
    sort_events(log.traces[0]);
    CHECK_NOTHROW(check_log(log));
    CHECK(log.traces[0].events[0].activity == "y");
    log.traces.push_back(make("a", {}));
    CHECK_THROWS_AS(check_log(log), StructuralError);
    log.traces.back().case_id = "";
    CHECK_THROWS_AS(check_log(log), StructuralError);
}

TEST_CASE("sort_events is stable for equal timestamps") {
    Trace t = make("a", {{"b", "2020-01-01"}, {"a", "2020-01-01"}, {"c", "2019-12-31"}});
    sort_events(t);
    CHECK(t.events[0].activity == "c");
    CHECK(t.events[1].activity == "b");
    CHECK(t.events[2].activity == "a");
}

TEST_CASE("variants are ordered by count then sequence") {
    EventLog log;
    log.traces.push_back(make("1", {{"b", "2020-01-01"}}));
    log.traces.push_back(make("2", {{"a", "2020-01-01"}, {"b", "2020-01-02"}}));
    log.traces.push_back(make("3", {{"a", "2020-01-01"}}));
    log.traces.push_back(make("4", {{"b", "2020-01-01"}}));
    auto vs = variants(log);
    REQUIRE(vs.size() == 3);
    CHECK(vs[0].sequence == std::vector<std::string>{"b"});
    CHECK(vs[0].count == 2);
    CHECK(vs[0].case_ids == std::vector<std::string>{"1", "4"});
    CHECK(vs[1].sequence == std::vector<std::string>{"a"});
    CHECK(vs[2].sequence == std::vector<std::string>{"a", "b"});
}

TEST_CASE("property: variants match the brute-force grouping") {
    testgen::Gen g(101);
    for (int round = 0; round < 150; ++round) {
        EventLog log = testgen::random_log(g);
        auto expected = oracle::brute_force_variants(log);
        auto vs = variants(log);
        CAPTURE(round);
        REQUIRE(vs.size() == expected.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            auto ids = vs[i].case_ids;
            std::sort(ids.begin(), ids.end());
            CHECK(ids == expected.at(vs[i].sequence));
            CHECK(vs[i].count == ids.size());
            total += vs[i].count;
            if (i > 0) {
                bool ordered = vs[i - 1].count > vs[i].count ||
                               (vs[i - 1].count == vs[i].count && vs[i - 1].sequence < vs[i].sequence);
                CHECK(ordered);
            }
        }
        CHECK(total == log.traces.size());
    }
}

TEST_CASE("log_stats") {
    EventLog log;
    log.traces.push_back(make("1", {{"a", "2020-01-01"}, {"b", "2020-01-03"}}));
    log.traces.push_back(make("2", {{"a", "2020-01-01"}, {"c", "2020-01-02"}, {"b", "2020-01-05"}}));
    log.traces.push_back(make("3", {{"a", "2020-01-01"}}, false));
    const LogStats s = log_stats(log);
    CHECK(s.case_count == 3);
    CHECK(s.event_count == 6);
    CHECK(s.activity_count == 3);
    CHECK(s.variant_count == 3);
    CHECK(s.complete_case_count == 2);
    CHECK(*s.mean_events_per_case == doctest::Approx(2.0));
    CHECK(s.mean_case_duration->count() == doctest::Approx(3 * 86400.0));
    CHECK(activity_alphabet(log) == std::vector<std::string>{"a", "b", "c"});

    const LogStats empty = log_stats(EventLog{});
    CHECK(empty.case_count == 0);
    CHECK_FALSE(empty.mean_events_per_case.has_value());
    CHECK_FALSE(empty.mean_case_duration.has_value());
}

TEST_CASE("filter_by_time splits on the first event") {
    EventLog log;
    log.traces.push_back(make("early", {{"a", "2020-06-30T23:59:59Z"}, {"b", "2020-07-05"}}));
    log.traces.push_back(make("edge", {{"a", "2020-07-01T00:00:00Z"}}));
    log.traces.push_back(make("empty", {}));
    const Timestamp split = parse_iso8601("2020-07-01");
    auto before = filter_by_time(log, split, TimeSide::Before);
    auto after = filter_by_time(log, split, TimeSide::OnOrAfter);
    REQUIRE(before.traces.size() == 1);
    CHECK(before.traces[0].case_id == "early");
    REQUIRE(after.traces.size() == 2);
    CHECK(after.traces[0].case_id == "edge");
    CHECK(after.traces[1].case_id == "empty");
}

TEST_CASE("property: filter_by_time partitions the log") {
    testgen::Gen g(7);
    for (int round = 0; round < 100; ++round) {
        EventLog log = testgen::random_log(g);
        const Timestamp split = parse_iso8601("2020-01-01") + std::chrono::hours(testgen::pick(g, 0, 3000));
        auto a = filter_by_time(log, split, TimeSide::Before);
        auto b = filter_by_time(log, split, TimeSide::OnOrAfter);
        CHECK(a.traces.size() + b.traces.size() == log.traces.size());
        for (const auto& t : a.traces) CHECK(t.events.front().timestamp < split);
        for (const auto& t : b.traces) CHECK((t.events.empty() || t.events.front().timestamp >= split));
    }
}

TEST_CASE("complete_cases and strip_activities") {
    EventLog log;
    log.traces.push_back(make("1", {{"Start", "2020-01-01"}, {"x", "2020-01-02"}, {"End", "2020-01-03"}}));
    log.traces.push_back(make("2", {{"Start", "2020-01-01"}}, false));
    auto complete = complete_cases(log);
    REQUIRE(complete.traces.size() == 1);
    CHECK(complete.traces[0].case_id == "1");
    auto stripped = strip_activities(log, {"Start", "End"});
    CHECK(stripped.traces.size() == 2);
    CHECK(stripped.traces[0].events.size() == 1);
    CHECK(stripped.traces[1].events.empty());
}
