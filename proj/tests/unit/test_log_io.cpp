#include "doctest.h"
#include "generators.hpp"
#include "pmkit/error.hpp"
#include "pmkit/log_io.hpp"
#include "pmkit/timeutil.hpp"

using namespace pmkit;

namespace {

EventLog typed_log() {
    EventLog log;
    log.name = "sample & co";
    log.attributes.emplace("source", std::string("desk"));
    Trace t;
    t.case_id = "c,1";
    t.attributes.emplace("complete", true);
    t.attributes.emplace("ards", false);
    t.attributes.emplace("age", std::int64_t{67});
    t.attributes.emplace("note", std::string(""));
    Event e1{"Start", parse_iso8601("2020-03-01T08:00:00Z"), {}, {}};
    e1.attributes.emplace("weight", 81.25);
    e1.attributes.emplace("ward", std::string("ICU \"north\"\nwing"));
    Event e2{"End", parse_iso8601("2020-03-02T08:00:00.125Z"), {}, {}};
    e2.attributes.emplace("seen", parse_iso8601("2020-03-02T07:00:00Z"));
    t.events = {e1, e2};
    log.traces.push_back(t);
    Trace u;
    u.case_id = "c2";
    u.events.push_back(Event{"Start", parse_iso8601("2020-03-05T00:00:00Z"), {}, {}});
    log.traces.push_back(u);
    return log;
}

}  // namespace

TEST_CASE("csv reads the default columns and groups by case") {
    const char* text =
        "case_id,activity,timestamp,case:ards,dose\n"
        "p2,B,2020-03-02T00:00:00Z,true,\n"
        "p1,A,2020-03-01T00:00:00Z,false,\"\"\n"
        "p2,A,2020-03-01T00:00:00Z,true,3\n";
    CsvMapping m;
    m.attribute_types["case:ards"] = AttributeKind::Boolean;
    EventLog log = parse_csv(text, m);
    REQUIRE(log.traces.size() == 2);
    CHECK(log.traces[0].case_id == "p2");
    CHECK(log.traces[0].events[0].activity == "A");
    CHECK(log.traces[0].events[0].attributes.at("dose") == AttributeValue{std::string("3")});
    CHECK(log.traces[0].events[1].attributes.count("dose") == 0);
    CHECK(log.traces[0].flag("ards") == true);
    CHECK(log.traces[1].events[0].attributes.at("dose") == AttributeValue{std::string("")});
}

TEST_CASE("csv column mapping and timestamp formats") {
    const char* text = "patient;x,event,when\nA;1,admit,13/04/2020 10:00\n";
    CsvMapping m;
    m.case_column = "patient;x";
    m.activity_column = "event";
    m.timestamp_column = "when";
    m.timestamp_format = "%d/%m/%Y %H:%M";
    EventLog log = parse_csv(text, m);
    REQUIRE(log.traces.size() == 1);
    CHECK(log.traces[0].events[0].timestamp == parse_iso8601("2020-04-13T10:00:00Z"));
}

TEST_CASE("csv errors name the row and line") {
    CHECK_THROWS_AS(parse_csv("case_id,activity\nx,y\n"), StructuralError);
    try {
        parse_csv("case_id,activity,timestamp\na,b,2020-01-01\na,b,notatime\n");
        FAIL("expected error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    try {
        parse_csv("case_id,activity,timestamp\n\"a\nb\",x,2020-01-01\na,b\n");
        FAIL("expected error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_csv("case_id,activity,timestamp\n\"a,b,2020-01-01\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("case_id,activity,timestamp\na\"b,x,2020-01-01\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("case_id,activity,timestamp\n,x,2020-01-01\n"), ParseError);
    CsvMapping m;
    m.attribute_types["n"] = AttributeKind::Integer;
    CHECK_THROWS_AS(parse_csv("case_id,activity,timestamp,n\na,x,2020-01-01,1.5\n", m), ParseError);
    CHECK(parse_csv("").traces.empty());
    CHECK(parse_csv("case_id,activity,timestamp\r\n").traces.empty());
}

TEST_CASE("csv round trip keeps typed attributes") {
    EventLog log = typed_log();
    const std::string text = write_csv(log);
    CsvMapping m;
    m.attribute_types = csv_attribute_types(log);
    EventLog back = parse_csv(text, m);
    CHECK(back.traces == log.traces);
    CHECK(write_csv(back) == text);
}

TEST_CASE("xes round trip keeps attributes, names and unknown elements") {
    EventLog log = typed_log();
    log.extra_xml.push_back("<classifier name=\"Activity\" keys=\"concept:name\"/>");
    log.traces[0].events[0].extra_xml.push_back("<list key=\"l\"><string key=\"a\" value=\"b\"/></list>");
    const std::string text = write_xes(log);
    EventLog back = parse_xes(text);
    CHECK(back == log);
    CHECK(write_xes(back) == text);
}

TEST_CASE("property: xes and csv round trips on random logs") {
    testgen::Gen g(5);
    for (int round = 0; round < 60; ++round) {
        EventLog log = testgen::random_log(g, 8, 6);
        for (auto& t : log.traces) t.attributes.emplace("ards", testgen::coin(g));
        CAPTURE(round);
        CHECK(parse_xes(write_xes(log)) == log);
        CsvMapping m;
        m.attribute_types = csv_attribute_types(log);
        EventLog csv = parse_csv(write_csv(log), m);
        std::vector<Trace> nonempty;
        for (const auto& t : log.traces)
            if (!t.events.empty()) nonempty.push_back(t);
        CHECK(csv.traces == nonempty);
    }
}

TEST_CASE("xes reader handles foreign logs") {
    const char* text = R"(<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0" xmlns="http://www.xes-standard.org/">
  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>
  <global scope="event"><string key="concept:name" value="__INVALID__"/></global>
  <trace>
    <event><string key="concept:name" value="b"/><date key="time:timestamp" value="2020-01-02T00:00:00+01:00"/></event>
    <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2020-01-01T00:00:00.000+01:00"/></event>
  </trace>
  <trace><string key="concept:name" value="x"/></trace>
</log>)";
    std::vector<std::string> warnings;
    EventLog log = parse_xes(text, &warnings);
    REQUIRE(log.traces.size() == 2);
    CHECK(log.traces[0].case_id == "trace_0");
    CHECK(log.traces[0].events[0].activity == "a");
    CHECK(log.traces[0].events[0].timestamp == parse_iso8601("2019-12-31T23:00:00Z"));
    CHECK(log.traces[1].events.empty());
    CHECK(warnings.size() == 1);
    CHECK(log.extra_xml.size() == 1);
}

TEST_CASE("xes errors carry positions") {
    try {
        parse_xes("<log>\n<trace>\n<event><string key=\"concept:name\" value=\"a\"/></event>\n</trace>\n</log>");
        FAIL("expected error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("time:timestamp") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_xes("<notlog/>"), ParseError);
    CHECK_THROWS_AS(parse_xes("<log><int key=\"n\" value=\"x\"/></log>"), ParseError);
    CHECK_THROWS_AS(parse_xes("<log><trace><string key=\"concept:name\" value=\"a\"/></trace>"
                              "<trace><string key=\"concept:name\" value=\"a\"/></trace></log>"),
                    ParseError);
}

TEST_CASE("format_from_path") {
    CHECK(format_from_path("a/b.CSV") == LogFormat::Csv);
    CHECK(format_from_path("x.xes") == LogFormat::Xes);
    CHECK_THROWS_AS(format_from_path("x.json"), InvalidArgument);
    CHECK_THROWS_AS(read_text_file("/nonexistent/file.xes"), Error);
}
