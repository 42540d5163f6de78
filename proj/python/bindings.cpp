#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmkit/analytics.hpp"
#include "pmkit/conformance.hpp"
#include "pmkit/discovery.hpp"
#include "pmkit/error.hpp"
#include "pmkit/event_log.hpp"
#include "pmkit/log_io.hpp"
#include "pmkit/net_io.hpp"
#include "pmkit/petri_net.hpp"
#include "pmkit/simulate.hpp"
#include "pmkit/timeutil.hpp"

namespace py = pybind11;
using namespace pmkit;

namespace {

// Instants cross the boundary as ISO-8601 strings to stay timezone-safe.
py::object to_py(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> py::object {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Timestamp>) return py::str(format_iso8601(x));
            else return py::cast(x);
        },
        v);
}

py::dict to_py(const Attributes& attrs) {
    py::dict d;
    for (const auto& [k, v] : attrs) d[py::str(k)] = to_py(v);
    return d;
}

double seconds_or_nan(const std::optional<Seconds>& s) { return s ? s->count() : std::nan(""); }

EventLog read_log(const std::string& path) {
    const std::string text = read_text_file(path);
    return format_from_path(path) == LogFormat::Csv ? parse_csv(text) : parse_xes(text);
}

void write_log(const EventLog& log, const std::string& path) {
    write_text_file(path, format_from_path(path) == LogFormat::Csv ? write_csv(log) : write_xes(log));
}

py::dict replay_summary(const LogReplayResult& r) {
    py::list traces;
    for (const auto& t : r.per_trace) {
        py::dict d;
        d["case_id"] = t.case_id;
        d["produced"] = t.produced;
        d["consumed"] = t.consumed;
        d["missing"] = t.missing;
        d["remaining"] = t.remaining;
        d["fitness"] = t.fitness;
        traces.append(d);
    }
    py::dict out;
    out["fitness"] = r.log_fitness;
    out["produced"] = r.produced;
    out["consumed"] = r.consumed;
    out["missing"] = r.missing;
    out["remaining"] = r.remaining;
    out["traces"] = traces;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Process mining toolkit: event logs, Petri nets, replay, DFGs, analytics, simulation";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", m.attr("Error").ptr());
    py::register_exception<StructuralError>(m, "StructuralError", m.attr("Error").ptr());
    py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error").ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", m.attr("Error").ptr());

    py::class_<Event>(m, "Event")
        .def_readonly("activity", &Event::activity)
        .def_property_readonly("timestamp", [](const Event& e) { return format_iso8601(e.timestamp); })
        .def_property_readonly("timestamp_ms",
                               [](const Event& e) { return e.timestamp.time_since_epoch().count(); })
        .def_property_readonly("attributes", [](const Event& e) { return to_py(e.attributes); })
        .def("__repr__", [](const Event& e) {
            return "<Event " + e.activity + " @ " + format_iso8601(e.timestamp) + ">";
        });

    py::class_<Trace>(m, "Trace")
        .def_readonly("case_id", &Trace::case_id)
        .def_readonly("events", &Trace::events)
        .def_property_readonly("attributes", [](const Trace& t) { return to_py(t.attributes); })
        .def_property_readonly("complete", &Trace::is_complete)
        .def_property_readonly("activities",
                               [](const Trace& t) {
                                   std::vector<std::string> out;
                                   for (const auto& e : t.events) out.push_back(e.activity);
                                   return out;
                               })
        .def("__len__", [](const Trace& t) { return t.events.size(); });

    py::class_<EventLog>(m, "EventLog")
        .def_readonly("name", &EventLog::name)
        .def_readonly("traces", &EventLog::traces)
        .def_property_readonly("event_count", &EventLog::event_count)
        .def("__len__", [](const EventLog& l) { return l.traces.size(); })
        .def("__eq__", [](const EventLog& a, const EventLog& b) { return a == b; });

    py::class_<PetriNet>(m, "PetriNet")
        .def_readonly("name", &PetriNet::name)
        .def_readonly("places", &PetriNet::places)
        .def_property_readonly("transitions",
                               [](const PetriNet& n) {
                                   std::vector<std::pair<std::string, std::optional<std::string>>> out;
                                   for (const auto& t : n.transitions) out.emplace_back(t.id, t.label);
                                   return out;
                               })
        .def_property_readonly("initial_marking", [](const PetriNet& n) { return n.initial_marking.to_string(); })
        .def_property_readonly("final_marking", [](const PetriNet& n) { return n.final_marking.to_string(); });

    py::class_<SimConfig>(m, "SimConfig")
        .def_readwrite("case_count", &SimConfig::case_count)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("ongoing_fraction", &SimConfig::ongoing_fraction)
        .def_readwrite("ards_probability", &SimConfig::ards_probability)
        .def_property(
            "drop_probability", [](const SimConfig& c) { return c.noise.event_drop_probability; },
            [](SimConfig& c, double p) { c.noise.event_drop_probability = p; })
        .def_property(
            "noise_seed", [](const SimConfig& c) { return c.noise.seed; },
            [](SimConfig& c, std::uint64_t s) { c.noise.seed = s; });

    m.def("read_log", &read_log, py::arg("path"), "Read a .csv or .xes event log");
    m.def("write_log", &write_log, py::arg("log"), py::arg("path"), "Write a .csv or .xes event log");
    m.def("parse_xes", [](const std::string& text) { return parse_xes(text); }, py::arg("text"));
    m.def("write_xes", &write_xes, py::arg("log"));
    m.def("parse_csv", [](const std::string& text) { return parse_csv(text); }, py::arg("text"));
    m.def("write_csv", &write_csv, py::arg("log"));

    m.def(
        "log_stats",
        [](const EventLog& log) {
            const LogStats s = log_stats(log);
            py::dict d;
            d["cases"] = s.case_count;
            d["events"] = s.event_count;
            d["activities"] = s.activity_count;
            d["variants"] = s.variant_count;
            d["complete_cases"] = s.complete_case_count;
            d["mean_events_per_case"] = s.mean_events_per_case ? *s.mean_events_per_case : std::nan("");
            d["mean_case_duration_seconds"] = seconds_or_nan(s.mean_case_duration);
            return d;
        },
        py::arg("log"));
    m.def(
        "variants",
        [](const EventLog& log) {
            std::vector<std::pair<std::vector<std::string>, std::size_t>> out;
            for (const auto& v : variants(log)) out.emplace_back(v.sequence, v.count);
            return out;
        },
        py::arg("log"), "[(activities, count)] by count descending");

    m.def("covas_model", &covas_model);
    m.def("parse_pnml", &parse_pnml, py::arg("text"));
    m.def("write_pnml", &write_pnml, py::arg("net"));
    m.def(
        "validate_net",
        [](const PetriNet& net) {
            std::vector<std::string> out;
            for (const auto& v : validate(net)) out.push_back(v.message);
            return out;
        },
        py::arg("net"));
    m.def(
        "fire_sequence",
        [](const PetriNet& net, const std::vector<std::string>& ids) { return fire_sequence(net, ids).to_string(); },
        py::arg("net"), py::arg("transitions"), "Marking reached from the initial marking, as text");

    m.def(
        "replay_log",
        [](const PetriNet& net, const EventLog& log) { return replay_summary(replay_log(net, log)); },
        py::arg("net"), py::arg("log"));

    m.def(
        "discover_dfg",
        [](const EventLog& log, const std::string& min_node, const std::string& min_edge) {
            auto node = parse_threshold(min_node);
            auto edge = parse_threshold(min_edge);
            if (!node || !edge) throw InvalidArgument("invalid threshold");
            const Dfg dfg = filter_dfg(discover_dfg(log), *node, *edge);
            std::map<std::string, std::size_t> nodes;
            for (const auto& [a, n] : dfg.nodes) nodes[a] = n.frequency;
            std::map<std::pair<std::string, std::string>, std::size_t> edges;
            for (const auto& [k, e] : dfg.edges) edges[k] = e.frequency;
            py::dict d;
            d["nodes"] = nodes;
            d["edges"] = edges;
            d["dot"] = dfg_to_dot(dfg);
            return d;
        },
        py::arg("log"), py::arg("min_node") = "0", py::arg("min_edge") = "0");

    m.def(
        "occupancy",
        [](const EventLog& log, const std::string& start, const std::string& end) {
            const OccupancySeries s = occupancy(log, start, end);
            std::vector<std::pair<std::string, std::size_t>> points;
            for (const auto& b : s.breakpoints) points.emplace_back(format_iso8601(b.at), b.count);
            py::dict d;
            d["points"] = points;
            d["peak"] = s.peak ? py::cast(std::make_pair(format_iso8601(s.peak->at), s.peak->count)) : py::none();
            d["warnings"] = s.warnings;
            return d;
        },
        py::arg("log"), py::arg("start") = "startVentilation", py::arg("end") = "endVentilation");

    m.def(
        "compare_waves",
        [](const EventLog& log, const std::string& split, bool complete_only) {
            const WaveComparison cmp = compare_waves(log, parse_iso8601(split), complete_only);
            auto wave = [](const WaveSummary& w) {
                py::dict d;
                d["cases"] = w.case_count;
                d["events"] = w.event_count;
                d["mean_case_duration_seconds"] = seconds_or_nan(w.mean_case_duration);
                return d;
            };
            py::dict d;
            d["first"] = wave(cmp.first);
            d["second"] = wave(cmp.second);
            d["excluded_ongoing"] = cmp.excluded_ongoing;
            d["table"] = wave_table(cmp);
            return d;
        },
        py::arg("log"), py::arg("split") = "2020-07-01T00:00:00Z", py::arg("complete_only") = true);

    m.def(
        "dotted_chart_svg",
        [](const EventLog& log, const std::string& color) { return dotted_chart_svg(dotted_chart(log, color)); },
        py::arg("log"), py::arg("color") = "ards");

    m.def("parse_sim_config", &parse_sim_config, py::arg("text"));
    m.def(
        "simulate", [](const SimConfig& cfg) { return simulate(cfg, covas_model()); }, py::arg("config"),
        "Simulate the COVAS model");
    m.def(
        "inject_noise",
        [](const EventLog& log, double p, std::uint64_t seed) { return inject_noise(log, NoiseSpec{p, seed}); },
        py::arg("log"), py::arg("drop_probability"), py::arg("seed"));
    m.def(
        "calibrate_drop_probability",
        [](const EventLog& clean, double target, std::uint64_t seed, int iterations) {
            const NoiseCalibration c = calibrate_drop_probability(clean, covas_model(), target, seed, iterations);
            return py::make_tuple(c.drop_probability, c.fitness);
        },
        py::arg("clean"), py::arg("target_fitness"), py::arg("seed"), py::arg("iterations") = 30,
        "(drop_probability, fitness) closest to the target on the COVAS model");
}
