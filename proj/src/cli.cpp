#include "pmkit/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pmkit/analytics.hpp"
#include "pmkit/conformance.hpp"
#include "pmkit/discovery.hpp"
#include "pmkit/error.hpp"
#include "pmkit/event_log.hpp"
#include "pmkit/log_io.hpp"
#include "pmkit/net_io.hpp"
#include "pmkit/simulate.hpp"
#include "pmkit/timeutil.hpp"

namespace pmkit::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// A bad flag value detected after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LogInput {
    std::string path;
    std::string format;  // "", "csv" or "xes"
    std::string case_column = "case_id";
    std::string activity_column = "activity";
    std::string timestamp_column = "timestamp";
    std::string timestamp_format;
    std::vector<std::string> types;  // key=kind
};

void add_log_input(CLI::App* sub, LogInput& in) {
    sub->add_option("log", in.path, "Input event log (.csv or .xes)")->required();
    sub->add_option("--format", in.format, "Input format, overriding the extension")
        ->check(CLI::IsMember({"csv", "xes"}));
    sub->add_option("--case-column", in.case_column, "CSV case id column");
    sub->add_option("--activity-column", in.activity_column, "CSV activity column");
    sub->add_option("--timestamp-column", in.timestamp_column, "CSV timestamp column");
    sub->add_option("--timestamp-format", in.timestamp_format, "CSV timestamp format (%Y %m %d %H %M %S %f %z)");
    sub->add_option("--types", in.types, "CSV attribute kinds as key=string|int|float|boolean|date");
}

LogFormat resolve_format(const std::string& path, const std::string& explicit_format) {
    if (explicit_format == "csv") return LogFormat::Csv;
    if (explicit_format == "xes") return LogFormat::Xes;
    try {
        return format_from_path(path);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

std::optional<AttributeKind> kind_alias(std::string_view name) {
    if (name == "int") return AttributeKind::Integer;
    if (name == "float") return AttributeKind::Real;
    if (name == "date") return AttributeKind::Instant;
    return parse_kind(name);
}

EventLog load_log(const LogInput& in, std::ostream& err) {
    const LogFormat format = resolve_format(in.path, in.format);
    CsvMapping mapping;
    mapping.case_column = in.case_column;
    mapping.activity_column = in.activity_column;
    mapping.timestamp_column = in.timestamp_column;
    mapping.timestamp_format = in.timestamp_format;
    for (const auto& spec : in.types) {
        auto eq = spec.find('=');
        std::optional<AttributeKind> kind;
        if (eq != std::string::npos) kind = kind_alias(std::string_view(spec).substr(eq + 1));
        if (!kind) throw UsageError("--types expects key=kind, got '" + spec + "'");
        mapping.attribute_types[spec.substr(0, eq)] = *kind;
    }
    try {
        const std::string text = read_text_file(in.path);
        if (format == LogFormat::Csv) return parse_csv(text, mapping);
        std::vector<std::string> warnings;
        EventLog log = parse_xes(text, &warnings);
        for (const auto& w : warnings) err << "warning: " << in.path << ": " << w << "\n";
        return log;
    } catch (const Error& e) {
        throw Error(in.path + ": " + e.what());
    }
}

fs::path output_path(const std::string& out) {
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return fs::path(dir) / p;
    }
    return p;
}

void write_output(const std::string& out, std::string_view content) {
    const fs::path p = output_path(out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text_file(p, content);
}

std::string extension(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string serialize_log(const EventLog& log, const std::string& path) {
    return resolve_format(path, "") == LogFormat::Csv ? write_csv(log) : write_xes(log);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// ---------------------------------------------------------------------------

void cmd_stats(const LogInput& in, bool json, std::ostream& out, std::ostream& err) {
    const LogStats s = log_stats(load_log(in, err));
    if (json) {
        Json j;
        j["cases"] = s.case_count;
        j["events"] = s.event_count;
        j["activities"] = s.activity_count;
        j["variants"] = s.variant_count;
        j["complete_cases"] = s.complete_case_count;
        j["mean_events_per_case"] = s.mean_events_per_case ? Json(*s.mean_events_per_case) : Json(nullptr);
        j["mean_case_duration_seconds"] = s.mean_case_duration ? Json(s.mean_case_duration->count()) : Json(nullptr);
        out << j.dump(2) << "\n";
        return;
    }
    auto row = [&](std::string_view key, const std::string& value) {
        out << key << std::string(22 - key.size(), ' ') << value << "\n";
    };
    row("cases", std::to_string(s.case_count));
    row("events", std::to_string(s.event_count));
    row("activities", std::to_string(s.activity_count));
    row("variants", std::to_string(s.variant_count));
    row("complete cases", std::to_string(s.complete_case_count));
    row("mean events/case", s.mean_events_per_case ? fixed(*s.mean_events_per_case, 2) : "-");
    row("mean case duration", s.mean_case_duration ? format_duration(*s.mean_case_duration) : "-");
}

void cmd_variants(const LogInput& in, std::size_t top, bool json, std::ostream& out, std::ostream& err) {
    auto vs = variants(load_log(in, err));
    if (top > 0 && vs.size() > top) vs.resize(top);
    if (json) {
        Json arr = Json::array();
        for (const auto& v : vs) arr.push_back({{"count", v.count}, {"activities", v.sequence}, {"cases", v.case_ids}});
        out << arr.dump(2) << "\n";
        return;
    }
    for (const auto& v : vs) out << v.count << "\t" << join(v.sequence, " > ") << "\n";
}

struct DfgArgs {
    std::string min_node = "0";
    std::string min_edge = "0.05";
    std::string annotate = "frequency";
    std::string out;
};

void cmd_dfg(const LogInput& in, const DfgArgs& a, bool json, std::ostream& out, std::ostream& err) {
    auto node = parse_threshold(a.min_node);
    auto edge = parse_threshold(a.min_edge);
    if (!node) throw UsageError("--min-node: invalid threshold '" + a.min_node + "'");
    if (!edge) throw UsageError("--min-edge: invalid threshold '" + a.min_edge + "'");
    const Dfg dfg = filter_dfg(discover_dfg(load_log(in, err)), *node, *edge);
    const auto annotation = a.annotate == "duration" ? DfgAnnotation::MeanDuration : DfgAnnotation::Frequency;
    const bool as_json = json || (!a.out.empty() && extension(a.out) == ".json");
    const std::string text = as_json ? dfg_to_json(dfg) : dfg_to_dot(dfg, annotation);
    if (a.out.empty()) {
        out << text;
        return;
    }
    write_output(a.out, text);
    if (json)
        out << Json{{"nodes", dfg.nodes.size()}, {"edges", dfg.edges.size()}, {"out", output_path(a.out).string()}}.dump(2)
            << "\n";
    else
        out << "dfg: " << dfg.nodes.size() << " nodes, " << dfg.edges.size() << " edges -> " << output_path(a.out).string()
            << "\n";
}

struct ReplayArgs {
    std::string model = "covas";
    std::string out;
    bool report = false;
    bool strict_final = false;
    std::vector<std::string> label_map;
};

void cmd_replay(const LogInput& in, const ReplayArgs& a, bool json, std::ostream& out, std::ostream& err) {
    PetriNet net;
    if (a.model == "covas") {
        net = covas_model();
    } else {
        try {
            net = parse_pnml(read_text_file(a.model));
        } catch (const Error& e) {
            throw Error(a.model + ": " + e.what());
        }
    }
    ReplayOptions opt;
    opt.ignore_final_for_ongoing = !a.strict_final;
    for (const auto& m : a.label_map) {
        auto eq = m.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--label-map expects activity=label, got '" + m + "'");
        opt.label_map[m.substr(0, eq)] = m.substr(eq + 1);
    }
    const LogReplayResult r = replay_log(net, load_log(in, err), opt);
    if (!a.out.empty()) write_output(a.out, replay_csv(r));
    if (json) {
        Json j;
        j["fitness"] = r.log_fitness;
        j["produced"] = r.produced;
        j["consumed"] = r.consumed;
        j["missing"] = r.missing;
        j["remaining"] = r.remaining;
        j["traces"] = r.per_trace.size();
        std::size_t deviating = 0;
        for (const auto& t : r.per_trace) deviating += (t.missing > 0 || t.remaining > 0);
        j["deviating_traces"] = deviating;
        out << j.dump(2) << "\n";
    } else {
        out << "log fitness " << fixed(r.log_fitness, 3) << "\n";
        out << "produced " << r.produced << ", consumed " << r.consumed << ", missing " << r.missing << ", remaining "
            << r.remaining << "\n";
    }
    if (a.report) out << deviation_report(r);
}

struct ChartArgs {
    std::string color = "ards";
    std::string order = "first";
    std::string out;
};

void cmd_dotted_chart(const LogInput& in, const ChartArgs& a, bool json, std::ostream& out, std::ostream& err) {
    const auto order = a.order == "id" ? CaseOrder::ByCaseId : CaseOrder::ByFirstEvent;
    const DottedChartData data = dotted_chart(load_log(in, err), a.color, order);
    if (!a.out.empty()) write_output(a.out, extension(a.out) == ".svg" ? dotted_chart_svg(data) : dotted_chart_csv(data));
    if (json) {
        Json rows = Json::array();
        for (const auto& r : data.rows)
            rows.push_back({{"case_index", r.case_index},
                            {"case_id", r.case_id},
                            {"timestamp", format_iso8601(r.timestamp)},
                            {"activity", r.activity},
                            {"color", r.color}});
        out << rows.dump(2) << "\n";
    } else if (a.out.empty()) {
        out << dotted_chart_csv(data);
    } else {
        out << "dotted chart: " << data.rows.size() << " events -> " << output_path(a.out).string() << "\n";
    }
}

struct OccupancyArgs {
    std::string start = "startVentilation";
    std::string end = "endVentilation";
    bool daily = false;
    std::string out;
};

void cmd_occupancy(const LogInput& in, const OccupancyArgs& a, bool json, std::ostream& out, std::ostream& err) {
    const OccupancySeries s = occupancy(load_log(in, err), a.start, a.end);
    for (const auto& w : s.warnings) err << "warning: " << w << "\n";
    const std::vector<Breakpoint> points = a.daily ? daily_max(s) : s.breakpoints;
    if (!a.out.empty())
        write_output(a.out, extension(a.out) == ".svg" ? occupancy_svg(points, a.start + " .. " + a.end)
                                                       : occupancy_csv(points));
    if (json) {
        Json j;
        j["intervals"] = s.intervals.size();
        j["peak"] = s.peak ? Json{{"count", s.peak->count}, {"at", format_iso8601(s.peak->at)}} : Json(nullptr);
        Json pts = Json::array();
        for (const auto& p : points) pts.push_back({{"at", format_iso8601(p.at)}, {"count", p.count}});
        j["points"] = std::move(pts);
        out << j.dump(2) << "\n";
        return;
    }
    out << "intervals " << s.intervals.size() << "\n";
    if (s.peak)
        out << "peak " << s.peak->count << " at " << format_iso8601(s.peak->at) << "\n";
    else
        out << "peak none\n";
    if (a.out.empty() && a.daily) out << occupancy_csv(points);
}

void cmd_waves(const LogInput& in, const std::string& split_text, bool include_ongoing, bool json, std::ostream& out,
               std::ostream& err) {
    auto split = try_parse_iso8601(split_text);
    if (!split) throw UsageError("--split: invalid instant '" + split_text + "'");
    const WaveComparison cmp = compare_waves(load_log(in, err), *split, !include_ongoing);
    if (!json) {
        out << wave_table(cmp);
        return;
    }
    auto wave = [](const WaveSummary& w) {
        return Json{{"label", w.label},
                    {"cases", w.case_count},
                    {"events", w.event_count},
                    {"mean_case_duration_seconds",
                     w.mean_case_duration ? Json(w.mean_case_duration->count()) : Json(nullptr)},
                    {"mean_case_duration",
                     w.mean_case_duration ? Json(format_duration(*w.mean_case_duration)) : Json(nullptr)},
                    {"dfg_edges", w.dfg.edges.size()}};
    };
    Json j;
    j["split"] = format_iso8601(cmp.split);
    j["waves"] = Json::array({wave(cmp.first), wave(cmp.second)});
    j["excluded_ongoing"] = cmp.excluded_ongoing;
    out << j.dump(2) << "\n";
}

struct SimArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool noise = false;
    std::optional<double> drop_rate;
    std::optional<std::uint64_t> noise_seed;
    bool strip_start_end = false;
};

void cmd_simulate(const SimArgs& a, bool json, std::ostream& out) {
    SimConfig cfg;
    try {
        cfg = parse_sim_config(read_text_file(a.config));
    } catch (const Error& e) {
        throw Error(a.config + ": " + e.what());
    }
    if (a.seed) cfg.seed = *a.seed;
    EventLog log = simulate(cfg, covas_model());
    NoiseSpec noise = cfg.noise;
    if (a.drop_rate) noise.event_drop_probability = *a.drop_rate;
    if (a.noise_seed) noise.seed = *a.noise_seed;
    const bool noisy = a.noise || a.drop_rate.has_value();
    if (noisy) log = inject_noise(log, noise);
    if (a.strip_start_end) log = strip_activities(log, {"Start", "End"});
    const std::string text = serialize_log(log, a.out);
    write_output(a.out, text);
    if (json) {
        out << Json{{"cases", log.traces.size()},
                    {"events", log.event_count()},
                    {"noise", noisy ? Json(noise.event_drop_probability) : Json(nullptr)},
                    {"out", output_path(a.out).string()}}
                   .dump(2)
            << "\n";
    } else {
        out << "simulated " << log.traces.size() << " cases, " << log.event_count() << " events -> "
            << output_path(a.out).string() << "\n";
    }
}

void cmd_convert(const LogInput& in, const std::string& dest, bool json, std::ostream& out, std::ostream& err) {
    const EventLog log = load_log(in, err);
    const std::string text = serialize_log(log, dest);
    write_output(dest, text);
    if (json)
        out << Json{{"cases", log.traces.size()}, {"events", log.event_count()}, {"out", output_path(dest).string()}}
                   .dump(2)
            << "\n";
    else
        out << "converted " << log.traces.size() << " cases, " << log.event_count() << " events -> "
            << output_path(dest).string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Process mining toolkit for clinical event logs", "pmkit"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    bool json = false;
    app.add_flag("--json", json, "Machine-readable JSON output");

    LogInput in;
    auto* stats = app.add_subcommand("stats", "Summary statistics of a log");
    add_log_input(stats, in);

    std::size_t top = 0;
    auto* var = app.add_subcommand("variants", "Variants with counts, most frequent first");
    add_log_input(var, in);
    var->add_option("--top", top, "Show only the N most frequent variants");

    DfgArgs dfg_args;
    auto* dfg = app.add_subcommand("dfg", "Discover a filtered directly-follows graph");
    add_log_input(dfg, in);
    dfg->add_option("--min-node", dfg_args.min_node, "Node threshold: count, fraction of max, or N%");
    dfg->add_option("--min-edge", dfg_args.min_edge, "Edge threshold: count, fraction of max, or N%");
    dfg->add_option("--annotate", dfg_args.annotate, "Edge labels")->check(CLI::IsMember({"frequency", "duration"}));
    dfg->add_option("--out", dfg_args.out, "Output .dot or .json file");

    ReplayArgs replay_args;
    auto* replay = app.add_subcommand("replay", "Token-based replay against a Petri net");
    add_log_input(replay, in);
    replay->add_option("--model", replay_args.model, "'covas' or a .pnml file");
    replay->add_option("--out", replay_args.out, "Per-trace CSV output");
    replay->add_flag("--report", replay_args.report, "Print traces with missing or remaining tokens");
    replay->add_flag("--strict-final", replay_args.strict_final, "Require the final marking for ongoing cases too");
    replay->add_option("--label-map", replay_args.label_map, "Activity renaming as activity=label");

    ChartArgs chart_args;
    auto* chart = app.add_subcommand("dotted-chart", "Dotted chart as CSV or SVG");
    add_log_input(chart, in);
    chart->add_option("--color", chart_args.color, "Trace attribute used for colour");
    chart->add_option("--order", chart_args.order, "Case order")->check(CLI::IsMember({"first", "id"}));
    chart->add_option("--out", chart_args.out, "Output .svg or .csv file");

    OccupancyArgs occ_args;
    auto* occ = app.add_subcommand("occupancy", "Concurrent cases between two activities");
    add_log_input(occ, in);
    occ->add_option("--start", occ_args.start, "Activity opening an interval");
    occ->add_option("--end", occ_args.end, "Activity closing an interval");
    occ->add_flag("--daily", occ_args.daily, "Reduce to the daily maximum");
    occ->add_option("--out", occ_args.out, "Output .csv or .svg file");

    std::string split = "2020-07-01T00:00:00Z";
    bool include_ongoing = false;
    auto* waves = app.add_subcommand("waves", "Compare cases admitted before and after a split instant");
    add_log_input(waves, in);
    waves->add_option("--split", split, "Split instant (ISO-8601)");
    waves->add_flag("--include-ongoing", include_ongoing, "Keep cases marked complete=false");

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic log from a simulator config");
    sim->add_option("--config", sim_args.config, "Simulator config file")->required();
    sim->add_option("--out", sim_args.out, "Output .xes or .csv file")->required();
    sim->add_option("--seed", sim_args.seed, "Override the config seed");
    sim->add_flag("--noise", sim_args.noise, "Apply the config's noise settings");
    sim->add_option("--drop-rate", sim_args.drop_rate, "Event drop probability (implies --noise)")
        ->check(CLI::Range(0.0, 1.0));
    sim->add_option("--noise-seed", sim_args.noise_seed, "Override the noise seed");
    sim->add_flag("--strip-start-end", sim_args.strip_start_end, "Omit Start and End events");

    std::string convert_out;
    auto* convert = app.add_subcommand("convert", "Transcode between CSV and XES");
    add_log_input(convert, in);
    convert->add_option("--out", convert_out, "Output .xes or .csv file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "pmkit: " << e.what() << "\n";
        if (!app.get_subcommands().empty())
            err << app.get_subcommands().front()->help();
        else
            err << app.help();
        return kExitUsage;
    }

    try {
        if (stats->parsed()) cmd_stats(in, json, out, err);
        else if (var->parsed()) cmd_variants(in, top, json, out, err);
        else if (dfg->parsed()) cmd_dfg(in, dfg_args, json, out, err);
        else if (replay->parsed()) cmd_replay(in, replay_args, json, out, err);
        else if (chart->parsed()) cmd_dotted_chart(in, chart_args, json, out, err);
        else if (occ->parsed()) cmd_occupancy(in, occ_args, json, out, err);
        else if (waves->parsed()) cmd_waves(in, split, include_ongoing, json, out, err);
        else if (sim->parsed()) cmd_simulate(sim_args, json, out);
        else if (convert->parsed()) cmd_convert(in, convert_out, json, out, err);
    } catch (const UsageError& e) {
        err << "pmkit: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "pmkit: error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "pmkit: error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace pmkit::cli
