#include "pmkit/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "pmkit/xml.hpp"

namespace pmkit {
namespace {

std::string csv_field(std::string_view v) {
    if (!v.empty() && v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string day_label(Timestamp t) { return format_iso8601(floor_day(t)).substr(0, 10); }

}  // namespace

// ---------------------------------------------------------------------------

DottedChartData dotted_chart(const EventLog& log, std::string_view color_attribute, CaseOrder order) {
    std::vector<std::size_t> idx(log.traces.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (order == CaseOrder::ByFirstEvent) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& ta = log.traces[a].events;
            const auto& tb = log.traces[b].events;
            if (ta.empty() || tb.empty()) return !ta.empty() && tb.empty();
            return ta.front().timestamp < tb.front().timestamp;
        });
    } else {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return log.traces[a].case_id < log.traces[b].case_id; });
    }
    DottedChartData data;
    data.order = order;
    for (std::size_t rank = 0; rank < idx.size(); ++rank) {
        const Trace& t = log.traces[idx[rank]];
        auto it = t.attributes.find(color_attribute);
        std::string color = it == t.attributes.end() ? "unknown" : to_text(it->second);
        for (const auto& e : t.events) data.rows.push_back({rank, t.case_id, e.timestamp, e.activity, color});
    }
    return data;
}

std::string dotted_chart_csv(const DottedChartData& data) {
    std::string out = "case_index,case_id,timestamp,color\n";
    for (const auto& r : data.rows)
        out += std::to_string(r.case_index) + "," + csv_field(r.case_id) + "," + format_iso8601(r.timestamp) + "," +
               csv_field(r.color) + "\n";
    return out;
}

std::string dotted_chart_svg(const DottedChartData& data) {
    constexpr double width = 960, height = 600, left = 60, right = 20, top = 30, bottom = 40;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#bcbd22", "#7f7f7f"};
    std::map<std::string, std::string> colors{{"true", "#e377c2"}, {"false", "#2ca02c"}, {"unknown", "#bbbbbb"}};
    std::size_t next_color = 0;
    for (const auto& r : data.rows)
        if (!colors.count(r.color)) colors.emplace(r.color, palette[next_color++ % std::size(palette)]);

    std::size_t cases = 0;
    Timestamp lo = Timestamp::max(), hi = Timestamp::min();
    for (const auto& r : data.rows) {
        cases = std::max(cases, r.case_index + 1);
        lo = std::min(lo, r.timestamp);
        hi = std::max(hi, r.timestamp);
    }
    const double span = data.rows.empty() ? 1.0 : std::max(1.0, Seconds(hi - lo).count());
    auto x = [&](Timestamp t) { return left + (width - left - right) * Seconds(t - lo).count() / span; };
    auto y = [&](std::size_t c) {
        return top + (height - top - bottom) * (cases <= 1 ? 0.5 : static_cast<double>(c) / static_cast<double>(cases - 1));
    };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                      "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(left) + "\" y=\"18\">dotted chart (" + std::to_string(cases) + " cases, " +
           std::to_string(data.rows.size()) + " events)</text>\n";
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" + num(width - right) + "\" y2=\"" +
           num(height - bottom) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(height - bottom) + "\" stroke=\"black\"/>\n";
    if (!data.rows.empty()) {
        out += "<text x=\"" + num(left) + "\" y=\"" + num(height - bottom + 16) + "\">" + day_label(lo) + "</text>\n";
        out += "<text x=\"" + num(width - right) + "\" y=\"" + num(height - bottom + 16) + "\" text-anchor=\"end\">" +
               day_label(hi) + "</text>\n";
    }
    for (const auto& r : data.rows) {
        out += "<circle cx=\"" + num(x(r.timestamp)) + "\" cy=\"" + num(y(r.case_index)) + "\" r=\"2\" fill=\"" +
               colors[r.color] + "\"><title>" + xml::escape(r.case_id, false) + " " + xml::escape(r.activity, false) +
               "</title></circle>\n";
    }
    out += "</svg>\n";
    return out;
}

// ---------------------------------------------------------------------------

std::size_t OccupancySeries::count_at(Timestamp t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](Timestamp v, const Breakpoint& b) { return v < b.at; });
    if (it == breakpoints.begin()) return 0;
    return std::prev(it)->count;
}

OccupancySeries occupancy(const EventLog& log, std::string_view start_activity, std::string_view end_activity) {
    OccupancySeries series;
    Timestamp horizon = Timestamp::min();
    for (const auto& t : log.traces)
        for (const auto& e : t.events) horizon = std::max(horizon, e.timestamp);

    for (const auto& t : log.traces) {
        std::optional<Timestamp> open;
        for (const auto& e : t.events) {
            if (e.activity == start_activity) {
                if (open) {
                    series.warnings.push_back("case " + t.case_id + ": " + std::string(start_activity) + " at " +
                                              format_iso8601(e.timestamp) + " while an interval is open; ignored");
                    continue;
                }
                open = e.timestamp;
            } else if (e.activity == end_activity) {
                if (!open) {
                    series.warnings.push_back("case " + t.case_id + ": " + std::string(end_activity) + " at " +
                                              format_iso8601(e.timestamp) + " without a preceding " +
                                              std::string(start_activity) + "; ignored");
                    continue;
                }
                if (e.timestamp < *open) {
                    series.warnings.push_back("case " + t.case_id + ": " + std::string(end_activity) +
                                              " precedes its start; interval skipped");
                } else {
                    series.intervals.push_back({t.case_id, *open, e.timestamp, false});
                }
                open.reset();
            }
        }
        if (open) series.intervals.push_back({t.case_id, *open, std::max(*open, horizon), true});
    }

    std::map<Timestamp, std::int64_t> delta;
    for (const auto& iv : series.intervals) {
        if (iv.end <= iv.start) continue;
        delta[iv.start] += 1;
        delta[iv.end] -= 1;
    }
    std::int64_t count = 0;
    for (const auto& [at, d] : delta) {
        if (d == 0) continue;
        count += d;
        series.breakpoints.push_back({at, static_cast<std::size_t>(count)});
        if (!series.peak || static_cast<std::size_t>(count) > series.peak->count)
            series.peak = series.breakpoints.back();
    }
    return series;
}

std::int64_t occupancy_integral_ms(const OccupancySeries& series) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i + 1 < series.breakpoints.size(); ++i) {
        const auto& b = series.breakpoints[i];
        total += (series.breakpoints[i + 1].at - b.at).count() * static_cast<std::int64_t>(b.count);
    }
    return total;
}

std::vector<Breakpoint> daily_max(const OccupancySeries& series) {
    std::vector<Breakpoint> out;
    if (series.breakpoints.empty()) return out;
    using std::chrono::days;
    Timestamp day = floor_day(series.breakpoints.front().at);
    const Timestamp last = floor_day(series.breakpoints.back().at);
    std::size_t i = 0;
    std::size_t carried = 0;  // count in force at the start of `day`
    for (; day <= last; day += days(1)) {
        std::size_t best = carried;
        const Timestamp next = day + days(1);
        while (i < series.breakpoints.size() && series.breakpoints[i].at < next) {
            best = std::max(best, series.breakpoints[i].count);
            carried = series.breakpoints[i].count;
            ++i;
        }
        out.push_back({day, best});
    }
    return out;
}

std::string occupancy_csv(const std::vector<Breakpoint>& points) {
    std::string out = "instant,count\n";
    for (const auto& p : points) out += format_iso8601(p.at) + "," + std::to_string(p.count) + "\n";
    return out;
}

std::string occupancy_svg(const std::vector<Breakpoint>& points, std::string_view title) {
    constexpr double width = 960, height = 400, left = 50, right = 20, top = 30, bottom = 40;
    std::size_t max_count = 1;
    for (const auto& p : points) max_count = std::max(max_count, p.count);
    Timestamp lo = points.empty() ? Timestamp{} : points.front().at;
    Timestamp hi = points.empty() ? Timestamp{} : points.back().at;
    const double span = std::max(1.0, Seconds(hi - lo).count());
    auto x = [&](Timestamp t) { return left + (width - left - right) * Seconds(t - lo).count() / span; };
    auto y = [&](std::size_t c) {
        return height - bottom - (height - top - bottom) * static_cast<double>(c) / static_cast<double>(max_count);
    };
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                      "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(left) + "\" y=\"18\">" + xml::escape(title, false) + " (max " +
           std::to_string(max_count) + ")</text>\n";
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" + num(width - right) + "\" y2=\"" +
           num(height - bottom) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(height - bottom) + "\" stroke=\"black\"/>\n";
    if (!points.empty()) {
        out += "<text x=\"" + num(left) + "\" y=\"" + num(height - bottom + 16) + "\">" + day_label(lo) + "</text>\n";
        out += "<text x=\"" + num(width - right) + "\" y=\"" + num(height - bottom + 16) + "\" text-anchor=\"end\">" +
               day_label(hi) + "</text>\n";
        std::string path = "M" + num(x(lo)) + "," + num(y(0));
        for (const auto& p : points) {
            path += " H" + num(x(p.at));
            path += " V" + num(y(p.count));
        }
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

// ---------------------------------------------------------------------------

std::optional<CaseDurationStats> case_duration_stats(const EventLog& log, Duration bin_width) {
    std::vector<Duration> durations;
    for (const auto& t : log.traces)
        if (t.is_complete())
            if (auto d = t.duration()) durations.push_back(*d);
    if (durations.empty()) return std::nullopt;
    std::sort(durations.begin(), durations.end());
    CaseDurationStats s;
    s.case_count = durations.size();
    double sum = 0;
    for (auto d : durations) sum += Seconds(d).count();
    s.mean = Seconds(sum / static_cast<double>(durations.size()));
    const std::size_t n = durations.size();
    s.median = n % 2 ? Seconds(durations[n / 2]) : (Seconds(durations[n / 2 - 1]) + Seconds(durations[n / 2])) / 2.0;
    s.min = durations.front();
    s.max = durations.back();
    s.bin_width = bin_width.count() > 0 ? bin_width : Duration(std::chrono::hours(24));
    s.histogram.assign(static_cast<std::size_t>(s.max / s.bin_width) + 1, 0);
    for (auto d : durations) ++s.histogram[static_cast<std::size_t>(d / s.bin_width)];
    return s;
}

namespace {

WaveSummary summarize(const EventLog& log, std::string label) {
    WaveSummary w;
    w.label = std::move(label);
    auto stats = log_stats(log);
    w.case_count = stats.case_count;
    w.event_count = stats.event_count;
    w.mean_case_duration = stats.mean_case_duration;
    w.dfg = discover_dfg(log);
    return w;
}

}  // namespace

WaveComparison compare_waves(const EventLog& log, Timestamp split, bool complete_only) {
    WaveComparison cmp;
    cmp.split = split;
    const EventLog* source = &log;
    EventLog complete;
    if (complete_only) {
        complete = complete_cases(log);
        cmp.excluded_ongoing = log.traces.size() - complete.traces.size();
        source = &complete;
    }
    cmp.first = summarize(filter_by_time(*source, split, TimeSide::Before), "wave 1");
    cmp.second = summarize(filter_by_time(*source, split, TimeSide::OnOrAfter), "wave 2");
    return cmp;
}

std::string wave_table(const WaveComparison& cmp) {
    std::string out = "split at " + format_iso8601(cmp.split) + "\n";
    char buf[200];
    for (const WaveSummary* w : {&cmp.first, &cmp.second}) {
        std::string dur = w->mean_case_duration ? format_duration(*w->mean_case_duration) : "-";
        std::snprintf(buf, sizeof buf, "%s: %zu cases, %zu events, mean duration %s\n", w->label.c_str(),
                      w->case_count, w->event_count, dur.c_str());
        out += buf;
    }
    if (cmp.excluded_ongoing > 0) out += "excluded ongoing cases: " + std::to_string(cmp.excluded_ongoing) + "\n";
    return out;
}

}  // namespace pmkit
