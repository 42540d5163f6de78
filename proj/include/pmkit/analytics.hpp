#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmkit/discovery.hpp"
#include "pmkit/event_log.hpp"

namespace pmkit {

// ---------------------------------------------------------------------------
// Dotted chart

enum class CaseOrder { ByFirstEvent, ByCaseId };

struct DottedChartRow {
    std::size_t case_index = 0;
    std::string case_id;
    Timestamp timestamp{};
    std::string activity;
    std::string color;  // trace attribute value as text, "unknown" when absent

    bool operator==(const DottedChartRow&) const = default;
};

struct DottedChartData {
    std::vector<DottedChartRow> rows;
    CaseOrder order = CaseOrder::ByFirstEvent;
};

// One row per event. Cases are numbered from 0 after sorting by `order`
// (first-event ties keep log order; empty traces sort last).
DottedChartData dotted_chart(const EventLog& log, std::string_view color_attribute,
                             CaseOrder order = CaseOrder::ByFirstEvent);

// "case_index,case_id,timestamp,color"
std::string dotted_chart_csv(const DottedChartData& data);

// Standalone SVG: x = time, y = case index, one circle per event. "true" is
// drawn pink and "false" green; other keys take colours from a fixed palette.
std::string dotted_chart_svg(const DottedChartData& data);

// ---------------------------------------------------------------------------
// Resource occupancy

struct OccupancyInterval {
    std::string case_id;
    Timestamp start{};
    Timestamp end{};
    bool open = false;  // no closing event; runs to the log horizon
};

struct Breakpoint {
    Timestamp at{};
    std::size_t count = 0;

    bool operator==(const Breakpoint&) const = default;
};

struct OccupancySeries {
    // The count holds from `at` up to the next breakpoint; emitted only where
    // the count changes. The last breakpoint is always back to zero.
    std::vector<Breakpoint> breakpoints;
    std::optional<Breakpoint> peak;  // earliest instant reaching the maximum
    std::vector<OccupancyInterval> intervals;
    std::vector<std::string> warnings;

    // Number of intervals containing t under [start, end) semantics.
    std::size_t count_at(Timestamp t) const;
};

// Pairs each start_activity event with the next end_activity event in the
// same trace. A start with no end stays open until the latest timestamp in the
// log. Intervals are half-open, so a hand-over at one instant counts once.
// Orphan ends, repeated starts and ends preceding their start are skipped with
// a warning.
OccupancySeries occupancy(const EventLog& log, std::string_view start_activity, std::string_view end_activity);

// Sum of breakpoint-span x count, in milliseconds. Equals the summed interval
// lengths.
std::int64_t occupancy_integral_ms(const OccupancySeries& series);

// Maximum count reached during each UTC day from the first to the last breakpoint.
std::vector<Breakpoint> daily_max(const OccupancySeries& series);

// "instant,count"
std::string occupancy_csv(const std::vector<Breakpoint>& points);
// Step plot.
std::string occupancy_svg(const std::vector<Breakpoint>& points, std::string_view title = "occupancy");

// ---------------------------------------------------------------------------
// Case durations and wave comparison

struct CaseDurationStats {
    std::size_t case_count = 0;
    Seconds mean{};
    Seconds median{};
    Duration min{};
    Duration max{};
    Duration bin_width{};
    // histogram[i] counts durations in [i * bin_width, (i + 1) * bin_width).
    std::vector<std::size_t> histogram;
};

// Over complete traces with at least one event; absent if there are none.
std::optional<CaseDurationStats> case_duration_stats(const EventLog& log,
                                                     Duration bin_width = std::chrono::hours(24));

struct WaveSummary {
    std::string label;
    std::size_t case_count = 0;
    std::size_t event_count = 0;
    std::optional<Seconds> mean_case_duration;
    Dfg dfg;
};

struct WaveComparison {
    Timestamp split{};
    WaveSummary first;   // admitted before split
    WaveSummary second;  // admitted on or after split
    std::size_t excluded_ongoing = 0;
};

// Splits by first event. With complete_only (the default) ongoing cases are
// set aside first and reported in excluded_ongoing.
WaveComparison compare_waves(const EventLog& log, Timestamp split, bool complete_only = true);

// One line per wave: "wave 1: 133 cases, 1017 events, mean duration 33d 06h 00m".
std::string wave_table(const WaveComparison& cmp);

}  // namespace pmkit
