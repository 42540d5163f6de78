#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pmkit/timeutil.hpp"

namespace pmkit {

enum class AttributeKind { String, Integer, Real, Boolean, Instant };

// Alternative order matches AttributeKind. Construct strings explicitly: a bare
// string literal would select the bool alternative.
using AttributeValue = std::variant<std::string, std::int64_t, double, bool, Timestamp>;
using Attributes = std::map<std::string, AttributeValue, std::less<>>;

AttributeKind kind_of(const AttributeValue& value);
std::string_view kind_name(AttributeKind kind);
std::optional<AttributeKind> parse_kind(std::string_view name);

// Canonical text form: "true"/"false", shortest round-trip reals, ISO-8601 instants.
std::string to_text(const AttributeValue& value);
std::optional<AttributeValue> from_text(std::string_view text, AttributeKind kind);

struct Event {
    std::string activity;
    Timestamp timestamp{};
    Attributes attributes;
    // Unrecognised XES child elements, kept verbatim.
    std::vector<std::string> extra_xml;

    bool operator==(const Event&) const = default;
};

struct Trace {
    std::string case_id;
    std::vector<Event> events;
    // May carry `complete` and `ards` booleans.
    Attributes attributes;
    std::vector<std::string> extra_xml;

    bool operator==(const Trace&) const = default;

    // A trace is ongoing only if it carries complete=false.
    bool is_complete() const;
    std::optional<bool> flag(std::string_view key) const;
    // Last minus first event timestamp; absent for an empty trace.
    std::optional<Duration> duration() const;
};

struct EventLog {
    std::string name;
    std::vector<Trace> traces;
    Attributes attributes;
    std::vector<std::string> extra_xml;

    bool operator==(const EventLog&) const = default;

    std::size_t event_count() const;
};

inline constexpr std::string_view kCompleteKey = "complete";
inline constexpr std::string_view kArdsKey = "ards";

// Throws StructuralError on empty or duplicate case ids, empty activity labels
// or events out of timestamp order.
void check_log(const EventLog& log);

// Stable sort of each trace by timestamp; ties keep input order.
void sort_events(Trace& trace);

struct Variant {
    std::vector<std::string> sequence;
    std::size_t count = 0;
    std::vector<std::string> case_ids;
};

// Sorted by count descending, then by sequence lexicographically.
std::vector<Variant> variants(const EventLog& log);

struct LogStats {
    std::size_t case_count = 0;
    std::size_t event_count = 0;
    std::size_t activity_count = 0;
    std::size_t variant_count = 0;
    std::size_t complete_case_count = 0;
    std::optional<double> mean_events_per_case;
    // Over complete traces only.
    std::optional<Seconds> mean_case_duration;
};

LogStats log_stats(const EventLog& log);

// Sorted distinct activity labels.
std::vector<std::string> activity_alphabet(const EventLog& log);

enum class TimeSide { Before, OnOrAfter };
enum class TimeAnchor { FirstEvent };

// Keeps whole traces whose anchor event falls on the requested side of split.
// Empty traces have no anchor and are kept on the OnOrAfter side only, so the
// two sides always partition the log.
EventLog filter_by_time(const EventLog& log, Timestamp split, TimeSide side,
                        TimeAnchor anchor = TimeAnchor::FirstEvent);

EventLog complete_cases(const EventLog& log);

// Removes events whose activity is in `labels`.
EventLog strip_activities(const EventLog& log, const std::vector<std::string>& labels);

}  // namespace pmkit
