#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pmkit/event_log.hpp"

namespace pmkit {

// Exact summary of directly-follows gaps. Keeps every sample so the median is
// exact; merge() is associative and commutative.
class DurationSummary {
public:
    void add(Duration d);
    void merge(const DurationSummary& other);

    std::size_t count() const { return samples_.size(); }
    Seconds mean() const;
    Seconds median() const;
    Duration min() const;
    Duration max() const;
    // Samples in non-decreasing order.
    const std::vector<Duration>& samples() const { return samples_; }

    bool operator==(const DurationSummary&) const = default;

private:
    std::vector<Duration> samples_;
    Duration::rep sum_ = 0;
};

struct DfgNode {
    std::size_t frequency = 0;       // occurrences
    std::size_t case_frequency = 0;  // traces containing the activity

    bool operator==(const DfgNode&) const = default;
};

struct DfgEdge {
    std::size_t frequency = 0;
    DurationSummary durations;  // target.timestamp - source.timestamp

    bool operator==(const DfgEdge&) const = default;
};

using ActivityPair = std::pair<std::string, std::string>;

struct Dfg {
    std::map<std::string, DfgNode> nodes;
    std::map<ActivityPair, DfgEdge> edges;
    std::map<std::string, std::size_t> start_activities;
    std::map<std::string, std::size_t> end_activities;

    bool operator==(const Dfg&) const = default;

    // Adds the counts of `other`; used to combine per-partition graphs.
    void merge(const Dfg& other);
};

Dfg discover_dfg(const EventLog& log);

// A threshold is either an absolute count or a fraction of the largest
// frequency of the kind being filtered (nodes or edges).
struct Threshold {
    enum class Kind { Count, Fraction };
    Kind kind = Kind::Count;
    double value = 0.0;

    static Threshold count(std::size_t n) { return {Kind::Count, static_cast<double>(n)}; }
    static Threshold fraction(double f) { return {Kind::Fraction, f}; }
    // Minimum frequency a node/edge needs to survive, given the current maximum.
    double cutoff(std::size_t max_frequency) const;
};

// Parses "12" as a count and "0.05" or "5%" as a fraction.
std::optional<Threshold> parse_threshold(std::string_view text);

inline Threshold default_min_node_frequency() { return Threshold::count(0); }
inline Threshold default_min_edge_frequency() { return Threshold::fraction(0.05); }

// Drops nodes and edges whose frequency is below the threshold, edges touching
// a dropped node, and start/end entries of dropped activities.
Dfg filter_dfg(const Dfg& dfg, Threshold min_node_frequency, Threshold min_edge_frequency);

enum class DfgAnnotation { Frequency, MeanDuration };

// Deterministic Graphviz text; nodes sorted by label, durations as "Nd HHh MMm".
std::string dfg_to_dot(const Dfg& dfg, DfgAnnotation annotate = DfgAnnotation::Frequency);

// JSON export with durations in seconds.
std::string dfg_to_json(const Dfg& dfg);

}  // namespace pmkit
