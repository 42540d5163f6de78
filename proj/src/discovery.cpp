#include "pmkit/discovery.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "json.hpp"

namespace pmkit {

void DurationSummary::add(Duration d) {
    samples_.insert(std::upper_bound(samples_.begin(), samples_.end(), d), d);
    sum_ += d.count();
}

void DurationSummary::merge(const DurationSummary& other) {
    std::vector<Duration> merged;
    merged.reserve(samples_.size() + other.samples_.size());
    std::merge(samples_.begin(), samples_.end(), other.samples_.begin(), other.samples_.end(),
               std::back_inserter(merged));
    samples_ = std::move(merged);
    sum_ += other.sum_;
}

Seconds DurationSummary::mean() const {
    if (samples_.empty()) return Seconds(0);
    return Seconds(Duration(1)) * (static_cast<double>(sum_) / static_cast<double>(samples_.size()));
}

Seconds DurationSummary::median() const {
    if (samples_.empty()) return Seconds(0);
    const std::size_t n = samples_.size();
    if (n % 2 == 1) return Seconds(samples_[n / 2]);
    return (Seconds(samples_[n / 2 - 1]) + Seconds(samples_[n / 2])) / 2.0;
}

Duration DurationSummary::min() const { return samples_.empty() ? Duration(0) : samples_.front(); }
Duration DurationSummary::max() const { return samples_.empty() ? Duration(0) : samples_.back(); }

void Dfg::merge(const Dfg& other) {
    for (const auto& [a, n] : other.nodes) {
        auto& mine = nodes[a];
        mine.frequency += n.frequency;
        mine.case_frequency += n.case_frequency;
    }
    for (const auto& [k, e] : other.edges) {
        auto& mine = edges[k];
        mine.frequency += e.frequency;
        mine.durations.merge(e.durations);
    }
    for (const auto& [a, c] : other.start_activities) start_activities[a] += c;
    for (const auto& [a, c] : other.end_activities) end_activities[a] += c;
}

Dfg discover_dfg(const EventLog& log) {
    Dfg dfg;
    for (const auto& t : log.traces) {
        if (t.events.empty()) continue;
        std::set<std::string_view> in_case;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            const Event& e = t.events[i];
            auto& node = dfg.nodes[e.activity];
            ++node.frequency;
            if (in_case.insert(e.activity).second) ++node.case_frequency;
            if (i + 1 < t.events.size()) {
                const Event& next = t.events[i + 1];
                auto& edge = dfg.edges[{e.activity, next.activity}];
                ++edge.frequency;
                edge.durations.add(next.timestamp - e.timestamp);
            }
        }
        ++dfg.start_activities[t.events.front().activity];
        ++dfg.end_activities[t.events.back().activity];
    }
    return dfg;
}

double Threshold::cutoff(std::size_t max_frequency) const {
    if (kind == Kind::Count) return value;
    return value * static_cast<double>(max_frequency);
}

std::optional<Threshold> parse_threshold(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool percent = text.back() == '%';
    if (percent) text.remove_suffix(1);
    double v{};
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || v < 0 || !std::isfinite(v))
        return std::nullopt;
    if (percent) return Threshold::fraction(v / 100.0);
    bool integral = text.find_first_of(".eE") == std::string_view::npos;
    if (integral) return Threshold::count(static_cast<std::size_t>(v));
    return Threshold::fraction(v);
}

Dfg filter_dfg(const Dfg& dfg, Threshold min_node_frequency, Threshold min_edge_frequency) {
    std::size_t max_node = 0, max_edge = 0;
    for (const auto& [_, n] : dfg.nodes) max_node = std::max(max_node, n.frequency);
    for (const auto& [_, e] : dfg.edges) max_edge = std::max(max_edge, e.frequency);
    const double node_cut = min_node_frequency.cutoff(max_node);
    const double edge_cut = min_edge_frequency.cutoff(max_edge);

    Dfg out;
    for (const auto& [a, n] : dfg.nodes)
        if (static_cast<double>(n.frequency) >= node_cut) out.nodes.emplace(a, n);
    for (const auto& [k, e] : dfg.edges) {
        if (static_cast<double>(e.frequency) < edge_cut) continue;
        if (!out.nodes.count(k.first) || !out.nodes.count(k.second)) continue;
        out.edges.emplace(k, e);
    }
    for (const auto& [a, c] : dfg.start_activities)
        if (out.nodes.count(a)) out.start_activities.emplace(a, c);
    for (const auto& [a, c] : dfg.end_activities)
        if (out.nodes.count(a)) out.end_activities.emplace(a, c);
    return out;
}

namespace {

std::string dot_quoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string dfg_to_dot(const Dfg& dfg, DfgAnnotation annotate) {
    std::string out = "digraph dfg {\n  rankdir=TB;\n  node [shape=box, style=rounded];\n";
    std::set<std::string> activities;
    for (const auto& [a, _] : dfg.nodes) activities.insert(a);
    for (const auto& [k, _] : dfg.edges) {
        activities.insert(k.first);
        activities.insert(k.second);
    }
    std::map<std::string, std::string> ids;
    std::size_t next = 0;
    for (const auto& a : activities) {
        std::string id = "n" + std::to_string(next++);
        ids.emplace(a, id);
        auto node = dfg.nodes.find(a);
        std::string label = node == dfg.nodes.end() ? a : a + " (" + std::to_string(node->second.frequency) + ")";
        std::string extra;
        auto s = dfg.start_activities.find(a);
        auto e = dfg.end_activities.find(a);
        if (s != dfg.start_activities.end()) extra += ", penwidth=2";
        if (e != dfg.end_activities.end()) extra += ", peripheries=2";
        out += "  " + id + " [label=" + dot_quoted(label) + extra + "];\n";
    }
    for (const auto& [k, e] : dfg.edges) {
        const std::string& from = ids.at(k.first);
        const std::string& to = ids.at(k.second);
        std::string label = annotate == DfgAnnotation::Frequency ? std::to_string(e.frequency)
                                                                 : format_duration(e.durations.mean());
        out += "  " + from + " -> " + to + " [label=" + dot_quoted(label) + "];\n";
    }
    out += "}\n";
    return out;
}

std::string dfg_to_json(const Dfg& dfg) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& [a, n] : dfg.nodes)
        j["nodes"].push_back({{"activity", a}, {"frequency", n.frequency}, {"case_frequency", n.case_frequency}});
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [k, e] : dfg.edges) {
        j["edges"].push_back({{"source", k.first},
                              {"target", k.second},
                              {"frequency", e.frequency},
                              {"duration_seconds",
                               {{"mean", e.durations.mean().count()},
                                {"median", e.durations.median().count()},
                                {"min", Seconds(e.durations.min()).count()},
                                {"max", Seconds(e.durations.max()).count()}}}});
    }
    j["start_activities"] = dfg.start_activities;
    j["end_activities"] = dfg.end_activities;
    return j.dump(2) + "\n";
}

}  // namespace pmkit
