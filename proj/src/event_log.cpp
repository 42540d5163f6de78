#include "pmkit/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "pmkit/error.hpp"

namespace pmkit {

AttributeKind kind_of(const AttributeValue& value) { return static_cast<AttributeKind>(value.index()); }

std::string_view kind_name(AttributeKind kind) {
    switch (kind) {
        case AttributeKind::String: return "string";
        case AttributeKind::Integer: return "int";
        case AttributeKind::Real: return "float";
        case AttributeKind::Boolean: return "boolean";
        case AttributeKind::Instant: return "date";
    }
    return "string";
}

std::optional<AttributeKind> parse_kind(std::string_view name) {
    if (name == "string") return AttributeKind::String;
    if (name == "int" || name == "integer") return AttributeKind::Integer;
    if (name == "float" || name == "real") return AttributeKind::Real;
    if (name == "boolean" || name == "bool") return AttributeKind::Boolean;
    if (name == "date" || name == "instant") return AttributeKind::Instant;
    return std::nullopt;
}

std::string to_text(const AttributeValue& value) {
    struct Visitor {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, d);
            return std::string(buf, res.ptr);
        }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(Timestamp t) const { return format_iso8601(t); }
    };
    return std::visit(Visitor{}, value);
}

std::optional<AttributeValue> from_text(std::string_view text, AttributeKind kind) {
    switch (kind) {
        case AttributeKind::String:
            return AttributeValue{std::string(text)};
        case AttributeKind::Integer: {
            std::int64_t v{};
            auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
            return AttributeValue{v};
        }
        case AttributeKind::Real: {
            double v{};
            auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
            return AttributeValue{v};
        }
        case AttributeKind::Boolean:
            if (text == "true" || text == "TRUE" || text == "True" || text == "1") return AttributeValue{true};
            if (text == "false" || text == "FALSE" || text == "False" || text == "0") return AttributeValue{false};
            return std::nullopt;
        case AttributeKind::Instant:
            if (auto t = try_parse_iso8601(text)) return AttributeValue{*t};
            return std::nullopt;
    }
    return std::nullopt;
}

bool Trace::is_complete() const { return flag(kCompleteKey).value_or(true); }

std::optional<bool> Trace::flag(std::string_view key) const {
    auto it = attributes.find(key);
    if (it == attributes.end()) return std::nullopt;
    if (const bool* b = std::get_if<bool>(&it->second)) return *b;
    if (const std::string* s = std::get_if<std::string>(&it->second)) {
        if (auto v = from_text(*s, AttributeKind::Boolean)) return std::get<bool>(*v);
    }
    return std::nullopt;
}

std::optional<Duration> Trace::duration() const {
    if (events.empty()) return std::nullopt;
    return events.back().timestamp - events.front().timestamp;
}

std::size_t EventLog::event_count() const {
    std::size_t n = 0;
    for (const auto& t : traces) n += t.events.size();
    return n;
}

void check_log(const EventLog& log) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : log.traces) {
        if (t.case_id.empty()) throw StructuralError("trace with empty case id");
        if (!seen.insert(t.case_id).second) throw StructuralError("duplicate case id '" + t.case_id + "'");
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            if (t.events[i].activity.empty())
                throw StructuralError("case '" + t.case_id + "': event " + std::to_string(i) + " has no activity");
            if (i > 0 && t.events[i].timestamp < t.events[i - 1].timestamp)
                throw StructuralError("case '" + t.case_id + "': events are not sorted by timestamp");
        }
    }
}

void sort_events(Trace& trace) {
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

std::vector<Variant> variants(const EventLog& log) {
    std::map<std::vector<std::string>, Variant> groups;
    for (const auto& t : log.traces) {
        std::vector<std::string> seq;
        seq.reserve(t.events.size());
        for (const auto& e : t.events) seq.push_back(e.activity);
        auto& v = groups[seq];
        if (v.count == 0) v.sequence = std::move(seq);
        ++v.count;
        v.case_ids.push_back(t.case_id);
    }
    std::vector<Variant> out;
    out.reserve(groups.size());
    // std::map already orders by sequence; a stable sort by count keeps that as the tie-break.
    for (auto& [_, v] : groups) out.push_back(std::move(v));
    std::stable_sort(out.begin(), out.end(), [](const Variant& a, const Variant& b) { return a.count > b.count; });
    return out;
}

std::vector<std::string> activity_alphabet(const EventLog& log) {
    std::set<std::string> labels;
    for (const auto& t : log.traces)
        for (const auto& e : t.events) labels.insert(e.activity);
    return {labels.begin(), labels.end()};
}

LogStats log_stats(const EventLog& log) {
    LogStats s;
    s.case_count = log.traces.size();
    s.event_count = log.event_count();
    s.activity_count = activity_alphabet(log).size();
    s.variant_count = variants(log).size();
    double duration_sum = 0.0;
    for (const auto& t : log.traces) {
        if (!t.is_complete()) continue;
        ++s.complete_case_count;
        if (auto d = t.duration()) duration_sum += Seconds(*d).count();
    }
    if (s.case_count > 0)
        s.mean_events_per_case = static_cast<double>(s.event_count) / static_cast<double>(s.case_count);
    if (s.complete_case_count > 0)
        s.mean_case_duration = Seconds(duration_sum / static_cast<double>(s.complete_case_count));
    return s;
}

EventLog filter_by_time(const EventLog& log, Timestamp split, TimeSide side, TimeAnchor) {
    EventLog out;
    out.name = log.name;
    out.attributes = log.attributes;
    out.extra_xml = log.extra_xml;
    for (const auto& t : log.traces) {
        bool before = !t.events.empty() && t.events.front().timestamp < split;
        if (before == (side == TimeSide::Before)) out.traces.push_back(t);
    }
    return out;
}

EventLog complete_cases(const EventLog& log) {
    EventLog out = log;
    std::erase_if(out.traces, [](const Trace& t) { return !t.is_complete(); });
    return out;
}

EventLog strip_activities(const EventLog& log, const std::vector<std::string>& labels) {
    EventLog out = log;
    for (auto& t : out.traces)
        std::erase_if(t.events, [&](const Event& e) {
            return std::find(labels.begin(), labels.end(), e.activity) != labels.end();
        });
    return out;
}

}  // namespace pmkit
