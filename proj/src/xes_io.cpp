#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pmkit/error.hpp"
#include "pmkit/log_io.hpp"
#include "pmkit/xml.hpp"

namespace pmkit {
namespace {

constexpr std::string_view kNameKey = "concept:name";
constexpr std::string_view kTimeKey = "time:timestamp";

std::optional<AttributeKind> element_kind(std::string_view tag) {
    if (tag == "string") return AttributeKind::String;
    if (tag == "date") return AttributeKind::Instant;
    if (tag == "int") return AttributeKind::Integer;
    if (tag == "float") return AttributeKind::Real;
    if (tag == "boolean") return AttributeKind::Boolean;
    return std::nullopt;
}

class XesReader {
public:
    XesReader(const xml::Document& doc, std::vector<std::string>* warnings) : doc_(doc), warnings_(warnings) {}

    EventLog read() {
        const xml::Element& root = doc_.root();
        if (root.name != "log") fail(root, "root element must be <log>, found <" + root.name + ">");
        EventLog log;
        std::unordered_set<std::string> ids;
        std::vector<std::size_t> unnamed;
        for (const auto& child : root.children) {
            if (child.name == "trace") {
                log.traces.push_back(read_trace(child, unnamed, log.traces.size()));
                const std::string& id = log.traces.back().case_id;
                if (!id.empty() && !ids.insert(id).second) fail(child, "duplicate case id '" + id + "'");
            } else if (child.name == "extension" && is_builtin_extension(child)) {
                // Concept and Time are implied by the data model and always written back.
            } else if (auto value = simple_attribute(child)) {
                if (value->first == kNameKey && std::holds_alternative<std::string>(value->second))
                    log.name = std::get<std::string>(value->second);
                else
                    log.attributes.insert_or_assign(value->first, std::move(value->second));
            } else {
                log.extra_xml.emplace_back(doc_.raw(child));
            }
        }
        for (std::size_t idx : unnamed) {
            std::string id = "trace_" + std::to_string(idx);
            while (!ids.insert(id).second) id += "_";
            log.traces[idx].case_id = id;
            if (warnings_) warnings_->push_back("trace " + std::to_string(idx) + " has no concept:name; assigned '" + id + "'");
        }
        return log;
    }

private:
    [[noreturn]] void fail(const xml::Element& at, const std::string& what) const {
        auto loc = doc_.locate(at.begin);
        throw ParseError(what, loc.line, loc.column);
    }

    static bool is_builtin_extension(const xml::Element& e) {
        const std::string* prefix = e.attribute("prefix");
        return prefix && (*prefix == "concept" || *prefix == "time") && e.children.empty();
    }

    // Flat typed attribute (no nested children); nullopt for anything else.
    std::optional<std::pair<std::string, AttributeValue>> simple_attribute(const xml::Element& e) const {
        auto kind = element_kind(e.name);
        if (!kind || !e.children.empty()) return std::nullopt;
        const std::string* key = e.attribute("key");
        const std::string* value = e.attribute("value");
        if (!key) fail(e, "<" + e.name + "> attribute without 'key'");
        if (!value) fail(e, "<" + e.name + " key=\"" + *key + "\"> without 'value'");
        auto parsed = from_text(*value, *kind);
        if (!parsed) fail(e, "invalid " + e.name + " value '" + *value + "' for key '" + *key + "'");
        return std::make_pair(*key, std::move(*parsed));
    }

    Trace read_trace(const xml::Element& el, std::vector<std::size_t>& unnamed, std::size_t index) const {
        Trace t;
        bool named = false;
        for (const auto& child : el.children) {
            if (child.name == "event") {
                t.events.push_back(read_event(child));
            } else if (auto value = simple_attribute(child)) {
                if (value->first == kNameKey && std::holds_alternative<std::string>(value->second)) {
                    t.case_id = std::get<std::string>(value->second);
                    named = true;
                } else {
                    t.attributes.insert_or_assign(value->first, std::move(value->second));
                }
            } else {
                t.extra_xml.emplace_back(doc_.raw(child));
            }
        }
        if (!named || t.case_id.empty()) {
            t.case_id.clear();
            unnamed.push_back(index);
        }
        sort_events(t);
        return t;
    }

    Event read_event(const xml::Element& el) const {
        Event ev;
        bool has_time = false;
        for (const auto& child : el.children) {
            if (auto value = simple_attribute(child)) {
                if (value->first == kNameKey && std::holds_alternative<std::string>(value->second)) {
                    ev.activity = std::get<std::string>(value->second);
                } else if (value->first == kTimeKey && std::holds_alternative<Timestamp>(value->second)) {
                    ev.timestamp = std::get<Timestamp>(value->second);
                    has_time = true;
                } else {
                    ev.attributes.insert_or_assign(value->first, std::move(value->second));
                }
            } else {
                ev.extra_xml.emplace_back(doc_.raw(child));
            }
        }
        if (ev.activity.empty()) fail(el, "event without concept:name");
        if (!has_time) fail(el, "event without time:timestamp");
        return ev;
    }

    const xml::Document& doc_;
    std::vector<std::string>* warnings_;
};

void write_attribute(std::string& out, std::string_view indent, std::string_view key, const AttributeValue& v) {
    out += indent;
    out += '<';
    out += kind_name(kind_of(v));
    out += " key=\"";
    out += xml::escape(key);
    out += "\" value=\"";
    out += xml::escape(to_text(v));
    out += "\"/>\n";
}

void write_block(std::string& out, std::string_view indent, const Attributes& attrs,
                 const std::vector<std::string>& extra) {
    for (const auto& [k, v] : attrs) write_attribute(out, indent, k, v);
    for (const auto& raw : extra) {
        out += indent;
        out += raw;
        out += '\n';
    }
}

}  // namespace

EventLog parse_xes(std::string_view text, std::vector<std::string>* warnings) {
    xml::Document doc{std::string(text)};
    return XesReader(doc, warnings).read();
}

std::string write_xes(const EventLog& log) {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<log xes.version=\"1849-2016\" xmlns=\"http://www.xes-standard.org/\">\n";
    out += "\t<extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
    out += "\t<extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
    for (const auto& raw : log.extra_xml) {
        out += '\t';
        out += raw;
        out += '\n';
    }
    if (!log.name.empty()) write_attribute(out, "\t", kNameKey, AttributeValue{log.name});
    for (const auto& [k, v] : log.attributes) write_attribute(out, "\t", k, v);
    for (const auto& t : log.traces) {
        out += "\t<trace>\n";
        write_attribute(out, "\t\t", kNameKey, AttributeValue{t.case_id});
        write_block(out, "\t\t", t.attributes, t.extra_xml);
        for (const auto& e : t.events) {
            out += "\t\t<event>\n";
            write_attribute(out, "\t\t\t", kNameKey, AttributeValue{e.activity});
            write_attribute(out, "\t\t\t", kTimeKey, AttributeValue{e.timestamp});
            write_block(out, "\t\t\t", e.attributes, e.extra_xml);
            out += "\t\t</event>\n";
        }
        out += "\t</trace>\n";
    }
    out += "</log>\n";
    return out;
}

LogFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".csv") return LogFormat::Csv;
    if (ext == ".xes") return LogFormat::Xes;
    throw InvalidArgument("cannot infer log format from '" + path.string() + "' (expected .csv or .xes)");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace pmkit
