#include <algorithm>
#include <set>
#include <unordered_map>

#include "pmkit/error.hpp"
#include "pmkit/log_io.hpp"

namespace pmkit {
namespace {

struct Cell {
    std::string value;
    bool quoted = false;
};

struct Record {
    std::vector<Cell> cells;
    std::size_t line = 0;  // line on which the record starts
};

class CsvReader {
public:
    explicit CsvReader(std::string_view text) : s_(text) {}

    // False at end of input. Blank lines are skipped.
    bool next(Record& rec) {
        for (;;) {
            if (pos_ >= s_.size()) return false;
            if (s_[pos_] == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            if (s_[pos_] == '\r' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') {
                pos_ += 2;
                ++line_;
                continue;
            }
            break;
        }
        rec.cells.clear();
        rec.line = line_;
        for (;;) {
            Cell cell;
            if (pos_ < s_.size() && s_[pos_] == '"') {
                cell.quoted = true;
                std::size_t open_line = line_;
                ++pos_;
                for (;;) {
                    if (pos_ >= s_.size()) throw ParseError("unterminated quoted field", open_line);
                    char c = s_[pos_++];
                    if (c == '"') {
                        if (pos_ < s_.size() && s_[pos_] == '"') {
                            cell.value += '"';
                            ++pos_;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line_;
                        cell.value += c;
                    }
                }
                if (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '\n' && s_[pos_] != '\r')
                    throw ParseError("unexpected character after closing quote", line_);
            } else {
                while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '\n' && s_[pos_] != '\r') {
                    if (s_[pos_] == '"') throw ParseError("quote inside unquoted field", line_);
                    cell.value += s_[pos_++];
                }
            }
            rec.cells.push_back(std::move(cell));
            if (pos_ >= s_.size()) return true;
            char c = s_[pos_];
            if (c == ',') {
                ++pos_;
                continue;
            }
            if (c == '\r') ++pos_;
            if (pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
            ++line_;
            return true;
        }
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

std::size_t find_column(const std::vector<Cell>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i].value == name) return i;
    throw StructuralError("missing CSV column '" + name + "'");
}

bool needs_quotes(std::string_view v) {
    return v.empty() || v.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_cell(std::string& out, std::string_view v, bool force_quotes = false) {
    if (!force_quotes && !needs_quotes(v)) {
        out += v;
        return;
    }
    out += '"';
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void append_value(std::string& out, const AttributeValue* v) {
    if (v == nullptr) return;  // absent: unquoted empty cell
    append_cell(out, to_text(*v), std::holds_alternative<std::string>(*v));
}

}  // namespace

EventLog parse_csv(std::string_view text, const CsvMapping& mapping) {
    EventLog log;
    CsvReader reader(text);
    Record header;
    if (!reader.next(header)) return log;

    const std::size_t case_col = find_column(header.cells, mapping.case_column);
    const std::size_t act_col = find_column(header.cells, mapping.activity_column);
    const std::size_t ts_col = find_column(header.cells, mapping.timestamp_column);

    struct AttrColumn {
        std::size_t index;
        std::string key;
        bool trace_level;
        AttributeKind kind;
    };
    std::vector<AttrColumn> attr_cols;
    for (std::size_t i = 0; i < header.cells.size(); ++i) {
        if (i == case_col || i == act_col || i == ts_col) continue;
        const std::string& name = header.cells[i].value;
        AttrColumn col{i, name, false, AttributeKind::String};
        if (auto it = mapping.attribute_types.find(name); it != mapping.attribute_types.end()) col.kind = it->second;
        if (!mapping.case_prefix.empty() && name.starts_with(mapping.case_prefix)) {
            col.trace_level = true;
            col.key = name.substr(mapping.case_prefix.size());
        }
        attr_cols.push_back(std::move(col));
    }

    std::unordered_map<std::string, std::size_t> index_of;
    Record rec;
    std::size_t row = 0;
    while (reader.next(rec)) {
        ++row;
        auto where = [&] { return "row " + std::to_string(row) + ": "; };
        if (rec.cells.size() != header.cells.size())
            throw ParseError(where() + "expected " + std::to_string(header.cells.size()) + " fields, found " +
                                 std::to_string(rec.cells.size()),
                             rec.line);
        const std::string& case_id = rec.cells[case_col].value;
        if (case_id.empty()) throw ParseError(where() + "empty case id", rec.line);
        Event ev;
        ev.activity = rec.cells[act_col].value;
        if (ev.activity.empty()) throw ParseError(where() + "empty activity", rec.line);
        const std::string& ts = rec.cells[ts_col].value;
        auto t = try_parse_timestamp(ts, mapping.timestamp_format);
        if (!t) throw ParseError(where() + "unparseable timestamp '" + ts + "'", rec.line);
        ev.timestamp = *t;

        auto [it, inserted] = index_of.try_emplace(case_id, log.traces.size());
        if (inserted) {
            log.traces.emplace_back();
            log.traces.back().case_id = case_id;
        }
        Trace& trace = log.traces[it->second];

        for (const auto& col : attr_cols) {
            const Cell& cell = rec.cells[col.index];
            if (cell.value.empty() && !cell.quoted) continue;
            auto value = from_text(cell.value, col.kind);
            if (!value)
                throw ParseError(where() + "column '" + header.cells[col.index].value + "' value '" + cell.value +
                                     "' is not a valid " + std::string(kind_name(col.kind)),
                                 rec.line);
            if (col.trace_level) trace.attributes.try_emplace(col.key, std::move(*value));
            else ev.attributes.emplace(col.key, std::move(*value));
        }
        trace.events.push_back(std::move(ev));
    }
    for (auto& t : log.traces) sort_events(t);
    return log;
}

std::string write_csv(const EventLog& log) {
    std::set<std::string> trace_keys, event_keys;
    for (const auto& t : log.traces) {
        for (const auto& [k, _] : t.attributes) trace_keys.insert(k);
        for (const auto& e : t.events)
            for (const auto& [k, _] : e.attributes) event_keys.insert(k);
    }
    std::string out = "case_id,activity,timestamp";
    for (const auto& k : trace_keys) {
        out += ',';
        append_cell(out, "case:" + k);
    }
    for (const auto& k : event_keys) {
        out += ',';
        append_cell(out, k);
    }
    out += '\n';
    for (const auto& t : log.traces) {
        for (const auto& e : t.events) {
            append_cell(out, t.case_id);
            out += ',';
            append_cell(out, e.activity);
            out += ',';
            out += format_iso8601(e.timestamp);
            for (const auto& k : trace_keys) {
                out += ',';
                auto it = t.attributes.find(k);
                append_value(out, it == t.attributes.end() ? nullptr : &it->second);
            }
            for (const auto& k : event_keys) {
                out += ',';
                auto it = e.attributes.find(k);
                append_value(out, it == e.attributes.end() ? nullptr : &it->second);
            }
            out += '\n';
        }
    }
    return out;
}

std::map<std::string, AttributeKind, std::less<>> csv_attribute_types(const EventLog& log) {
    std::map<std::string, AttributeKind, std::less<>> types;
    for (const auto& t : log.traces) {
        for (const auto& [k, v] : t.attributes) types.emplace("case:" + k, kind_of(v));
        for (const auto& e : t.events)
            for (const auto& [k, v] : e.attributes) types.emplace(k, kind_of(v));
    }
    return types;
}

}  // namespace pmkit
