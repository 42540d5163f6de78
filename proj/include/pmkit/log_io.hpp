#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pmkit/event_log.hpp"

namespace pmkit {

// Column mapping for CSV ingestion. Columns other than the three core ones
// become attributes: names starting with `case_prefix` are trace attributes
// (prefix stripped), the rest are event attributes. Every attribute column is
// read as a string unless `attribute_types` names it.
struct CsvMapping {
    std::string case_column = "case_id";
    std::string activity_column = "activity";
    std::string timestamp_column = "timestamp";
    // Empty selects ISO-8601; otherwise see try_parse_timestamp.
    std::string timestamp_format;
    std::string case_prefix = "case:";
    std::map<std::string, AttributeKind, std::less<>> attribute_types;
};

// RFC-4180 input. An unquoted empty cell means "attribute absent"; a quoted
// empty cell is the empty string. Empty input yields an empty log.
EventLog parse_csv(std::string_view text, const CsvMapping& mapping = {});

// One row per event with header `case_id,activity,timestamp`, then sorted
// `case:` columns, then sorted event attribute columns. Traces without events
// and the log name have no CSV representation.
std::string write_csv(const EventLog& log);

// The attribute_types a reader needs to restore the typed attributes of `log`
// from write_csv output.
std::map<std::string, AttributeKind, std::less<>> csv_attribute_types(const EventLog& log);

// XES subset: <log>/<trace>/<event> with string/date/int/float/boolean
// attributes. Other elements (extensions, globals, classifiers, lists, nested
// attributes) are preserved verbatim. A trace without concept:name gets a
// synthetic id and a warning.
EventLog parse_xes(std::string_view text, std::vector<std::string>* warnings = nullptr);
std::string write_xes(const EventLog& log);

enum class LogFormat { Csv, Xes };

// By extension (.csv / .xes); throws InvalidArgument otherwise.
LogFormat format_from_path(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace pmkit
