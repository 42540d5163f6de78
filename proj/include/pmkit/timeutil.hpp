#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace pmkit {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;
// Averages are kept in fractional seconds.
using Seconds = std::chrono::duration<double>;

// ISO-8601 instant: YYYY-MM-DD[(T| )HH:MM[:SS[.fff]][Z|+HH:MM|+HHMM]].
// A missing offset is read as UTC. Sub-millisecond digits are truncated.
std::optional<Timestamp> try_parse_iso8601(std::string_view text);
Timestamp parse_iso8601(std::string_view text);

// strptime-like parsing with %Y %m %d %H %M %S %f %z %%. An empty format or
// "iso8601" selects parse_iso8601.
std::optional<Timestamp> try_parse_timestamp(std::string_view text, std::string_view format);

// UTC rendering, "2020-04-13T08:30:00Z"; milliseconds are appended only when non-zero.
std::string format_iso8601(Timestamp t);

// "33d 06h 00m", rounded to the nearest minute.
std::string format_duration(Seconds d);
inline std::string format_duration(Duration d) { return format_duration(Seconds(d)); }

// Midnight UTC of the day containing t.
Timestamp floor_day(Timestamp t);

}  // namespace pmkit
