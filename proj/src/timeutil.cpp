#include "pmkit/timeutil.hpp"

#include <cmath>
#include <cstdio>

#include "pmkit/error.hpp"

namespace pmkit {
namespace {

using namespace std::chrono;

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    // Reads exactly n decimal digits.
    std::optional<int> digits(int n) {
        if (pos_ + static_cast<std::size_t>(n) > s_.size()) return std::nullopt;
        int v = 0;
        for (int i = 0; i < n; ++i) {
            char c = s_[pos_ + i];
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
        }
        pos_ += n;
        return v;
    }
    // Fractional digits after the decimal point, as milliseconds (truncated).
    std::optional<int> fraction_ms() {
        int ms = 0, n = 0;
        while (!done() && peek() >= '0' && peek() <= '9') {
            if (n < 3) ms = ms * 10 + (peek() - '0');
            ++n;
            ++pos_;
        }
        if (n == 0) return std::nullopt;
        for (int i = n; i < 3; ++i) ms *= 10;
        return ms;
    }
    // Z, +HH:MM, +HHMM or +HH; returns the offset east of UTC in minutes.
    std::optional<int> offset() {
        if (accept('Z') || accept('z')) return 0;
        int sign = 0;
        if (accept('+')) sign = 1;
        else if (accept('-')) sign = -1;
        else return std::nullopt;
        auto hh = digits(2);
        if (!hh) return std::nullopt;
        int mm = 0;
        if (accept(':')) {
            auto m = digits(2);
            if (!m) return std::nullopt;
            mm = *m;
        } else if (!done() && peek() >= '0' && peek() <= '9') {
            auto m = digits(2);
            if (!m) return std::nullopt;
            mm = *m;
        }
        if (*hh > 23 || mm > 59) return std::nullopt;
        return sign * (*hh * 60 + mm);
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

struct Fields {
    int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0, millis = 0;
    int offset_minutes = 0;
};

std::optional<Timestamp> assemble(const Fields& f) {
    year_month_day ymd{year{f.year}, month{static_cast<unsigned>(f.month)},
                       day{static_cast<unsigned>(f.day)}};
    if (!ymd.ok()) return std::nullopt;
    if (f.hour > 23 || f.minute > 59 || f.second > 60) return std::nullopt;
    auto t = sys_days{ymd} + hours{f.hour} + minutes{f.minute} + seconds{f.second} +
             milliseconds{f.millis} - minutes{f.offset_minutes};
    return time_point_cast<Duration>(t);
}

}  // namespace

std::optional<Timestamp> try_parse_iso8601(std::string_view text) {
    Cursor c(text);
    Fields f;
    auto y = c.digits(4);
    if (!y || !c.accept('-')) return std::nullopt;
    auto mo = c.digits(2);
    if (!mo || !c.accept('-')) return std::nullopt;
    auto d = c.digits(2);
    if (!d) return std::nullopt;
    f.year = *y;
    f.month = *mo;
    f.day = *d;
    if (!c.done()) {
        if (!(c.accept('T') || c.accept('t') || c.accept(' '))) return std::nullopt;
        auto h = c.digits(2);
        if (!h || !c.accept(':')) return std::nullopt;
        auto mi = c.digits(2);
        if (!mi) return std::nullopt;
        f.hour = *h;
        f.minute = *mi;
        if (c.accept(':')) {
            auto s = c.digits(2);
            if (!s) return std::nullopt;
            f.second = *s;
            if (c.accept('.') || c.accept(',')) {
                auto ms = c.fraction_ms();
                if (!ms) return std::nullopt;
                f.millis = *ms;
            }
        }
        if (!c.done()) {
            auto off = c.offset();
            if (!off) return std::nullopt;
            f.offset_minutes = *off;
        }
    }
    if (!c.done()) return std::nullopt;
    return assemble(f);
}

Timestamp parse_iso8601(std::string_view text) {
    auto t = try_parse_iso8601(text);
    if (!t) throw ParseError("invalid ISO-8601 timestamp '" + std::string(text) + "'");
    return *t;
}

std::optional<Timestamp> try_parse_timestamp(std::string_view text, std::string_view format) {
    if (format.empty() || format == "iso8601") return try_parse_iso8601(text);
    Cursor c(text);
    Fields f;
    for (std::size_t i = 0; i < format.size(); ++i) {
        char ch = format[i];
        if (ch != '%') {
            if (!c.accept(ch)) return std::nullopt;
            continue;
        }
        if (++i >= format.size()) return std::nullopt;
        std::optional<int> v;
        switch (format[i]) {
            case 'Y': v = c.digits(4); if (v) f.year = *v; break;
            case 'm': v = c.digits(2); if (v) f.month = *v; break;
            case 'd': v = c.digits(2); if (v) f.day = *v; break;
            case 'H': v = c.digits(2); if (v) f.hour = *v; break;
            case 'M': v = c.digits(2); if (v) f.minute = *v; break;
            case 'S': v = c.digits(2); if (v) f.second = *v; break;
            case 'f': v = c.fraction_ms(); if (v) f.millis = *v; break;
            case 'z': v = c.offset(); if (v) f.offset_minutes = *v; break;
            case '%': v = c.accept('%') ? std::optional<int>(0) : std::nullopt; break;
            default: return std::nullopt;
        }
        if (!v) return std::nullopt;
    }
    if (!c.done()) return std::nullopt;
    return assemble(f);
}

std::string format_iso8601(Timestamp t) {
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss<Duration> tod{t - day};
    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                          static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                          static_cast<int>(tod.seconds().count()));
    std::string out(buf, static_cast<std::size_t>(n));
    if (auto ms = tod.subseconds().count(); ms != 0) {
        std::snprintf(buf, sizeof buf, ".%03d", static_cast<int>(ms));
        out += buf;
    }
    out += 'Z';
    return out;
}

std::string format_duration(Seconds d) {
    long long total = std::llround(d.count() / 60.0);
    bool negative = total < 0;
    if (negative) total = -total;
    long long dd = total / (24 * 60);
    long long hh = (total / 60) % 24;
    long long mm = total % 60;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%lldd %02lldh %02lldm", negative ? "-" : "", dd, hh, mm);
    return buf;
}

Timestamp floor_day(Timestamp t) { return time_point_cast<Duration>(floor<days>(t)); }

}  // namespace pmkit
