#include "sociocast/core/time.hpp"

#include "sociocast/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace sociocast {

namespace {

EpochSeconds days_since_epoch(int y, unsigned m, unsigned d, std::string_view text) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw DataError("invalid calendar date in '" + std::string(text) + "'");
    }
    return sys_days{ymd}.time_since_epoch().count();
}

[[noreturn]] void bad(std::string_view text) {
    throw DataError("unparseable ISO-8601 timestamp '" + std::string(text) + "'");
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > s.size()) {
        return false;
    }
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') {
            return false;
        }
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

} // namespace

double parse_iso8601(std::string_view text) {
    int y = 0;
    int mo = 0;
    int d = 0;
    if (!read_digits(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_digits(text, 5, 2, mo) ||
        text[7] != '-' || !read_digits(text, 8, 2, d)) {
        bad(text);
    }
    const EpochSeconds day_start =
        days_since_epoch(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), text) * kSecondsPerDay;
    if (text.size() == 10) {
        return static_cast<double>(day_start);
    }
    if (text[10] != 'T' && text[10] != ' ') {
        bad(text);
    }
    int hh = 0;
    int mm = 0;
    int ss = 0;
    if (!read_digits(text, 11, 2, hh) || text.size() < 16 || text[13] != ':' || !read_digits(text, 14, 2, mm)) {
        bad(text);
    }
    std::size_t pos = 16;
    double frac = 0.0;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_digits(text, pos + 1, 2, ss)) {
            bad(text);
        }
        pos += 3;
        if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
            ++pos;
            double scale = 0.1;
            const std::size_t first = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                frac += scale * (text[pos] - '0');
                scale /= 10.0;
                ++pos;
            }
            if (pos == first) {
                bad(text);
            }
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) {
        bad(text);
    }
    EpochSeconds offset = 0;
    if (pos < text.size()) {
        const char sign = text[pos];
        if (sign == 'Z' || sign == 'z') {
            ++pos;
        } else if (sign == '+' || sign == '-') {
            int oh = 0;
            int om = 0;
            if (!read_digits(text, pos + 1, 2, oh)) {
                bad(text);
            }
            std::size_t next = pos + 3;
            if (next < text.size() && text[next] == ':') {
                ++next;
            }
            if (!read_digits(text, next, 2, om)) {
                bad(text);
            }
            offset = (oh * 3600 + om * 60) * (sign == '+' ? 1 : -1);
            pos = next + 2;
        } else {
            bad(text);
        }
    }
    if (pos != text.size()) {
        bad(text);
    }
    const EpochSeconds whole = day_start + hh * 3600 + mm * 60 + ss - offset;
    return static_cast<double>(whole) + frac;
}

std::string format_iso8601(EpochSeconds t) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{t}};
    const auto day_point = floor<days>(tp);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{tp - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

EpochSeconds parse_date(std::string_view text) {
    if (text.size() != 10) {
        throw DataError("expected YYYY-MM-DD date, got '" + std::string(text) + "'");
    }
    return static_cast<EpochSeconds>(parse_iso8601(text));
}

} // namespace sociocast
