#include "toneforge/timestamp.hpp"

#include <charconv>
#include <cstdio>

namespace toneforge {

namespace {

using namespace std::chrono;

struct Fields {
    int year, month, day, hour, minute, second;
};

Fields split(Timestamp t) {
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(hms.hours().count()),
            static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count())};
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{};
}

std::optional<Timestamp> assemble(int y, int mo, int d, int h, int mi, int s) {
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

}  // namespace

Timestamp system_now() { return floor<seconds>(system_clock::now()); }

std::string format_basic(Timestamp t) {
    const Fields f = split(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02dZ", f.year, f.month, f.day, f.hour, f.minute, f.second);
    return buf;
}

std::string format_extended(Timestamp t) {
    const Fields f = split(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", f.year, f.month, f.day, f.hour, f.minute,
                  f.second);
    return buf;
}

std::optional<Timestamp> parse_basic(std::string_view s) {
    if (s.size() != 16 || s[8] != 'T' || s[15] != 'Z') return std::nullopt;
    int y, mo, d, h, mi, sec;
    if (!read_int(s, 0, 4, y) || !read_int(s, 4, 2, mo) || !read_int(s, 6, 2, d) || !read_int(s, 9, 2, h) ||
        !read_int(s, 11, 2, mi) || !read_int(s, 13, 2, sec))
        return std::nullopt;
    return assemble(y, mo, d, h, mi, sec);
}

std::optional<Timestamp> parse_extended(std::string_view s) {
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' ||
        s[19] != 'Z')
        return std::nullopt;
    int y, mo, d, h, mi, sec;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, h) ||
        !read_int(s, 14, 2, mi) || !read_int(s, 17, 2, sec))
        return std::nullopt;
    return assemble(y, mo, d, h, mi, sec);
}

}  // namespace toneforge
