#include "cpv/common.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace cpv {

std::int64_t parse_iso8601_utc(std::string_view text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    char sep = 0;
    std::string s = trim(text);
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec);
    if (n < 7 || (sep != 'T' && sep != 't' && sep != ' '))
        throw DataError("invalid ISO-8601 timestamp: '" + s + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        sec < 0.0 || sec >= 61.0)
        throw DataError("timestamp field out of range: '" + s + "'");

    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw DataError("invalid calendar date: '" + s + "'");
    sys_days days{ymd};
    std::int64_t epoch = static_cast<std::int64_t>(days.time_since_epoch().count()) * 86400;
    epoch += h * 3600 + mi * 60;
    epoch += static_cast<std::int64_t>(sec);
    return epoch;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    std::int64_t day_count = epoch_seconds / 86400;
    std::int64_t within = epoch_seconds % 86400;
    if (within < 0) {
        within += 86400;
        day_count -= 1;
    }
    year_month_day ymd{sys_days{days{day_count}}};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(within / 3600),
                  static_cast<int>((within / 60) % 60), static_cast<int>(within % 60));
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view token, const std::string& what) {
    std::string s = trim(token);
    if (s.empty()) throw DataError("empty numeric field for " + what);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw DataError("unparseable numeric '" + s + "' for " + what);
    return v;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace cpv
