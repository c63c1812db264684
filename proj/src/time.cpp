#include "tokenledger/time.hpp"

#include <charconv>
#include <cstdio>

namespace tokenledger {

using namespace std::chrono;

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) {
        return false;
    }
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
}

}  // namespace

Clock system_clock() {
    return [] { return time_point_cast<milliseconds>(std::chrono::system_clock::now()); };
}

Clock fixed_clock(TimePoint at) {
    return [at] { return at; };
}

std::string format_iso8601(TimePoint tp) {
    const auto day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss hms{tp - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
    return buf;
}

std::optional<year_month_day> parse_date(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0;
    int m = 0;
    int d = 0;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return ymd;
}

std::optional<TimePoint> parse_iso8601(std::string_view text) {
    const auto date = parse_date(text);
    if (!date) {
        return std::nullopt;
    }
    TimePoint tp = time_point_cast<milliseconds>(sys_days{*date});
    if (text.size() == 10) {
        return tp;
    }
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
        return std::nullopt;
    }
    int hh = 0;
    int mm = 0;
    int ss = 0;
    if (text.size() < 19 || text[13] != ':' || text[16] != ':' || !read_int(text, 11, 2, hh) ||
        !read_int(text, 14, 2, mm) || !read_int(text, 17, 2, ss)) {
        return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 60) {
        return std::nullopt;
    }
    tp += hours{hh} + minutes{mm} + seconds{ss};

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int millis = 0;
        int digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (digits < 3) {
                millis = millis * 10 + (text[pos] - '0');
            }
            ++digits;
            ++pos;
        }
        if (digits == 0) {
            return std::nullopt;
        }
        for (int i = digits; i < 3; ++i) {
            millis *= 10;
        }
        tp += milliseconds{millis};
    }

    if (pos == text.size()) {
        return tp;
    }
    if ((text[pos] == 'Z' || text[pos] == 'z') && pos + 1 == text.size()) {
        return tp;
    }
    if ((text[pos] == '+' || text[pos] == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
        int oh = 0;
        int om = 0;
        if (!read_int(text, pos + 1, 2, oh) || !read_int(text, pos + 4, 2, om)) {
            return std::nullopt;
        }
        const auto offset = hours{oh} + minutes{om};
        return text[pos] == '+' ? tp - offset : tp + offset;
    }
    return std::nullopt;
}

std::string format_date(year_month_day date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

year_month_day utc_date(TimePoint tp) { return year_month_day{floor<days>(tp)}; }

std::optional<Period> parse_period(std::string_view text) {
    if (text == "7d") return Period::Days7;
    if (text == "30d") return Period::Days30;
    if (text == "90d") return Period::Days90;
    if (text == "all") return Period::All;
    return std::nullopt;
}

std::string_view to_string(Period period) {
    switch (period) {
        case Period::Days7: return "7d";
        case Period::Days30: return "30d";
        case Period::Days90: return "90d";
        case Period::All: return "all";
    }
    return "all";
}

std::optional<TimePoint> period_start(Period period, TimePoint now) {
    switch (period) {
        case Period::Days7: return now - days{7};
        case Period::Days30: return now - days{30};
        case Period::Days90: return now - days{90};
        case Period::All: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace tokenledger
