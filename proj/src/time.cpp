#include "tai/time.hpp"

#include <cstdio>

#include "tai/error.hpp"

namespace tai {

namespace {

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
    if (pos + count > text.size()) {
        fail(ErrorCode::ParseError, "truncated timestamp: " + std::string(text));
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            fail(ErrorCode::ParseError, "bad digit in timestamp: " + std::string(text));
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char want) {
    if (pos >= text.size() || text[pos] != want) {
        fail(ErrorCode::ParseError, "malformed timestamp: " + std::string(text));
    }
}

}  // namespace

Timestamp system_now() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    const int y = read_digits(text, 0, 4);
    expect_char(text, 4, '-');
    const int mo = read_digits(text, 5, 2);
    expect_char(text, 7, '-');
    const int d = read_digits(text, 8, 2);
    if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
        fail(ErrorCode::ParseError, "malformed timestamp: " + std::string(text));
    }
    const int h = read_digits(text, 11, 2);
    expect_char(text, 13, ':');
    const int mi = read_digits(text, 14, 2);
    expect_char(text, 16, ':');
    const int s = read_digits(text, 17, 2);

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == start) fail(ErrorCode::ParseError, "empty fraction in timestamp: " + std::string(text));
    }
    if (pos >= text.size()) fail(ErrorCode::ParseError, "missing zone in timestamp: " + std::string(text));

    seconds offset{0};
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '-' ? -1 : 1;
        const int oh = read_digits(text, pos + 1, 2);
        expect_char(text, pos + 3, ':');
        const int om = read_digits(text, pos + 4, 2);
        offset = sign * (hours{oh} + minutes{om});
        pos += 6;
    } else {
        fail(ErrorCode::ParseError, "bad zone in timestamp: " + std::string(text));
    }
    if (pos != text.size()) fail(ErrorCode::ParseError, "trailing data in timestamp: " + std::string(text));

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
        fail(ErrorCode::ParseError, "out-of-range timestamp: " + std::string(text));
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - offset;
}

}  // namespace tai
