#include "tai/text.hpp"

#include <cstdio>

namespace tai::text {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Length of the well-formed sequence starting at s[pos], or 0 if malformed.
std::size_t sequence_length(std::string_view s, std::size_t pos) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    std::size_t len = 0;
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0 && lead >= 0xC2) len = 2;
    else if ((lead & 0xF0) == 0xE0) len = 3;
    else if ((lead & 0xF8) == 0xF0 && lead <= 0xF4) len = 4;
    else return 0;
    if (pos + len > s.size()) return 0;
    for (std::size_t i = 1; i < len; ++i) {
        if (!is_continuation(static_cast<unsigned char>(s[pos + i]))) return 0;
    }
    return len;
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t len = sequence_length(s, pos);
        if (len == 0) {
            out.push_back(U'�');
            ++pos;
            continue;
        }
        auto lead = static_cast<unsigned char>(s[pos]);
        char32_t cp = len == 1 ? lead : len == 2 ? (lead & 0x1F) : len == 3 ? (lead & 0x0F) : (lead & 0x07);
        for (std::size_t i = 1; i < len; ++i) {
            cp = (cp << 6) | (static_cast<unsigned char>(s[pos + i]) & 0x3F);
        }
        out.push_back(cp);
        pos += len;
    }
    return out;
}

std::string_view prefix_code_points(std::string_view s, std::size_t max_code_points) {
    std::size_t pos = 0;
    for (std::size_t n = 0; n < max_code_points && pos < s.size(); ++n) {
        const std::size_t len = sequence_length(s, pos);
        pos += len == 0 ? 1 : len;
    }
    return s.substr(0, pos);
}

std::string_view prefix_bytes(std::string_view s, std::size_t max_bytes) {
    if (max_bytes >= s.size()) return s;
    std::size_t cut = max_bytes;
    while (cut > 0 && is_continuation(static_cast<unsigned char>(s[cut]))) --cut;
    return s.substr(0, cut);
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace tai::text
