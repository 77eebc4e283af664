#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tai::text {

// Decodes UTF-8; each invalid byte becomes U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);

// Longest prefix of s holding at most max_code_points code points.
std::string_view prefix_code_points(std::string_view s, std::size_t max_code_points);

// Longest prefix of s of at most max_bytes bytes that does not split a code point.
std::string_view prefix_bytes(std::string_view s, std::size_t max_bytes);

std::string_view trim(std::string_view s);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view s);

std::string hex64(std::uint64_t value);

}  // namespace tai::text
