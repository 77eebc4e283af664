#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace tai {

// All persisted timestamps have one-second resolution in UTC.
using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp t);

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)". Fractional seconds
// are truncated. Throws Error(ParseError) on malformed input.
Timestamp parse_rfc3339(std::string_view text);

}  // namespace tai
