#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sociocast {

/// Whole seconds since the Unix epoch, UTC.
using EpochSeconds = std::int64_t;

inline constexpr EpochSeconds kSecondsPerHour = 3600;
inline constexpr EpochSeconds kSecondsPerDay = 86400;

/// Parses an ISO-8601 timestamp into fractional seconds since the epoch.
///
/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z`
/// or `+HH:MM` / `-HH:MM` offset (a space may replace the `T`). Throws
/// DataError on anything else.
double parse_iso8601(std::string_view text);

/// Formats whole seconds as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(EpochSeconds t);

/// Midnight UTC of the given `YYYY-MM-DD` date.
EpochSeconds parse_date(std::string_view text);

} // namespace sociocast
