#pragma once

#include "sociocast/core/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sociocast {

/// One parsed line of the JSON Lines event schema.
struct EventRecord {
    double timestamp = 0.0;
    Platform platform = Platform::twitter;
    std::string topic;
    std::string domain;
    std::optional<std::string> user_id;
    std::optional<std::string> action;
};

struct EventParseResult {
    std::vector<EventRecord> records;
    std::size_t malformed = 0;
    std::vector<std::string> warnings;
};

/// Reads `{"timestamp": ISO-8601, "platform", "topic", "domain", ...}` lines.
/// Malformed lines are skipped with a warning; in strict mode the first one
/// throws DataError. Blank lines are ignored.
EventParseResult read_event_lines(std::istream& in, bool strict, const std::string& source = "<stream>");

void write_event_lines(std::ostream& out, const std::vector<EventRecord>& records);

/// Shortest round-trip decimal rendering; used for every CSV number.
std::string format_number(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);
/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

/// `bin_start_iso,count`
void write_series_csv(std::ostream& out, const BinnedSeries& series);
void write_series_csv(const std::filesystem::path& path, const BinnedSeries& series);
BinnedSeries read_series_csv(std::istream& in);
BinnedSeries read_series_csv(const std::filesystem::path& path);

/// Writes `contents` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

} // namespace sociocast
