#include "sociocast/core/io.hpp"

#include "sociocast/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sociocast {

namespace {

std::string required_string(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw DataError(std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->is_string() ? it->get<std::string>() : it->dump();
}

} // namespace

EventParseResult read_event_lines(std::istream& in, bool strict, const std::string& source) {
    EventParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto obj = nlohmann::json::parse(line);
            if (!obj.is_object()) {
                throw DataError("line is not a JSON object");
            }
            EventRecord rec;
            rec.timestamp = parse_iso8601(required_string(obj, "timestamp"));
            rec.platform = parse_platform(required_string(obj, "platform"));
            rec.topic = required_string(obj, "topic");
            rec.domain = required_string(obj, "domain");
            rec.user_id = optional_string(obj, "user_id");
            rec.action = optional_string(obj, "action");
            result.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            const std::string msg = source + ":" + std::to_string(line_no) + ": " + e.what();
            if (strict) {
                throw DataError(msg);
            }
            ++result.malformed;
            result.warnings.push_back(msg);
        }
    }
    return result;
}

void write_event_lines(std::ostream& out, const std::vector<EventRecord>& records) {
    for (const auto& rec : records) {
        nlohmann::json obj;
        const double whole = std::floor(rec.timestamp);
        std::string ts = format_iso8601(static_cast<EpochSeconds>(whole));
        const double frac = rec.timestamp - whole;
        if (frac > 0.0) {
            // Microsecond resolution keeps the text stable and lossless enough for hourly work.
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.6f", frac);
            ts.insert(ts.size() - 1, buf + 1);
        }
        obj["timestamp"] = ts;
        obj["platform"] = std::string(to_string(rec.platform));
        obj["topic"] = rec.topic;
        obj["domain"] = rec.domain;
        if (rec.user_id) {
            obj["user_id"] = *rec.user_id;
        }
        if (rec.action) {
            obj["action"] = *rec.action;
        }
        out << obj.dump() << '\n';
    }
}

std::string format_number(double v) {
    if (v == 0.0) {
        return "0";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) {
        throw DataError("unterminated quoted CSV field");
    }
    return fields;
}

void write_series_csv(std::ostream& out, const BinnedSeries& series) {
    out << "bin_start_iso,count\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << format_iso8601(series.bin_start(k)) << ',' << format_number(series[k]) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const BinnedSeries& series) {
    std::ostringstream out;
    write_series_csv(out, series);
    write_text_file(path, out.str());
}

BinnedSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("bin_start_iso,count", 0) != 0) {
        throw DataError("series CSV must start with header 'bin_start_iso,count'");
    }
    std::vector<EpochSeconds> starts;
    std::vector<double> counts;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError("malformed series row '" + line + "'");
        }
        starts.push_back(static_cast<EpochSeconds>(parse_iso8601(line.substr(0, comma))));
        double value = 0.0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        const auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc{} || res.ptr != last) {
            throw DataError("malformed count in row '" + line + "'");
        }
        counts.push_back(value);
    }
    if (starts.empty()) {
        throw DataError("series CSV has no rows");
    }
    const EpochSeconds width = starts.size() > 1 ? starts[1] - starts[0] : kSecondsPerHour;
    for (std::size_t k = 1; k < starts.size(); ++k) {
        if (starts[k] - starts[k - 1] != width) {
            throw AlignmentError("series CSV rows are not evenly spaced");
        }
    }
    return BinnedSeries(starts.front(), width, std::move(counts));
}

BinnedSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return read_series_csv(in);
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << contents;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace sociocast
