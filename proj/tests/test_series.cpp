#include "sociocast/core/io.hpp"
#include "sociocast/core/series.hpp"
#include "sociocast/core/time.hpp"
#include "sociocast/errors.hpp"
#include "sociocast/hawkes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace sociocast;

namespace {

EpochSeconds at(std::string_view iso) { return static_cast<EpochSeconds>(parse_iso8601(iso)); }

} // namespace

TEST_CASE("ISO-8601 parsing normalizes to UTC") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0.0);
    CHECK(parse_iso8601("2020-02-01T01:00:00Z") == 1580518800.0);
    CHECK(parse_iso8601("2020-02-01 03:00:00+02:00") == 1580518800.0);
    CHECK(parse_iso8601("2020-01-31T20:00:00-05:00") == 1580518800.0);
    CHECK(parse_iso8601("2020-02-01T01:00:00.25Z") == doctest::Approx(1580518800.25));
    CHECK(parse_iso8601("2020-02-01") == 1580515200.0);
    CHECK_THROWS_AS(parse_iso8601("2020-13-01T00:00:00Z"), DataError);
    CHECK_THROWS_AS(parse_iso8601("yesterday"), DataError);
    CHECK(format_iso8601(1580518800) == "2020-02-01T01:00:00Z");
}

TEST_CASE("binning is left-closed and right-open") {
    const EpochSeconds day = at("2020-02-01T00:00:00Z");
    const std::vector<double> ev{double(day + 600), double(day + 3000), double(day + 4800)};
    const BinnedSeries s = bin_events(ev, {day, day + 7200});
    CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{2, 1});

    const std::vector<double> edges{double(day), double(day + 3600), double(day + 7200)};
    const BinnedSeries e = bin_events(edges, {day, day + 7200});
    CHECK(e[0] == 1);
    CHECK(e[1] == 1);
}

TEST_CASE("empty log bins to zeros") {
    const BinnedSeries s = bin_events(std::vector<double>{}, {0, 3 * 3600});
    CHECK(s.size() == 3);
    CHECK(s.total() == 0.0);
}

TEST_CASE("binning preserves the in-window event count") {
    const EpochSeconds start = 1580515200;
    std::vector<double> ev;
    for (int i = 0; i < 500; ++i) {
        ev.push_back(static_cast<double>(start) - 3600.0 + 37.3 * i);
    }
    const BinnedSeries s = bin_events(ev, {start, start + 4 * 3600});
    const auto inside = std::count_if(ev.begin(), ev.end(), [&](double t) { return t >= start && t < start + 4 * 3600; });
    CHECK(s.total() == static_cast<double>(inside));
}

TEST_CASE("binning contract errors") {
    const std::vector<double> ev{10.0};
    CHECK_THROWS_AS(bin_events(ev, {0, 0}), EmptyWindowError);
    CHECK_THROWS_AS(bin_events(ev, {1800, 1800 + 3600}), AlignmentError);
    CHECK_THROWS_AS(bin_events(std::vector<double>{5.0, 1.0}, {0, 3600}), ContractError);
}

TEST_CASE("66-day window splits into 1248/168/168 hourly bins") {
    const EpochSeconds start = parse_date("2020-02-01");
    const SplitSpec spec = SplitSpec::standard(start);
    const BinnedSeries s = bin_events(std::vector<double>{}, spec.whole());
    CHECK(s.size() == 1584);
    const SplitSeries parts = split_series(s, spec);
    CHECK(parts.train.size() == 1248);
    CHECK(parts.validation.size() == 168);
    CHECK(parts.test.size() == 168);
    CHECK(parts.validation.start() == parts.train.end());
    CHECK(parts.test.start() == parts.validation.end());
}

TEST_CASE("inclusive date bounds match the standard split") {
    const SplitSpec a = SplitSpec::from_dates("2020-02-01", "2020-03-23", "2020-03-24", "2020-03-30", "2020-03-31",
                                              "2020-04-06");
    const SplitSpec b = SplitSpec::standard(parse_date("2020-02-01"));
    CHECK(a.train() == b.train());
    CHECK(a.validation() == b.validation());
    CHECK(a.test() == b.test());
}

TEST_CASE("10-bin series splits (6, 2, 2)") {
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 0.0);
    const BinnedSeries s(0, 3600, v);
    const SplitSpec spec({0, 6 * 3600}, {6 * 3600, 8 * 3600}, {8 * 3600, 10 * 3600});
    const SplitSeries parts = split_series(s, spec);
    CHECK(parts.train.size() == 6);
    CHECK(parts.validation.size() == 2);
    CHECK(parts.test.size() == 2);
    CHECK(parts.test[0] == 8.0);
}

TEST_CASE("split rejects empty or gapped segments") {
    CHECK_THROWS_AS(SplitSpec({0, 3600}, {3600, 3600}, {3600, 7200}), RangeError);
    CHECK_THROWS_AS(SplitSpec({0, 3600}, {7200, 10800}, {10800, 14400}), RangeError);
    const BinnedSeries s(0, 3600, std::vector<double>(3, 1.0));
    CHECK_THROWS_AS(split_series(s, SplitSpec({0, 3600}, {3600, 7200}, {7200, 4 * 3600})), RangeError);
}

TEST_CASE("series validation") {
    CHECK_THROWS_AS(BinnedSeries(0, 3600, {}), LengthError);
    CHECK_THROWS_AS(BinnedSeries(0, 3600, {-1.0}), DataError);
    CHECK_THROWS_AS(BinnedSeries(0, 0, {1.0}), ContractError);
    const BinnedSeries a(0, 3600, {1, 2});
    const BinnedSeries b(7200, 3600, {3});
    CHECK(concatenate(a, b).size() == 3);
    CHECK_THROWS_AS(concatenate(b, a), AlignmentError);
}

TEST_CASE("platform labels") {
    CHECK(parse_platform("Twitter") == Platform::twitter);
    CHECK(parse_platform("youtube") == Platform::youtube);
    CHECK_THROWS_AS(parse_platform("reddit"), DataError);
}

TEST_CASE("event lines: three valid lines of one topic") {
    std::istringstream in(R"({"timestamp":"2020-02-01T00:10:00Z","platform":"twitter","topic":"t","domain":"d"}
{"timestamp":"2020-02-01T00:50:00Z","platform":"twitter","topic":"t","domain":"d","user_id":"u1"}
{"timestamp":"2020-02-01T01:20:00Z","platform":"twitter","topic":"t","domain":"d","action":"retweet"}
)");
    const EventParseResult r = read_event_lines(in, false);
    CHECK(r.records.size() == 3);
    CHECK(r.malformed == 0);
    CHECK(r.records[1].user_id == std::optional<std::string>("u1"));
    CHECK(r.records[2].action == std::optional<std::string>("retweet"));
}

TEST_CASE("event lines: a bad timestamp is skipped with a warning, or aborts in strict mode") {
    const std::string text = R"({"timestamp":"2020-02-01T00:10:00Z","platform":"twitter","topic":"t","domain":"d"}
{"timestamp":"not a time","platform":"twitter","topic":"t","domain":"d"}
{"timestamp":"2020-02-01T01:20:00Z","platform":"twitter","topic":"t","domain":"d"}
)";
    std::istringstream lenient(text);
    const EventParseResult r = read_event_lines(lenient, false);
    CHECK(r.records.size() == 2);
    CHECK(r.malformed == 1);
    CHECK(r.warnings.size() == 1);

    std::istringstream strict(text);
    CHECK_THROWS_AS(read_event_lines(strict, true), DataError);
}

TEST_CASE("10,000 simulated events survive a write-then-read round trip") {
    const auto hours = simulate_hawkes({0.5, 0.5, 1.0}, {}, 0.0, 10'000.0, 99);
    REQUIRE(hours.size() > 5000);
    std::vector<EventRecord> records;
    std::vector<double> expected;
    for (std::size_t i = 0; i < 10'000 && i < hours.size(); ++i) {
        // Microsecond grid: the precision carried by the text format.
        const double t = std::round((1580515200.0 + hours[i] * 3600.0) * 1e6) / 1e6;
        EventRecord r;
        r.timestamp = t;
        r.topic = "synthetic";
        r.domain = "d";
        records.push_back(r);
        expected.push_back(t);
    }
    std::stringstream buf;
    write_event_lines(buf, records);
    const EventParseResult back = read_event_lines(buf, true);
    REQUIRE(back.records.size() == expected.size());
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        mismatches += std::fabs(back.records[i].timestamp - expected[i]) > 5e-7 ? 1 : 0;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("series CSV round trip") {
    const BinnedSeries s(1580515200, 3600, {0, 1.5, 3});
    std::stringstream buf;
    write_series_csv(buf, s);
    CHECK(buf.str().rfind("bin_start_iso,count\n2020-02-01T00:00:00Z,0\n", 0) == 0);
    CHECK(read_series_csv(buf) == s);
}

TEST_CASE("CSV field quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(split_csv_line("x,\"a,\"\"b\"\"\",3") == std::vector<std::string>{"x", "a,\"b\"", "3"});
}
