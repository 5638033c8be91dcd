#pragma once

#include "sociocast/core/time.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sociocast {

enum class Platform { twitter, youtube };

std::string_view to_string(Platform p);
/// Case-insensitive; throws DataError for unknown platforms.
Platform parse_platform(std::string_view text);

/// Half-open interval [start, end) in epoch seconds.
struct TimeRange {
    EpochSeconds start = 0;
    EpochSeconds end = 0;

    [[nodiscard]] EpochSeconds length() const { return end - start; }
    [[nodiscard]] bool contains(const TimeRange& other) const {
        return other.start >= start && other.end <= end;
    }
    friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

/// Labelled, time-ordered event stream for one (domain, platform, topic).
/// Timestamps are fractional seconds since the epoch and are sorted on
/// construction.
class EventLog {
public:
    EventLog() = default;
    EventLog(std::vector<double> timestamps, Platform platform, std::string domain, std::string topic);

    [[nodiscard]] std::span<const double> timestamps() const { return timestamps_; }
    [[nodiscard]] std::size_t size() const { return timestamps_.size(); }
    [[nodiscard]] bool empty() const { return timestamps_.empty(); }
    [[nodiscard]] Platform platform() const { return platform_; }
    [[nodiscard]] const std::string& domain() const { return domain_; }
    [[nodiscard]] const std::string& topic() const { return topic_; }

    /// Events with window.start <= t < window.end.
    [[nodiscard]] std::span<const double> in_window(TimeRange window) const;
    /// Events with t < cutoff.
    [[nodiscard]] std::span<const double> before(double cutoff) const;

private:
    std::vector<double> timestamps_;
    Platform platform_ = Platform::twitter;
    std::string domain_;
    std::string topic_;
};

/// Fixed-width activity counts starting at an aligned absolute time.
class BinnedSeries {
public:
    BinnedSeries(EpochSeconds start, EpochSeconds bin_width, std::vector<double> counts);

    [[nodiscard]] EpochSeconds start() const { return start_; }
    [[nodiscard]] EpochSeconds bin_width() const { return bin_width_; }
    [[nodiscard]] EpochSeconds end() const { return start_ + bin_width_ * static_cast<EpochSeconds>(counts_.size()); }
    [[nodiscard]] TimeRange span_range() const { return {start_, end()}; }
    [[nodiscard]] std::size_t size() const { return counts_.size(); }
    [[nodiscard]] std::span<const double> values() const { return counts_; }
    [[nodiscard]] double operator[](std::size_t k) const { return counts_[k]; }
    [[nodiscard]] EpochSeconds bin_start(std::size_t k) const {
        return start_ + bin_width_ * static_cast<EpochSeconds>(k);
    }
    [[nodiscard]] double total() const;

    /// Sub-series of `count` bins beginning at bin `first`.
    [[nodiscard]] BinnedSeries slice(std::size_t first, std::size_t count) const;
    /// Sub-series covering exactly `range` (aligned, inside this series).
    [[nodiscard]] BinnedSeries slice(TimeRange range) const;

    /// Same start and bin width, same length.
    [[nodiscard]] bool aligned_with(const BinnedSeries& other) const;

    friend bool operator==(const BinnedSeries&, const BinnedSeries&) = default;

private:
    EpochSeconds start_;
    EpochSeconds bin_width_;
    std::vector<double> counts_;
};

/// Concatenates series that abut exactly (same bin width, a.end() == b.start()).
BinnedSeries concatenate(const BinnedSeries& a, const BinnedSeries& b);

/// Train / validation / test periods; contiguous, ordered, each non-empty.
class SplitSpec {
public:
    SplitSpec(TimeRange train, TimeRange validation, TimeRange test);

    /// Each segment is given as inclusive `YYYY-MM-DD` day bounds.
    static SplitSpec from_dates(std::string_view train_first, std::string_view train_last,
                                std::string_view validation_first, std::string_view validation_last,
                                std::string_view test_first, std::string_view test_last);

    /// 52 training days, then one validation week and one test week.
    static SplitSpec standard(EpochSeconds train_start);

    [[nodiscard]] const TimeRange& train() const { return train_; }
    [[nodiscard]] const TimeRange& validation() const { return validation_; }
    [[nodiscard]] const TimeRange& test() const { return test_; }
    [[nodiscard]] TimeRange whole() const { return {train_.start, test_.end}; }

private:
    TimeRange train_;
    TimeRange validation_;
    TimeRange test_;
};

/// Counts events per bin over `window`; bins are left-closed, right-open.
BinnedSeries bin_events(std::span<const double> sorted_timestamps, TimeRange window,
                        EpochSeconds bin_width = kSecondsPerHour);
BinnedSeries bin_events(const EventLog& log, TimeRange window, EpochSeconds bin_width = kSecondsPerHour);

struct SplitSeries {
    BinnedSeries train;
    BinnedSeries validation;
    BinnedSeries test;
};

SplitSeries split_series(const BinnedSeries& series, const SplitSpec& spec);

} // namespace sociocast
