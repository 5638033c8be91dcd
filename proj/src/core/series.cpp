#include "sociocast/core/series.hpp"

#include "sociocast/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace sociocast {

std::string_view to_string(Platform p) {
    switch (p) {
    case Platform::twitter:
        return "twitter";
    case Platform::youtube:
        return "youtube";
    }
    return "unknown";
}

Platform parse_platform(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "twitter") {
        return Platform::twitter;
    }
    if (lower == "youtube") {
        return Platform::youtube;
    }
    throw DataError("unknown platform '" + std::string(text) + "'");
}

EventLog::EventLog(std::vector<double> timestamps, Platform platform, std::string domain, std::string topic)
    : timestamps_(std::move(timestamps)), platform_(platform), domain_(std::move(domain)), topic_(std::move(topic)) {
    for (double t : timestamps_) {
        if (!std::isfinite(t)) {
            throw DataError("non-finite event timestamp");
        }
    }
    std::sort(timestamps_.begin(), timestamps_.end());
}

std::span<const double> EventLog::in_window(TimeRange window) const {
    const auto lo = std::lower_bound(timestamps_.begin(), timestamps_.end(), static_cast<double>(window.start));
    const auto hi = std::lower_bound(lo, timestamps_.end(), static_cast<double>(window.end));
    return {lo, hi};
}

std::span<const double> EventLog::before(double cutoff) const {
    const auto hi = std::lower_bound(timestamps_.begin(), timestamps_.end(), cutoff);
    return {timestamps_.begin(), hi};
}

BinnedSeries::BinnedSeries(EpochSeconds start, EpochSeconds bin_width, std::vector<double> counts)
    : start_(start), bin_width_(bin_width), counts_(std::move(counts)) {
    if (bin_width_ <= 0) {
        throw ContractError("bin width must be positive");
    }
    if (start_ % bin_width_ != 0) {
        throw AlignmentError("series start is not a multiple of the bin width");
    }
    if (counts_.empty()) {
        throw LengthError("binned series needs at least one bin");
    }
    for (double c : counts_) {
        if (!std::isfinite(c) || c < 0.0) {
            throw DataError("binned counts must be finite and nonnegative");
        }
    }
}

double BinnedSeries::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0.0);
}

BinnedSeries BinnedSeries::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > counts_.size()) {
        throw RangeError("slice outside series");
    }
    return BinnedSeries(bin_start(first), bin_width_,
                        std::vector<double>(counts_.begin() + static_cast<std::ptrdiff_t>(first),
                                            counts_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

BinnedSeries BinnedSeries::slice(TimeRange range) const {
    if (range.end <= range.start || !span_range().contains(range)) {
        throw RangeError("range [" + format_iso8601(range.start) + ", " + format_iso8601(range.end) +
                         ") outside series span");
    }
    if ((range.start - start_) % bin_width_ != 0 || (range.end - start_) % bin_width_ != 0) {
        throw AlignmentError("range not aligned to bin boundaries");
    }
    return slice(static_cast<std::size_t>((range.start - start_) / bin_width_),
                 static_cast<std::size_t>((range.end - range.start) / bin_width_));
}

bool BinnedSeries::aligned_with(const BinnedSeries& other) const {
    return start_ == other.start_ && bin_width_ == other.bin_width_ && counts_.size() == other.counts_.size();
}

BinnedSeries concatenate(const BinnedSeries& a, const BinnedSeries& b) {
    if (a.bin_width() != b.bin_width() || a.end() != b.start()) {
        throw AlignmentError("series do not abut");
    }
    std::vector<double> counts(a.values().begin(), a.values().end());
    counts.insert(counts.end(), b.values().begin(), b.values().end());
    return BinnedSeries(a.start(), a.bin_width(), std::move(counts));
}

SplitSpec::SplitSpec(TimeRange train, TimeRange validation, TimeRange test)
    : train_(train), validation_(validation), test_(test) {
    for (const TimeRange* r : {&train_, &validation_, &test_}) {
        if (r->end <= r->start) {
            throw RangeError("split segments must be non-empty");
        }
    }
    if (train_.end != validation_.start || validation_.end != test_.start) {
        throw RangeError("split segments must be contiguous and ordered train, validation, test");
    }
}

SplitSpec SplitSpec::from_dates(std::string_view train_first, std::string_view train_last,
                                std::string_view validation_first, std::string_view validation_last,
                                std::string_view test_first, std::string_view test_last) {
    auto range = [](std::string_view first, std::string_view last) {
        return TimeRange{parse_date(first), parse_date(last) + kSecondsPerDay};
    };
    return SplitSpec(range(train_first, train_last), range(validation_first, validation_last),
                     range(test_first, test_last));
}

SplitSpec SplitSpec::standard(EpochSeconds train_start) {
    const EpochSeconds week = 7 * kSecondsPerDay;
    const TimeRange train{train_start, train_start + 52 * kSecondsPerDay};
    const TimeRange validation{train.end, train.end + week};
    return SplitSpec(train, validation, {validation.end, validation.end + week});
}

BinnedSeries bin_events(std::span<const double> sorted_timestamps, TimeRange window, EpochSeconds bin_width) {
    if (bin_width <= 0) {
        throw ContractError("bin width must be positive");
    }
    if (window.end <= window.start) {
        throw EmptyWindowError("binning window is empty");
    }
    if (window.start % bin_width != 0 || window.end % bin_width != 0) {
        throw AlignmentError("binning window not aligned to the bin width");
    }
    if (!std::is_sorted(sorted_timestamps.begin(), sorted_timestamps.end())) {
        throw ContractError("event timestamps must be sorted");
    }
    const auto n_bins = static_cast<std::size_t>((window.end - window.start) / bin_width);
    std::vector<double> counts(n_bins, 0.0);
    auto it = std::lower_bound(sorted_timestamps.begin(), sorted_timestamps.end(), static_cast<double>(window.start));
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double upper = static_cast<double>(window.start + bin_width * static_cast<EpochSeconds>(k + 1));
        const auto next = std::lower_bound(it, sorted_timestamps.end(), upper);
        counts[k] = static_cast<double>(next - it);
        it = next;
    }
    return BinnedSeries(window.start, bin_width, std::move(counts));
}

BinnedSeries bin_events(const EventLog& log, TimeRange window, EpochSeconds bin_width) {
    return bin_events(log.timestamps(), window, bin_width);
}

SplitSeries split_series(const BinnedSeries& series, const SplitSpec& spec) {
    if (!series.span_range().contains(spec.whole())) {
        throw RangeError("split periods fall outside the series span");
    }
    return {series.slice(spec.train()), series.slice(spec.validation()), series.slice(spec.test())};
}

} // namespace sociocast
