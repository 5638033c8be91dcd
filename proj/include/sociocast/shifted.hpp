#pragma once

#include "sociocast/core/series.hpp"

#include <cstddef>

namespace sociocast {

enum class Protocol { long_term, short_term };

std::string_view to_string(Protocol p);
/// Accepts "long", "long_term", "short", "short_term".
Protocol parse_protocol(std::string_view text);

struct ShiftConfig {
    std::size_t horizon = 168;
    Protocol mode = Protocol::long_term;
    std::size_t short_block = 24;

    /// Throws ContractError unless horizon >= 1 and, in short-term mode,
    /// horizon is a multiple of short_block.
    void validate() const;
};

/// Persistence forecast: the last `horizon` bins of history, replayed
/// starting at history.end().
BinnedSeries shifted_forecast(const BinnedSeries& history, std::size_t horizon);

/// Day-ahead style persistence: block j of the forecast is ground-truth
/// block j-1; block 0 replays the last `block` bins of history. Ground truth
/// must start where history ends.
BinnedSeries rolling_shifted_forecast(const BinnedSeries& history, const BinnedSeries& test_gt, std::size_t block);

} // namespace sociocast
