#include "sociocast/shifted.hpp"

#include "sociocast/errors.hpp"

#include <string>

namespace sociocast {

std::string_view to_string(Protocol p) {
    return p == Protocol::long_term ? "long" : "short";
}

Protocol parse_protocol(std::string_view text) {
    if (text == "long" || text == "long_term") {
        return Protocol::long_term;
    }
    if (text == "short" || text == "short_term") {
        return Protocol::short_term;
    }
    throw ConfigError("unknown protocol '" + std::string(text) + "' (expected long or short)");
}

void ShiftConfig::validate() const {
    if (horizon == 0) {
        throw ContractError("shift horizon must be at least one bin");
    }
    if (mode == Protocol::short_term && (short_block == 0 || horizon % short_block != 0)) {
        throw ContractError("short-term horizon must be a positive multiple of the block size");
    }
}

BinnedSeries shifted_forecast(const BinnedSeries& history, std::size_t horizon) {
    if (horizon == 0) {
        throw ContractError("shift horizon must be at least one bin");
    }
    if (history.size() < horizon) {
        throw InsufficientHistoryError("history has " + std::to_string(history.size()) + " bins, need " +
                                       std::to_string(horizon));
    }
    const auto tail = history.values().subspan(history.size() - horizon);
    return BinnedSeries(history.end(), history.bin_width(), {tail.begin(), tail.end()});
}

BinnedSeries rolling_shifted_forecast(const BinnedSeries& history, const BinnedSeries& test_gt, std::size_t block) {
    if (block == 0 || test_gt.size() % block != 0) {
        throw ProtocolError("test length must be a positive multiple of the block size");
    }
    if (history.bin_width() != test_gt.bin_width() || history.end() != test_gt.start()) {
        throw AlignmentError("test ground truth must start where history ends");
    }
    if (history.size() < block) {
        throw InsufficientHistoryError("history shorter than one block");
    }
    std::vector<double> out;
    out.reserve(test_gt.size());
    const auto seed = history.values().subspan(history.size() - block);
    out.insert(out.end(), seed.begin(), seed.end());
    // Block j only ever sees ground truth strictly before its own start.
    const auto gt = test_gt.values();
    out.insert(out.end(), gt.begin(), gt.end() - static_cast<std::ptrdiff_t>(block));
    return BinnedSeries(test_gt.start(), test_gt.bin_width(), std::move(out));
}

} // namespace sociocast
