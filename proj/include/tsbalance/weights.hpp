#ifndef TSBALANCE_WEIGHTS_HPP
#define TSBALANCE_WEIGHTS_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "tsbalance/dataset.hpp"

namespace tsbal {

/// w_t = |y(t + delta) - y(t)|: absolute change of the target over the horizon.
struct TargetVariation {
    std::size_t delta_steps = 30;
    bool operator==(const TargetVariation&) const = default;
};

/// w_t = y(t + horizon) shifted by the global minimum of the target channel,
/// so weights are nonnegative and independent of the evaluated range.
struct TargetLevel {
    bool operator==(const TargetLevel&) const = default;
};

enum class WindowStat { mean, stddev, max };

/// Weight from the input variables only: a statistic of the named channel
/// over the input window rows t-L+1..t.
struct ChannelWindowStat {
    std::string channel;
    WindowStat stat = WindowStat::stddev;
    bool operator==(const ChannelWindowStat&) const = default;
};

using WeightFunctionSpec = std::variant<TargetVariation, TargetLevel, ChannelWindowStat>;

/// Aligned (time index, nonnegative weight) pairs over valid window positions.
struct WeightSeries {
    std::vector<std::size_t> indices;  // strictly increasing
    std::vector<double> weights;       // same length, finite, >= 0

    std::size_t size() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
};

/**
 * Per-index importance weights for every t in `range`, which must lie within
 * valid_indices(dataset, window_spec). Throws on an empty range, an unknown
 * channel, or a weight function that yields negative values.
 */
WeightSeries compute_weights(const TimeSeriesDataset& dataset, const WindowSpec& window_spec,
                             const WeightFunctionSpec& weight_spec, const IndexRange& range);

std::string weight_function_label(const WeightFunctionSpec& spec);

}  // namespace tsbal

#endif  // TSBALANCE_WEIGHTS_HPP
