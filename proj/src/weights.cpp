#include "tsbalance/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsbal {

namespace {

double window_stat(const TimeSeriesDataset& d, std::size_t t, std::size_t length,
                   std::size_t col, WindowStat stat) {
    const std::size_t first = t + 1 - length;
    switch (stat) {
        case WindowStat::max: {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t r = first; r <= t; ++r) m = std::max(m, d.value(r, col));
            return m;
        }
        case WindowStat::mean: {
            double s = 0.0;
            for (std::size_t r = first; r <= t; ++r) s += d.value(r, col);
            return s / static_cast<double>(length);
        }
        case WindowStat::stddev: {
            double s = 0.0;
            for (std::size_t r = first; r <= t; ++r) s += d.value(r, col);
            const double mean = s / static_cast<double>(length);
            double ss = 0.0;
            for (std::size_t r = first; r <= t; ++r) {
                const double dd = d.value(r, col) - mean;
                ss += dd * dd;
            }
            return std::sqrt(ss / static_cast<double>(length));  // population std
        }
    }
    throw std::logic_error("window_stat: unhandled stat");
}

}  // namespace

WeightSeries compute_weights(const TimeSeriesDataset& dataset, const WindowSpec& window_spec,
                             const WeightFunctionSpec& weight_spec, const IndexRange& range) {
    if (range.count() == 0) {
        throw std::invalid_argument("compute_weights: empty range");
    }
    const IndexRange valid = valid_indices(dataset, window_spec);
    if (range.start < valid.start || range.end_exclusive > valid.end_exclusive) {
        throw std::invalid_argument("compute_weights: range not within valid window indices");
    }

    WeightSeries ws;
    ws.indices.reserve(range.count());
    ws.weights.reserve(range.count());
    for (std::size_t t = range.start; t < range.end_exclusive; ++t) {
        ws.indices.push_back(t);
    }

    // The forecast target is the window spec's channel, same as window_at.
    const std::size_t target_col = dataset.column_index(window_spec.target_channel);

    if (const auto* tv = std::get_if<TargetVariation>(&weight_spec)) {
        if (tv->delta_steps < 1 || tv->delta_steps > window_spec.horizon_steps) {
            throw std::invalid_argument(
                "compute_weights: target variation delta must be in [1, horizon]");
        }
        for (std::size_t t : ws.indices) {
            ws.weights.push_back(
                std::abs(dataset.value(t + tv->delta_steps, target_col) - dataset.value(t, target_col)));
        }
    } else if (std::holds_alternative<TargetLevel>(weight_spec)) {
        double series_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < dataset.rows(); ++t) {
            series_min = std::min(series_min, dataset.value(t, target_col));
        }
        for (std::size_t t : ws.indices) {
            ws.weights.push_back(dataset.value(t + window_spec.horizon_steps, target_col) -
                                 series_min);
        }
    } else {
        const auto& cs = std::get<ChannelWindowStat>(weight_spec);
        const std::size_t col = dataset.column_index(cs.channel);
        for (std::size_t t : ws.indices) {
            const double w = window_stat(dataset, t, window_spec.length_steps, col, cs.stat);
            if (w < 0.0) {
                throw std::invalid_argument(
                    "compute_weights: channel statistic produced a negative weight; "
                    "pick a nonnegative channel/stat combination");
            }
            ws.weights.push_back(w);
        }
    }

    for (double w : ws.weights) {
        if (!std::isfinite(w)) {
            throw std::invalid_argument("compute_weights: non-finite weight");
        }
    }
    return ws;
}

std::string weight_function_label(const WeightFunctionSpec& spec) {
    if (const auto* tv = std::get_if<TargetVariation>(&spec)) {
        return "target_variation(" + std::to_string(tv->delta_steps) + ")";
    }
    if (std::holds_alternative<TargetLevel>(spec)) {
        return "target_level";
    }
    const auto& cs = std::get<ChannelWindowStat>(spec);
    const char* stat = cs.stat == WindowStat::mean ? "mean"
                       : cs.stat == WindowStat::max ? "max"
                                                    : "std";
    return "channel_stat(" + cs.channel + "," + stat + ")";
}

}  // namespace tsbal
