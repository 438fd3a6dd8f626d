#ifndef TSBALANCE_DATASET_HPP
#define TSBALANCE_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tsbal {

/**
 * Immutable multivariate time series with named channels and a fixed
 * sampling interval. Values are stored row-major, one row per time step.
 * The constructor validates the full invariant set (finite values, unique
 * channel names, resolvable target channel); instances are safe to share
 * across threads.
 */
class TimeSeriesDataset {
public:
    TimeSeriesDataset(std::vector<std::string> channel_names,
                      std::vector<double> values_row_major,
                      double interval_seconds,
                      std::string target_channel);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return channel_names_.size(); }

    double value(std::size_t t, std::size_t c) const {
        return values_[t * channel_names_.size() + c];
    }
    /// Value of the target channel at time step t.
    double target(std::size_t t) const { return value(t, target_column_); }

    std::size_t target_column() const noexcept { return target_column_; }
    const std::string& target_channel() const noexcept { return target_channel_; }
    double interval_seconds() const noexcept { return interval_seconds_; }
    const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }

    /// Column index for a channel name; throws std::invalid_argument if unknown.
    std::size_t column_index(const std::string& name) const;

    const std::vector<double>& raw_values() const noexcept { return values_; }

    bool operator==(const TimeSeriesDataset&) const = default;

private:
    std::vector<std::string> channel_names_;
    std::vector<double> values_;
    std::size_t rows_ = 0;
    double interval_seconds_ = 0.0;
    std::string target_channel_;
    std::size_t target_column_ = 0;
};

/// Input window length, forecast horizon and target channel for windowing.
struct WindowSpec {
    std::size_t length_steps = 30;   // L
    std::size_t horizon_steps = 30;  // forecast horizon
    std::string target_channel;
};

/// Half-open index range [start, end_exclusive) over time steps.
struct IndexRange {
    std::size_t start = 0;
    std::size_t end_exclusive = 0;

    std::size_t count() const noexcept { return end_exclusive - start; }
    bool contains(std::size_t t) const noexcept { return t >= start && t < end_exclusive; }
    bool operator==(const IndexRange&) const = default;
};

/// Dense L x C matrix of window rows, row-major.
struct Window {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// One training/evaluation pair: the input window ending at t and y(t + horizon).
struct WindowSample {
    Window input;
    double target = 0.0;
};

/**
 * Configuration of the seeded synthetic generator. The target channel is a
 * mean-reverting noise process around a fixed base level; with probability
 * `event_probability` per idle step an event starts, ramping the level up by
 * `event_magnitude` over `event_duration` steps before the mean reversion
 * pulls it back down (events do not overlap, so each ramp rises by exactly
 * the configured magnitude). Exogenous channels are lagged/noisy transforms
 * of the event indicator, so the events are learnable from the inputs.
 */
struct SyntheticConfig {
    std::size_t length = 120000;
    double mean_reversion = 0.3;      // per-step pull toward the base level, in (0, 1]
    double noise_std = 0.05;
    double event_probability = 0.001; // chance per idle step of starting an event
    double event_magnitude = 10.0;    // total ramp height, degrees
    std::size_t event_duration = 50;  // ramp length in steps
    std::size_t exogenous_channels = 2;
    std::uint64_t seed = 1;
};

struct SyntheticSeries {
    TimeSeriesDataset dataset;
    std::size_t event_count = 0;
};

struct LoadResult {
    TimeSeriesDataset dataset;
    std::size_t dropped_rows = 0;
};

/**
 * Load a dataset from CSV: a header row of channel names followed by one
 * numeric row per time step. Rows with unparseable or non-finite fields are
 * dropped and counted in LoadResult::dropped_rows. Rows with the wrong number
 * of fields are a hard error.
 */
LoadResult load_csv(const std::string& path, const std::string& target_channel,
                    double interval_seconds);

/**
 * Time steps t for which both the input window [t-L+1, t] and the target
 * y(t + horizon) exist: [L-1, T-horizon) as a half-open range.
 * Throws std::invalid_argument (series too short) when T < L + horizon.
 */
IndexRange valid_indices(const TimeSeriesDataset& dataset, const WindowSpec& spec);

/// Window rows t-L+1..t plus the forecast target at t+horizon.
WindowSample window_at(const TimeSeriesDataset& dataset, const WindowSpec& spec, std::size_t t);

struct SplitResult {
    IndexRange train;
    IndexRange eval;
};

/**
 * Chronological split of the valid indices: the first
 * floor(train_fraction * V) go to train, then a guard gap of L + horizon
 * indices is discarded so no evaluation window or target overlaps training
 * data, and the remainder goes to eval. Throws if either side ends up empty.
 */
SplitResult split_chronological(const TimeSeriesDataset& dataset, const WindowSpec& spec,
                                double train_fraction);

/// Deterministic synthetic series; identical output for identical config.
SyntheticSeries generate_synthetic(const SyntheticConfig& config);

}  // namespace tsbal

#endif  // TSBALANCE_DATASET_HPP
