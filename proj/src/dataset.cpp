#include "tsbalance/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tsbalance/rng.hpp"

namespace tsbal {

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> channel_names,
                                     std::vector<double> values_row_major,
                                     double interval_seconds,
                                     std::string target_channel)
    : channel_names_(std::move(channel_names)),
      values_(std::move(values_row_major)),
      interval_seconds_(interval_seconds),
      target_channel_(std::move(target_channel)) {
    if (channel_names_.empty()) {
        throw std::invalid_argument("dataset: at least one channel required");
    }
    if (values_.empty() || values_.size() % channel_names_.size() != 0) {
        throw std::invalid_argument("dataset: values size must be a nonzero multiple of the channel count");
    }
    rows_ = values_.size() / channel_names_.size();
    if (!(interval_seconds_ > 0.0)) {
        throw std::invalid_argument("dataset: interval_seconds must be positive");
    }
    std::set<std::string> unique(channel_names_.begin(), channel_names_.end());
    if (unique.size() != channel_names_.size()) {
        throw std::invalid_argument("dataset: channel names must be unique");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("dataset: values must be finite");
        }
    }
    target_column_ = column_index(target_channel_);
}

std::size_t TimeSeriesDataset::column_index(const std::string& name) const {
    auto it = std::find(channel_names_.begin(), channel_names_.end(), name);
    if (it == channel_names_.end()) {
        throw std::invalid_argument("dataset: unknown channel '" + name + "'");
    }
    return static_cast<std::size_t>(it - channel_names_.begin());
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(pos)));
            break;
        }
        fields.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

// Strict full-field parse; returns false on garbage, NaN or infinity.
bool parse_finite(std::string_view field, double& out) {
    if (field.empty()) return false;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) return false;
    return std::isfinite(out);
}

}  // namespace

LoadResult load_csv(const std::string& path, const std::string& target_channel,
                    double interval_seconds) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_csv: empty file '" + path + "'");
    }
    std::vector<std::string> names;
    for (auto f : split_fields(line)) {
        names.emplace_back(f);
    }

    std::vector<double> values;
    std::vector<double> row(names.size());
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != names.size()) {
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(names.size()));
        }
        bool ok = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_finite(fields[c], row[c])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    if (values.empty()) {
        throw std::runtime_error("load_csv: no usable data rows in '" + path + "'");
    }
    return LoadResult{TimeSeriesDataset(std::move(names), std::move(values), interval_seconds,
                                        target_channel),
                      dropped};
}

IndexRange valid_indices(const TimeSeriesDataset& dataset, const WindowSpec& spec) {
    if (spec.length_steps < 1 || spec.horizon_steps < 1) {
        throw std::invalid_argument("window spec: length and horizon must be >= 1");
    }
    const std::size_t need = spec.length_steps + spec.horizon_steps;
    if (dataset.rows() < need) {
        throw std::invalid_argument("series too short: T=" + std::to_string(dataset.rows()) +
                                    " < L+horizon=" + std::to_string(need));
    }
    return IndexRange{spec.length_steps - 1, dataset.rows() - spec.horizon_steps};
}

WindowSample window_at(const TimeSeriesDataset& dataset, const WindowSpec& spec, std::size_t t) {
    const IndexRange valid = valid_indices(dataset, spec);
    if (!valid.contains(t)) {
        throw std::out_of_range("window_at: index " + std::to_string(t) + " outside valid range [" +
                                std::to_string(valid.start) + ", " +
                                std::to_string(valid.end_exclusive) + ")");
    }
    const std::size_t L = spec.length_steps;
    const std::size_t C = dataset.cols();
    Window w{L, C, std::vector<double>(L * C)};
    const std::size_t first_row = t + 1 - L;
    for (std::size_t r = 0; r < L; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
            w.values[r * C + c] = dataset.value(first_row + r, c);
        }
    }
    const std::size_t target_col = dataset.column_index(spec.target_channel);
    return WindowSample{std::move(w), dataset.value(t + spec.horizon_steps, target_col)};
}

SplitResult split_chronological(const TimeSeriesDataset& dataset, const WindowSpec& spec,
                                double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split: train_fraction must be in (0, 1)");
    }
    const IndexRange valid = valid_indices(dataset, spec);
    const std::size_t v = valid.count();
    const std::size_t train_count = static_cast<std::size_t>(train_fraction * static_cast<double>(v));
    const std::size_t gap = spec.length_steps + spec.horizon_steps;
    if (train_count == 0) {
        throw std::invalid_argument("split: empty train split");
    }
    if (train_count + gap >= v) {
        throw std::invalid_argument("split: empty eval split (guard gap of " + std::to_string(gap) +
                                    " leaves no eval indices)");
    }
    return SplitResult{IndexRange{valid.start, valid.start + train_count},
                       IndexRange{valid.start + train_count + gap, valid.end_exclusive}};
}

namespace {

// Steps between an event raising the exogenous channels and the target
// responding; gives window features a lead signal on upcoming variation.
// Deliberately shorter than the forecast horizon and paired with noisy,
// smoothed exogenous responses: rare ramps must be only partially learnable,
// or a model fitted on the flat majority would pick them up just as well and
// under-sampling would have nothing to correct.
constexpr std::size_t kTargetResponseLag = 10;
constexpr double kBaseLevel = 70.0;

void validate(const SyntheticConfig& c) {
    if (c.length < 1) throw std::invalid_argument("synthetic.length must be >= 1");
    if (!(c.event_probability >= 0.0 && c.event_probability <= 1.0)) {
        throw std::invalid_argument("synthetic.event_probability must be in [0, 1]");
    }
    if (c.event_duration < 1) throw std::invalid_argument("synthetic.event_duration must be >= 1");
    if (!(c.mean_reversion > 0.0 && c.mean_reversion <= 1.0)) {
        throw std::invalid_argument("synthetic.mean_reversion must be in (0, 1]");
    }
    if (!(c.noise_std >= 0.0) || !std::isfinite(c.noise_std)) {
        throw std::invalid_argument("synthetic.noise_std must be >= 0");
    }
    if (!std::isfinite(c.event_magnitude)) {
        throw std::invalid_argument("synthetic.event_magnitude must be finite");
    }
}

}  // namespace

SyntheticSeries generate_synthetic(const SyntheticConfig& config) {
    validate(config);
    const std::size_t T = config.length;

    // Independent substreams per purpose so the target series does not change
    // when exogenous channels are added or removed.
    std::mt19937_64 event_gen(rng::splitmix64(config.seed ^ 0x1ULL));
    std::mt19937_64 noise_gen(rng::splitmix64(config.seed ^ 0x2ULL));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> nrm(0.0, 1.0);

    // Pass 1: event envelope. Linear ramp of +magnitude over `duration`
    // steps, then exponential decay at the mean-reversion rate.
    std::vector<double> envelope(T, 0.0);
    std::vector<double> indicator(T, 0.0);
    std::size_t events = 0;
    std::size_t remaining = 0;
    double env = 0.0;
    const double ramp_step = config.event_magnitude / static_cast<double>(config.event_duration);
    for (std::size_t t = 0; t < T; ++t) {
        if (remaining == 0 && uni(event_gen) < config.event_probability) {
            remaining = config.event_duration;
            ++events;
        }
        if (remaining > 0) {
            env += ramp_step;
            --remaining;
            indicator[t] = 1.0;
        } else {
            env *= 1.0 - config.mean_reversion;
        }
        envelope[t] = env;
    }

    // Pass 2: target = base + lagged envelope + mean-reverting noise.
    std::vector<double> target(T);
    double noise = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        noise = (1.0 - config.mean_reversion) * noise + config.noise_std * nrm(noise_gen);
        const double delayed = t >= kTargetResponseLag ? envelope[t - kTargetResponseLag] : 0.0;
        target[t] = kBaseLevel + delayed + noise;
    }

    // Exogenous channels: the first reacts to the raw event indicator, the
    // second tracks a smoothed envelope, further ones are lagged indicators.
    // All of them lead the target response by kTargetResponseLag steps.
    const std::size_t C = 1 + config.exogenous_channels;
    std::vector<std::string> names;
    names.reserve(C);
    names.emplace_back("temp");
    for (std::size_t j = 1; j < C; ++j) {
        names.push_back("exo_" + std::to_string(j));
    }

    std::vector<double> values(T * C);
    for (std::size_t t = 0; t < T; ++t) {
        values[t * C] = target[t];
    }
    for (std::size_t j = 1; j < C; ++j) {
        std::mt19937_64 exo_gen(rng::splitmix64(config.seed ^ (0x10ULL + j)));
        std::normal_distribution<double> exo_nrm(0.0, 1.0);
        double smooth = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            double v = 0.0;
            if (j == 1) {
                v = indicator[t] + 0.1 * exo_nrm(exo_gen);
            } else if (j == 2) {
                smooth = 0.9 * smooth + 0.1 * envelope[t];
                v = smooth + 0.05 * exo_nrm(exo_gen);
            } else {
                const std::size_t lag = 2 * j;
                v = (t >= lag ? indicator[t - lag] : 0.0) + 0.1 * exo_nrm(exo_gen);
            }
            values[t * C + j] = v;
        }
    }

    return SyntheticSeries{
        TimeSeriesDataset(std::move(names), std::move(values), 10.0, "temp"), events};
}

}  // namespace tsbal
