#include "tsbalance/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace tsbal {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw std::invalid_argument("config: field '" + field + "' " + what);
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(field, "has the wrong type");
    }
}

template <typename T>
T require_field(const nlohmann::json& j, const std::string& field) {
    if (!j.contains(field)) fail(field, "is required");
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(field, "has the wrong type");
    }
}

SyntheticConfig parse_synthetic(const nlohmann::json& j) {
    SyntheticConfig defaults;
    SyntheticConfig c;
    c.length = get_field<std::size_t>(j, "length", defaults.length);
    c.mean_reversion = get_field<double>(j, "mean_reversion", defaults.mean_reversion);
    c.noise_std = get_field<double>(j, "noise_std", defaults.noise_std);
    c.event_probability = get_field<double>(j, "event_probability", defaults.event_probability);
    c.event_magnitude = get_field<double>(j, "event_magnitude", defaults.event_magnitude);
    c.event_duration = get_field<std::size_t>(j, "event_duration", defaults.event_duration);
    c.exogenous_channels =
        get_field<std::size_t>(j, "exogenous_channels", defaults.exogenous_channels);
    c.seed = get_field<std::uint64_t>(j, "seed", defaults.seed);
    if (!(c.event_probability >= 0.0 && c.event_probability <= 1.0)) {
        fail("synthetic.event_probability", "must be in [0, 1]");
    }
    if (c.event_duration < 1) fail("synthetic.event_duration", "must be >= 1");
    if (!(c.mean_reversion > 0.0 && c.mean_reversion <= 1.0)) {
        fail("synthetic.mean_reversion", "must be in (0, 1]");
    }
    if (!(c.noise_std >= 0.0)) fail("synthetic.noise_std", "must be >= 0");
    return c;
}

WeightFunctionSpec parse_weight_function(const nlohmann::json& j, std::size_t horizon) {
    const auto variant = require_field<std::string>(j, "variant");
    if (variant == "target_variation") {
        return TargetVariation{get_field<std::size_t>(j, "delta_steps", horizon)};
    }
    if (variant == "target_level") {
        return TargetLevel{};
    }
    if (variant == "channel_window_stat") {
        ChannelWindowStat cs;
        cs.channel = require_field<std::string>(j, "channel");
        const auto stat = get_field<std::string>(j, "stat", "std");
        if (stat == "mean") {
            cs.stat = WindowStat::mean;
        } else if (stat == "std") {
            cs.stat = WindowStat::stddev;
        } else if (stat == "max") {
            cs.stat = WindowStat::max;
        } else {
            fail("weight_function.stat", "must be one of mean, std, max");
        }
        return cs;
    }
    fail("weight_function.variant",
         "must be one of target_variation, target_level, channel_window_stat");
}

BinningSpec parse_binning(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "auto") return AutoBinning{};
        fail("binning", "string form must be 'auto'");
    }
    if (j.is_object() && j.contains("fixed_width")) {
        const double w = j.at("fixed_width").get<double>();
        if (!(w > 0.0)) fail("binning.fixed_width", "must be > 0");
        return FixedWidth{w};
    }
    fail("binning", "must be 'auto' or {\"fixed_width\": h}");
}

SamplerSpec parse_sampler(const nlohmann::json& j) {
    const auto variant = require_field<std::string>(j, "variant");
    if (variant == "none") return NoSampling{};
    if (variant == "tus") {
        const double tau = require_field<double>(j, "tau");
        if (!(tau >= 0.0)) fail("samplers.tau", "must be >= 0");
        return ThresholdUndersampling{tau};
    }
    if (variant == "sus") {
        const double factor = require_field<double>(j, "factor");
        if (!(factor > 0.0)) fail("samplers.factor", "must be > 0");
        return StochasticUndersampling{factor};
    }
    if (variant == "ihs") {
        InverseHistogramUndersampling ihs;
        if (j.contains("binning")) ihs.binning = parse_binning(j.at("binning"));
        return ihs;
    }
    fail("samplers.variant", "must be one of none, tus, sus, ihs");
}

ModelSpec parse_model(const nlohmann::json& j) {
    const auto variant = require_field<std::string>(j, "variant");
    if (variant == "persistence") return PersistenceSpec{};
    if (variant == "ridge") {
        const double lambda = get_field<double>(j, "lambda", 1.0);
        if (!(lambda >= 0.0)) fail("model.lambda", "must be >= 0");
        return RidgeSpec{lambda};
    }
    if (variant == "knn") {
        const auto k = get_field<std::size_t>(j, "k", 5);
        if (k < 1) fail("model.k", "must be >= 1");
        return KnnSpec{k};
    }
    if (variant == "mlp") {
        MlpSpec m;
        m.hidden_units = get_field<std::size_t>(j, "hidden_units", m.hidden_units);
        m.epochs = get_field<std::size_t>(j, "epochs", m.epochs);
        m.learning_rate = get_field<double>(j, "learning_rate", m.learning_rate);
        m.seed = get_field<std::uint64_t>(j, "seed", m.seed);
        if (m.hidden_units < 1) fail("model.hidden_units", "must be >= 1");
        if (m.epochs < 1) fail("model.epochs", "must be >= 1");
        if (!(m.learning_rate > 0.0)) fail("model.learning_rate", "must be > 0");
        return m;
    }
    fail("model.variant", "must be one of persistence, ridge, knn, mlp");
}

}  // namespace

PipelineConfig parse_config(const nlohmann::json& j) {
    PipelineConfig c;

    if (!j.contains("data")) fail("data", "is required");
    const auto& data = j.at("data");
    if (data.contains("csv") == data.contains("synthetic")) {
        fail("data", "must have exactly one of 'csv' or 'synthetic'");
    }
    if (data.contains("csv")) {
        c.data.csv_path = data.at("csv").get<std::string>();
    } else {
        c.data.synthetic = parse_synthetic(data.at("synthetic"));
    }
    c.data.target_channel = get_field<std::string>(data, "target_channel", c.data.target_channel);
    c.data.interval_seconds = get_field<double>(data, "interval_seconds", c.data.interval_seconds);
    if (!(c.data.interval_seconds > 0.0)) fail("data.interval_seconds", "must be > 0");

    if (j.contains("window")) {
        const auto& w = j.at("window");
        c.window.length_steps = get_field<std::size_t>(w, "length_steps", c.window.length_steps);
        c.window.horizon_steps = get_field<std::size_t>(w, "horizon_steps", c.window.horizon_steps);
        if (c.window.length_steps < 1) fail("window.length_steps", "must be >= 1");
        if (c.window.horizon_steps < 1) fail("window.horizon_steps", "must be >= 1");
    }
    c.window.target_channel = c.data.target_channel;

    if (j.contains("weight_function")) {
        c.weight_function = parse_weight_function(j.at("weight_function"), c.window.horizon_steps);
    } else {
        c.weight_function = TargetVariation{c.window.horizon_steps};
    }

    if (j.contains("samplers")) {
        if (!j.at("samplers").is_array()) fail("samplers", "must be an array");
        for (const auto& s : j.at("samplers")) {
            c.samplers.push_back(parse_sampler(s));
        }
    }

    if (j.contains("model")) c.model = parse_model(j.at("model"));

    c.n_train = get_field<std::size_t>(j, "n_train", c.n_train);
    c.n_eval = get_field<std::size_t>(j, "n_eval", c.n_eval);
    c.train_fraction = get_field<double>(j, "train_fraction", c.train_fraction);
    c.n_replicates = get_field<std::size_t>(j, "n_replicates", c.n_replicates);
    c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
    c.threads = get_field<std::size_t>(j, "threads", c.threads);
    c.output_dir = get_field<std::string>(j, "output_dir", c.output_dir);

    if (c.n_train < 1) fail("n_train", "must be >= 1");
    if (c.n_eval < 1) fail("n_eval", "must be >= 1");
    if (c.n_replicates < 1) fail("n_replicates", "must be >= 1");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
        fail("train_fraction", "must be in (0, 1)");
    }
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: invalid JSON in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

LoadResult load_dataset(const DataConfig& data) {
    if (data.csv_path) {
        return load_csv(*data.csv_path, data.target_channel, data.interval_seconds);
    }
    if (!data.synthetic) {
        throw std::invalid_argument("config: no data source configured");
    }
    auto series = generate_synthetic(*data.synthetic);
    if (data.target_channel == series.dataset.target_channel() &&
        data.interval_seconds == series.dataset.interval_seconds()) {
        return LoadResult{std::move(series.dataset), 0};
    }
    // Rebind the configured target channel and interval; fails loudly if the
    // requested channel does not exist in the generated series.
    return LoadResult{TimeSeriesDataset(series.dataset.channel_names(),
                                        series.dataset.raw_values(), data.interval_seconds,
                                        data.target_channel),
                      0};
}

std::string resolve_output_dir(const PipelineConfig& config) {
    std::string dir = config.output_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("TSBALANCE_OUT_DIR"); env != nullptr && *env != '\0') {
            dir = env;
        } else {
            dir = ".";
        }
    }
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace tsbal
