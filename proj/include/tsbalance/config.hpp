#ifndef TSBALANCE_CONFIG_HPP
#define TSBALANCE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsbalance/dataset.hpp"
#include "tsbalance/models.hpp"
#include "tsbalance/sampling.hpp"
#include "tsbalance/weights.hpp"

namespace tsbal {

/// Where the series comes from: a CSV file or the synthetic generator.
struct DataConfig {
    std::optional<std::string> csv_path;
    std::optional<SyntheticConfig> synthetic;
    std::string target_channel = "temp";
    double interval_seconds = 10.0;
};

/**
 * Declarative description of a full pipeline run, loaded from a JSON file.
 * CLI flags may override individual fields after parsing.
 */
struct PipelineConfig {
    DataConfig data;
    WindowSpec window{30, 30, "temp"};
    WeightFunctionSpec weight_function = TargetVariation{30};
    std::vector<SamplerSpec> samplers;
    ModelSpec model = RidgeSpec{1.0};
    std::size_t n_train = 10000;
    std::size_t n_eval = 2000;
    double train_fraction = 0.7;
    std::size_t n_replicates = 10;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string output_dir;  // empty: $TSBALANCE_OUT_DIR, else "."
};

/// Parse a config document; error messages name the offending field.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);

/// Materialize the configured dataset (load or generate).
LoadResult load_dataset(const DataConfig& data);

/// Output directory after applying the env-var default; created if missing.
std::string resolve_output_dir(const PipelineConfig& config);

}  // namespace tsbal

#endif  // TSBALANCE_CONFIG_HPP
