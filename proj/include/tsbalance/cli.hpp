#ifndef TSBALANCE_CLI_HPP
#define TSBALANCE_CLI_HPP

#include <ostream>
#include <string>

#include "tsbalance/config.hpp"

namespace tsbal::cli {

/// Generate the configured synthetic dataset and write it as CSV.
int cmd_synth(const PipelineConfig& config, const std::string& out_csv, std::ostream& log);

/// Compute train-pool weights, write weights.csv, print a quantile summary.
int cmd_weights(const PipelineConfig& config, std::ostream& log);

/// Draw one sample with the named sampler; write indices, provenance and the
/// before/after density report; render the densities as ASCII bars.
int cmd_sample(const PipelineConfig& config, const std::string& sampler_label, std::ostream& log);

/// Run the full cross-evaluation; write matrix.csv, matrix.txt and triples.csv.
int cmd_evaluate(const PipelineConfig& config, std::ostream& log);

/// Apply the min-of-max-error heuristic to a matrix CSV; write selection.json.
int cmd_select(const std::string& matrix_csv_path, const std::string& output_dir,
               std::ostream& log);

}  // namespace tsbal::cli

#endif  // TSBALANCE_CLI_HPP
