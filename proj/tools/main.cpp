#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tsbalance/cli.hpp"
#include "tsbalance/config.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_train;
    std::optional<std::size_t> n_eval;
    std::optional<std::size_t> n_replicates;
    std::optional<double> train_fraction;
    std::optional<std::size_t> threads;
    std::optional<std::string> output_dir;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Master seed (overrides config)");
    cmd->add_option("--n-train", o.n_train, "Training sample size");
    cmd->add_option("--n-eval", o.n_eval, "Evaluation sample size");
    cmd->add_option("--n-replicates", o.n_replicates, "Replicates per cell");
    cmd->add_option("--train-fraction", o.train_fraction, "Chronological train fraction");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--output-dir", o.output_dir, "Output directory");
}

tsbal::PipelineConfig configured(const std::string& path, const Overrides& o) {
    tsbal::PipelineConfig c = tsbal::load_config(path);
    if (o.seed) c.seed = *o.seed;
    if (o.n_train) c.n_train = *o.n_train;
    if (o.n_eval) c.n_eval = *o.n_eval;
    if (o.n_replicates) c.n_replicates = *o.n_replicates;
    if (o.train_fraction) c.train_fraction = *o.train_fraction;
    if (o.threads) c.threads = *o.threads;
    if (o.output_dir) c.output_dir = *o.output_dir;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weight-based under-sampling and evaluation for imbalanced time-series forecasting"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;

    auto* synth = app.add_subcommand("synth", "Generate the configured synthetic dataset as CSV");
    std::string synth_out;
    synth->add_option("--config", config_path, "Pipeline config JSON")->required();
    synth->add_option("--out", synth_out, "Output CSV path (default <output_dir>/synthetic.csv)");
    add_override_flags(synth, overrides);

    auto* weights = app.add_subcommand("weights", "Compute and export train-pool weights");
    weights->add_option("--config", config_path, "Pipeline config JSON")->required();
    add_override_flags(weights, overrides);

    auto* sample = app.add_subcommand("sample", "Draw a sample and report the density change");
    std::string sampler_label;
    sample->add_option("--config", config_path, "Pipeline config JSON")->required();
    sample->add_option("--sampler", sampler_label, "Sampler label, e.g. None, SUS-1, IHS")
        ->required();
    add_override_flags(sample, overrides);

    auto* evaluate = app.add_subcommand("evaluate", "Build the train-vs-eval sampler RMSE matrix");
    evaluate->add_option("--config", config_path, "Pipeline config JSON")->required();
    add_override_flags(evaluate, overrides);

    auto* select = app.add_subcommand("select", "Pick a sampler from a matrix CSV (min of max error)");
    std::string matrix_path;
    std::string select_out_dir;
    select->add_option("--matrix", matrix_path, "matrix.csv produced by evaluate")->required();
    select->add_option("--output-dir", select_out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return tsbal::cli::cmd_synth(configured(config_path, overrides), synth_out, std::cout);
        }
        if (weights->parsed()) {
            return tsbal::cli::cmd_weights(configured(config_path, overrides), std::cout);
        }
        if (sample->parsed()) {
            return tsbal::cli::cmd_sample(configured(config_path, overrides), sampler_label,
                                          std::cout);
        }
        if (evaluate->parsed()) {
            return tsbal::cli::cmd_evaluate(configured(config_path, overrides), std::cout);
        }
        if (select->parsed()) {
            return tsbal::cli::cmd_select(matrix_path, select_out_dir, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
