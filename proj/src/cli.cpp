#include "tsbalance/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "tsbalance/evaluation.hpp"
#include "tsbalance/io.hpp"

namespace tsbal::cli {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (pos - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

WeightSeries train_pool_weights(const PipelineConfig& config, const TimeSeriesDataset& dataset,
                                IndexRange* train_range = nullptr) {
    const SplitResult split = split_chronological(dataset, config.window, config.train_fraction);
    if (train_range != nullptr) *train_range = split.train;
    return compute_weights(dataset, config.window, config.weight_function, split.train);
}

// File-name-safe form of a sampler label (e.g. "TUS-2.5" -> "TUS-2_5").
std::string slug(const std::string& label) {
    std::string s = label;
    for (char& c : s) {
        if (c == '.' || c == '/' || c == ' ') c = '_';
    }
    return s;
}

}  // namespace

int cmd_synth(const PipelineConfig& config, const std::string& out_csv, std::ostream& log) {
    if (!config.data.synthetic) {
        throw std::invalid_argument("synth: config has no 'data.synthetic' section");
    }
    const SyntheticSeries series = generate_synthetic(*config.data.synthetic);
    const std::string path =
        out_csv.empty() ? join(resolve_output_dir(config), "synthetic.csv") : out_csv;
    io::write_dataset_csv(series.dataset, path);
    log << "wrote " << path << "\n"
        << "rows=" << series.dataset.rows() << " channels=" << series.dataset.cols()
        << " events=" << series.event_count << "\n";
    return 0;
}

int cmd_weights(const PipelineConfig& config, std::ostream& log) {
    const LoadResult loaded = load_dataset(config.data);
    if (loaded.dropped_rows > 0) {
        log << "warning: dropped " << loaded.dropped_rows << " rows at load\n";
    }
    const WeightSeries ws = train_pool_weights(config, loaded.dataset);

    const std::string dir = resolve_output_dir(config);
    const std::string path = join(dir, "weights.csv");
    io::write_weight_csv(ws, path);

    log << "wrote " << path << " (" << ws.size() << " weights, "
        << weight_function_label(config.weight_function) << ")\n";
    const double max_w = *std::max_element(ws.weights.begin(), ws.weights.end());
    log << "quantiles:"
        << " min=" << io::format_double(quantile(ws.weights, 0.0))
        << " q25=" << io::format_double(quantile(ws.weights, 0.25))
        << " median=" << io::format_double(quantile(ws.weights, 0.5))
        << " q75=" << io::format_double(quantile(ws.weights, 0.75))
        << " q90=" << io::format_double(quantile(ws.weights, 0.9)) << " max="
        << io::format_double(max_w) << "\n";
    return 0;
}

int cmd_sample(const PipelineConfig& config, const std::string& sampler_label_arg,
               std::ostream& log) {
    const LoadResult loaded = load_dataset(config.data);

    std::vector<SamplerSpec> specs{NoSampling{}};
    specs.insert(specs.end(), config.samplers.begin(), config.samplers.end());
    const SamplerSpec* chosen = nullptr;
    std::string valid;
    for (const auto& s : specs) {
        const std::string label = sampler_label(s);
        if (!valid.empty()) valid += ", ";
        valid += label;
        if (label == sampler_label_arg) chosen = &s;
    }
    if (chosen == nullptr) {
        throw std::invalid_argument("sample: unknown sampler label '" + sampler_label_arg +
                                    "'; valid labels: " + valid);
    }

    IndexRange train_range;
    const WeightSeries ws = train_pool_weights(config, loaded.dataset, &train_range);
    const SampleIndexSet sample = draw(*chosen, ws, config.n_train, config.seed);

    std::vector<double> sampled_weights;
    sampled_weights.reserve(sample.size());
    for (std::size_t i = 0, j = 0; i < sample.size(); ++i) {
        while (ws.indices[j] != sample.indices[i]) ++j;
        sampled_weights.push_back(ws.weights[j]);
    }

    const BinningSpec binning = [&]() -> BinningSpec {
        if (const auto* ihs = std::get_if<InverseHistogramUndersampling>(chosen)) {
            return ihs->binning;
        }
        return AutoBinning{};
    }();
    const DensityReport report = density_report(ws.weights, sampled_weights, binning);

    const std::string dir = resolve_output_dir(config);
    const std::string tag = slug(sampler_label_arg);
    const std::string index_path = join(dir, "sample_" + tag + ".csv");
    const std::string prov_path = join(dir, "sample_" + tag + ".json");
    const std::string density_path = join(dir, "density_" + tag + ".csv");

    io::write_index_csv(sample, index_path);
    std::ofstream(prov_path) << io::provenance_json(*chosen, sample, train_range).dump(2) << "\n";
    io::write_density_csv(report, density_path);

    log << "wrote " << index_path << " (" << sample.size() << " indices)\n"
        << "wrote " << prov_path << "\n"
        << "wrote " << density_path << "\n";
    log << "weight density, before | after:\n" << io::render_density_ascii(report);
    return 0;
}

int cmd_evaluate(const PipelineConfig& config, std::ostream& log) {
    const LoadResult loaded = load_dataset(config.data);
    if (loaded.dropped_rows > 0) {
        log << "warning: dropped " << loaded.dropped_rows << " rows at load\n";
    }

    CrossEvalOptions options;
    options.n_train = config.n_train;
    options.n_eval = config.n_eval;
    options.n_replicates = config.n_replicates;
    options.seed = config.seed;
    options.train_fraction = config.train_fraction;
    options.threads = config.threads;
    options.record_triples = true;

    const CrossEvalResult result =
        cross_evaluate(loaded.dataset, config.window, config.weight_function, config.samplers,
                       config.model, options);

    const std::string dir = resolve_output_dir(config);
    const std::string matrix_path = join(dir, "matrix.csv");
    const std::string table_path = join(dir, "matrix.txt");
    const std::string triples_path = join(dir, "triples.csv");

    io::write_matrix_csv(result.matrix, matrix_path);
    const std::string table = io::format_matrix_table(result.matrix);
    std::ofstream(table_path) << table;
    io::write_triples_csv(result, triples_path);

    log << "model=" << model_label(config.model) << " replicates=" << config.n_replicates
        << " seed=" << config.seed << "\n";
    log << table;
    log << "wrote " << matrix_path << "\n"
        << "wrote " << table_path << "\n"
        << "wrote " << triples_path << "\n";
    return 0;
}

int cmd_select(const std::string& matrix_csv_path, const std::string& output_dir,
               std::ostream& log) {
    const EvalMatrix matrix = io::read_matrix_csv(matrix_csv_path);
    const SelectionResult result = select_sampler(matrix);
    const nlohmann::json j = io::selection_json(result);

    std::string dir = output_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("TSBALANCE_OUT_DIR"); env != nullptr && *env != '\0') {
            dir = env;
        } else {
            dir = ".";
        }
    }
    fs::create_directories(dir);
    const std::string path = join(dir, "selection.json");
    std::ofstream(path) << j.dump(2) << "\n";

    log << j.dump(2) << "\n";
    log << "wrote " << path << "\n";
    return 0;
}

}  // namespace tsbal::cli
