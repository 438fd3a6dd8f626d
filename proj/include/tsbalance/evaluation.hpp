#ifndef TSBALANCE_EVALUATION_HPP
#define TSBALANCE_EVALUATION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsbalance/dataset.hpp"
#include "tsbalance/models.hpp"
#include "tsbalance/sampling.hpp"
#include "tsbalance/weights.hpp"

namespace tsbal {

double rmse(std::span<const double> predictions, std::span<const double> truths);

struct EvalCell {
    double mean = 0.0;
    double stddev = 0.0;  // population std over replicates
    std::size_t replicates = 0;
};

/**
 * (train sampler x eval sampler) grid of RMSE aggregates. Row and column
 * labels share the same order; "None" is always first.
 */
class EvalMatrix {
public:
    EvalMatrix() = default;
    EvalMatrix(std::vector<std::string> train_labels, std::vector<std::string> eval_labels);

    const std::vector<std::string>& train_labels() const noexcept { return train_labels_; }
    const std::vector<std::string>& eval_labels() const noexcept { return eval_labels_; }

    EvalCell& at(std::size_t train, std::size_t eval);
    const EvalCell& at(std::size_t train, std::size_t eval) const;
    const EvalCell& cell(std::string_view train_label, std::string_view eval_label) const;

    std::size_t train_index(std::string_view label) const;
    std::size_t eval_index(std::string_view label) const;

private:
    std::vector<std::string> train_labels_;
    std::vector<std::string> eval_labels_;
    std::vector<EvalCell> cells_;
};

/// One evaluated sample: time index, truth, model output and its weight.
struct RawTriple {
    std::size_t index = 0;
    double truth = 0.0;
    double prediction = 0.0;
    double weight = 0.0;
};

struct CrossEvalOptions {
    std::size_t n_train = 10000;
    std::size_t n_eval = 2000;
    std::size_t n_replicates = 10;
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
    std::size_t threads = 1;      // 0 = hardware concurrency
    bool record_triples = false;  // per-cell (truth, prediction, weight) logs
};

struct CrossEvalResult {
    EvalMatrix matrix;

    /// Drawn evaluation sets [eval sampler][replicate]; shared across all
    /// train samplers within a replicate.
    std::vector<std::vector<SampleIndexSet>> eval_draws;

    /// Per-replicate RMSE, indexed [train][eval][replicate].
    std::vector<std::vector<std::vector<double>>> replicate_rmse;

    /// [train][eval][replicate] sample logs; empty unless requested.
    std::vector<std::vector<std::vector<std::vector<RawTriple>>>> triples;
};

/**
 * The full train/evaluate protocol: chronological split, per-replicate draws
 * with derived seeds, one model fit per (train sampler, replicate), and RMSE
 * on evaluation sets that are shared across train samplers. "None" is
 * prepended to the sampler list. Deterministic for a fixed master seed,
 * independent of thread count.
 */
CrossEvalResult cross_evaluate(const TimeSeriesDataset& dataset, const WindowSpec& window_spec,
                               const WeightFunctionSpec& weight_spec,
                               const std::vector<SamplerSpec>& samplers, const ModelSpec& model_spec,
                               const CrossEvalOptions& options);

struct RowMax {
    double max_error = 0.0;
    std::string eval_label;
};

/// Highest mean RMSE in a train row and the eval label attaining it
/// (first label by order on ties).
RowMax max_error_row(const EvalMatrix& matrix, std::string_view train_label);

struct SelectionEntry {
    std::string train_label;
    double max_error = 0.0;
    std::string eval_label;  // where the max was measured
};

/// Train labels ranked ascending by worst-case error; front() is selected.
struct SelectionResult {
    std::vector<SelectionEntry> ranking;
    std::string selected;
};

/// Min-of-max-error heuristic; ties broken by smaller row mean, then label order.
SelectionResult select_sampler(const EvalMatrix& matrix);

}  // namespace tsbal

#endif  // TSBALANCE_EVALUATION_HPP
