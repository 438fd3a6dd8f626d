#include "tsbalance/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "tsbalance/rng.hpp"

namespace tsbal {

double rmse(std::span<const double> predictions, std::span<const double> truths) {
    if (predictions.size() != truths.size()) {
        throw std::invalid_argument("rmse: length mismatch");
    }
    if (predictions.empty()) {
        throw std::invalid_argument("rmse: empty input");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - truths[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(predictions.size()));
}

EvalMatrix::EvalMatrix(std::vector<std::string> train_labels, std::vector<std::string> eval_labels)
    : train_labels_(std::move(train_labels)),
      eval_labels_(std::move(eval_labels)),
      cells_(train_labels_.size() * eval_labels_.size()) {
    if (train_labels_.empty() || eval_labels_.empty()) {
        throw std::invalid_argument("eval matrix: labels must be nonempty");
    }
}

EvalCell& EvalMatrix::at(std::size_t train, std::size_t eval) {
    return cells_[train * eval_labels_.size() + eval];
}

const EvalCell& EvalMatrix::at(std::size_t train, std::size_t eval) const {
    return cells_[train * eval_labels_.size() + eval];
}

std::size_t EvalMatrix::train_index(std::string_view label) const {
    auto it = std::find(train_labels_.begin(), train_labels_.end(), label);
    if (it == train_labels_.end()) {
        throw std::invalid_argument("eval matrix: unknown train label '" + std::string(label) + "'");
    }
    return static_cast<std::size_t>(it - train_labels_.begin());
}

std::size_t EvalMatrix::eval_index(std::string_view label) const {
    auto it = std::find(eval_labels_.begin(), eval_labels_.end(), label);
    if (it == eval_labels_.end()) {
        throw std::invalid_argument("eval matrix: unknown eval label '" + std::string(label) + "'");
    }
    return static_cast<std::size_t>(it - eval_labels_.begin());
}

const EvalCell& EvalMatrix::cell(std::string_view train_label, std::string_view eval_label) const {
    return at(train_index(train_label), eval_index(eval_label));
}

namespace {

void gather_windows(const TimeSeriesDataset& dataset, const WindowSpec& spec,
                    const std::vector<std::size_t>& indices, std::vector<Window>& windows,
                    std::vector<double>& targets) {
    windows.clear();
    targets.clear();
    windows.reserve(indices.size());
    targets.reserve(indices.size());
    for (std::size_t t : indices) {
        auto sample = window_at(dataset, spec, t);
        windows.push_back(std::move(sample.input));
        targets.push_back(sample.target);
    }
}

double weight_at(const WeightSeries& series, std::size_t index) {
    auto it = std::lower_bound(series.indices.begin(), series.indices.end(), index);
    if (it == series.indices.end() || *it != index) {
        throw std::logic_error("cross_evaluate: drawn index missing from weight series");
    }
    return series.weights[static_cast<std::size_t>(it - series.indices.begin())];
}

}  // namespace

CrossEvalResult cross_evaluate(const TimeSeriesDataset& dataset, const WindowSpec& window_spec,
                               const WeightFunctionSpec& weight_spec,
                               const std::vector<SamplerSpec>& samplers, const ModelSpec& model_spec,
                               const CrossEvalOptions& options) {
    if (samplers.empty()) {
        throw std::invalid_argument("cross_evaluate: at least one sampler required");
    }
    if (options.n_replicates < 1 || options.n_train < 1 || options.n_eval < 1) {
        throw std::invalid_argument("cross_evaluate: n_train, n_eval, n_replicates must be >= 1");
    }
    // The variation weight must look exactly one forecast horizon ahead.
    if (const auto* tv = std::get_if<TargetVariation>(&weight_spec)) {
        if (tv->delta_steps != window_spec.horizon_steps) {
            throw std::invalid_argument(
                "cross_evaluate: target variation delta must equal the forecast horizon");
        }
    }

    // "None" first, then the requested samplers, deduplicated by label.
    std::vector<SamplerSpec> specs{NoSampling{}};
    std::vector<std::string> labels{"None"};
    for (const auto& s : samplers) {
        const std::string label = sampler_label(s);
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
            labels.push_back(label);
            specs.push_back(s);
        }
    }
    const std::size_t n_samplers = specs.size();
    const std::size_t n_reps = options.n_replicates;

    const SplitResult split = split_chronological(dataset, window_spec, options.train_fraction);
    const WeightSeries train_weights =
        compute_weights(dataset, window_spec, weight_spec, split.train);
    const WeightSeries eval_weights = compute_weights(dataset, window_spec, weight_spec, split.eval);

    CrossEvalResult result;
    result.matrix = EvalMatrix(labels, labels);
    result.eval_draws.assign(n_samplers, std::vector<SampleIndexSet>(n_reps));
    result.replicate_rmse.assign(
        n_samplers, std::vector<std::vector<double>>(n_samplers, std::vector<double>(n_reps, 0.0)));
    if (options.record_triples) {
        result.triples.assign(
            n_samplers,
            std::vector<std::vector<std::vector<RawTriple>>>(
                n_samplers, std::vector<std::vector<RawTriple>>(n_reps)));
    }

    // Evaluation sets are drawn once per (eval sampler, replicate) and shared
    // across train samplers, so train-sampler comparisons see the same data.
    struct EvalSet {
        std::vector<Window> windows;
        std::vector<double> truths;
        std::vector<double> weights;
    };
    std::vector<std::vector<EvalSet>> eval_sets(n_samplers, std::vector<EvalSet>(n_reps));
    for (std::size_t b = 0; b < n_samplers; ++b) {
        for (std::size_t r = 0; r < n_reps; ++r) {
            auto drawn = draw(specs[b], eval_weights, options.n_eval,
                              rng::derive_seed(options.seed, labels[b], r, "eval"));
            EvalSet& set = eval_sets[b][r];
            gather_windows(dataset, window_spec, drawn.indices, set.windows, set.truths);
            set.weights.reserve(drawn.indices.size());
            for (std::size_t idx : drawn.indices) {
                set.weights.push_back(weight_at(eval_weights, idx));
            }
            result.eval_draws[b][r] = std::move(drawn);
        }
    }

    // One task per (train sampler, replicate); each writes to disjoint slots.
    const std::size_t n_tasks = n_samplers * n_reps;
    std::atomic<std::size_t> next_task{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const std::size_t target_column = dataset.column_index(window_spec.target_channel);
    auto run_task = [&](std::size_t task) {
        const std::size_t a = task / n_reps;
        const std::size_t r = task % n_reps;
        const auto train_set = draw(specs[a], train_weights, options.n_train,
                                    rng::derive_seed(options.seed, labels[a], r, "train"));
        std::vector<Window> windows;
        std::vector<double> targets;
        gather_windows(dataset, window_spec, train_set.indices, windows, targets);
        const TrainedModel model = fit(model_spec, windows, targets, target_column);

        std::vector<double> predictions;
        for (std::size_t b = 0; b < n_samplers; ++b) {
            const EvalSet& set = eval_sets[b][r];
            predictions.clear();
            predictions.reserve(set.windows.size());
            for (const auto& w : set.windows) {
                predictions.push_back(model.predict(w));
            }
            result.replicate_rmse[a][b][r] = rmse(predictions, set.truths);
            if (options.record_triples) {
                auto& log = result.triples[a][b][r];
                log.reserve(predictions.size());
                for (std::size_t i = 0; i < predictions.size(); ++i) {
                    log.push_back(RawTriple{result.eval_draws[b][r].indices[i], set.truths[i],
                                            predictions[i], set.weights[i]});
                }
            }
        }
    };

    auto worker = [&] {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= n_tasks) break;
            try {
                run_task(task);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };

    std::size_t n_threads = options.threads == 0
                                ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                                : options.threads;
    n_threads = std::min(n_threads, n_tasks);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    for (std::size_t a = 0; a < n_samplers; ++a) {
        for (std::size_t b = 0; b < n_samplers; ++b) {
            const auto& vals = result.replicate_rmse[a][b];
            const double mean =
                std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(n_reps);
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            result.matrix.at(a, b) =
                EvalCell{mean, std::sqrt(var / static_cast<double>(n_reps)), n_reps};
        }
    }
    return result;
}

RowMax max_error_row(const EvalMatrix& matrix, std::string_view train_label) {
    const std::size_t a = matrix.train_index(train_label);
    RowMax best{matrix.at(a, 0).mean, matrix.eval_labels()[0]};
    for (std::size_t b = 1; b < matrix.eval_labels().size(); ++b) {
        if (matrix.at(a, b).mean > best.max_error) {
            best.max_error = matrix.at(a, b).mean;
            best.eval_label = matrix.eval_labels()[b];
        }
    }
    return best;
}

SelectionResult select_sampler(const EvalMatrix& matrix) {
    struct Entry {
        SelectionEntry sel;
        double row_mean;
        std::size_t order;
    };
    std::vector<Entry> entries;
    entries.reserve(matrix.train_labels().size());
    for (std::size_t a = 0; a < matrix.train_labels().size(); ++a) {
        const auto& label = matrix.train_labels()[a];
        const RowMax rm = max_error_row(matrix, label);
        double mean = 0.0;
        for (std::size_t b = 0; b < matrix.eval_labels().size(); ++b) {
            mean += matrix.at(a, b).mean;
        }
        mean /= static_cast<double>(matrix.eval_labels().size());
        entries.push_back(Entry{SelectionEntry{label, rm.max_error, rm.eval_label}, mean, a});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.sel.max_error != y.sel.max_error) return x.sel.max_error < y.sel.max_error;
        if (x.row_mean != y.row_mean) return x.row_mean < y.row_mean;
        return x.order < y.order;
    });

    SelectionResult result;
    result.ranking.reserve(entries.size());
    for (auto& e : entries) {
        result.ranking.push_back(std::move(e.sel));
    }
    result.selected = result.ranking.front().train_label;
    return result;
}

}  // namespace tsbal
