#ifndef TSBALANCE_MODELS_HPP
#define TSBALANCE_MODELS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tsbalance/dataset.hpp"

namespace tsbal {

/// Predicts the target channel's value at the last window row.
struct PersistenceSpec {
    bool operator==(const PersistenceSpec&) const = default;
};

struct RidgeSpec {
    double lambda = 1.0;
    bool operator==(const RidgeSpec&) const = default;
};

struct KnnSpec {
    std::size_t k = 5;
    bool operator==(const KnnSpec&) const = default;
};

/// One tanh hidden layer trained by seeded mini-batch gradient descent.
struct MlpSpec {
    std::size_t hidden_units = 16;
    std::size_t epochs = 30;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    bool operator==(const MlpSpec&) const = default;
};

using ModelSpec = std::variant<PersistenceSpec, RidgeSpec, KnnSpec, MlpSpec>;

std::string model_label(const ModelSpec& spec);

/**
 * Per-channel window features in channel-major order:
 * (mean, population std, min, max, last row value) for each channel,
 * so the dimension is 5 * C.
 */
std::vector<double> extract_features(const Window& window);

/// Per-dimension standardization statistics frozen at fit time.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;  // zero-variance dimensions stored as 1

    static Standardizer fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> apply(std::span<const double> x) const;
};

/**
 * Single-hidden-layer network y = w2 . tanh(W1 x + b1) + b2 with all
 * parameters in one flat vector (W1 row-major, then b1, w2, b2). Exposed so
 * the analytic gradient can be checked against finite differences.
 */
struct MlpNetwork {
    std::size_t input_dim = 0;
    std::size_t hidden_units = 0;
    std::vector<double> params;

    static MlpNetwork init(std::size_t input_dim, std::size_t hidden_units, std::uint64_t seed);
    std::size_t param_count() const noexcept { return hidden_units * (input_dim + 2) + 1; }
    double forward(std::span<const double> x) const;
};

/// Half mean squared error over the batch.
double mlp_loss(const MlpNetwork& net, const std::vector<std::vector<double>>& inputs,
                std::span<const double> targets);

/// Analytic gradient of mlp_loss with respect to net.params.
std::vector<double> mlp_gradient(const MlpNetwork& net,
                                 const std::vector<std::vector<double>>& inputs,
                                 std::span<const double> targets);

/**
 * A fitted forecaster. Feature standardization statistics are frozen at fit
 * time and applied on every prediction; instances are immutable and safe to
 * share across threads.
 */
class TrainedModel {
public:
    double predict(const Window& window) const;

    const std::string& label() const noexcept { return label_; }

    /// Ridge only: coefficients over standardized features, intercept first.
    const std::vector<double>& ridge_coefficients() const;
    const Standardizer& standardizer() const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);

private:
    friend TrainedModel fit(const ModelSpec&, std::span<const Window>, std::span<const double>,
                            std::size_t);

    // no default member initializers here: gcc 11 would then treat the nested
    // types as incomplete inside std::variant (PR c++/96645); every branch is
    // aggregate-initialized in full at fit/from_json time
    struct Persistence {
        std::size_t target_column;
    };
    struct Ridge {
        Standardizer standardizer;
        std::vector<double> beta;  // beta[0] = intercept
    };
    struct Knn {
        Standardizer standardizer;
        std::size_t k;
        std::vector<std::vector<double>> features;
        std::vector<double> targets;
    };
    struct Mlp {
        Standardizer standardizer;
        MlpNetwork net;
        double target_mean;
        double target_std;
    };

    std::variant<Persistence, Ridge, Knn, Mlp> state_;
    std::string label_;
    std::size_t window_rows_ = 0;
    std::size_t window_cols_ = 0;

    TrainedModel() = default;
};

/**
 * Fit a model on (window, target) pairs. `target_column` identifies the
 * target channel inside the window (used by the persistence baseline).
 * Ridge with lambda = 0 throws on a singular normal-equation system.
 */
TrainedModel fit(const ModelSpec& spec, std::span<const Window> windows,
                 std::span<const double> targets, std::size_t target_column);

}  // namespace tsbal

#endif  // TSBALANCE_MODELS_HPP
