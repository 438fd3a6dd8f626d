#include "tsbalance/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tsbalance/rng.hpp"

namespace tsbal {

std::string model_label(const ModelSpec& spec) {
    if (std::holds_alternative<PersistenceSpec>(spec)) return "persistence";
    if (std::holds_alternative<RidgeSpec>(spec)) return "ridge";
    if (std::holds_alternative<KnnSpec>(spec)) return "knn";
    return "mlp";
}

std::vector<double> extract_features(const Window& window) {
    if (window.rows == 0 || window.cols == 0) {
        throw std::invalid_argument("extract_features: empty window");
    }
    std::vector<double> f;
    f.reserve(5 * window.cols);
    const double n = static_cast<double>(window.rows);
    for (std::size_t c = 0; c < window.cols; ++c) {
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < window.rows; ++r) {
            const double v = window.at(r, c);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < window.rows; ++r) {
            const double d = window.at(r, c) - mean;
            ss += d * d;
        }
        f.push_back(mean);
        f.push_back(std::sqrt(ss / n));  // population std
        f.push_back(lo);
        f.push_back(hi);
        f.push_back(window.at(window.rows - 1, c));
    }
    return f;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("standardizer: no rows");
    }
    const std::size_t dim = rows.front().size();
    Standardizer s;
    s.means.assign(dim, 0.0);
    s.stds.assign(dim, 0.0);
    const double n = static_cast<double>(rows.size());
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < dim; ++j) s.means[j] += row[j];
    }
    for (std::size_t j = 0; j < dim; ++j) s.means[j] /= n;
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = row[j] - s.means[j];
            s.stds[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        s.stds[j] = std::sqrt(s.stds[j] / n);
        if (s.stds[j] == 0.0) s.stds[j] = 1.0;  // constant feature
    }
    return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (x.size() != means.size()) {
        throw std::invalid_argument("standardizer: dimension mismatch");
    }
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = (x[j] - means[j]) / stds[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

MlpNetwork MlpNetwork::init(std::size_t input_dim, std::size_t hidden_units, std::uint64_t seed) {
    if (input_dim == 0 || hidden_units == 0) {
        throw std::invalid_argument("mlp: input_dim and hidden_units must be >= 1");
    }
    MlpNetwork net;
    net.input_dim = input_dim;
    net.hidden_units = hidden_units;
    net.params.assign(net.param_count(), 0.0);

    std::mt19937_64 gen(rng::splitmix64(seed));
    std::normal_distribution<double> nrm(0.0, 1.0);
    const double w1_scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double w2_scale = 1.0 / std::sqrt(static_cast<double>(hidden_units));
    std::size_t p = 0;
    for (std::size_t i = 0; i < hidden_units * input_dim; ++i) {
        net.params[p++] = nrm(gen) * w1_scale;  // W1
    }
    p += hidden_units;  // b1 stays zero
    for (std::size_t i = 0; i < hidden_units; ++i) {
        net.params[p++] = nrm(gen) * w2_scale;  // w2
    }
    // b2 stays zero
    return net;
}

namespace {

struct MlpViews {
    const double* w1;  // H x D row-major
    const double* b1;  // H
    const double* w2;  // H
    const double* b2;  // 1
};

MlpViews views(const MlpNetwork& net) {
    const double* p = net.params.data();
    MlpViews v;
    v.w1 = p;
    v.b1 = p + net.hidden_units * net.input_dim;
    v.w2 = v.b1 + net.hidden_units;
    v.b2 = v.w2 + net.hidden_units;
    return v;
}

void hidden_activations(const MlpNetwork& net, std::span<const double> x, std::vector<double>& h) {
    const MlpViews v = views(net);
    h.resize(net.hidden_units);
    for (std::size_t i = 0; i < net.hidden_units; ++i) {
        double a = v.b1[i];
        const double* row = v.w1 + i * net.input_dim;
        for (std::size_t j = 0; j < net.input_dim; ++j) {
            a += row[j] * x[j];
        }
        h[i] = std::tanh(a);
    }
}

}  // namespace

double MlpNetwork::forward(std::span<const double> x) const {
    if (x.size() != input_dim) {
        throw std::invalid_argument("mlp forward: input dimension mismatch");
    }
    const MlpViews v = views(*this);
    std::vector<double> h;
    hidden_activations(*this, x, h);
    double y = *v.b2;
    for (std::size_t i = 0; i < hidden_units; ++i) {
        y += v.w2[i] * h[i];
    }
    return y;
}

double mlp_loss(const MlpNetwork& net, const std::vector<std::vector<double>>& inputs,
                std::span<const double> targets) {
    if (inputs.size() != targets.size() || inputs.empty()) {
        throw std::invalid_argument("mlp_loss: inputs/targets size mismatch or empty");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double e = net.forward(inputs[i]) - targets[i];
        loss += 0.5 * e * e;
    }
    return loss / static_cast<double>(inputs.size());
}

std::vector<double> mlp_gradient(const MlpNetwork& net,
                                 const std::vector<std::vector<double>>& inputs,
                                 std::span<const double> targets) {
    if (inputs.size() != targets.size() || inputs.empty()) {
        throw std::invalid_argument("mlp_gradient: inputs/targets size mismatch or empty");
    }
    const MlpViews v = views(net);
    std::vector<double> grad(net.params.size(), 0.0);
    double* gw1 = grad.data();
    double* gb1 = gw1 + net.hidden_units * net.input_dim;
    double* gw2 = gb1 + net.hidden_units;
    double* gb2 = gw2 + net.hidden_units;

    std::vector<double> h;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const auto& x = inputs[s];
        hidden_activations(net, x, h);
        double y = *v.b2;
        for (std::size_t i = 0; i < net.hidden_units; ++i) y += v.w2[i] * h[i];
        const double e = y - targets[s];

        *gb2 += e;
        for (std::size_t i = 0; i < net.hidden_units; ++i) {
            gw2[i] += e * h[i];
            const double da = e * v.w2[i] * (1.0 - h[i] * h[i]);
            gb1[i] += da;
            double* row = gw1 + i * net.input_dim;
            for (std::size_t j = 0; j < net.input_dim; ++j) {
                row[j] += da * x[j];
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(inputs.size());
    for (double& g : grad) g *= inv_n;
    return grad;
}

// ---------------------------------------------------------------------------
// Ridge: Cholesky solve of the normal equations
// ---------------------------------------------------------------------------

namespace {

// Solve M x = b for symmetric positive definite M (row-major dense).
// Throws when a pivot is not positive (singular or indefinite system).
std::vector<double> cholesky_solve(std::vector<double> m, std::vector<double> b, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = m[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) {
                sum -= m[i * dim + k] * m[j * dim + k];
            }
            if (i == j) {
                if (!(sum > 1e-12)) {
                    throw std::invalid_argument(
                        "ridge: singular normal equations; use lambda > 0");
                }
                m[i * dim + j] = std::sqrt(sum);
            } else {
                m[i * dim + j] = sum / m[j * dim + j];
            }
        }
    }
    // forward substitution L z = b
    for (std::size_t i = 0; i < dim; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            sum -= m[i * dim + k] * b[k];
        }
        b[i] = sum / m[i * dim + i];
    }
    // back substitution L^T x = z
    for (std::size_t ii = dim; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < dim; ++k) {
            sum -= m[k * dim + ii] * b[k];
        }
        b[ii] = sum / m[ii * dim + ii];
    }
    return b;
}

std::vector<std::vector<double>> feature_rows(std::span<const Window> windows) {
    std::vector<std::vector<double>> rows;
    rows.reserve(windows.size());
    for (const auto& w : windows) {
        rows.push_back(extract_features(w));
    }
    return rows;
}

}  // namespace

TrainedModel fit(const ModelSpec& spec, std::span<const Window> windows,
                 std::span<const double> targets, std::size_t target_column) {
    if (windows.empty() || windows.size() != targets.size()) {
        throw std::invalid_argument("fit: need at least one (window, target) pair");
    }
    TrainedModel model;
    model.label_ = model_label(spec);
    model.window_rows_ = windows.front().rows;
    model.window_cols_ = windows.front().cols;

    if (std::holds_alternative<PersistenceSpec>(spec)) {
        if (target_column >= model.window_cols_) {
            throw std::invalid_argument("fit: target column outside window");
        }
        model.state_ = TrainedModel::Persistence{target_column};
        return model;
    }

    auto rows = feature_rows(windows);
    Standardizer std_stats = Standardizer::fit(rows);
    std::vector<std::vector<double>> x(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        x[i] = std_stats.apply(rows[i]);
    }
    const std::size_t dim = x.front().size();

    if (const auto* ridge = std::get_if<RidgeSpec>(&spec)) {
        if (!(ridge->lambda >= 0.0)) {
            throw std::invalid_argument("fit: ridge lambda must be >= 0");
        }
        // Normal equations over [1 | X], intercept unpenalized.
        const std::size_t d1 = dim + 1;
        std::vector<double> m(d1 * d1, 0.0);
        std::vector<double> b(d1, 0.0);
        for (std::size_t s = 0; s < x.size(); ++s) {
            const auto& row = x[s];
            m[0] += 1.0;
            b[0] += targets[s];
            for (std::size_t i = 0; i < dim; ++i) {
                m[(i + 1) * d1] += row[i];
                b[i + 1] += row[i] * targets[s];
                for (std::size_t j = 0; j <= i; ++j) {
                    m[(i + 1) * d1 + (j + 1)] += row[i] * row[j];
                }
            }
        }
        for (std::size_t i = 0; i < d1; ++i) {
            if (i > 0) m[i * d1 + i] += ridge->lambda;
            for (std::size_t j = 0; j < i; ++j) {
                m[j * d1 + i] = m[i * d1 + j];
            }
        }
        // solve before the aggregate: gcc 11 fails to destroy already-built
        // members of a braced temporary when a later initializer throws
        auto beta = cholesky_solve(m, b, d1);
        model.state_ = TrainedModel::Ridge{std::move(std_stats), std::move(beta)};
        return model;
    }

    if (const auto* knn = std::get_if<KnnSpec>(&spec)) {
        if (knn->k < 1 || knn->k > x.size()) {
            throw std::invalid_argument("fit: knn k must be in [1, #pairs]");
        }
        std::vector<double> stored_targets(targets.begin(), targets.end());
        model.state_ = TrainedModel::Knn{std::move(std_stats), knn->k, std::move(x),
                                         std::move(stored_targets)};
        return model;
    }

    const auto& mlp = std::get<MlpSpec>(spec);
    if (mlp.hidden_units < 1 || mlp.epochs < 1 || !(mlp.learning_rate > 0.0)) {
        throw std::invalid_argument("fit: invalid mlp spec");
    }
    double t_mean = 0.0;
    for (double t : targets) t_mean += t;
    t_mean /= static_cast<double>(targets.size());
    double t_var = 0.0;
    for (double t : targets) t_var += (t - t_mean) * (t - t_mean);
    double t_std = std::sqrt(t_var / static_cast<double>(targets.size()));
    if (t_std == 0.0) t_std = 1.0;
    std::vector<double> y(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        y[i] = (targets[i] - t_mean) / t_std;
    }

    MlpNetwork net = MlpNetwork::init(dim, mlp.hidden_units, mlp.seed);
    std::mt19937_64 shuffle_gen(rng::splitmix64(mlp.seed ^ 0x5eedULL));
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    constexpr std::size_t kBatch = 32;
    std::vector<std::vector<double>> batch_x;
    std::vector<double> batch_y;
    for (std::size_t epoch = 0; epoch < mlp.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_gen);
        for (std::size_t start = 0; start < order.size(); start += kBatch) {
            const std::size_t stop = std::min(start + kBatch, order.size());
            batch_x.clear();
            batch_y.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch_x.push_back(x[order[i]]);
                batch_y.push_back(y[order[i]]);
            }
            const auto grad = mlp_gradient(net, batch_x, batch_y);
            for (std::size_t p = 0; p < net.params.size(); ++p) {
                net.params[p] -= mlp.learning_rate * grad[p];
            }
        }
    }
    model.state_ = TrainedModel::Mlp{std::move(std_stats), std::move(net), t_mean, t_std};
    return model;
}

double TrainedModel::predict(const Window& window) const {
    if (window.rows != window_rows_ || window.cols != window_cols_) {
        throw std::invalid_argument("predict: window shape mismatch");
    }
    if (const auto* p = std::get_if<Persistence>(&state_)) {
        return window.at(window.rows - 1, p->target_column);
    }
    const auto features = extract_features(window);
    if (const auto* r = std::get_if<Ridge>(&state_)) {
        const auto x = r->standardizer.apply(features);
        double y = r->beta[0];
        for (std::size_t j = 0; j < x.size(); ++j) {
            y += r->beta[j + 1] * x[j];
        }
        return y;
    }
    if (const auto* k = std::get_if<Knn>(&state_)) {
        const auto x = k->standardizer.apply(features);
        // (distance^2, index) pairs; ties broken by training order
        std::vector<std::pair<double, std::size_t>> d;
        d.reserve(k->features.size());
        for (std::size_t i = 0; i < k->features.size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double diff = x[j] - k->features[i][j];
                s += diff * diff;
            }
            d.emplace_back(s, i);
        }
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k->k), d.end());
        double sum = 0.0;
        for (std::size_t i = 0; i < k->k; ++i) {
            sum += k->targets[d[i].second];
        }
        return sum / static_cast<double>(k->k);
    }
    const auto& m = std::get<Mlp>(state_);
    const auto x = m.standardizer.apply(features);
    return m.net.forward(x) * m.target_std + m.target_mean;
}

const std::vector<double>& TrainedModel::ridge_coefficients() const {
    const auto* r = std::get_if<Ridge>(&state_);
    if (r == nullptr) {
        throw std::logic_error("ridge_coefficients: not a ridge model");
    }
    return r->beta;
}

const Standardizer& TrainedModel::standardizer() const {
    if (const auto* r = std::get_if<Ridge>(&state_)) return r->standardizer;
    if (const auto* k = std::get_if<Knn>(&state_)) return k->standardizer;
    if (const auto* m = std::get_if<Mlp>(&state_)) return m->standardizer;
    throw std::logic_error("standardizer: persistence model has no standardizer");
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

namespace {

nlohmann::json standardizer_json(const Standardizer& s) {
    return nlohmann::json{{"means", s.means}, {"stds", s.stds}};
}

Standardizer standardizer_from(const nlohmann::json& j) {
    Standardizer s;
    s.means = j.at("means").get<std::vector<double>>();
    s.stds = j.at("stds").get<std::vector<double>>();
    return s;
}

}  // namespace

nlohmann::json TrainedModel::to_json() const {
    nlohmann::json j;
    j["variant"] = label_;
    j["window_rows"] = window_rows_;
    j["window_cols"] = window_cols_;
    if (const auto* p = std::get_if<Persistence>(&state_)) {
        j["target_column"] = p->target_column;
    } else if (const auto* r = std::get_if<Ridge>(&state_)) {
        j["standardization"] = standardizer_json(r->standardizer);
        j["beta"] = r->beta;
    } else if (const auto* k = std::get_if<Knn>(&state_)) {
        j["standardization"] = standardizer_json(k->standardizer);
        j["k"] = k->k;
        j["features"] = k->features;
        j["targets"] = k->targets;
    } else {
        const auto& m = std::get<Mlp>(state_);
        j["standardization"] = standardizer_json(m.standardizer);
        j["input_dim"] = m.net.input_dim;
        j["hidden_units"] = m.net.hidden_units;
        j["params"] = m.net.params;
        j["target_mean"] = m.target_mean;
        j["target_std"] = m.target_std;
    }
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    TrainedModel model;
    model.label_ = j.at("variant").get<std::string>();
    model.window_rows_ = j.at("window_rows").get<std::size_t>();
    model.window_cols_ = j.at("window_cols").get<std::size_t>();
    if (model.label_ == "persistence") {
        model.state_ = Persistence{j.at("target_column").get<std::size_t>()};
    } else if (model.label_ == "ridge") {
        model.state_ = Ridge{standardizer_from(j.at("standardization")),
                             j.at("beta").get<std::vector<double>>()};
    } else if (model.label_ == "knn") {
        model.state_ = Knn{standardizer_from(j.at("standardization")),
                           j.at("k").get<std::size_t>(),
                           j.at("features").get<std::vector<std::vector<double>>>(),
                           j.at("targets").get<std::vector<double>>()};
    } else if (model.label_ == "mlp") {
        MlpNetwork net;
        net.input_dim = j.at("input_dim").get<std::size_t>();
        net.hidden_units = j.at("hidden_units").get<std::size_t>();
        net.params = j.at("params").get<std::vector<double>>();
        if (net.params.size() != net.param_count()) {
            throw std::invalid_argument("model json: mlp parameter count mismatch");
        }
        model.state_ = Mlp{standardizer_from(j.at("standardization")), std::move(net),
                           j.at("target_mean").get<double>(), j.at("target_std").get<double>()};
    } else {
        throw std::invalid_argument("model json: unknown variant '" + model.label_ + "'");
    }
    return model;
}

}  // namespace tsbal
