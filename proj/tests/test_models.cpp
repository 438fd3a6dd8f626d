#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tsbalance/models.hpp"

using namespace tsbal;

namespace {

Window make_window(std::vector<double> values, std::size_t cols = 1) {
    Window w;
    w.cols = cols;
    w.rows = values.size() / cols;
    w.values = std::move(values);
    return w;
}

// Independent dense solver for the oracle side: Gauss-Jordan with partial
// pivoting, no relation to the Cholesky path used by the implementation.
std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const double diag = a[col][col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / diag;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

std::vector<Window> random_windows(std::mt19937_64& gen, std::size_t count, std::size_t rows,
                                   std::size_t cols) {
    std::normal_distribution<double> nrm(0.0, 2.0);
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> v(rows * cols);
        for (auto& x : v) x = 5.0 + nrm(gen);
        out.push_back(make_window(std::move(v), cols));
    }
    return out;
}

}  // namespace

TEST_CASE("extract_features: per-channel mean, std, min, max, last") {
    SUBCASE("single channel {1,2,3}") {
        const auto f = extract_features(make_window({1, 2, 3}));
        REQUIRE(f.size() == 5);
        CHECK(f[0] == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(f[1] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));  // population std
        CHECK(f[2] == 1.0);
        CHECK(f[3] == 3.0);
        CHECK(f[4] == 3.0);
    }
    SUBCASE("constant window") {
        const auto f = extract_features(make_window({5, 5, 5}));
        CHECK(f == std::vector<double>{5, 0, 5, 5, 5});
    }
    SUBCASE("two channels are channel-major") {
        // rows: (1, 10), (3, 30)
        const auto f = extract_features(make_window({1, 10, 3, 30}, 2));
        REQUIRE(f.size() == 10);
        CHECK(f[0] == 2.0);    // mean of channel 0
        CHECK(f[4] == 3.0);    // last of channel 0
        CHECK(f[5] == 20.0);   // mean of channel 1
        CHECK(f[9] == 30.0);   // last of channel 1
    }
    SUBCASE("empty window") {
        CHECK_THROWS_AS(extract_features(Window{}), std::invalid_argument);
    }
}

TEST_CASE("persistence predicts the last target-channel value") {
    const std::vector<Window> windows{make_window({60.0, 65.0, 70.0})};
    const std::vector<double> targets{71.0};
    const auto model = fit(PersistenceSpec{}, windows, targets, 0);
    CHECK(model.predict(windows[0]) == 70.0);

    // two channels, target is column 1
    const std::vector<Window> w2{make_window({1, 60, 2, 70}, 2)};
    const auto m2 = fit(PersistenceSpec{}, w2, targets, 1);
    CHECK(m2.predict(w2[0]) == 70.0);
    CHECK_THROWS_AS(m2.predict(windows[0]), std::invalid_argument);  // shape mismatch
}

TEST_CASE("ridge recovers an exactly linear relation (lambda = 0)") {
    std::mt19937_64 gen(11);
    auto windows = random_windows(gen, 60, 4, 1);
    std::vector<double> targets;
    targets.reserve(windows.size());
    for (const auto& w : windows) {
        const auto f = extract_features(w);
        targets.push_back(2.0 * f[0] + 1.0);  // y = 2 * mean + 1
    }
    const auto model = fit(RidgeSpec{0.0}, windows, targets, 0);

    // Oracle: unregularized normal equations on the same design matrix,
    // solved by an independent Gauss-Jordan elimination in original space.
    const std::size_t dim = 5;
    std::vector<std::vector<double>> m(dim + 1, std::vector<double>(dim + 1, 0.0));
    std::vector<double> b(dim + 1, 0.0);
    for (std::size_t s = 0; s < windows.size(); ++s) {
        std::vector<double> row{1.0};
        for (double v : extract_features(windows[s])) row.push_back(v);
        for (std::size_t i = 0; i <= dim; ++i) {
            b[i] += row[i] * targets[s];
            for (std::size_t j = 0; j <= dim; ++j) m[i][j] += row[i] * row[j];
        }
    }
    // min/max/std of the window are correlated but not collinear with the
    // mean here, so the system is well posed with lambda 0
    const auto oracle = gauss_solve(m, b);

    // compare in original-feature space via destandardization
    const auto& beta = model.ridge_coefficients();
    const auto& stats = model.standardizer();
    std::vector<double> coef(dim, 0.0);
    double intercept = beta[0];
    for (std::size_t j = 0; j < dim; ++j) {
        coef[j] = beta[j + 1] / stats.stds[j];
        intercept -= beta[j + 1] * stats.means[j] / stats.stds[j];
    }
    CHECK(intercept == doctest::Approx(oracle[0]).epsilon(1e-6));
    for (std::size_t j = 0; j < dim; ++j) {
        CHECK(coef[j] == doctest::Approx(oracle[j + 1]).scale(1.0).epsilon(1e-6));
    }

    SUBCASE("prediction from the recovered relation") {
        auto fresh = random_windows(gen, 1, 4, 1).front();
        // force the mean to exactly 3
        const auto f0 = extract_features(fresh);
        for (auto& v : fresh.values) v += 3.0 - f0[0];
        CHECK(model.predict(fresh) ==
              doctest::Approx(2.0 * 3.0 + 1.0).epsilon(1e-5));
    }
}

TEST_CASE("ridge optimality: gradient of the objective vanishes") {
    std::mt19937_64 gen(13);
    auto windows = random_windows(gen, 80, 5, 2);
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::vector<double> targets;
    for (const auto& w : windows) {
        const auto f = extract_features(w);
        targets.push_back(0.5 * f[1] - 0.25 * f[7] + nrm(gen));
    }
    const double lambda = 2.5;
    const auto model = fit(RidgeSpec{lambda}, windows, targets, 0);
    const auto& beta = model.ridge_coefficients();
    const auto& stats = model.standardizer();

    // gradient of sum (x.beta - y)^2 + lambda * |beta_1:|^2 over standardized x,
    // evaluated coordinate by coordinate
    std::vector<double> grad(beta.size(), 0.0);
    for (std::size_t s = 0; s < windows.size(); ++s) {
        const auto x = stats.apply(extract_features(windows[s]));
        double pred = beta[0];
        for (std::size_t j = 0; j < x.size(); ++j) pred += beta[j + 1] * x[j];
        const double r = pred - targets[s];
        grad[0] += 2.0 * r;
        for (std::size_t j = 0; j < x.size(); ++j) grad[j + 1] += 2.0 * r * x[j];
    }
    for (std::size_t j = 1; j < beta.size(); ++j) grad[j] += 2.0 * lambda * beta[j];

    double norm = 0.0;
    for (double g : grad) norm += g * g;
    CHECK(std::sqrt(norm) < 1e-8);
}

TEST_CASE("ridge singularity with lambda = 0 is reported") {
    // constant channel: zero-variance features make the system singular
    std::vector<Window> windows;
    for (int i = 0; i < 10; ++i) windows.push_back(make_window({3.0, 3.0, 3.0}));
    const std::vector<double> targets(10, 1.0);
    CHECK_THROWS_WITH_AS(static_cast<void>(fit(RidgeSpec{0.0}, windows, targets, 0)),
                         doctest::Contains("lambda"), std::invalid_argument);
    CHECK_NOTHROW(static_cast<void>(fit(RidgeSpec{1.0}, windows, targets, 0)));
}

TEST_CASE("knn") {
    std::mt19937_64 gen(19);
    auto windows = random_windows(gen, 25, 4, 1);
    std::vector<double> targets;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        targets.push_back(static_cast<double>(i));
    }
    SUBCASE("k=1 recovers a training point's own target") {
        const auto model = fit(KnnSpec{1}, windows, targets, 0);
        for (std::size_t i = 0; i < windows.size(); ++i) {
            CHECK(model.predict(windows[i]) == targets[i]);
        }
    }
    SUBCASE("k equal to the pool averages everything") {
        const auto model = fit(KnnSpec{25}, windows, targets, 0);
        CHECK(model.predict(windows[0]) == doctest::Approx(12.0).epsilon(1e-12));
    }
    SUBCASE("k larger than the pool is rejected") {
        CHECK_THROWS_AS(static_cast<void>(fit(KnnSpec{26}, windows, targets, 0)),
                        std::invalid_argument);
    }
}

TEST_CASE("mlp: same seed gives identical parameters, training reduces loss") {
    std::mt19937_64 gen(23);
    auto windows = random_windows(gen, 200, 6, 1);
    std::vector<double> targets;
    for (const auto& w : windows) {
        const auto f = extract_features(w);
        targets.push_back(std::tanh(f[0] - 5.0) + 0.3 * f[1]);
    }
    MlpSpec spec{8, 40, 0.05, 99};
    const auto a = fit(spec, windows, targets, 0);
    const auto b = fit(spec, windows, targets, 0);
    for (const auto& w : windows) {
        CHECK(a.predict(w) == b.predict(w));
    }

    // trained net beats predicting the mean
    double mean = 0.0;
    for (double t : targets) mean += t;
    mean /= static_cast<double>(targets.size());
    double mse_model = 0.0;
    double mse_mean = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const double e = a.predict(windows[i]) - targets[i];
        mse_model += e * e;
        mse_mean += (mean - targets[i]) * (mean - targets[i]);
    }
    CHECK(mse_model < 0.5 * mse_mean);
}

TEST_CASE("mlp analytic gradient matches central finite differences") {
    std::mt19937_64 gen(29);
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> dim_dist(2, 6);
    std::uniform_int_distribution<std::size_t> hidden_dist(1, 5);
    std::uniform_int_distribution<std::size_t> batch_dist(1, 8);

    for (int instance = 0; instance < 20; ++instance) {
        const std::size_t dim = dim_dist(gen);
        const std::size_t hidden = hidden_dist(gen);
        const std::size_t batch = batch_dist(gen);

        MlpNetwork net = MlpNetwork::init(dim, hidden, gen());
        std::vector<std::vector<double>> x(batch, std::vector<double>(dim));
        std::vector<double> y(batch);
        for (auto& row : x) {
            for (auto& v : row) v = nrm(gen);
        }
        for (auto& v : y) v = nrm(gen);

        const auto grad = mlp_gradient(net, x, y);
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t p = 0; p < net.params.size(); ++p) {
            MlpNetwork plus = net;
            MlpNetwork minus = net;
            plus.params[p] += h;
            minus.params[p] -= h;
            const double fd = (mlp_loss(plus, x, y) - mlp_loss(minus, x, y)) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(grad[p]), 1e-8});
            worst = std::max(worst, std::abs(fd - grad[p]) / denom);
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("standardization round trip leaves predictions unchanged") {
    std::mt19937_64 gen(37);
    auto windows = random_windows(gen, 40, 5, 2);
    std::vector<double> targets;
    std::normal_distribution<double> nrm(0.0, 1.0);
    for (const auto& w : windows) {
        targets.push_back(extract_features(w)[0] + 0.1 * nrm(gen));
    }

    // standardize-then-destandardize every window cell per channel
    std::vector<double> mean(2, 0.0);
    std::vector<double> sd(2, 0.0);
    std::size_t count = 0;
    for (const auto& w : windows) {
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) mean[c] += w.at(r, c);
        }
        count += w.rows;
    }
    for (auto& m : mean) m /= static_cast<double>(count);
    for (const auto& w : windows) {
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) {
                sd[c] += (w.at(r, c) - mean[c]) * (w.at(r, c) - mean[c]);
            }
        }
    }
    for (auto& s : sd) s = std::sqrt(s / static_cast<double>(count));

    auto round_tripped = windows;
    for (auto& w : round_tripped) {
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) {
                double& v = w.values[r * w.cols + c];
                v = ((v - mean[c]) / sd[c]) * sd[c] + mean[c];
            }
        }
    }

    const std::vector<ModelSpec> specs{PersistenceSpec{}, RidgeSpec{0.5}, KnnSpec{3}};
    for (const auto& spec : specs) {
        const auto m1 = fit(spec, windows, targets, 0);
        const auto m2 = fit(spec, round_tripped, targets, 0);
        for (const auto& w : windows) {
            CHECK(m1.predict(w) == doctest::Approx(m2.predict(w)).epsilon(1e-10));
        }
    }
}

TEST_CASE("trained model JSON round trip") {
    std::mt19937_64 gen(41);
    auto windows = random_windows(gen, 30, 4, 2);
    std::vector<double> targets;
    for (const auto& w : windows) targets.push_back(extract_features(w)[0]);

    const std::vector<ModelSpec> specs{PersistenceSpec{}, RidgeSpec{1.0}, KnnSpec{4},
                                       MlpSpec{4, 5, 0.05, 3}};
    for (const auto& spec : specs) {
        const auto original = fit(spec, windows, targets, 1);
        const auto restored = TrainedModel::from_json(original.to_json());
        CHECK(restored.label() == original.label());
        for (const auto& w : windows) {
            CHECK(restored.predict(w) == original.predict(w));
        }
    }
    CHECK_THROWS_AS(TrainedModel::from_json(nlohmann::json{
                        {"variant", "nope"}, {"window_rows", 4}, {"window_cols", 2}}),
                    std::invalid_argument);
}

TEST_CASE("fit rejects empty training data") {
    CHECK_THROWS_AS(
        static_cast<void>(fit(PersistenceSpec{}, std::vector<Window>{}, std::vector<double>{}, 0)),
        std::invalid_argument);
}
