#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tsbalance/cli.hpp"
#include "tsbalance/evaluation.hpp"
#include "tsbalance/io.hpp"

using namespace tsbal;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("tsbcli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json base_config_json(const std::string& out_dir) {
    return nlohmann::json{
        {"data",
         {{"synthetic",
           {{"length", 20000}, {"event_probability", 0.002}, {"seed", 3}}},
          {"target_channel", "temp"}}},
        {"window", {{"length_steps", 30}, {"horizon_steps", 30}}},
        {"weight_function", {{"variant", "target_variation"}}},
        {"samplers",
         nlohmann::json::array({{{"variant", "sus"}, {"factor", 1.0}},
                                {{"variant", "sus"}, {"factor", 3.0}},
                                {{"variant", "ihs"}}})},
        {"model", {{"variant", "persistence"}}},
        {"n_train", 1500},
        {"n_eval", 600},
        {"n_replicates", 2},
        {"seed", 5},
        {"output_dir", out_dir},
    };
}

PipelineConfig base_config(const std::string& out_dir) {
    return parse_config(base_config_json(out_dir));
}

}  // namespace

TEST_CASE("config parsing errors name the offending field") {
    auto j = base_config_json("/tmp");
    j["data"]["synthetic"]["event_probability"] = 1.5;
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("event_probability"),
                         std::invalid_argument);

    j = base_config_json("/tmp");
    j["train_fraction"] = 1.5;
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("train_fraction"),
                         std::invalid_argument);

    j = base_config_json("/tmp");
    j["model"] = {{"variant", "transformer"}};
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("model.variant"),
                         std::invalid_argument);

    j = base_config_json("/tmp");
    j["samplers"][0] = {{"variant", "sus"}};  // factor missing
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("factor"), std::invalid_argument);

    j = base_config_json("/tmp");
    j["data"].erase("synthetic");
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("data"), std::invalid_argument);
}

TEST_CASE("config defaults and weight-function wiring") {
    auto j = base_config_json("/tmp");
    j.erase("weight_function");
    j.erase("n_train");
    const auto c = parse_config(j);
    CHECK(c.n_train == 10000);  // documented default
    const auto* tv = std::get_if<TargetVariation>(&c.weight_function);
    REQUIRE(tv != nullptr);
    CHECK(tv->delta_steps == 30);  // defaults to the horizon
    CHECK(c.window.target_channel == "temp");
}

TEST_CASE("cmd_synth writes a loadable, reproducible CSV") {
    TempDir dir("synth");
    const auto config = base_config(dir.file("out"));
    std::ostringstream log;
    const auto csv_a = dir.file("a.csv");
    const auto csv_b = dir.file("b.csv");
    CHECK(cli::cmd_synth(config, csv_a, log) == 0);
    CHECK(cli::cmd_synth(config, csv_b, log) == 0);
    CHECK(read_file(csv_a) == read_file(csv_b));  // same seed, same bytes
    CHECK(log.str().find("events=") != std::string::npos);

    const auto loaded = load_csv(csv_a, "temp", 10.0);
    CHECK(loaded.dataset.rows() == 20000);
    CHECK(loaded.dataset.cols() == 3);
    CHECK(loaded.dropped_rows == 0);

    // the emitted CSV reproduces the generator output exactly
    const auto direct = generate_synthetic(*config.data.synthetic);
    CHECK(loaded.dataset == direct.dataset);
}

TEST_CASE("cmd_weights emits the train-pool weight series with a summary") {
    TempDir dir("weights");
    const auto config = base_config(dir.file("out"));
    std::ostringstream log;
    CHECK(cli::cmd_weights(config, log) == 0);

    const auto ws = io::read_weight_csv(dir.file("out/weights.csv"));
    const auto loaded = load_dataset(config.data);
    const auto split = split_chronological(loaded.dataset, config.window, config.train_fraction);
    CHECK(ws.size() == split.train.count());
    CHECK(ws.indices.front() == split.train.start);
    CHECK(log.str().find("median=") != std::string::npos);

    // right-skewed summary on the standard generator: median well below max
    const auto sorted_copy = [&] {
        auto v = ws.weights;
        std::sort(v.begin(), v.end());
        return v;
    }();
    CHECK(sorted_copy[ws.size() / 2] < 0.25 * sorted_copy.back());
}

TEST_CASE("cmd_weights on a constant target reports an all-zero summary") {
    TempDir dir("weights_zero");
    auto config = base_config(dir.file("out"));
    config.data.synthetic->event_probability = 0.0;
    config.data.synthetic->noise_std = 0.0;
    std::ostringstream log;
    CHECK(cli::cmd_weights(config, log) == 0);
    CHECK(log.str().find("max=0") != std::string::npos);
    const auto ws = io::read_weight_csv(dir.file("out/weights.csv"));
    for (double w : ws.weights) CHECK(w == 0.0);
}

TEST_CASE("missing target channel surfaces as a clear error") {
    TempDir dir("badtarget");
    auto j = base_config_json(dir.file("out"));
    j["data"]["target_channel"] = "pressure";
    const auto config = parse_config(j);
    std::ostringstream log;
    CHECK_THROWS_WITH_AS(cli::cmd_weights(config, log), doctest::Contains("pressure"),
                         std::invalid_argument);
}

TEST_CASE("cmd_sample writes indices, provenance and density files") {
    TempDir dir("sample");
    const auto config = base_config(dir.file("out"));
    std::ostringstream log;
    CHECK(cli::cmd_sample(config, "IHS", log) == 0);

    const auto indices = io::read_index_csv(dir.file("out/sample_IHS.csv"));
    CHECK(!indices.empty());
    CHECK(std::is_sorted(indices.begin(), indices.end()));

    nlohmann::json prov;
    std::ifstream(dir.file("out/sample_IHS.json")) >> prov;
    CHECK(prov.at("sampler") == "IHS");
    CHECK(prov.at("seed") == config.seed);

    const auto report = io::read_density_csv(dir.file("out/density_IHS.csv"));
    const double before = density_flatness_ratio(report.density_before);
    const double after = density_flatness_ratio(report.density_after);
    CHECK(after < before);  // IHS flattens the skewed weight distribution
    CHECK(log.str().find('#') != std::string::npos);

    SUBCASE("unknown sampler label lists the valid ones") {
        std::ostringstream sink;
        CHECK_THROWS_WITH_AS(cli::cmd_sample(config, "SMOTE", sink),
                             doctest::Contains("SUS-1"), std::invalid_argument);
    }
}

TEST_CASE("cmd_sample with None keeps the density roughly unchanged") {
    TempDir dir("sample_none");
    auto config = base_config(dir.file("out"));
    config.n_train = 5000;
    std::ostringstream log;
    CHECK(cli::cmd_sample(config, "None", log) == 0);
    const auto report = io::read_density_csv(dir.file("out/density_None.csv"));
    for (std::size_t i = 0; i + 1 < report.edges.size(); ++i) {
        // well-populated bins deviate by less than 10% relative
        if (report.density_before[i] * static_cast<double>(5000) *
                (report.edges[i + 1] - report.edges[i]) >
            200.0) {
            const double rel = std::abs(report.density_after[i] - report.density_before[i]) /
                               report.density_before[i];
            CHECK(rel < 0.10);
        }
    }
}

TEST_CASE("cmd_evaluate writes matrix, table and triples; reruns are identical") {
    TempDir dir("eval");
    auto config = base_config(dir.file("out"));
    config.samplers = {StochasticUndersampling{3.0}};
    std::ostringstream log;
    CHECK(cli::cmd_evaluate(config, log) == 0);
    const auto matrix_a = read_file(dir.file("out/matrix.csv"));
    CHECK(log.str().find("Trained on") != std::string::npos);

    const auto matrix = io::read_matrix_csv(dir.file("out/matrix.csv"));
    CHECK(matrix.train_labels() == std::vector<std::string>{"None", "SUS-3"});

    // persistence cross-link against the emitted triples, cell by cell
    const auto triples = io::read_triples_csv(dir.file("out/triples.csv"));
    CHECK(!triples.empty());
    for (const auto& train : matrix.train_labels()) {
        for (const auto& eval : matrix.eval_labels()) {
            double mean_rmse = 0.0;
            for (std::size_t r = 0; r < config.n_replicates; ++r) {
                double ss = 0.0;
                std::size_t n = 0;
                for (const auto& row : triples) {
                    if (row.train_label == train && row.eval_label == eval &&
                        row.replicate == r) {
                        ss += row.triple.weight * row.triple.weight;
                        ++n;
                    }
                }
                REQUIRE(n > 0);
                mean_rmse += std::sqrt(ss / static_cast<double>(n));
            }
            mean_rmse /= static_cast<double>(config.n_replicates);
            CHECK(matrix.cell(train, eval).mean == doctest::Approx(mean_rmse).epsilon(1e-9));
        }
    }

    // rerun into a second directory: byte-identical outputs
    TempDir dir2("eval2");
    auto config2 = config;
    config2.output_dir = dir2.file("out");
    std::ostringstream log2;
    CHECK(cli::cmd_evaluate(config2, log2) == 0);
    CHECK(read_file(dir2.file("out/matrix.csv")) == matrix_a);
    CHECK(read_file(dir2.file("out/triples.csv")) == read_file(dir.file("out/triples.csv")));
}

TEST_CASE("cmd_evaluate with two samplers yields a 3x3 matrix") {
    TempDir dir("eval3");
    auto config = base_config(dir.file("out"));
    config.samplers = {StochasticUndersampling{1.0}, InverseHistogramUndersampling{}};
    config.n_replicates = 1;
    std::ostringstream log;
    CHECK(cli::cmd_evaluate(config, log) == 0);
    const auto matrix = io::read_matrix_csv(dir.file("out/matrix.csv"));
    CHECK(matrix.train_labels() == std::vector<std::string>{"None", "SUS-1", "IHS"});
    CHECK(matrix.eval_labels() == matrix.train_labels());
    CHECK(fs::exists(dir.file("out/matrix.txt")));
    CHECK(fs::exists(dir.file("out/triples.csv")));
}

TEST_CASE("cmd_select reproduces the reference selection") {
    TempDir dir("select");
    // encode the reference grid whose row maxima are the worked example
    EvalMatrix m({"None", "SUS-1", "SUS-3", "IHS"}, {"None", "SUS-1", "SUS-3", "IHS"});
    const std::vector<std::vector<double>> means{
        {0.871, 1.684, 3.060, 3.142},
        {1.007, 1.462, 2.686, 2.703},
        {3.41, 2.4, 1.592, 2.283},
        {2.579, 2.016, 1.845, 2.145},
    };
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) m.at(a, b) = EvalCell{means[a][b], 0.05, 10};
    }
    const auto matrix_path = dir.file("matrix.csv");
    io::write_matrix_csv(m, matrix_path);

    std::ostringstream log;
    CHECK(cli::cmd_select(matrix_path, dir.file("out"), log) == 0);
    nlohmann::json sel;
    std::ifstream(dir.file("out/selection.json")) >> sel;
    CHECK(sel.at("selected") == "IHS");
    CHECK(sel.at("ranking")[0].at("train_label") == "IHS");
    CHECK(sel.at("ranking")[1].at("train_label") == "SUS-1");
    CHECK(sel.at("ranking")[2].at("train_label") == "None");
    CHECK(sel.at("ranking")[3].at("train_label") == "SUS-3");

    SUBCASE("single-row matrix") {
        EvalMatrix single({"SUS-1"}, {"SUS-1"});
        single.at(0, 0) = EvalCell{1.0, 0.0, 1};
        const auto p = dir.file("single.csv");
        io::write_matrix_csv(single, p);
        std::ostringstream slog;
        CHECK(cli::cmd_select(p, dir.file("out"), slog) == 0);
        CHECK(slog.str().find("SUS-1") != std::string::npos);
    }
    SUBCASE("malformed matrix csv") {
        const auto p = dir.file("bad.csv");
        std::ofstream(p) << "train_label,eval_label,mean\nA,A,1\n";
        std::ostringstream slog;
        CHECK_THROWS_WITH_AS(cli::cmd_select(p, dir.file("out"), slog), doctest::Contains("std"),
                             std::runtime_error);
    }
}

TEST_CASE("TSBALANCE_OUT_DIR supplies the default output directory") {
    TempDir dir("envdir");
    auto config = base_config("");
    config.output_dir.clear();
    setenv("TSBALANCE_OUT_DIR", dir.file("envout").c_str(), 1);
    std::ostringstream log;
    CHECK(cli::cmd_weights(config, log) == 0);
    unsetenv("TSBALANCE_OUT_DIR");
    CHECK(fs::exists(dir.file("envout/weights.csv")));
}
