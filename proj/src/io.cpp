#include "tsbalance/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tsbal::io {

std::string format_double(double v) {
    char buf[32];
    // %.17g round-trips any finite double and is byte-stable across runs.
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return in;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(pos)));
            break;
        }
        fields.emplace_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

double parse_double(const std::string& field, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::runtime_error(context + ": cannot parse '" + field + "' as a number");
    }
    return v;
}

std::size_t parse_size(const std::string& field, const std::string& context) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::runtime_error(context + ": cannot parse '" + field + "' as an index");
    }
    return v;
}

}  // namespace

void write_dataset_csv(const TimeSeriesDataset& dataset, const std::string& path) {
    auto out = open_out(path);
    const auto& names = dataset.channel_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        out << (c ? "," : "") << names[c];
    }
    out << '\n';
    for (std::size_t t = 0; t < dataset.rows(); ++t) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            out << (c ? "," : "") << format_double(dataset.value(t, c));
        }
        out << '\n';
    }
}

void write_weight_csv(const WeightSeries& series, const std::string& path) {
    auto out = open_out(path);
    out << "index,weight\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.indices[i] << ',' << format_double(series.weights[i]) << '\n';
    }
}

WeightSeries read_weight_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"index", "weight"}) {
        throw std::runtime_error("weight csv: expected header 'index,weight' in " + path);
    }
    WeightSeries ws;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2) {
            throw std::runtime_error("weight csv: expected two fields per row in " + path);
        }
        ws.indices.push_back(parse_size(fields[0], "weight csv"));
        ws.weights.push_back(parse_double(fields[1], "weight csv"));
    }
    return ws;
}

void write_index_csv(const SampleIndexSet& sample, const std::string& path) {
    auto out = open_out(path);
    out << "index\n";
    for (std::size_t idx : sample.indices) {
        out << idx << '\n';
    }
}

std::vector<std::size_t> read_index_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "index") {
        throw std::runtime_error("index csv: expected header 'index' in " + path);
    }
    std::vector<std::size_t> indices;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        indices.push_back(parse_size(std::string(trim(line)), "index csv"));
    }
    return indices;
}

nlohmann::json provenance_json(const SamplerSpec& spec, const SampleIndexSet& sample,
                               const IndexRange& source) {
    nlohmann::json params;
    if (const auto* tus = std::get_if<ThresholdUndersampling>(&spec)) {
        params["tau"] = tus->tau;
    } else if (const auto* sus = std::get_if<StochasticUndersampling>(&spec)) {
        params["factor"] = sus->factor;
    } else if (const auto* ihs = std::get_if<InverseHistogramUndersampling>(&spec)) {
        if (const auto* fixed = std::get_if<FixedWidth>(&ihs->binning)) {
            params["binning"] = {{"fixed_width", fixed->width}};
        } else {
            params["binning"] = "auto";
        }
    }
    return nlohmann::json{{"sampler", sample.sampler},
                          {"parameters", params},
                          {"seed", sample.seed},
                          {"source_range", {{"start", source.start}, {"end", source.end_exclusive}}},
                          {"size", sample.indices.size()}};
}

void write_density_csv(const DensityReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "bin_left,bin_right,density_before,density_after\n";
    for (std::size_t i = 0; i + 1 < report.edges.size(); ++i) {
        out << format_double(report.edges[i]) << ',' << format_double(report.edges[i + 1]) << ','
            << format_double(report.density_before[i]) << ','
            << format_double(report.density_after[i]) << '\n';
    }
}

DensityReport read_density_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) !=
            std::vector<std::string>{"bin_left", "bin_right", "density_before", "density_after"}) {
        throw std::runtime_error("density csv: unexpected header in " + path);
    }
    DensityReport report;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw std::runtime_error("density csv: expected four fields per row in " + path);
        }
        const double left = parse_double(fields[0], "density csv");
        const double right = parse_double(fields[1], "density csv");
        if (report.edges.empty()) {
            report.edges.push_back(left);
        }
        report.edges.push_back(right);
        report.density_before.push_back(parse_double(fields[2], "density csv"));
        report.density_after.push_back(parse_double(fields[3], "density csv"));
    }
    if (report.edges.size() < 2) {
        throw std::runtime_error("density csv: no bins in " + path);
    }
    return report;
}

std::string render_density_ascii(const DensityReport& report) {
    constexpr int kBarWidth = 40;
    constexpr std::size_t kMaxRows = 50;

    // Fine FD binnings can run to thousands of bins; merge neighbours for the
    // terminal view. The CSV keeps full resolution.
    DensityReport view = report;
    const std::size_t bins = report.density_before.size();
    if (bins > kMaxRows) {
        const std::size_t group = (bins + kMaxRows - 1) / kMaxRows;
        view.edges.clear();
        view.density_before.clear();
        view.density_after.clear();
        for (std::size_t start = 0; start < bins; start += group) {
            const std::size_t stop = std::min(start + group, bins);
            double mass_before = 0.0;
            double mass_after = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const double w = report.edges[i + 1] - report.edges[i];
                mass_before += report.density_before[i] * w;
                mass_after += report.density_after[i] * w;
            }
            const double width = report.edges[stop] - report.edges[start];
            if (view.edges.empty()) view.edges.push_back(report.edges[start]);
            view.edges.push_back(report.edges[stop]);
            view.density_before.push_back(mass_before / width);
            view.density_after.push_back(mass_after / width);
        }
    }

    double peak = 0.0;
    for (double d : view.density_before) peak = std::max(peak, d);
    for (double d : view.density_after) peak = std::max(peak, d);
    if (peak <= 0.0) peak = 1.0;

    // Log-scaled bars: skewed weight distributions span several orders of
    // magnitude, and the flattening effect is invisible on a linear scale.
    const double floor_density = peak * 1e-4;
    const auto bar = [&](double d) {
        if (d <= floor_density) return 0;
        const double len =
            std::log10(d / floor_density) / std::log10(peak / floor_density) * kBarWidth;
        return static_cast<int>(std::lround(len));
    };

    std::ostringstream os;
    os << "  bin                  before | after   (log scale)\n";
    char label[64];
    for (std::size_t i = 0; i + 1 < view.edges.size(); ++i) {
        std::snprintf(label, sizeof(label), "[%9.4g, %9.4g)", view.edges[i], view.edges[i + 1]);
        const int nb = bar(view.density_before[i]);
        const int na = bar(view.density_after[i]);
        os << label << ' ' << std::string(static_cast<std::size_t>(nb), '#')
           << std::string(static_cast<std::size_t>(kBarWidth - nb), ' ') << " | "
           << std::string(static_cast<std::size_t>(na), '#') << '\n';
    }
    return os.str();
}

void write_matrix_csv(const EvalMatrix& matrix, const std::string& path) {
    auto out = open_out(path);
    out << "train_label,eval_label,mean,std,n\n";
    for (std::size_t a = 0; a < matrix.train_labels().size(); ++a) {
        for (std::size_t b = 0; b < matrix.eval_labels().size(); ++b) {
            const EvalCell& c = matrix.at(a, b);
            out << matrix.train_labels()[a] << ',' << matrix.eval_labels()[b] << ','
                << format_double(c.mean) << ',' << format_double(c.stddev) << ',' << c.replicates
                << '\n';
        }
    }
}

EvalMatrix read_matrix_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("matrix csv: empty file " + path);
    }
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    for (const char* required : {"train_label", "eval_label", "mean", "std", "n"}) {
        if (col.find(required) == col.end()) {
            throw std::runtime_error("matrix csv: missing column '" + std::string(required) +
                                     "' in " + path);
        }
    }

    struct Row {
        std::string train, eval;
        EvalCell cell;
    };
    std::vector<Row> rows;
    std::vector<std::string> train_labels;
    std::vector<std::string> eval_labels;
    auto note = [](std::vector<std::string>& labels, const std::string& l) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    };
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("matrix csv: row width mismatch in " + path);
        }
        Row row;
        row.train = fields[col["train_label"]];
        row.eval = fields[col["eval_label"]];
        row.cell.mean = parse_double(fields[col["mean"]], "matrix csv");
        row.cell.stddev = parse_double(fields[col["std"]], "matrix csv");
        row.cell.replicates = parse_size(fields[col["n"]], "matrix csv");
        note(train_labels, row.train);
        note(eval_labels, row.eval);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error("matrix csv: no data rows in " + path);
    }

    EvalMatrix matrix(train_labels, eval_labels);
    std::vector<bool> filled(train_labels.size() * eval_labels.size(), false);
    for (const auto& row : rows) {
        const std::size_t a = matrix.train_index(row.train);
        const std::size_t b = matrix.eval_index(row.eval);
        const std::size_t slot = a * eval_labels.size() + b;
        if (filled[slot]) {
            throw std::runtime_error("matrix csv: duplicate cell (" + row.train + ", " + row.eval +
                                     ") in " + path);
        }
        filled[slot] = true;
        matrix.at(a, b) = row.cell;
    }
    if (std::find(filled.begin(), filled.end(), false) != filled.end()) {
        throw std::runtime_error("matrix csv: incomplete cell grid in " + path);
    }
    return matrix;
}

std::string format_matrix_table(const EvalMatrix& matrix) {
    const auto cell_text = [](const EvalCell& c) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f +- %.3f", c.mean, c.stddev);
        return std::string(buf);
    };

    std::size_t label_width = std::string("Trained on").size();
    for (const auto& l : matrix.train_labels()) label_width = std::max(label_width, l.size());
    std::size_t cell_width = 0;
    for (const auto& l : matrix.eval_labels()) cell_width = std::max(cell_width, l.size());
    for (std::size_t a = 0; a < matrix.train_labels().size(); ++a) {
        for (std::size_t b = 0; b < matrix.eval_labels().size(); ++b) {
            cell_width = std::max(cell_width, cell_text(matrix.at(a, b)).size());
        }
    }

    std::ostringstream os;
    auto pad = [&os](const std::string& s, std::size_t w) {
        os << s << std::string(w - s.size() + 2, ' ');
    };
    pad("Trained on", label_width);
    for (const auto& l : matrix.eval_labels()) pad(l, cell_width);
    os << '\n';
    for (std::size_t a = 0; a < matrix.train_labels().size(); ++a) {
        pad(matrix.train_labels()[a], label_width);
        for (std::size_t b = 0; b < matrix.eval_labels().size(); ++b) {
            pad(cell_text(matrix.at(a, b)), cell_width);
        }
        os << '\n';
    }
    return os.str();
}

void write_triples_csv(const CrossEvalResult& result, const std::string& path) {
    auto out = open_out(path);
    out << "train_label,eval_label,replicate,index,truth,prediction,weight\n";
    const auto& train_labels = result.matrix.train_labels();
    const auto& eval_labels = result.matrix.eval_labels();
    for (std::size_t a = 0; a < result.triples.size(); ++a) {
        for (std::size_t b = 0; b < result.triples[a].size(); ++b) {
            for (std::size_t r = 0; r < result.triples[a][b].size(); ++r) {
                for (const RawTriple& t : result.triples[a][b][r]) {
                    out << train_labels[a] << ',' << eval_labels[b] << ',' << r << ',' << t.index
                        << ',' << format_double(t.truth) << ',' << format_double(t.prediction)
                        << ',' << format_double(t.weight) << '\n';
                }
            }
        }
    }
}

std::vector<TripleRow> read_triples_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) != std::vector<std::string>{"train_label", "eval_label", "replicate",
                                                    "index", "truth", "prediction", "weight"}) {
        throw std::runtime_error("triples csv: unexpected header in " + path);
    }
    std::vector<TripleRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 7) {
            throw std::runtime_error("triples csv: expected seven fields per row in " + path);
        }
        TripleRow row;
        row.train_label = fields[0];
        row.eval_label = fields[1];
        row.replicate = parse_size(fields[2], "triples csv");
        row.triple.index = parse_size(fields[3], "triples csv");
        row.triple.truth = parse_double(fields[4], "triples csv");
        row.triple.prediction = parse_double(fields[5], "triples csv");
        row.triple.weight = parse_double(fields[6], "triples csv");
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json selection_json(const SelectionResult& result) {
    nlohmann::json ranking = nlohmann::json::array();
    for (const auto& e : result.ranking) {
        ranking.push_back({{"train_label", e.train_label},
                           {"max_error", e.max_error},
                           {"measured_on", e.eval_label}});
    }
    return nlohmann::json{{"selected", result.selected}, {"ranking", ranking}};
}

}  // namespace tsbal::io
