#ifndef TSBALANCE_IO_HPP
#define TSBALANCE_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "tsbalance/dataset.hpp"
#include "tsbalance/evaluation.hpp"
#include "tsbalance/histogram.hpp"
#include "tsbalance/sampling.hpp"
#include "tsbalance/weights.hpp"

namespace tsbal::io {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

void write_dataset_csv(const TimeSeriesDataset& dataset, const std::string& path);

// weight series: "index,weight"
void write_weight_csv(const WeightSeries& series, const std::string& path);
WeightSeries read_weight_csv(const std::string& path);

// sample index set: "index" plus a JSON provenance record
void write_index_csv(const SampleIndexSet& sample, const std::string& path);
std::vector<std::size_t> read_index_csv(const std::string& path);
nlohmann::json provenance_json(const SamplerSpec& spec, const SampleIndexSet& sample,
                               const IndexRange& source);

// density report: "bin_left,bin_right,density_before,density_after"
void write_density_csv(const DensityReport& report, const std::string& path);
DensityReport read_density_csv(const std::string& path);

/// Side-by-side ASCII bar chart of the before/after densities.
std::string render_density_ascii(const DensityReport& report);

// evaluation matrix: "train_label,eval_label,mean,std,n"
void write_matrix_csv(const EvalMatrix& matrix, const std::string& path);
EvalMatrix read_matrix_csv(const std::string& path);

/// Aligned "Trained on / Evaluated on" table with mean +- std cells.
std::string format_matrix_table(const EvalMatrix& matrix);

// per-cell sample logs: "train_label,eval_label,replicate,index,truth,prediction,weight"
void write_triples_csv(const CrossEvalResult& result, const std::string& path);

struct TripleRow {
    std::string train_label;
    std::string eval_label;
    std::size_t replicate = 0;
    RawTriple triple;
};
std::vector<TripleRow> read_triples_csv(const std::string& path);

nlohmann::json selection_json(const SelectionResult& result);

}  // namespace tsbal::io

#endif  // TSBALANCE_IO_HPP
