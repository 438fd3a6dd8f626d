#ifndef TSBALANCE_HISTOGRAM_HPP
#define TSBALANCE_HISTOGRAM_HPP

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace tsbal {

/**
 * Fixed-edge histogram. Bins are half-open [e_i, e_{i+1}) with the final bin
 * closed on the right, so every value in [edges.front(), edges.back()] falls
 * in exactly one bin.
 */
struct Histogram {
    std::vector<double> edges;        // B + 1, strictly increasing
    std::vector<std::size_t> counts;  // B
    std::size_t total = 0;

    std::size_t bins() const noexcept { return counts.size(); }

    /// Bin containing v; throws std::out_of_range outside [edges.front(), edges.back()].
    std::size_t bin_index(double v) const;

    /// Count of the bin containing v.
    std::size_t lookup(double v) const { return counts[bin_index(v)]; }
};

/// Freedman-Diaconis bin width with Sturges fallback when the IQR is zero.
struct AutoBinning {
    bool operator==(const AutoBinning&) const = default;
};
struct FixedWidth {
    double width = 1.0;
    bool operator==(const FixedWidth&) const = default;
};
using BinningSpec = std::variant<AutoBinning, FixedWidth>;

/**
 * Freedman-Diaconis bin width 2*IQR*n^(-1/3), with quartiles by linear
 * interpolation at position p*(n-1) over the sorted values. Falls back to
 * Sturges (range / (ceil(log2 n) + 1)) when the IQR is zero, and to 1 when
 * the range is also zero.
 */
double fd_bin_width(std::span<const double> values);

/// Histogram over [min, min + B*width] with B = max(1, ceil((max-min)/width)).
Histogram build_histogram(std::span<const double> values, double width);

/// Histogram of `values` counted into externally supplied edges.
Histogram build_histogram(std::span<const double> values, const std::vector<double>& edges);

Histogram build_histogram(std::span<const double> values, const BinningSpec& binning);

double bin_width_for(std::span<const double> values, const BinningSpec& binning);

/**
 * Before/after densities of two value sets on shared edges (computed from the
 * union of both), each normalized so that sum(bin_width * density) = 1.
 */
struct DensityReport {
    std::vector<double> edges;
    std::vector<double> density_before;
    std::vector<double> density_after;
};

DensityReport density_report(std::span<const double> before, std::span<const double> after,
                             const BinningSpec& binning);

/// max/min ratio over bins with positive density; the flatness figure used
/// when comparing sampled against unsampled weight distributions.
double density_flatness_ratio(std::span<const double> density);

}  // namespace tsbal

#endif  // TSBALANCE_HISTOGRAM_HPP
