#include "tsbalance/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsbal {

namespace {

void require_finite(std::span<const double> values, const char* who) {
    if (values.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty input");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(who) + ": non-finite value");
        }
    }
}

// Linear-interpolation quantile at position p*(n-1) of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::size_t Histogram::bin_index(double v) const {
    if (!(v >= edges.front() && v <= edges.back())) {
        throw std::out_of_range("histogram: value " + std::to_string(v) + " outside support [" +
                                std::to_string(edges.front()) + ", " +
                                std::to_string(edges.back()) + "]");
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t idx = static_cast<std::size_t>(it - edges.begin());
    if (idx > bins()) idx = bins();  // v == edges.back(): last bin is closed
    return idx - 1;
}

double fd_bin_width(std::span<const double> values) {
    require_finite(values, "fd_bin_width");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    if (iqr > 0.0) {
        return 2.0 * iqr * std::pow(n, -1.0 / 3.0);
    }
    const double range = sorted.back() - sorted.front();
    if (range == 0.0) {
        return 1.0;
    }
    const double bins = std::ceil(std::log2(n)) + 1.0;  // Sturges
    return range / bins;
}

Histogram build_histogram(std::span<const double> values, double width) {
    require_finite(values, "build_histogram");
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("build_histogram: width must be positive");
    }
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *min_it;
    const double hi = *max_it;
    const std::size_t bins =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));

    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + static_cast<double>(i) * width;
    }
    // ceil guarantees bins*width >= hi-lo mathematically, but the rounded sum
    // can land just below hi; keep the max value inside the closed last bin.
    if (h.edges.back() < hi) h.edges.back() = hi;

    h.counts.assign(bins, 0);
    for (double v : values) {
        ++h.counts[h.bin_index(v)];
    }
    h.total = values.size();
    return h;
}

Histogram build_histogram(std::span<const double> values, const std::vector<double>& edges) {
    require_finite(values, "build_histogram");
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
        throw std::invalid_argument("build_histogram: need at least two increasing edges");
    }
    Histogram h;
    h.edges = edges;
    h.counts.assign(edges.size() - 1, 0);
    for (double v : values) {
        ++h.counts[h.bin_index(v)];
    }
    h.total = values.size();
    return h;
}

double bin_width_for(std::span<const double> values, const BinningSpec& binning) {
    if (const auto* fixed = std::get_if<FixedWidth>(&binning)) {
        if (!(fixed->width > 0.0)) {
            throw std::invalid_argument("binning: fixed width must be positive");
        }
        return fixed->width;
    }
    return fd_bin_width(values);
}

Histogram build_histogram(std::span<const double> values, const BinningSpec& binning) {
    return build_histogram(values, bin_width_for(values, binning));
}

DensityReport density_report(std::span<const double> before, std::span<const double> after,
                             const BinningSpec& binning) {
    if (before.empty() || after.empty()) {
        throw std::invalid_argument("density_report: both series must be nonempty");
    }
    std::vector<double> pooled;
    pooled.reserve(before.size() + after.size());
    pooled.insert(pooled.end(), before.begin(), before.end());
    pooled.insert(pooled.end(), after.begin(), after.end());

    const Histogram shared = build_histogram(pooled, bin_width_for(pooled, binning));
    const Histogram hb = build_histogram(before, shared.edges);
    const Histogram ha = build_histogram(after, shared.edges);

    DensityReport report;
    report.edges = shared.edges;
    report.density_before.resize(shared.bins());
    report.density_after.resize(shared.bins());
    for (std::size_t i = 0; i < shared.bins(); ++i) {
        const double w = shared.edges[i + 1] - shared.edges[i];
        report.density_before[i] =
            static_cast<double>(hb.counts[i]) / (static_cast<double>(hb.total) * w);
        report.density_after[i] =
            static_cast<double>(ha.counts[i]) / (static_cast<double>(ha.total) * w);
    }
    return report;
}

double density_flatness_ratio(std::span<const double> density) {
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (double d : density) {
        if (d <= 0.0) continue;
        if (!any) {
            lo = hi = d;
            any = true;
        } else {
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    if (!any) {
        throw std::invalid_argument("density_flatness_ratio: no positive bins");
    }
    return hi / lo;
}

}  // namespace tsbal
