#ifndef TSBALANCE_SAMPLING_HPP
#define TSBALANCE_SAMPLING_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tsbalance/histogram.hpp"
#include "tsbalance/weights.hpp"

namespace tsbal {

struct NoSampling {
    bool operator==(const NoSampling&) const = default;
};

/// Keep only indices with weight strictly above tau; uniform among those.
struct ThresholdUndersampling {
    double tau = 0.0;
    bool operator==(const ThresholdUndersampling&) const = default;
};

/// Relative inclusion probability (w / max w)^factor.
struct StochasticUndersampling {
    double factor = 1.0;
    bool operator==(const StochasticUndersampling&) const = default;
};

/// Relative inclusion probability 1 / h(w), the inverse count of the
/// histogram bin containing w; flattens the weight distribution.
struct InverseHistogramUndersampling {
    BinningSpec binning = AutoBinning{};
    bool operator==(const InverseHistogramUndersampling&) const = default;
};

using SamplerSpec = std::variant<NoSampling, ThresholdUndersampling, StochasticUndersampling,
                                 InverseHistogramUndersampling>;

/// "None", "TUS-<tau>", "SUS-<factor>", "IHS".
std::string sampler_label(const SamplerSpec& spec);

/**
 * Relative inclusion weight of a single sample with weight w. `hist` is
 * required for (and only for) inverse-histogram sampling; for stochastic
 * under-sampling the caller passes w already normalized to [0, 1].
 */
double inclusion_weight(const SamplerSpec& spec, double w, const Histogram* hist = nullptr);

/// Drawn indices (sorted, distinct) plus the provenance that produced them.
struct SampleIndexSet {
    std::vector<std::size_t> indices;
    std::string sampler;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return indices.size(); }
};

/**
 * Fixed-size weighted draw without replacement: min(n, #eligible) distinct
 * indices, ordered by the exponential key log(u)/weight with one uniform u
 * per (seed, index). Zero-weight indices are never eligible, under None too,
 * which draws uniformly among the positive-weight indices. Deterministic
 * given the seed and independent of scheduling. Throws when nothing is
 * eligible.
 */
SampleIndexSet draw(const SamplerSpec& spec, const WeightSeries& series, std::size_t n,
                    std::uint64_t seed);

}  // namespace tsbal

#endif  // TSBALANCE_SAMPLING_HPP
