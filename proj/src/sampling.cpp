#include "tsbalance/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsbalance/rng.hpp"

namespace tsbal {

namespace {

// Trim trailing zeros so SUS-1 reads "SUS-1", not "SUS-1.000000".
std::string format_param(double v) {
    std::string s = std::to_string(v);
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        auto last = s.find_last_not_of('0');
        if (last == dot) last -= 1;
        s.erase(last + 1);
    }
    return s;
}

}  // namespace

std::string sampler_label(const SamplerSpec& spec) {
    if (std::holds_alternative<NoSampling>(spec)) return "None";
    if (const auto* tus = std::get_if<ThresholdUndersampling>(&spec)) {
        return "TUS-" + format_param(tus->tau);
    }
    if (const auto* sus = std::get_if<StochasticUndersampling>(&spec)) {
        return "SUS-" + format_param(sus->factor);
    }
    return "IHS";
}

double inclusion_weight(const SamplerSpec& spec, double w, const Histogram* hist) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("inclusion_weight: weight must be finite and >= 0");
    }
    if (std::holds_alternative<NoSampling>(spec)) {
        return 1.0;
    }
    if (const auto* tus = std::get_if<ThresholdUndersampling>(&spec)) {
        if (!(tus->tau >= 0.0)) {
            throw std::invalid_argument("inclusion_weight: TUS threshold must be >= 0");
        }
        return w > tus->tau ? 1.0 : 0.0;
    }
    if (const auto* sus = std::get_if<StochasticUndersampling>(&spec)) {
        return std::pow(w, sus->factor);
    }
    if (hist == nullptr) {
        throw std::invalid_argument("inclusion_weight: IHS requires a histogram");
    }
    const std::size_t count = hist->lookup(w);  // throws outside support
    if (count == 0) {
        throw std::runtime_error("inclusion_weight: weight falls in an empty histogram bin");
    }
    return 1.0 / static_cast<double>(count);
}

SampleIndexSet draw(const SamplerSpec& spec, const WeightSeries& series, std::size_t n,
                    std::uint64_t seed) {
    if (series.empty()) {
        throw std::invalid_argument("draw: empty weight series");
    }
    if (n < 1) {
        throw std::invalid_argument("draw: sample size must be >= 1");
    }

    // Per-index relative inclusion weights.
    std::vector<double> incl(series.size());
    if (const auto* sus = std::get_if<StochasticUndersampling>(&spec)) {
        if (!(sus->factor > 0.0)) {
            throw std::invalid_argument("draw: SUS factor must be > 0");
        }
        const double max_w = *std::max_element(series.weights.begin(), series.weights.end());
        if (!(max_w > 0.0)) {
            throw std::runtime_error("draw: all inclusion weights are zero");
        }
        for (std::size_t i = 0; i < series.size(); ++i) {
            incl[i] = std::pow(series.weights[i] / max_w, sus->factor);
        }
    } else if (const auto* ihs = std::get_if<InverseHistogramUndersampling>(&spec)) {
        const Histogram hist = build_histogram(series.weights, ihs->binning);
        for (std::size_t i = 0; i < series.size(); ++i) {
            incl[i] = inclusion_weight(spec, series.weights[i], &hist);
        }
    } else {
        for (std::size_t i = 0; i < series.size(); ++i) {
            incl[i] = inclusion_weight(spec, series.weights[i]);
        }
    }

    // Exponential keys: one uniform per (seed, time index), so the key of an
    // index is the same no matter which subset or order it is drawn in.
    // Zero-weight indices are ineligible under every sampler, None included.
    struct Keyed {
        double key;
        std::size_t index;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (incl[i] <= 0.0 || series.weights[i] <= 0.0) continue;
        const double u = rng::uniform01(seed, series.indices[i]);
        keyed.push_back(Keyed{std::log(u) / incl[i], series.indices[i]});
    }
    if (keyed.empty()) {
        throw std::runtime_error("draw: all inclusion weights are zero");
    }

    const std::size_t m = std::min(n, keyed.size());
    auto better = [](const Keyed& a, const Keyed& b) {
        return a.key > b.key || (a.key == b.key && a.index < b.index);
    };
    std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(m - 1),
                     keyed.end(), better);

    SampleIndexSet out;
    out.indices.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.indices.push_back(keyed[i].index);
    }
    std::sort(out.indices.begin(), out.indices.end());
    out.sampler = sampler_label(spec);
    out.seed = seed;
    return out;
}

}  // namespace tsbal
