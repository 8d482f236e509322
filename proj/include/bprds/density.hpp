#ifndef BPRDS_DENSITY_HPP
#define BPRDS_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bprds {

class DensityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class KernelType { Box, Normal, Triangle, Epanechnikov, Quartic, Tricube, Triweight, Logistic, Quadratic };

std::string_view to_string(KernelType kernel);
KernelType parse_kernel(std::string_view name);
const std::vector<KernelType>& all_kernels();

/// True for kernels vanishing outside [-1, 1].
constexpr bool has_compact_support(KernelType kernel) {
    return kernel != KernelType::Normal && kernel != KernelType::Logistic;
}

/// Normalized, symmetric kernel K(u). Quadratic is the Epanechnikov function.
template <typename Scalar>
Scalar kernel_eval(KernelType kernel, Scalar u) {
    using std::abs;
    using std::exp;
    const Scalar a = abs(u);
    if (has_compact_support(kernel) && a > Scalar(1))
        return Scalar(0);
    const Scalar one_minus_sq = Scalar(1) - u * u;
    switch (kernel) {
        case KernelType::Box:
            return Scalar(0.5);
        case KernelType::Triangle:
            return Scalar(1) - a;
        case KernelType::Epanechnikov:
        case KernelType::Quadratic:
            return Scalar(0.75) * one_minus_sq;
        case KernelType::Quartic:
            return Scalar(15) / Scalar(16) * one_minus_sq * one_minus_sq;
        case KernelType::Triweight:
            return Scalar(35) / Scalar(32) * one_minus_sq * one_minus_sq * one_minus_sq;
        case KernelType::Tricube: {
            const Scalar c = Scalar(1) - a * a * a;
            return Scalar(70) / Scalar(81) * c * c * c;
        }
        case KernelType::Normal:
            return exp(Scalar(-0.5) * u * u) * Scalar(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
        case KernelType::Logistic: {
            // 1/(e^u + 2 + e^-u), written with e^-|u| so large |u| cannot overflow.
            const Scalar e = exp(-a);
            return e / ((Scalar(1) + e) * (Scalar(1) + e));
        }
    }
    return Scalar(0);
}

inline constexpr double kBandwidthFloor = 1e-6;

/// Quantile with linear interpolation between order statistics of sorted data.
template <typename Scalar>
Scalar sorted_quantile(std::span<const Scalar> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const Scalar frac = static_cast<Scalar>(pos - static_cast<double>(lo));
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/**
 * Silverman's rule of thumb, h = 0.9 * min(sd, IQR/1.34) * N^(-1/5).
 *
 * When the robust spread is zero but the standard deviation is not, the
 * standard deviation alone is used. Zero dispersion yields kBandwidthFloor.
 */
template <typename Scalar>
Scalar silverman_bandwidth(std::span<const Scalar> samples) {
    const std::size_t n = samples.size();
    if (n == 0)
        throw DensityError("bandwidth of an empty sample");
    if (n == 1)
        return Scalar(kBandwidthFloor);
    Scalar mean = 0;
    for (Scalar x : samples)
        mean += x;
    mean /= static_cast<Scalar>(n);
    Scalar ss = 0;
    for (Scalar x : samples)
        ss += (x - mean) * (x - mean);
    const Scalar sd = std::sqrt(ss / static_cast<Scalar>(n - 1));

    std::vector<Scalar> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::span<const Scalar> view(sorted);
    const Scalar iqr = sorted_quantile(view, 0.75) - sorted_quantile(view, 0.25);

    Scalar spread = std::min(sd, iqr / Scalar(1.34));
    if (!(spread > 0))
        spread = sd;
    if (!(spread > 0))
        return Scalar(kBandwidthFloor);
    return Scalar(0.9) * spread * std::pow(static_cast<Scalar>(n), Scalar(-0.2));
}

/**
 * Parzen-Rosenblatt estimate f(x) = 1/(N h) * sum K((x - x_i)/h).
 *
 * Samples are stored sorted with duplicates folded into counts, which leaves
 * the estimator unchanged. Compact-support kernels only visit samples within
 * one bandwidth of x; every skipped term is exactly zero.
 */
template <typename Scalar>
class KernelDensity {
public:
    KernelDensity(std::span<const Scalar> samples, KernelType kernel, std::optional<Scalar> bandwidth = std::nullopt)
        : kernel_(kernel) {
        if (samples.empty())
            throw DensityError("kernel density needs at least one sample");
        if (bandwidth && !(*bandwidth > 0))
            throw DensityError("bandwidth must be positive");
        for (Scalar x : samples)
            if (!std::isfinite(static_cast<double>(x)))
                throw DensityError("kernel density samples must be finite");
        bandwidth_ = bandwidth ? *bandwidth : silverman_bandwidth(samples);
        std::vector<Scalar> sorted(samples.begin(), samples.end());
        std::sort(sorted.begin(), sorted.end());
        for (Scalar x : sorted) {
            if (!values_.empty() && values_.back() == x) {
                ++counts_.back();
            } else {
                values_.push_back(x);
                counts_.push_back(1);
            }
        }
        sample_count_ = sorted.size();
    }

    /// Rebuilds from folded (value, count) pairs, as stored in a model file.
    KernelDensity(std::vector<Scalar> values, std::vector<std::size_t> counts, KernelType kernel, Scalar bandwidth)
        : kernel_(kernel), bandwidth_(bandwidth), values_(std::move(values)), counts_(std::move(counts)) {
        if (values_.empty() || values_.size() != counts_.size())
            throw DensityError("folded samples need matching nonempty value and count lists");
        if (!(bandwidth_ > 0))
            throw DensityError("bandwidth must be positive");
        if (!std::is_sorted(values_.begin(), values_.end()) ||
            std::adjacent_find(values_.begin(), values_.end()) != values_.end())
            throw DensityError("folded sample values must be strictly increasing");
        sample_count_ = 0;
        for (std::size_t c : counts_) {
            if (c == 0)
                throw DensityError("folded sample counts must be positive");
            sample_count_ += c;
        }
    }

    Scalar operator()(Scalar x) const {
        auto first = values_.begin();
        auto last = values_.end();
        if (has_compact_support(kernel_)) {
            const Scalar reach = bandwidth_ * Scalar(1 + 1e-9);
            first = std::lower_bound(values_.begin(), values_.end(), x - reach);
            last = std::upper_bound(first, values_.end(), x + reach);
        }
        Scalar sum = 0;
        for (auto it = first; it != last; ++it) {
            const auto i = static_cast<std::size_t>(it - values_.begin());
            sum += static_cast<Scalar>(counts_[i]) * kernel_eval(kernel_, (x - *it) / bandwidth_);
        }
        return sum / (static_cast<Scalar>(sample_count_) * bandwidth_);
    }

    KernelType kernel() const { return kernel_; }
    Scalar bandwidth() const { return bandwidth_; }
    std::size_t sample_count() const { return sample_count_; }
    const std::vector<Scalar>& values() const { return values_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    Scalar min_sample() const { return values_.front(); }
    Scalar max_sample() const { return values_.back(); }

    friend bool operator==(const KernelDensity&, const KernelDensity&) = default;

private:
    KernelType kernel_;
    Scalar bandwidth_;
    std::vector<Scalar> values_;
    std::vector<std::size_t> counts_;
    std::size_t sample_count_ = 0;
};

using KdeDensity = KernelDensity<double>;

/// Equivalent to the direct KdeDensity constructor; Silverman bandwidth when none is given.
KdeDensity kde_fit(std::span<const double> samples, KernelType kernel, std::optional<double> bandwidth = std::nullopt);

/// Laplace-smoothed frequency table with one shared bucket for unseen categories.
class CategoricalDensity {
public:
    static constexpr double kDefaultSmoothing = 1.0;

    CategoricalDensity(std::span<const std::string> values, std::span<const std::string> vocabulary,
                       double smoothing = kDefaultSmoothing);
    /// Restores a stored table; probabilities must be positive and sum to one with `unseen`.
    CategoricalDensity(std::map<std::string, double, std::less<>> table, double unseen, double smoothing);

    double probability(std::string_view category) const;
    double unseen_probability() const { return unseen_; }
    double smoothing() const { return smoothing_; }
    const std::map<std::string, double, std::less<>>& table() const { return table_; }

    friend bool operator==(const CategoricalDensity&, const CategoricalDensity&) = default;

private:
    std::map<std::string, double, std::less<>> table_;
    double unseen_ = 0.0;
    double smoothing_ = kDefaultSmoothing;
};

CategoricalDensity categorical_fit(std::span<const std::string> values, std::span<const std::string> vocabulary,
                                   double smoothing = CategoricalDensity::kDefaultSmoothing);

/// Stand-in for a class with no training rows: a tiny constant everywhere.
struct ConstantDensity {
    static constexpr double kSurrogate = 1e-12;
    double value = kSurrogate;
    friend bool operator==(const ConstantDensity&, const ConstantDensity&) = default;
};

using AttributeDensity = std::variant<KdeDensity, CategoricalDensity, ConstantDensity>;

/// Numeric lookup; throws DensityError for a categorical density.
double density_eval(const AttributeDensity& density, double value);
/// Categorical lookup; throws DensityError for a kernel density.
double density_eval(const AttributeDensity& density, std::string_view category);

}  // namespace bprds

#endif  // BPRDS_DENSITY_HPP
