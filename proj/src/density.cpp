#include "bprds/density.hpp"

#include <array>
#include <cmath>
#include <set>

namespace bprds {

namespace {

constexpr std::array<std::string_view, 9> kKernelNames{"box",     "normal",  "triangle",  "epanechnikov", "quartic",
                                                       "tricube", "triweight", "logistic", "quadratic"};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

std::string_view to_string(KernelType kernel) { return kKernelNames[static_cast<std::size_t>(kernel)]; }

KernelType parse_kernel(std::string_view name) {
    for (std::size_t i = 0; i < kKernelNames.size(); ++i)
        if (kKernelNames[i] == name)
            return static_cast<KernelType>(i);
    if (name == "uniform")
        return KernelType::Box;
    if (name == "gaussian")
        return KernelType::Normal;
    if (name == "biweight")
        return KernelType::Quartic;
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

const std::vector<KernelType>& all_kernels() {
    static const std::vector<KernelType> kernels{KernelType::Box,       KernelType::Normal,   KernelType::Triangle,
                                                 KernelType::Epanechnikov, KernelType::Quartic, KernelType::Tricube,
                                                 KernelType::Triweight, KernelType::Logistic, KernelType::Quadratic};
    return kernels;
}

KdeDensity kde_fit(std::span<const double> samples, KernelType kernel, std::optional<double> bandwidth) {
    return KdeDensity(samples, kernel, bandwidth);
}

CategoricalDensity::CategoricalDensity(std::span<const std::string> values, std::span<const std::string> vocabulary,
                                       double smoothing)
    : smoothing_(smoothing) {
    if (!(smoothing > 0.0))
        throw DensityError("categorical smoothing must be positive");
    std::map<std::string, std::size_t, std::less<>> counts;
    for (const auto& category : vocabulary)
        counts.emplace(category, 0);
    std::size_t observed = 0;
    for (const auto& v : values) {
        auto it = counts.find(v);
        if (it == counts.end())
            throw DensityError("category '" + v + "' is missing from the vocabulary");
        ++it->second;
        ++observed;
    }
    const double denom = static_cast<double>(observed) + smoothing * static_cast<double>(counts.size() + 1);
    for (const auto& [category, count] : counts)
        table_.emplace(category, (static_cast<double>(count) + smoothing) / denom);
    unseen_ = smoothing / denom;
}

CategoricalDensity::CategoricalDensity(std::map<std::string, double, std::less<>> table, double unseen,
                                       double smoothing)
    : table_(std::move(table)), unseen_(unseen), smoothing_(smoothing) {
    if (!(smoothing > 0.0) || !(unseen > 0.0))
        throw DensityError("categorical table needs positive smoothing and unseen probability");
    double total = unseen;
    for (const auto& [category, p] : table_) {
        if (!(p > 0.0))
            throw DensityError("categorical probability for '" + category + "' must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw DensityError("categorical table sums to " + std::to_string(total));
}

double CategoricalDensity::probability(std::string_view category) const {
    auto it = table_.find(category);
    return it == table_.end() ? unseen_ : it->second;
}

CategoricalDensity categorical_fit(std::span<const std::string> values, std::span<const std::string> vocabulary,
                                   double smoothing) {
    return CategoricalDensity(values, vocabulary, smoothing);
}

double density_eval(const AttributeDensity& density, double value) {
    return std::visit(overloaded{[&](const KdeDensity& d) { return d(value); },
                                 [](const CategoricalDensity&) -> double {
                                     throw DensityError("numeric value given to a categorical density");
                                 },
                                 [](const ConstantDensity& d) { return d.value; }},
                      density);
}

double density_eval(const AttributeDensity& density, std::string_view category) {
    return std::visit(overloaded{[](const KdeDensity&) -> double {
                                     throw DensityError("categorical value given to a numeric density");
                                 },
                                 [&](const CategoricalDensity& d) { return d.probability(category); },
                                 [](const ConstantDensity& d) { return d.value; }},
                      density);
}

}  // namespace bprds
