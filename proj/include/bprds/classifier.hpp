#ifndef BPRDS_CLASSIFIER_HPP
#define BPRDS_CLASSIFIER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bprds/belief.hpp"
#include "bprds/density.hpp"
#include "bprds/evaluation.hpp"
#include "bprds/nslkdd.hpp"

namespace bprds {

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dempster fusion hit total conflict when folding in `attribute()`.
class FusionConflictError : public std::runtime_error {
public:
    FusionConflictError(std::size_t attribute, const std::string& attribute_name, double conflict);
    std::size_t attribute() const noexcept { return attribute_; }

private:
    std::size_t attribute_;
};

/// Density values below this are treated as exactly zero before ranking.
inline constexpr double kDensityFloor = 1e-300;

/**
 * Consonant mass from one attribute's per-class densities.
 *
 * With classes ranked by increasing density d(1) <= ... <= d(K), Ω receives
 * d(1) and the set of the classes ranked k..K receives d(k) - d(k-1); the
 * result is divided by d(K). All-zero input gives the vacuous mass.
 */
MassFunction generate_mass(std::span<const double> densities, const FramePtr& frame);
inline MassFunction generate_mass(const Eigen::VectorXd& densities, const FramePtr& frame) {
    return generate_mass(std::span<const double>(densities.data(), static_cast<std::size_t>(densities.size())), frame);
}

/// Weakening coefficients per attribute and subset; absent entries mean 1.
class DiscountTable {
public:
    DiscountTable() = default;
    explicit DiscountTable(std::size_t attributes) : rows_(attributes) {}

    void set(std::size_t attribute, FocalSet subset, double alpha);
    double coefficient(std::size_t attribute, FocalSet subset) const;
    const ContextualCoefficients& row(std::size_t attribute) const { return rows_.at(attribute); }
    std::size_t attribute_count() const { return rows_.size(); }
    std::size_t size() const;
    bool is_identity() const;

    friend bool operator==(const DiscountTable&, const DiscountTable&) = default;

private:
    std::vector<ContextualCoefficients> rows_;
};

/// Optional min-max scaling of numeric attributes, fitted on training data.
struct Preprocessing {
    bool minmax = false;
    std::vector<double> lower;
    std::vector<double> upper;

    double apply(std::size_t numeric_slot, double value) const;
    friend bool operator==(const Preprocessing&, const Preprocessing&) = default;
};

Preprocessing fit_preprocessing(const Dataset& dataset, bool minmax);
/// Returns a copy with numeric values scaled.
Dataset apply_preprocessing(const Dataset& dataset, const Preprocessing& preprocessing);

struct TrainConfig {
    std::vector<KernelType> kernels = all_kernels();
    std::vector<FusionRule> rules = all_fusion_rules();
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    bool discounting = true;
    LabelScheme scheme = LabelScheme::FiveClass;
    /// Fraction of the training file kept (stratified); applied when the data is loaded.
    double subsample_fraction = 1.0;
    /// Maximum training values per (class, attribute) density.
    std::size_t subsample_cap = 20000;
    std::optional<double> bandwidth;
    bool minmax = false;

    void validate() const;
};

struct CellScore {
    KernelType kernel;
    FusionRule rule;
    double accuracy;
    bool failed = false;
    friend bool operator==(const CellScore&, const CellScore&) = default;
};

struct TrainingMetadata {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    std::size_t subsample_cap = 20000;
    double subsample_fraction = 1.0;
    bool discounting = true;
    std::optional<double> bandwidth;
    std::size_t training_records = 0;
    std::vector<CellScore> grid;
    friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Densities are indexed [attribute][class].
struct TrainedModel {
    FramePtr frame;
    LabelScheme scheme = LabelScheme::FiveClass;
    AttributeSchema schema = AttributeSchema::nsl_kdd();
    std::vector<std::vector<AttributeDensity>> densities;
    DiscountTable discounts;
    KernelType kernel = KernelType::Normal;
    FusionRule rule = FusionRule::Dempster;
    Preprocessing preprocessing;
    TrainingMetadata metadata;
};

struct Prediction {
    std::size_t label_index = 0;
    std::string label;
    Eigen::VectorXd pignistic;
    /// Conflict between the running fusion and each attribute folded in after the first.
    std::vector<double> per_attribute_conflict;
};

struct DensityOptions {
    std::optional<double> bandwidth;
    std::size_t subsample_cap = 20000;
    std::uint64_t seed = 42;
};

/// Per-class densities for every attribute, fitted on `rows` of `data`.
std::vector<std::vector<AttributeDensity>> fit_densities(const Dataset& data, std::span<const std::size_t> rows,
                                                         KernelType kernel, const DensityOptions& options);

/// f^p_k(y) for every class k, floored at kDensityFloor.
Eigen::VectorXd attribute_densities(const std::vector<AttributeDensity>& per_class, const Attribute& attribute,
                                    const Record& record);

/// Folds masses left to right; Dempster total conflict raises FusionConflictError.
MassFunction fuse(std::span<const MassFunction> masses, FusionRule rule, const AttributeSchema* schema = nullptr,
                  std::vector<double>* conflicts = nullptr);

Prediction classify(const Record& record, const TrainedModel& model);
/// Decision of one attribute alone: no discounting, no fusion.
std::size_t single_attribute_classify(const Record& record, const TrainedModel& model, std::size_t attribute);

/// Subsets that receive a coefficient; all proper nonempty subsets for frames of up to 8 classes.
std::vector<FocalSet> discountable_subsets(const Frame& frame, std::span<const FocalSet> observed);

/// Coefficients from per-attribute confusion matrices: alpha_A = F1 of A on the collapsed table.
DiscountTable discount_table_from_matrices(const std::vector<ConfusionMatrix>& matrices,
                                           const std::vector<std::vector<FocalSet>>& observed);

DiscountTable compute_discount_table(const Dataset& train, KernelType kernel, std::size_t folds, std::uint64_t seed,
                                     const DensityOptions& options = {});

struct AdjustmentResult {
    KernelType kernel;
    FusionRule rule;
    std::vector<CellScore> cells;
};

/// Grid search over kernels (outer) and rules (inner) by plain cross-validated accuracy.
AdjustmentResult model_adjustment(const Dataset& train, std::span<const KernelType> kernels,
                                  std::span<const FusionRule> rules, std::size_t folds, std::uint64_t seed,
                                  const DensityOptions& options = {});

TrainedModel train(const Dataset& train, const TrainConfig& config);

struct Evaluation {
    EvalReport report;
    std::vector<std::optional<Prediction>> predictions;
};

/// Classifies every record; total-conflict records are counted as rejected errors.
Evaluation evaluate(const TrainedModel& model, const Dataset& test);

/// Throws SchemaError when a record does not fit the model schema.
void check_schema(const TrainedModel& model, const Dataset& data);

}  // namespace bprds

#endif  // BPRDS_CLASSIFIER_HPP
