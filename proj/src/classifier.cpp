#include "bprds/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "bprds/random.hpp"

namespace bprds {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix(splitmix(splitmix(seed ^ splitmix(a)) ^ b) ^ c);
}

void require_labeled(const Dataset& data) {
    if (!data.labeled())
        throw TrainingError("training data must be labeled");
}

void require_all_classes(const Dataset& data) {
    require_labeled(data);
    const auto counts = class_counts(data);
    std::vector<std::string> missing;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] == 0)
            missing.push_back(data.frame->label(k));
    if (!missing.empty()) {
        std::string msg = "training data lacks class(es):";
        for (const auto& m : missing)
            msg += " " + m;
        throw TrainingError(msg);
    }
}

Record preprocess_record(const Record& record, const Preprocessing& preprocessing) {
    Record out = record;
    for (std::size_t s = 0; s < out.numeric.size(); ++s)
        out.numeric[s] = preprocessing.apply(s, out.numeric[s]);
    return out;
}

void check_record(const Record& record, const AttributeSchema& schema) {
    if (record.numeric.size() != schema.numeric_count() || record.categorical.size() != schema.categorical_count())
        throw SchemaError("record has " + std::to_string(record.numeric.size() + record.categorical.size()) +
                          " attributes, model expects " + std::to_string(schema.size()));
}

std::vector<MassFunction> attribute_masses(const Record& record, const std::vector<std::vector<AttributeDensity>>& densities,
                                           const AttributeSchema& schema, const FramePtr& frame) {
    std::vector<MassFunction> masses;
    masses.reserve(schema.size());
    for (std::size_t p = 0; p < schema.size(); ++p)
        masses.push_back(generate_mass(attribute_densities(densities[p], schema[p], record), frame));
    return masses;
}

struct CvOutcome {
    std::vector<double> rule_accuracy;
    std::vector<ConfusionMatrix> attribute_matrices;
    std::vector<std::vector<FocalSet>> observed;
};

// Plain (undiscounted) cross-validation of one kernel: fused accuracy per rule
// and, on request, the single-attribute confusion matrices.
CvOutcome cross_validate(const Dataset& data, const FoldAssignment& assignment, KernelType kernel,
                         std::span<const FusionRule> rules, bool want_attribute_matrices,
                         const DensityOptions& options) {
    const std::size_t attributes = data.schema.size();
    const std::size_t k = assignment.folds.size();
    CvOutcome outcome;
    outcome.rule_accuracy.assign(rules.size(), 0.0);
    std::vector<std::set<FocalSet>> observed(want_attribute_matrices ? attributes : 0);
    if (want_attribute_matrices)
        outcome.attribute_matrices.assign(attributes, ConfusionMatrix(data.frame));

    std::size_t scored_folds = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const auto& held_out = assignment.folds[f];
        if (held_out.empty())
            continue;
        std::vector<std::size_t> fit_rows;
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                fit_rows.insert(fit_rows.end(), assignment.folds[g].begin(), assignment.folds[g].end());
        std::sort(fit_rows.begin(), fit_rows.end());

        DensityOptions fold_options = options;
        fold_options.seed = derive_seed(options.seed, f, 0, 0);
        const auto densities = fit_densities(data, fit_rows, kernel, fold_options);

        std::vector<std::size_t> correct(rules.size(), 0);
        for (std::size_t i : held_out) {
            const std::size_t truth = data.targets[i];
            const auto masses = attribute_masses(data.records[i], densities, data.schema, data.frame);
            if (want_attribute_matrices) {
                for (std::size_t p = 0; p < attributes; ++p) {
                    outcome.attribute_matrices[p].accumulate(truth, decide_index(masses[p]));
                    for (const auto& [set, w] : masses[p].entries())
                        observed[p].insert(set);
                }
            }
            for (std::size_t r = 0; r < rules.size(); ++r) {
                try {
                    if (decide_index(fuse(masses, rules[r])) == truth)
                        ++correct[r];
                } catch (const FusionConflictError&) {
                    // Unclassifiable under this rule: scored as a miss.
                }
            }
        }
        for (std::size_t r = 0; r < rules.size(); ++r)
            outcome.rule_accuracy[r] += static_cast<double>(correct[r]) / static_cast<double>(held_out.size());
        ++scored_folds;
    }
    if (scored_folds == 0)
        throw TrainingError("cross-validation produced no held-out records");
    for (double& acc : outcome.rule_accuracy)
        acc /= static_cast<double>(scored_folds);
    for (const auto& sets : observed)
        outcome.observed.emplace_back(sets.begin(), sets.end());
    return outcome;
}

void check_grid_inputs(std::size_t kernels, std::size_t rules, std::size_t folds) {
    if (kernels == 0 || rules == 0)
        throw TrainingError("kernel and rule grids must be nonempty");
    if (folds < 2)
        throw TrainingError("cross-validation needs at least 2 folds");
}

AdjustmentResult pick_winner(std::vector<CellScore> cells) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i].accuracy > cells[best].accuracy)
            best = i;
    return {cells[best].kernel, cells[best].rule, std::move(cells)};
}

}  // namespace

FusionConflictError::FusionConflictError(std::size_t attribute, const std::string& attribute_name, double conflict)
    : std::runtime_error("total conflict while fusing attribute " + std::to_string(attribute) +
                         (attribute_name.empty() ? "" : " (" + attribute_name + ")") +
                         ", conflict mass " + std::to_string(conflict)),
      attribute_(attribute) {}

MassFunction generate_mass(std::span<const double> densities, const FramePtr& frame) {
    const std::size_t k = frame->size();
    if (densities.size() != k)
        throw std::invalid_argument("expected " + std::to_string(k) + " density values, got " +
                                    std::to_string(densities.size()));
    std::vector<double> value(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double d = densities[i];
        if (std::isnan(d) || d < 0.0)
            throw std::invalid_argument("density values must be nonnegative");
        value[i] = d < kDensityFloor ? 0.0 : d;
    }
    std::vector<std::size_t> rank(k);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });

    const double top = value[rank.back()];
    if (!(top > 0.0) || !std::isfinite(top))
        return vacuous(frame);

    std::vector<MassFunction::Entry> entries;
    entries.reserve(k);
    FocalSet nested = frame->omega();
    if (value[rank[0]] > 0.0)
        entries.emplace_back(nested, value[rank[0]] / top);
    for (std::size_t r = 1; r < k; ++r) {
        nested = {nested.bits & ~FocalSet::singleton(rank[r - 1]).bits};
        const double step = value[rank[r]] - value[rank[r - 1]];
        if (step > 0.0)
            entries.emplace_back(nested, step / top);
    }
    return make_normalized(frame, std::move(entries));
}

void DiscountTable::set(std::size_t attribute, FocalSet subset, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("weakening coefficient " + std::to_string(alpha) + " is outside [0,1]");
    if (subset.is_empty())
        throw std::invalid_argument("the empty set has no weakening coefficient");
    rows_.at(attribute).insert_or_assign(subset, alpha);
}

double DiscountTable::coefficient(std::size_t attribute, FocalSet subset) const {
    if (attribute >= rows_.size())
        return 1.0;
    auto it = rows_[attribute].find(subset);
    return it == rows_[attribute].end() ? 1.0 : it->second;
}

std::size_t DiscountTable::size() const {
    std::size_t n = 0;
    for (const auto& row : rows_)
        n += row.size();
    return n;
}

bool DiscountTable::is_identity() const {
    for (const auto& row : rows_)
        for (const auto& [set, alpha] : row)
            if (alpha != 1.0)
                return false;
    return true;
}

double Preprocessing::apply(std::size_t numeric_slot, double value) const {
    if (!minmax)
        return value;
    const double lo = lower.at(numeric_slot);
    const double span = upper.at(numeric_slot) - lo;
    return span > 0.0 ? (value - lo) / span : value - lo;
}

Preprocessing fit_preprocessing(const Dataset& dataset, bool minmax) {
    Preprocessing out;
    out.minmax = minmax;
    if (!minmax)
        return out;
    const std::size_t slots = dataset.schema.numeric_count();
    out.lower.assign(slots, 0.0);
    out.upper.assign(slots, 0.0);
    for (std::size_t s = 0; s < slots; ++s) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : dataset.records) {
            lo = std::min(lo, r.numeric[s]);
            hi = std::max(hi, r.numeric[s]);
        }
        out.lower[s] = dataset.records.empty() ? 0.0 : lo;
        out.upper[s] = dataset.records.empty() ? 0.0 : hi;
    }
    return out;
}

Dataset apply_preprocessing(const Dataset& dataset, const Preprocessing& preprocessing) {
    if (!preprocessing.minmax)
        return dataset;
    Dataset out = dataset;
    for (auto& r : out.records)
        r = preprocess_record(r, preprocessing);
    return out;
}

void TrainConfig::validate() const {
    check_grid_inputs(kernels.size(), rules.size(), folds);
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
        throw TrainingError("subsample fraction must lie in (0, 1]");
    if (subsample_cap == 0)
        throw TrainingError("subsample cap must be positive");
    if (bandwidth && !(*bandwidth > 0.0))
        throw TrainingError("bandwidth override must be positive");
}

std::vector<std::vector<AttributeDensity>> fit_densities(const Dataset& data, std::span<const std::size_t> rows,
                                                         KernelType kernel, const DensityOptions& options) {
    require_labeled(data);
    const std::size_t classes = data.frame->size();
    std::vector<std::vector<AttributeDensity>> out(data.schema.size());

    for (std::size_t p = 0; p < data.schema.size(); ++p) {
        const Attribute& attribute = data.schema[p];
        auto& per_class = out[p];
        per_class.reserve(classes);

        if (attribute.kind == AttributeKind::Categorical) {
            std::set<std::string> vocabulary_set;
            std::vector<std::vector<std::string>> values(classes);
            for (std::size_t i : rows) {
                const auto& v = data.records[i].categorical[attribute.slot];
                vocabulary_set.insert(v);
                values[data.targets[i]].push_back(v);
            }
            const std::vector<std::string> vocabulary(vocabulary_set.begin(), vocabulary_set.end());
            for (std::size_t k = 0; k < classes; ++k) {
                if (values[k].empty())
                    per_class.emplace_back(ConstantDensity{});
                else
                    per_class.emplace_back(CategoricalDensity(values[k], vocabulary));
            }
            continue;
        }

        std::vector<std::vector<double>> values(classes);
        for (std::size_t i : rows)
            values[data.targets[i]].push_back(data.records[i].numeric[attribute.slot]);
        for (std::size_t k = 0; k < classes; ++k) {
            auto& v = values[k];
            if (v.empty()) {
                per_class.emplace_back(ConstantDensity{});
                continue;
            }
            if (v.size() > options.subsample_cap) {
                std::mt19937_64 rng(derive_seed(options.seed, p, k, 1));
                seeded_shuffle(std::span<double>(v), rng);
                v.resize(options.subsample_cap);
            }
            per_class.emplace_back(KdeDensity(v, kernel, options.bandwidth));
        }
    }
    return out;
}

Eigen::VectorXd attribute_densities(const std::vector<AttributeDensity>& per_class, const Attribute& attribute,
                                    const Record& record) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(per_class.size()));
    for (std::size_t k = 0; k < per_class.size(); ++k) {
        const double d = attribute.kind == AttributeKind::Numeric
                             ? density_eval(per_class[k], record.numeric.at(attribute.slot))
                             : density_eval(per_class[k], std::string_view(record.categorical.at(attribute.slot)));
        out[static_cast<Eigen::Index>(k)] = d < kDensityFloor ? 0.0 : d;
    }
    return out;
}

MassFunction fuse(std::span<const MassFunction> masses, FusionRule rule, const AttributeSchema* schema,
                  std::vector<double>* conflicts) {
    if (masses.empty())
        throw std::invalid_argument("nothing to fuse");
    MassFunction acc = masses[0];
    for (std::size_t p = 1; p < masses.size(); ++p) {
        if (conflicts)
            conflicts->push_back(conflict_degree(acc, masses[p]));
        try {
            acc = combine(acc, masses[p], rule);
        } catch (const TotalConflictError& e) {
            throw FusionConflictError(p, schema ? (*schema)[p].name : std::string(), e.conflict());
        }
    }
    return acc;
}

Prediction classify(const Record& raw, const TrainedModel& model) {
    check_record(raw, model.schema);
    const Record record = model.preprocessing.minmax ? preprocess_record(raw, model.preprocessing) : raw;
    auto masses = attribute_masses(record, model.densities, model.schema, model.frame);
    for (std::size_t p = 0; p < masses.size() && p < model.discounts.attribute_count(); ++p)
        masses[p] = discount_contextual(masses[p], model.discounts.row(p));

    Prediction prediction;
    const MassFunction fused = fuse(masses, model.rule, &model.schema, &prediction.per_attribute_conflict);
    prediction.pignistic = pignistic(fused);
    prediction.label_index = decide_index(prediction.pignistic);
    prediction.label = model.frame->label(prediction.label_index);
    return prediction;
}

std::size_t single_attribute_classify(const Record& raw, const TrainedModel& model, std::size_t attribute) {
    check_record(raw, model.schema);
    const Record record = model.preprocessing.minmax ? preprocess_record(raw, model.preprocessing) : raw;
    const auto densities = attribute_densities(model.densities.at(attribute), model.schema[attribute], record);
    return decide_index(generate_mass(densities, model.frame));
}

std::vector<FocalSet> discountable_subsets(const Frame& frame, std::span<const FocalSet> observed) {
    std::vector<FocalSet> out;
    if (frame.size() <= 8) {
        for (std::uint32_t bits = 1; bits < frame.omega().bits; ++bits)
            out.push_back({bits});
        return out;
    }
    for (FocalSet set : observed)
        if (!set.is_empty() && set != frame.omega())
            out.push_back(set);
    return out;
}

DiscountTable discount_table_from_matrices(const std::vector<ConfusionMatrix>& matrices,
                                           const std::vector<std::vector<FocalSet>>& observed) {
    DiscountTable table(matrices.size());
    for (std::size_t p = 0; p < matrices.size(); ++p) {
        const auto& matrix = matrices[p];
        const std::span<const FocalSet> seen =
            p < observed.size() ? std::span<const FocalSet>(observed[p]) : std::span<const FocalSet>();
        for (FocalSet set : discountable_subsets(matrix.frame(), seen))
            table.set(p, set, f_score(matrix, set));
    }
    return table;
}

DiscountTable compute_discount_table(const Dataset& train, KernelType kernel, std::size_t folds, std::uint64_t seed,
                                     const DensityOptions& options) {
    if (folds < 2)
        throw TrainingError("cross-validation needs at least 2 folds");
    require_all_classes(train);
    const auto assignment = stratified_folds(train, folds, seed);
    DensityOptions cv_options = options;
    cv_options.seed = seed;
    const auto outcome = cross_validate(train, assignment, kernel, {}, true, cv_options);
    return discount_table_from_matrices(outcome.attribute_matrices, outcome.observed);
}

AdjustmentResult model_adjustment(const Dataset& train, std::span<const KernelType> kernels,
                                  std::span<const FusionRule> rules, std::size_t folds, std::uint64_t seed,
                                  const DensityOptions& options) {
    check_grid_inputs(kernels.size(), rules.size(), folds);
    require_all_classes(train);
    const auto assignment = stratified_folds(train, folds, seed);
    DensityOptions cv_options = options;
    cv_options.seed = seed;
    std::vector<CellScore> cells;
    for (KernelType kernel : kernels) {
        try {
            const auto outcome = cross_validate(train, assignment, kernel, rules, false, cv_options);
            for (std::size_t r = 0; r < rules.size(); ++r)
                cells.push_back({kernel, rules[r], outcome.rule_accuracy[r], false});
        } catch (const std::exception&) {
            for (FusionRule rule : rules)
                cells.push_back({kernel, rule, 0.0, true});
        }
    }
    return pick_winner(std::move(cells));
}

TrainedModel train(const Dataset& raw_train, const TrainConfig& config) {
    config.validate();
    require_all_classes(raw_train);

    TrainedModel model;
    model.frame = raw_train.frame;
    model.scheme = raw_train.scheme;
    model.schema = raw_train.schema;
    model.preprocessing = fit_preprocessing(raw_train, config.minmax);
    const Dataset data = apply_preprocessing(raw_train, model.preprocessing);

    DensityOptions options{config.bandwidth, config.subsample_cap, config.seed};

    // Model adjustment and discount estimation share one fold assignment, so the
    // winning kernel's single-attribute matrices come out of the same pass.
    const auto assignment = stratified_folds(data, config.folds, config.seed);
    std::vector<CellScore> cells;
    std::vector<CvOutcome> outcomes;
    for (KernelType kernel : config.kernels) {
        try {
            outcomes.push_back(cross_validate(data, assignment, kernel, config.rules, config.discounting, options));
            for (std::size_t r = 0; r < config.rules.size(); ++r)
                cells.push_back({kernel, config.rules[r], outcomes.back().rule_accuracy[r], false});
        } catch (const std::exception&) {
            outcomes.emplace_back();
            for (FusionRule rule : config.rules)
                cells.push_back({kernel, rule, 0.0, true});
        }
    }
    const auto winner = pick_winner(std::move(cells));
    model.kernel = winner.kernel;
    model.rule = winner.rule;

    const std::size_t winner_index =
        static_cast<std::size_t>(std::find(config.kernels.begin(), config.kernels.end(), winner.kernel) -
                                 config.kernels.begin());
    if (config.discounting) {
        const auto& outcome = outcomes[winner_index];
        if (outcome.attribute_matrices.empty())
            throw TrainingError("every kernel failed during model adjustment");
        model.discounts = discount_table_from_matrices(outcome.attribute_matrices, outcome.observed);
    } else {
        model.discounts = DiscountTable(data.schema.size());
        for (std::size_t p = 0; p < data.schema.size(); ++p)
            for (FocalSet set : discountable_subsets(*data.frame, {}))
                model.discounts.set(p, set, 1.0);
    }

    std::vector<std::size_t> all_rows(data.size());
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    DensityOptions final_options = options;
    final_options.seed = derive_seed(config.seed, config.folds, 1, 0);
    model.densities = fit_densities(data, all_rows, model.kernel, final_options);

    model.metadata.folds = config.folds;
    model.metadata.seed = config.seed;
    model.metadata.subsample_cap = config.subsample_cap;
    model.metadata.subsample_fraction = config.subsample_fraction;
    model.metadata.discounting = config.discounting;
    model.metadata.bandwidth = config.bandwidth;
    model.metadata.training_records = data.size();
    model.metadata.grid = winner.cells;
    return model;
}

void check_schema(const TrainedModel& model, const Dataset& data) {
    if (!(model.schema == data.schema))
        throw SchemaError("data schema does not match the model schema");
    for (const auto& r : data.records)
        check_record(r, model.schema);
}

Evaluation evaluate(const TrainedModel& model, const Dataset& test) {
    check_schema(model, test);
    if (!test.labeled())
        throw SchemaError("evaluation data must be labeled");
    if (!(*test.frame == *model.frame))
        throw SchemaError("evaluation labels use a different class scheme than the model");
    ConfusionMatrix matrix(model.frame);
    std::size_t rejected = 0;
    std::vector<std::optional<Prediction>> predictions;
    predictions.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        try {
            auto prediction = classify(test.records[i], model);
            matrix.accumulate(test.targets[i], prediction.label_index);
            predictions.emplace_back(std::move(prediction));
        } catch (const FusionConflictError&) {
            ++rejected;
            predictions.emplace_back(std::nullopt);
        }
    }
    return {make_report(std::move(matrix), rejected, model.kernel, model.rule, model.metadata.discounting,
                        model.metadata.seed),
            std::move(predictions)};
}

}  // namespace bprds
