#include "bprds/belief.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

namespace bprds {

Frame::Frame(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty())
        throw BeliefError("frame must contain at least one label");
    if (labels_.size() > kMaxSize)
        throw BeliefError("frame holds at most 16 labels, got " + std::to_string(labels_.size()));
    std::set<std::string_view> seen;
    for (const auto& label : labels_)
        if (!seen.insert(label).second)
            throw BeliefError("duplicate frame label '" + label + "'");
}

std::size_t Frame::index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw std::out_of_range("label '" + std::string(label) + "' is not in the frame");
    return static_cast<std::size_t>(it - labels_.begin());
}

FocalSet Frame::subset(std::initializer_list<std::string_view> labels) const {
    FocalSet set;
    for (auto label : labels)
        set = set | FocalSet::singleton(index_of(label));
    return set;
}

std::string Frame::format(FocalSet set) const {
    if (set == omega() && size() > 1)
        return "Omega";
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!set.contains(i))
            continue;
        if (!first)
            out += ',';
        out += labels_[i];
        first = false;
    }
    return out + "}";
}

namespace {

constexpr std::array<std::string_view, 4> kRuleNames{"dempster", "conjunctive", "yager", "dubois-prade"};

void require_same_frame(const MassFunction& a, const MassFunction& b) {
    if (!a.same_frame(b))
        throw FrameMismatchError();
}

void require_owned(const MassFunction& m, FocalSet a) {
    if (!m.frame().owns(a))
        throw FrameMismatchError();
}

// Sorts by subset and sums duplicates.
std::vector<MassFunction::Entry> merge_entries(std::vector<MassFunction::Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<MassFunction::Entry> merged;
    merged.reserve(entries.size());
    for (const auto& [set, w] : entries) {
        if (!merged.empty() && merged.back().first == set)
            merged.back().second += w;
        else
            merged.emplace_back(set, w);
    }
    return merged;
}

double sum_of(const std::vector<MassFunction::Entry>& entries) {
    double s = 0.0;
    for (const auto& e : entries)
        s += e.second;
    return s;
}

// Drops sub-threshold entries and rescales the rest to sum to one.
std::vector<MassFunction::Entry> prune_and_rescale(std::vector<MassFunction::Entry> entries) {
    double total = sum_of(entries);
    for (auto& e : entries)
        e.second /= total;
    std::erase_if(entries, [](const auto& e) { return e.second < kMassDropThreshold; });
    total = sum_of(entries);
    if (total != 1.0)
        for (auto& e : entries)
            e.second /= total;
    return entries;
}

}  // namespace

std::string_view to_string(FusionRule rule) { return kRuleNames[static_cast<std::size_t>(rule)]; }

FusionRule parse_fusion_rule(std::string_view name) {
    for (std::size_t i = 0; i < kRuleNames.size(); ++i)
        if (kRuleNames[i] == name)
            return static_cast<FusionRule>(i);
    if (name == "dubois_prade" || name == "duboisprade")
        return FusionRule::DuboisPrade;
    throw std::invalid_argument("unknown fusion rule '" + std::string(name) + "'");
}

const std::vector<FusionRule>& all_fusion_rules() {
    static const std::vector<FusionRule> rules{FusionRule::Dempster, FusionRule::Conjunctive, FusionRule::Yager,
                                               FusionRule::DuboisPrade};
    return rules;
}

MassFunction::MassFunction(FramePtr frame, std::vector<Entry> entries, bool allows_empty)
    : frame_(std::move(frame)), allows_empty_(allows_empty) {
    if (!frame_)
        throw BeliefError("mass function needs a frame");
    for (const auto& [set, w] : entries) {
        if (!frame_->owns(set))
            throw BeliefError("subset " + std::to_string(set.bits) + " lies outside the frame");
        if (!std::isfinite(w) || w < 0.0 || w > 1.0 + kMassSumTolerance)
            throw BeliefError("mass " + std::to_string(w) + " is outside [0,1]");
    }
    auto merged = merge_entries(std::move(entries));
    const double total = sum_of(merged);
    if (std::abs(total - 1.0) > kMassSumTolerance)
        throw BeliefError("masses sum to " + std::to_string(total) + ", expected 1");
    if (!allows_empty_ && !merged.empty() && merged.front().first.is_empty() && merged.front().second > 0.0)
        throw BeliefError("mass on the empty set requires allows_empty");
    entries_ = prune_and_rescale(std::move(merged));
}

MassFunction make_normalized(FramePtr frame, std::vector<MassFunction::Entry> weights, bool allows_empty) {
    if (!frame)
        throw BeliefError("mass function needs a frame");
    for (const auto& [set, w] : weights) {
        if (!frame->owns(set))
            throw BeliefError("subset lies outside the frame");
        if (!std::isfinite(w) || w < 0.0)
            throw BeliefError("weights must be finite and nonnegative");
        if (!allows_empty && set.is_empty() && w > 0.0)
            throw BeliefError("mass on the empty set requires allows_empty");
    }
    auto merged = merge_entries(std::move(weights));
    std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
    if (merged.empty() || sum_of(merged) <= 0.0)
        throw BeliefError("cannot normalize an all-zero mass assignment");
    return MassFunction(MassFunction::Trusted{}, std::move(frame), prune_and_rescale(std::move(merged)),
                        allows_empty);
}

double MassFunction::mass(FocalSet set) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), set,
                               [](const Entry& e, FocalSet s) { return e.first < s; });
    return (it != entries_.end() && it->first == set) ? it->second : 0.0;
}

double MassFunction::total() const { return sum_of(entries_); }

bool MassFunction::is_consonant() const {
    std::vector<FocalSet> sets;
    for (const auto& [set, w] : entries_)
        if (!set.is_empty())
            sets.push_back(set);
    std::sort(sets.begin(), sets.end(),
              [](FocalSet a, FocalSet b) { return a.cardinality() < b.cardinality(); });
    for (std::size_t i = 1; i < sets.size(); ++i)
        if (!sets[i - 1].is_subset_of(sets[i]))
            return false;
    return true;
}

MassFunction vacuous(FramePtr frame) {
    const FocalSet omega = frame->omega();
    return MassFunction(std::move(frame), {{omega, 1.0}});
}

double plausibility(const MassFunction& m, FocalSet a) {
    require_owned(m, a);
    double pl = 0.0;
    for (const auto& [set, w] : m.entries())
        if (set.intersects(a))
            pl += w;
    return std::min(pl, 1.0);
}

double credibility(const MassFunction& m, FocalSet a) {
    require_owned(m, a);
    double cr = 0.0;
    for (const auto& [set, w] : m.entries())
        if (!set.is_empty() && set.is_subset_of(a))
            cr += w;
    return std::min(cr, 1.0);
}

double conflict_degree(const MassFunction& m1, const MassFunction& m2) {
    require_same_frame(m1, m2);
    double conflict = 0.0;
    for (const auto& [b1, w1] : m1.entries())
        for (const auto& [b2, w2] : m2.entries())
            if (!b1.intersects(b2))
                conflict += w1 * w2;
    return std::clamp(conflict, 0.0, 1.0);
}

MassFunction combine(const MassFunction& m1, const MassFunction& m2, FusionRule rule) {
    require_same_frame(m1, m2);
    const FocalSet omega = m1.frame().omega();
    std::vector<MassFunction::Entry> products;
    products.reserve(m1.entries().size() * m2.entries().size());
    double conflict = 0.0;

    for (const auto& [b1, w1] : m1.entries()) {
        for (const auto& [b2, w2] : m2.entries()) {
            const double product = w1 * w2;
            const FocalSet meet = b1 & b2;
            if (!meet.is_empty()) {
                products.emplace_back(meet, product);
                continue;
            }
            conflict += product;
            switch (rule) {
                case FusionRule::Dempster:
                    break;
                case FusionRule::Conjunctive:
                    products.emplace_back(FocalSet::empty(), product);
                    break;
                case FusionRule::Yager:
                    products.emplace_back(omega, product);
                    break;
                case FusionRule::DuboisPrade: {
                    // An empty union only arises from an empty input set; park it on Ω.
                    const FocalSet join = b1 | b2;
                    products.emplace_back(join.is_empty() ? omega : join, product);
                    break;
                }
            }
        }
    }

    if (rule == FusionRule::Dempster && sum_of(products) <= 0.0)
        throw TotalConflictError(conflict);
    return make_normalized(m1.frame_ptr(), std::move(products), rule == FusionRule::Conjunctive);
}

MassFunction discount_classical(const MassFunction& m, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("discount coefficient " + std::to_string(alpha) + " is outside [0,1]");
    const FocalSet omega = m.frame().omega();
    std::vector<MassFunction::Entry> out;
    out.reserve(m.entries().size() + 1);
    double omega_mass = 1.0 - alpha;
    for (const auto& [set, w] : m.entries()) {
        if (set == omega)
            omega_mass += alpha * w;
        else
            out.emplace_back(set, alpha * w);
    }
    out.emplace_back(omega, omega_mass);
    return make_normalized(m.frame_ptr(), std::move(out), m.allows_empty());
}

MassFunction discount_contextual(const MassFunction& m, const ContextualCoefficients& alphas) {
    for (const auto& [set, alpha] : alphas)
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("contextual coefficient " + std::to_string(alpha) + " for subset " +
                                        m.frame().format(set) + " is outside [0,1]");
    const FocalSet omega = m.frame().omega();
    std::vector<MassFunction::Entry> out;
    out.reserve(m.entries().size() + 1);
    double omega_mass = m.mass(omega);
    for (const auto& [set, w] : m.entries()) {
        if (set == omega)
            continue;
        auto it = alphas.find(set);
        const double alpha = it == alphas.end() ? 1.0 : it->second;
        out.emplace_back(set, alpha * w);
        omega_mass += (1.0 - alpha) * w;
    }
    out.emplace_back(omega, omega_mass);
    return make_normalized(m.frame_ptr(), std::move(out), m.allows_empty());
}

Eigen::VectorXd pignistic(const MassFunction& m) {
    const auto k = static_cast<Eigen::Index>(m.frame().size());
    Eigen::VectorXd bet = Eigen::VectorXd::Zero(k);
    double nonempty = 0.0;
    for (const auto& [set, w] : m.entries()) {
        if (set.is_empty())
            continue;
        nonempty += w;
        const double share = w / set.cardinality();
        for (Eigen::Index i = 0; i < k; ++i)
            if (set.contains(static_cast<std::size_t>(i)))
                bet[i] += share;
    }
    // All mass on the empty set: nothing to bet on, fall back to ignorance.
    if (nonempty <= 0.0)
        return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    return bet / nonempty;
}

std::size_t decide_index(const Eigen::VectorXd& betting) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < betting.size(); ++i)
        if (betting[i] > betting[best])
            best = i;
    return static_cast<std::size_t>(best);
}

std::size_t decide_index(const MassFunction& m) { return decide_index(pignistic(m)); }

const std::string& decide(const MassFunction& m) { return m.frame().label(decide_index(m)); }

}  // namespace bprds
