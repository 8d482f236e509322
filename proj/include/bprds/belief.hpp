#ifndef BPRDS_BELIEF_HPP
#define BPRDS_BELIEF_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bprds {

class BeliefError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FrameMismatchError : public BeliefError {
public:
    FrameMismatchError() : BeliefError("mass functions are defined on different frames") {}
};

/// Dempster normalizer vanished: the two sources are fully conflicting.
class TotalConflictError : public BeliefError {
public:
    explicit TotalConflictError(double conflict)
        : BeliefError("total conflict between sources (conflict mass " + std::to_string(conflict) + ")"),
          conflict_(conflict) {}
    double conflict() const noexcept { return conflict_; }

private:
    double conflict_;
};

/// Subset of a frame, bit i set when the i-th label belongs to the set.
struct FocalSet {
    std::uint32_t bits = 0;

    static constexpr FocalSet empty() { return {}; }
    static constexpr FocalSet singleton(std::size_t index) { return {std::uint32_t{1} << index}; }

    constexpr bool is_empty() const { return bits == 0; }
    constexpr int cardinality() const { return std::popcount(bits); }
    constexpr bool contains(std::size_t index) const { return (bits >> index) & 1u; }
    constexpr bool is_subset_of(FocalSet other) const { return (bits & ~other.bits) == 0; }
    constexpr bool intersects(FocalSet other) const { return (bits & other.bits) != 0; }

    friend constexpr FocalSet operator&(FocalSet a, FocalSet b) { return {a.bits & b.bits}; }
    friend constexpr FocalSet operator|(FocalSet a, FocalSet b) { return {a.bits | b.bits}; }
    friend constexpr auto operator<=>(FocalSet, FocalSet) = default;
};

/// Frame of discernment: an ordered list of at most 16 distinct labels.
class Frame {
public:
    static constexpr std::size_t kMaxSize = 16;

    explicit Frame(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t index) const { return labels_.at(index); }
    /// Position of `label`, throws std::out_of_range when absent.
    std::size_t index_of(std::string_view label) const;

    FocalSet omega() const { return {static_cast<std::uint32_t>((std::uint64_t{1} << size()) - 1)}; }
    std::size_t power_set_size() const { return std::size_t{1} << size(); }
    bool owns(FocalSet set) const { return set.is_subset_of(omega()); }
    FocalSet complement(FocalSet set) const { return {omega().bits & ~set.bits}; }
    FocalSet subset(std::initializer_list<std::string_view> labels) const;

    /// Renders a subset as "{a,b}"; Ω prints as "Omega".
    std::string format(FocalSet set) const;

    friend bool operator==(const Frame& a, const Frame& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
};

using FramePtr = std::shared_ptr<const Frame>;

inline FramePtr make_frame(std::vector<std::string> labels) {
    return std::make_shared<const Frame>(std::move(labels));
}

enum class FusionRule { Dempster, Conjunctive, Yager, DuboisPrade };

std::string_view to_string(FusionRule rule);
FusionRule parse_fusion_rule(std::string_view name);
const std::vector<FusionRule>& all_fusion_rules();

/// Below this a mass is dropped and the function renormalized.
inline constexpr double kMassDropThreshold = 1e-12;
inline constexpr double kMassSumTolerance = 1e-9;

/**
 * Sparse basic belief assignment over a frame.
 *
 * Entries are kept sorted by subset bits, strictly positive and summing to one.
 * Mass on the empty set is only allowed when `allows_empty()` is set (the
 * unnormalized conjunctive rule produces it).
 */
class MassFunction {
public:
    using Entry = std::pair<FocalSet, double>;

    /// Validates and canonicalizes: duplicates merged, zero and sub-threshold entries dropped.
    MassFunction(FramePtr frame, std::vector<Entry> entries, bool allows_empty = false);

    const Frame& frame() const { return *frame_; }
    const FramePtr& frame_ptr() const { return frame_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool allows_empty() const { return allows_empty_; }

    /// Mass of an exact subset (0 when not focal).
    double mass(FocalSet set) const;
    double total() const;
    bool is_consonant() const;

    bool same_frame(const MassFunction& other) const {
        return frame_ == other.frame_ || *frame_ == *other.frame_;
    }

private:
    friend MassFunction make_normalized(FramePtr, std::vector<Entry>, bool);
    struct Trusted {};
    MassFunction(Trusted, FramePtr frame, std::vector<Entry> entries, bool allows_empty)
        : frame_(std::move(frame)), entries_(std::move(entries)), allows_empty_(allows_empty) {}

    FramePtr frame_;
    std::vector<Entry> entries_;
    bool allows_empty_;
};

/// Builds a mass function from unnormalized nonnegative weights: merges, drops tiny masses, rescales to one.
MassFunction make_normalized(FramePtr frame, std::vector<MassFunction::Entry> weights, bool allows_empty = false);

MassFunction vacuous(FramePtr frame);

double plausibility(const MassFunction& m, FocalSet a);
/// Sum of masses of nonempty subsets of `a`.
double credibility(const MassFunction& m, FocalSet a);

/// Mass the conjunctive combination would put on the empty set.
double conflict_degree(const MassFunction& m1, const MassFunction& m2);
MassFunction combine(const MassFunction& m1, const MassFunction& m2, FusionRule rule);

MassFunction discount_classical(const MassFunction& m, double alpha);

/// Per-subset weakening coefficients; subsets without an entry keep coefficient 1.
using ContextualCoefficients = std::map<FocalSet, double>;
MassFunction discount_contextual(const MassFunction& m, const ContextualCoefficients& alphas);

/// Betting probabilities. Mass on the empty set is renormalized away first.
Eigen::VectorXd pignistic(const MassFunction& m);

/// Frame index of the pignistic argmax, lowest index on ties.
std::size_t decide_index(const Eigen::VectorXd& betting);
std::size_t decide_index(const MassFunction& m);
const std::string& decide(const MassFunction& m);

}  // namespace bprds

#endif  // BPRDS_BELIEF_HPP
