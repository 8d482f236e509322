#ifndef BPRDS_NSLKDD_HPP
#define BPRDS_NSLKDD_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bprds/belief.hpp"

namespace bprds {

/// Malformed input; `row()` is the 1-based line number, 0 when not tied to a row.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& reason)
        : std::runtime_error(row ? "row " + std::to_string(row) + ": " + reason : reason), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class UnknownLabelError : public std::runtime_error {
public:
    explicit UnknownLabelError(std::vector<std::string> names);
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AttributeKind { Numeric, Categorical };

struct Attribute {
    std::string name;
    AttributeKind kind;
    /// Index into Record::numeric or Record::categorical, depending on kind.
    std::size_t slot;
};

class AttributeSchema {
public:
    explicit AttributeSchema(const std::vector<std::pair<std::string, AttributeKind>>& columns);

    /// The 41 NSL-KDD features; protocol_type, service and flag are categorical.
    static const AttributeSchema& nsl_kdd();

    std::size_t size() const { return attributes_.size(); }
    const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
    const std::vector<Attribute>& attributes() const { return attributes_; }
    std::size_t numeric_count() const { return numeric_count_; }
    std::size_t categorical_count() const { return attributes_.size() - numeric_count_; }

    friend bool operator==(const AttributeSchema& a, const AttributeSchema& b) {
        return a.attributes_.size() == b.attributes_.size() &&
               std::equal(a.attributes_.begin(), a.attributes_.end(), b.attributes_.begin(),
                          [](const Attribute& x, const Attribute& y) { return x.name == y.name && x.kind == y.kind; });
    }

private:
    std::vector<Attribute> attributes_;
    std::size_t numeric_count_ = 0;
};

struct Record {
    std::vector<double> numeric;
    std::vector<std::string> categorical;
    std::optional<std::string> label;
    std::optional<int> difficulty;

    friend bool operator==(const Record&, const Record&) = default;
};

enum class AttackCategory { Normal, DoS, Probe, R2L, U2R };
enum class LabelScheme { FiveClass, Binary };

std::string_view to_string(AttackCategory category);
std::string_view to_string(LabelScheme scheme);
LabelScheme parse_label_scheme(std::string_view name);

/// Class frame of a scheme: {Normal, DoS, Probe, R2L, U2R} or {Normal, Attack}.
FramePtr label_frame(LabelScheme scheme);

/// Attack name to category table, read from "name,category" lines with '#' comments.
class AttackMapping {
public:
    static AttackMapping load(const std::filesystem::path& path);
    static AttackMapping parse(std::istream& in);

    /// Throws UnknownLabelError. A trailing '.' (KDD'99 style) is ignored.
    AttackCategory map(std::string_view raw_label) const;
    bool contains(std::string_view raw_label) const;
    std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, AttackCategory, std::less<>> table_;
};

AttackCategory map_attack_category(const AttackMapping& mapping, std::string_view raw_label);

/**
 * Records plus an optional class assignment.
 *
 * `targets` is empty until assign_labels runs; afterwards it holds one frame
 * index per record.
 */
struct Dataset {
    AttributeSchema schema = AttributeSchema::nsl_kdd();
    std::vector<Record> records;
    LabelScheme scheme = LabelScheme::FiveClass;
    FramePtr frame = label_frame(LabelScheme::FiveClass);
    std::vector<std::size_t> targets;
    /// Column count of the source text: features, +label, +difficulty.
    std::size_t columns = 0;

    std::size_t size() const { return records.size(); }
    bool labeled() const { return !records.empty() && targets.size() == records.size(); }
    /// Copy restricted to `indices`, preserving their order.
    Dataset select(std::span<const std::size_t> indices) const;
};

Dataset parse_file(const std::filesystem::path& path, const AttributeSchema& schema = AttributeSchema::nsl_kdd());
Dataset parse_stream(std::istream& in, const AttributeSchema& schema = AttributeSchema::nsl_kdd());

/// Maps every raw label; all unknown names are collected into one UnknownLabelError.
void assign_labels(Dataset& dataset, const AttackMapping& mapping, LabelScheme scheme);

/// Writes the dataset back in its source column layout.
void write_dataset(std::ostream& out, const Dataset& dataset);

/// Per-class record counts aligned with the dataset frame.
std::vector<std::size_t> class_counts(const Dataset& dataset);

struct FoldAssignment {
    std::vector<std::vector<std::size_t>> folds;
    std::vector<std::string> warnings;
};

/// k disjoint, covering index sets; each class dealt round-robin after a seeded shuffle.
FoldAssignment stratified_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed);

/// Stratified, seeded: keeps max(1, round(fraction * count)) records of each class.
Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed);

}  // namespace bprds

#endif  // BPRDS_NSLKDD_HPP
