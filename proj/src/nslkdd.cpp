#include "bprds/nslkdd.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "bprds/random.hpp"

namespace bprds {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void split_fields(std::string_view line, std::vector<std::string_view>& fields) {
    fields.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

constexpr std::array<std::string_view, 5> kCategoryNames{"Normal", "DoS", "Probe", "R2L", "U2R"};

}  // namespace

UnknownLabelError::UnknownLabelError(std::vector<std::string> names)
    : std::runtime_error([&] {
          std::string msg = "unknown attack label(s):";
          for (const auto& n : names)
              msg += " " + n;
          return msg;
      }()),
      names_(std::move(names)) {}

AttributeSchema::AttributeSchema(const std::vector<std::pair<std::string, AttributeKind>>& columns) {
    if (columns.empty())
        throw SchemaError("schema needs at least one attribute");
    std::set<std::string> names;
    std::size_t categorical = 0;
    for (const auto& [name, kind] : columns) {
        if (!names.insert(name).second)
            throw SchemaError("duplicate attribute '" + name + "'");
        const std::size_t slot = kind == AttributeKind::Numeric ? numeric_count_++ : categorical++;
        attributes_.push_back({name, kind, slot});
    }
}

const AttributeSchema& AttributeSchema::nsl_kdd() {
    static const AttributeSchema schema = [] {
        constexpr auto N = AttributeKind::Numeric;
        constexpr auto C = AttributeKind::Categorical;
        return AttributeSchema({
            {"duration", N},
            {"protocol_type", C},
            {"service", C},
            {"flag", C},
            {"src_bytes", N},
            {"dst_bytes", N},
            {"land", N},
            {"wrong_fragment", N},
            {"urgent", N},
            {"hot", N},
            {"num_failed_logins", N},
            {"logged_in", N},
            {"num_compromised", N},
            {"root_shell", N},
            {"su_attempted", N},
            {"num_root", N},
            {"num_file_creations", N},
            {"num_shells", N},
            {"num_access_files", N},
            {"num_outbound_cmds", N},
            {"is_host_login", N},
            {"is_guest_login", N},
            {"count", N},
            {"srv_count", N},
            {"serror_rate", N},
            {"srv_serror_rate", N},
            {"rerror_rate", N},
            {"srv_rerror_rate", N},
            {"same_srv_rate", N},
            {"diff_srv_rate", N},
            {"srv_diff_host_rate", N},
            {"dst_host_count", N},
            {"dst_host_srv_count", N},
            {"dst_host_same_srv_rate", N},
            {"dst_host_diff_srv_rate", N},
            {"dst_host_same_src_port_rate", N},
            {"dst_host_srv_diff_host_rate", N},
            {"dst_host_serror_rate", N},
            {"dst_host_srv_serror_rate", N},
            {"dst_host_rerror_rate", N},
            {"dst_host_srv_rerror_rate", N},
        });
    }();
    return schema;
}

std::string_view to_string(AttackCategory category) { return kCategoryNames[static_cast<std::size_t>(category)]; }

std::string_view to_string(LabelScheme scheme) { return scheme == LabelScheme::FiveClass ? "five" : "binary"; }

LabelScheme parse_label_scheme(std::string_view name) {
    const std::string n = lowercase(name);
    if (n == "five" || n == "fiveclass" || n == "five-class")
        return LabelScheme::FiveClass;
    if (n == "binary")
        return LabelScheme::Binary;
    throw std::invalid_argument("unknown label scheme '" + std::string(name) + "' (expected five or binary)");
}

FramePtr label_frame(LabelScheme scheme) {
    static const FramePtr five = make_frame({"Normal", "DoS", "Probe", "R2L", "U2R"});
    static const FramePtr binary = make_frame({"Normal", "Attack"});
    return scheme == LabelScheme::FiveClass ? five : binary;
}

AttackMapping AttackMapping::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(0, "cannot open mapping file " + path.string());
    return parse(in);
}

AttackMapping AttackMapping::parse(std::istream& in) {
    AttackMapping mapping;
    std::string line;
    std::size_t row = 0;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++row;
        std::string_view content = line;
        if (auto hash = content.find('#'); hash != std::string_view::npos)
            content = content.substr(0, hash);
        content = trim(content);
        if (content.empty())
            continue;
        split_fields(content, fields);
        if (fields.size() != 2 || fields[0].empty())
            throw ParseError(row, "mapping lines must read 'attack_name,category'");
        const std::string category = lowercase(fields[1]);
        AttackCategory value;
        if (category == "normal")
            value = AttackCategory::Normal;
        else if (category == "dos")
            value = AttackCategory::DoS;
        else if (category == "probe")
            value = AttackCategory::Probe;
        else if (category == "r2l")
            value = AttackCategory::R2L;
        else if (category == "u2r")
            value = AttackCategory::U2R;
        else
            throw ParseError(row, "unknown category '" + std::string(fields[1]) + "'");
        mapping.table_.insert_or_assign(lowercase(fields[0]), value);
    }
    return mapping;
}

namespace {
std::string normalize_label(std::string_view raw) {
    raw = trim(raw);
    if (!raw.empty() && raw.back() == '.')
        raw.remove_suffix(1);
    return lowercase(raw);
}
}  // namespace

bool AttackMapping::contains(std::string_view raw_label) const {
    return table_.contains(normalize_label(raw_label));
}

AttackCategory AttackMapping::map(std::string_view raw_label) const {
    auto it = table_.find(normalize_label(raw_label));
    if (it == table_.end())
        throw UnknownLabelError({std::string(raw_label)});
    return it->second;
}

AttackCategory map_attack_category(const AttackMapping& mapping, std::string_view raw_label) {
    return mapping.map(raw_label);
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
    Dataset out;
    out.schema = schema;
    out.scheme = scheme;
    out.frame = frame;
    out.columns = columns;
    out.records.reserve(indices.size());
    const bool has_targets = labeled();
    if (has_targets)
        out.targets.reserve(indices.size());
    for (std::size_t i : indices) {
        out.records.push_back(records.at(i));
        if (has_targets)
            out.targets.push_back(targets[i]);
    }
    return out;
}

Dataset parse_file(const std::filesystem::path& path, const AttributeSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(0, "cannot open " + path.string());
    return parse_stream(in, schema);
}

Dataset parse_stream(std::istream& in, const AttributeSchema& schema) {
    Dataset dataset;
    dataset.schema = schema;
    const std::size_t features = schema.size();
    std::string line;
    std::vector<std::string_view> fields;
    std::size_t row = 0;

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty())
            continue;
        split_fields(line, fields);
        if (dataset.columns == 0) {
            if (fields.size() < features || fields.size() > features + 2)
                throw ParseError(row, "unknown column count " + std::to_string(fields.size()) + " (expected " +
                                          std::to_string(features) + " to " + std::to_string(features + 2) + ")");
            dataset.columns = fields.size();
        } else if (fields.size() != dataset.columns) {
            throw ParseError(row, "expected " + std::to_string(dataset.columns) + " fields, found " +
                                      std::to_string(fields.size()));
        }

        Record record;
        record.numeric.reserve(schema.numeric_count());
        record.categorical.reserve(schema.categorical_count());
        for (std::size_t i = 0; i < features; ++i) {
            const auto& attribute = schema[i];
            const std::string_view field = fields[i];
            if (attribute.kind == AttributeKind::Categorical) {
                if (field.empty())
                    throw ParseError(row, "empty value for " + attribute.name);
                record.categorical.emplace_back(field);
                continue;
            }
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
                throw ParseError(row, "unparseable numeric value '" + std::string(field) + "' for " + attribute.name);
            record.numeric.push_back(value);
        }
        if (dataset.columns > features) {
            if (fields[features].empty())
                throw ParseError(row, "empty class label");
            record.label = std::string(fields[features]);
        }
        if (dataset.columns > features + 1) {
            int difficulty = 0;
            const std::string_view field = fields[features + 1];
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), difficulty);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw ParseError(row, "unparseable difficulty '" + std::string(field) + "'");
            record.difficulty = difficulty;
        }
        dataset.records.push_back(std::move(record));
    }
    if (dataset.records.empty())
        throw ParseError(0, "no records found");
    return dataset;
}

void assign_labels(Dataset& dataset, const AttackMapping& mapping, LabelScheme scheme) {
    std::set<std::string> unknown;
    std::vector<std::size_t> targets;
    targets.reserve(dataset.records.size());
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& label = dataset.records[i].label;
        if (!label)
            throw ParseError(i + 1, "record has no class label");
        if (!mapping.contains(*label)) {
            unknown.insert(*label);
            continue;
        }
        const AttackCategory category = mapping.map(*label);
        if (scheme == LabelScheme::FiveClass)
            targets.push_back(static_cast<std::size_t>(category));
        else
            targets.push_back(category == AttackCategory::Normal ? 0 : 1);
    }
    if (!unknown.empty())
        throw UnknownLabelError({unknown.begin(), unknown.end()});
    dataset.scheme = scheme;
    dataset.frame = label_frame(scheme);
    dataset.targets = std::move(targets);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    const std::size_t features = dataset.schema.size();
    const std::size_t columns = dataset.columns ? dataset.columns : features + 1;
    for (const auto& record : dataset.records) {
        for (std::size_t i = 0; i < features; ++i) {
            const auto& attribute = dataset.schema[i];
            if (i)
                out << ',';
            if (attribute.kind == AttributeKind::Categorical)
                out << record.categorical[attribute.slot];
            else
                out << format_double(record.numeric[attribute.slot]);
        }
        if (columns > features)
            out << ',' << record.label.value_or("");
        if (columns > features + 1)
            out << ',' << record.difficulty.value_or(0);
        out << '\n';
    }
}

std::vector<std::size_t> class_counts(const Dataset& dataset) {
    if (!dataset.labeled())
        throw SchemaError("class counts need a labeled dataset");
    std::vector<std::size_t> counts(dataset.frame->size(), 0);
    for (std::size_t t : dataset.targets)
        ++counts.at(t);
    return counts;
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& dataset) {
    if (!dataset.labeled())
        throw SchemaError("stratification needs a labeled dataset");
    std::vector<std::vector<std::size_t>> by_class(dataset.frame->size());
    for (std::size_t i = 0; i < dataset.targets.size(); ++i)
        by_class.at(dataset.targets[i]).push_back(i);
    return by_class;
}

// Classes in order of first appearance, so seeded draws do not depend on how classes are labeled.
std::vector<std::size_t> visit_order(const std::vector<std::vector<std::size_t>>& by_class) {
    std::vector<std::size_t> order(by_class.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto first = [&](std::size_t c) { return by_class[c].empty() ? SIZE_MAX : by_class[c].front(); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first(a) < first(b); });
    return order;
}

}  // namespace

FoldAssignment stratified_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw std::invalid_argument("need at least 2 folds");
    auto by_class = indices_by_class(dataset);
    std::mt19937_64 rng(seed);
    FoldAssignment result;
    result.folds.resize(k);
    // The deal position carries over between classes so fold sizes stay balanced.
    std::size_t position = 0;
    for (std::size_t c : visit_order(by_class)) {
        auto& members = by_class[c];
        if (members.empty()) {
            result.warnings.push_back("class " + dataset.frame->label(c) + " has no records");
            continue;
        }
        if (members.size() < k)
            result.warnings.push_back("class " + dataset.frame->label(c) + " has " + std::to_string(members.size()) +
                                      " records for " + std::to_string(k) + " folds; " +
                                      std::to_string(k - members.size()) + " folds lack it");
        seeded_shuffle(std::span<std::size_t>(members), rng);
        for (std::size_t index : members)
            result.folds[position++ % k].push_back(index);
    }
    for (auto& fold : result.folds)
        std::sort(fold.begin(), fold.end());
    return result;
}

Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("subsample fraction must lie in (0, 1]");
    if (fraction == 1.0)
        return dataset;
    auto by_class = indices_by_class(dataset);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> keep;
    for (std::size_t c : visit_order(by_class)) {
        auto& members = by_class[c];
        if (members.empty())
            continue;
        const auto target = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size()))));
        seeded_shuffle(std::span<std::size_t>(members), rng);
        keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(target));
    }
    std::sort(keep.begin(), keep.end());
    return dataset.select(keep);
}

}  // namespace bprds
