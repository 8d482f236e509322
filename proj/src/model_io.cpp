#include "bprds/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bprds {

namespace {

using nlohmann::json;

json subset_to_json(const Frame& frame, FocalSet set) {
    json labels = json::array();
    for (std::size_t i = 0; i < frame.size(); ++i)
        if (set.contains(i))
            labels.push_back(frame.label(i));
    return labels;
}

FocalSet subset_from_json(const Frame& frame, const json& labels) {
    FocalSet set;
    for (const auto& label : labels)
        set = set | FocalSet::singleton(frame.index_of(label.get<std::string>()));
    return set;
}

json density_to_json(const AttributeDensity& density) {
    if (const auto* kde = std::get_if<KdeDensity>(&density)) {
        return {{"type", "kde"},
                {"kernel", to_string(kde->kernel())},
                {"bandwidth", kde->bandwidth()},
                {"values", kde->values()},
                {"counts", kde->counts()}};
    }
    if (const auto* cat = std::get_if<CategoricalDensity>(&density)) {
        json table = json::object();
        for (const auto& [category, p] : cat->table())
            table[category] = p;
        return {{"type", "categorical"},
                {"smoothing", cat->smoothing()},
                {"unseen", cat->unseen_probability()},
                {"table", table}};
    }
    return {{"type", "constant"}, {"value", std::get<ConstantDensity>(density).value}};
}

AttributeDensity density_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "kde")
        return KdeDensity(j.at("values").get<std::vector<double>>(), j.at("counts").get<std::vector<std::size_t>>(),
                          parse_kernel(j.at("kernel").get<std::string>()), j.at("bandwidth").get<double>());
    if (type == "categorical") {
        std::map<std::string, double, std::less<>> table;
        for (const auto& [category, p] : j.at("table").items())
            table.emplace(category, p.get<double>());
        return CategoricalDensity(std::move(table), j.at("unseen").get<double>(), j.at("smoothing").get<double>());
    }
    if (type == "constant")
        return ConstantDensity{j.at("value").get<double>()};
    throw ModelFormatError("unknown density type '" + type + "'");
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
    const Frame& frame = *model.frame;
    json schema = json::array();
    for (const auto& a : model.schema.attributes())
        schema.push_back({{"name", a.name}, {"kind", a.kind == AttributeKind::Numeric ? "numeric" : "categorical"}});

    json densities = json::array();
    for (const auto& per_class : model.densities) {
        json row = json::array();
        for (const auto& d : per_class)
            row.push_back(density_to_json(d));
        densities.push_back(std::move(row));
    }

    json discounts = json::array();
    for (std::size_t p = 0; p < model.discounts.attribute_count(); ++p) {
        json row = json::array();
        for (const auto& [set, alpha] : model.discounts.row(p))
            row.push_back({{"subset", subset_to_json(frame, set)}, {"alpha", alpha}});
        discounts.push_back(std::move(row));
    }

    json grid = json::array();
    for (const auto& cell : model.metadata.grid)
        grid.push_back({{"kernel", to_string(cell.kernel)},
                        {"rule", to_string(cell.rule)},
                        {"accuracy", cell.accuracy},
                        {"failed", cell.failed}});

    json metadata = {{"folds", model.metadata.folds},
                     {"seed", model.metadata.seed},
                     {"subsample_cap", model.metadata.subsample_cap},
                     {"subsample_fraction", model.metadata.subsample_fraction},
                     {"discounting", model.metadata.discounting},
                     {"bandwidth", model.metadata.bandwidth ? json(*model.metadata.bandwidth) : json(nullptr)},
                     {"training_records", model.metadata.training_records},
                     {"grid", grid}};

    json root = {{"format", "bprds-model"},
                 {"schema_version", kModelSchemaVersion},
                 {"frame", frame.labels()},
                 {"label_scheme", to_string(model.scheme)},
                 {"kernel", to_string(model.kernel)},
                 {"rule", to_string(model.rule)},
                 {"attributes", schema},
                 {"preprocessing",
                  {{"minmax", model.preprocessing.minmax},
                   {"lower", model.preprocessing.lower},
                   {"upper", model.preprocessing.upper}}},
                 {"densities", densities},
                 {"discounts", discounts},
                 {"metadata", metadata}};
    return root.dump(1) + "\n";
}

TrainedModel deserialize_model(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (root.value("format", std::string()) != "bprds-model")
            throw ModelFormatError("not a model file (missing format tag)");
        const int version = root.at("schema_version").get<int>();
        if (version != kModelSchemaVersion)
            throw ModelFormatError("unsupported model schema version " + std::to_string(version));

        TrainedModel model;
        model.frame = make_frame(root.at("frame").get<std::vector<std::string>>());
        model.scheme = parse_label_scheme(root.at("label_scheme").get<std::string>());
        model.kernel = parse_kernel(root.at("kernel").get<std::string>());
        model.rule = parse_fusion_rule(root.at("rule").get<std::string>());

        std::vector<std::pair<std::string, AttributeKind>> columns;
        for (const auto& a : root.at("attributes"))
            columns.emplace_back(a.at("name").get<std::string>(), a.at("kind").get<std::string>() == "numeric"
                                                                       ? AttributeKind::Numeric
                                                                       : AttributeKind::Categorical);
        model.schema = AttributeSchema(columns);
        // Keep the canonical frame object for a known scheme so frames compare by pointer.
        if (*model.frame == *label_frame(model.scheme))
            model.frame = label_frame(model.scheme);

        const auto& pre = root.at("preprocessing");
        model.preprocessing.minmax = pre.at("minmax").get<bool>();
        model.preprocessing.lower = pre.at("lower").get<std::vector<double>>();
        model.preprocessing.upper = pre.at("upper").get<std::vector<double>>();

        for (const auto& row : root.at("densities")) {
            std::vector<AttributeDensity> per_class;
            for (const auto& d : row)
                per_class.push_back(density_from_json(d));
            if (per_class.size() != model.frame->size())
                throw ModelFormatError("density row does not cover every class");
            model.densities.push_back(std::move(per_class));
        }
        if (model.densities.size() != model.schema.size())
            throw ModelFormatError("density table does not cover every attribute");

        const auto& discounts = root.at("discounts");
        model.discounts = DiscountTable(discounts.size());
        for (std::size_t p = 0; p < discounts.size(); ++p)
            for (const auto& entry : discounts[p])
                model.discounts.set(p, subset_from_json(*model.frame, entry.at("subset")),
                                    entry.at("alpha").get<double>());

        const auto& meta = root.at("metadata");
        model.metadata.folds = meta.at("folds").get<std::size_t>();
        model.metadata.seed = meta.at("seed").get<std::uint64_t>();
        model.metadata.subsample_cap = meta.at("subsample_cap").get<std::size_t>();
        model.metadata.subsample_fraction = meta.at("subsample_fraction").get<double>();
        model.metadata.discounting = meta.at("discounting").get<bool>();
        if (!meta.at("bandwidth").is_null())
            model.metadata.bandwidth = meta.at("bandwidth").get<double>();
        model.metadata.training_records = meta.at("training_records").get<std::size_t>();
        for (const auto& cell : meta.at("grid"))
            model.metadata.grid.push_back({parse_kernel(cell.at("kernel").get<std::string>()),
                                           parse_fusion_rule(cell.at("rule").get<std::string>()),
                                           cell.at("accuracy").get<double>(), cell.at("failed").get<bool>()});
        return model;
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    } catch (const DensityError& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    } catch (const BeliefError& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    } catch (const SchemaError& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ModelFormatError("cannot write model file " + path.string());
    out << serialize_model(model);
    if (!out)
        throw ModelFormatError("failed writing model file " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ModelFormatError("cannot open model file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

}  // namespace bprds
