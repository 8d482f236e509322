#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bprds/model_io.hpp"
#include "support/synthetic.hpp"

using namespace bprds;

namespace {

TrainedModel small_model(bool discounting = true) {
    static const Dataset data = synthetic::nslkdd_dataset({});
    TrainConfig config;
    config.kernels = {KernelType::Epanechnikov, KernelType::Normal};
    config.rules = {FusionRule::Dempster, FusionRule::DuboisPrade};
    config.discounting = discounting;
    return train(data, config);
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("bprds_model_io_" + name);
}

}  // namespace

TEST_CASE("round trip preserves every prediction") {
    const auto data = synthetic::nslkdd_dataset({});
    for (bool discounting : {true, false}) {
        const auto model = small_model(discounting);
        const auto text = serialize_model(model);
        const auto restored = deserialize_model(text);
        CHECK(restored.kernel == model.kernel);
        CHECK(restored.rule == model.rule);
        CHECK(restored.densities == model.densities);
        CHECK(restored.discounts == model.discounts);
        CHECK(restored.metadata == model.metadata);
        CHECK(*restored.frame == *model.frame);
        CHECK(serialize_model(restored) == text);

        const auto a = evaluate(model, data), b = evaluate(restored, data);
        CHECK(a.report.matrix == b.report.matrix);
        for (std::size_t i = 0; i < data.size(); ++i) {
            REQUIRE(a.predictions[i].has_value() == b.predictions[i].has_value());
            if (a.predictions[i]) {
                CHECK(a.predictions[i]->label_index == b.predictions[i]->label_index);
                CHECK(a.predictions[i]->pignistic == b.predictions[i]->pignistic);
            }
        }
    }
}

TEST_CASE("serialization is byte deterministic") {
    CHECK(serialize_model(small_model()) == serialize_model(small_model()));
    const auto path = temp_path("det.json");
    save_model(path, small_model());
    const auto loaded = load_model(path);
    CHECK(serialize_model(loaded) == serialize_model(small_model()));
    std::filesystem::remove(path);
}

TEST_CASE("malformed model files are rejected") {
    CHECK_THROWS_AS(deserialize_model("not json"), ModelFormatError);
    CHECK_THROWS_AS(deserialize_model("{}"), ModelFormatError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ModelFormatError);

    const auto text = serialize_model(small_model());
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        const auto pos = t.find(from);
        REQUIRE(pos != std::string::npos);
        t.replace(pos, from.size(), to);
        return t;
    };
    CHECK_THROWS_AS(deserialize_model(replace("\"schema_version\": 1", "\"schema_version\": 99")), ModelFormatError);
    CHECK_THROWS_AS(deserialize_model(replace("\"bprds-model\"", "\"other\"")), ModelFormatError);
    CHECK_THROWS_AS(deserialize_model(text.substr(0, text.size() / 2)), ModelFormatError);
}
