#ifndef BPRDS_MODEL_IO_HPP
#define BPRDS_MODEL_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bprds/classifier.hpp"

namespace bprds {

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kModelSchemaVersion = 1;

/// JSON text; densities keep their folded raw samples so a reload evaluates identically.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace bprds

#endif  // BPRDS_MODEL_IO_HPP
