// Model directory format: `model.json` manifest plus `weights.bin` blob of
// little-endian IEEE-754 values laid out per the manifest's offset table.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <variant>

#include "emocnn/pipeline.hpp"

namespace emocnn {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kManifestFile = "model.json";
inline constexpr const char* kWeightsFile = "weights.bin";

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Creates `dir` if needed and writes the manifest and weight blob.
template <typename Scalar>
void save_model(const TrainedModel<Scalar>& trained, const std::filesystem::path& dir);

using LoadedModel = std::variant<TrainedModel<double>, TrainedModel<float>>;

/// Validates version, layout table, blob size and finiteness before returning.
LoadedModel load_model(const std::filesystem::path& dir);

extern template void save_model<double>(const TrainedModel<double>&, const std::filesystem::path&);
extern template void save_model<float>(const TrainedModel<float>&, const std::filesystem::path&);

}  // namespace emocnn
