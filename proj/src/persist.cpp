#include "emocnn/persist.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace emocnn {

using nlohmann::json;

namespace {

template <typename Scalar>
constexpr const char* precision_tag() {
  return sizeof(Scalar) == 8 ? "f64" : "f32";
}

template <typename Scalar>
void append_le(std::string& blob, std::span<const Scalar> values) {
  const std::size_t start = blob.size();
  blob.resize(start + values.size_bytes());
  std::memcpy(blob.data() + start, values.data(), values.size_bytes());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = start; i < blob.size(); i += sizeof(Scalar)) {
      std::reverse(blob.begin() + static_cast<std::ptrdiff_t>(i),
                   blob.begin() + static_cast<std::ptrdiff_t>(i + sizeof(Scalar)));
    }
  }
}

template <typename Scalar>
void read_le(std::string_view bytes, std::span<Scalar> values) {
  std::memcpy(values.data(), bytes.data(), values.size_bytes());
  if constexpr (std::endian::native == std::endian::big) {
    auto* raw = reinterpret_cast<unsigned char*>(values.data());
    for (std::size_t i = 0; i < values.size_bytes(); i += sizeof(Scalar)) {
      std::reverse(raw + i, raw + i + sizeof(Scalar));
    }
  }
}

json config_to_json(const ModelConfig& c) {
  return {{"seq_len", c.seq_len},          {"vocab_size", c.vocab_size},
          {"embed_dim", c.embed_dim},      {"conv1_filters", c.conv1_filters},
          {"conv2_filters", c.conv2_filters}, {"kernel", c.kernel},
          {"pool", c.pool},                {"pool_stride", c.pool_stride},
          {"dense_hidden", c.dense_hidden}, {"classes", c.classes}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.seq_len = j.at("seq_len").get<Index>();
  c.vocab_size = j.at("vocab_size").get<Index>();
  c.embed_dim = j.at("embed_dim").get<Index>();
  c.conv1_filters = j.at("conv1_filters").get<Index>();
  c.conv2_filters = j.at("conv2_filters").get<Index>();
  c.kernel = j.at("kernel").get<Index>();
  c.pool = j.at("pool").get<Index>();
  c.pool_stride = j.at("pool_stride").get<Index>();
  c.dense_hidden = j.at("dense_hidden").get<Index>();
  c.classes = j.at("classes").get<Index>();
  return c;
}

json options_to_json(const PipelineOptions& o) {
  const auto& t = o.train;
  return {{"batch_size", t.batch_size},
          {"epochs", t.epochs},
          {"split_ratio", t.split_ratio},
          {"seed", t.seed},
          {"learning_rate", t.optimizer.learning_rate},
          {"rho", t.optimizer.rho},
          {"epsilon", t.optimizer.epsilon},
          {"mode", mode_name(t.mode)},
          {"max_len", o.max_len},
          {"vocab_cap", o.vocab_cap ? json(*o.vocab_cap) : json(nullptr)}};
}

PipelineOptions options_from_json(const json& j, Precision precision) {
  PipelineOptions o;
  o.train.batch_size = j.at("batch_size").get<std::size_t>();
  o.train.epochs = j.at("epochs").get<std::size_t>();
  o.train.split_ratio = j.at("split_ratio").get<double>();
  o.train.seed = j.at("seed").get<std::uint64_t>();
  o.train.optimizer.learning_rate = j.at("learning_rate").get<double>();
  o.train.optimizer.rho = j.at("rho").get<double>();
  o.train.optimizer.epsilon = j.at("epsilon").get<double>();
  o.train.mode = parse_mode(j.at("mode").get<std::string>());
  o.max_len = j.at("max_len").get<std::size_t>();
  if (!j.at("vocab_cap").is_null()) o.vocab_cap = j.at("vocab_cap").get<std::size_t>();
  o.precision = precision;
  return o;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelFormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFormatError("write failure on " + path.string());
}

template <typename Scalar>
TrainedModel<Scalar> load_typed(const json& manifest, std::string_view blob) {
  TrainedModel<Scalar> out;
  const ModelConfig config = config_from_json(manifest.at("model_config"));
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("invalid model config: ") + e.what());
  }

  out.vocab = Vocabulary(manifest.at("vocabulary").get<std::vector<std::string>>());
  if (static_cast<Index>(out.vocab.size()) != config.vocab_size) {
    throw ModelFormatError("vocabulary holds " + std::to_string(out.vocab.words().size()) +
                           " words but vocab_size is " + std::to_string(config.vocab_size));
  }
  for (const auto& entry : manifest.at("lexicon")) {
    out.lexicon.add(entry.at(0).get<std::string>(), entry.at(1).get<std::string>());
  }
  out.options = options_from_json(manifest.at("train_config"),
                                  sizeof(Scalar) == 8 ? Precision::f64 : Precision::f32);

  const auto shapes = parameter_shapes(config);
  const json& layout = manifest.at("layout");
  if (!layout.is_array() || layout.size() != kParamCount) {
    throw ModelFormatError("layout table must list " + std::to_string(kParamCount) + " parameters");
  }

  std::size_t expected_offset = 0;
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const json& e = layout[i];
    const auto name = e.at("name").get<std::string>();
    if (name != kParamNames[i]) {
      throw ModelFormatError("layout entry " + std::to_string(i) + " is " + name + ", expected " +
                             std::string(kParamNames[i]));
    }
    const auto shape = e.at("shape").get<Shape>();
    if (shape != shapes[i]) {
      throw ModelFormatError("layout shape for " + name + " is " + shape_string(shape) + ", expected " +
                             shape_string(shapes[i]));
    }
    const auto offset = e.at("offset").get<std::size_t>();
    const auto bytes = e.at("bytes").get<std::size_t>();
    const auto count = static_cast<std::size_t>(parameter_count(config, static_cast<ParamId>(i)));
    if (bytes != count * sizeof(Scalar)) {
      throw ModelFormatError("layout byte count for " + name + " does not match its shape");
    }
    if (offset < expected_offset) throw ModelFormatError("offset table overlap at " + name);
    if (offset > expected_offset) throw ModelFormatError("offset table gap before " + name);
    expected_offset = offset + bytes;
  }
  if (manifest.contains("blob_bytes") && manifest.at("blob_bytes").get<std::size_t>() != expected_offset) {
    throw ModelFormatError("offset table does not cover blob_bytes");
  }
  if (blob.size() != expected_offset) {
    throw ModelFormatError("blob size mismatch: weights.bin has " + std::to_string(blob.size()) +
                           " bytes, layout needs " + std::to_string(expected_offset));
  }

  out.model.config = config;
  out.model.params = ParamSet<Scalar>::zeros(config);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    auto& t = out.model.params.tensors[i];
    const auto offset = layout[i].at("offset").get<std::size_t>();
    read_le<Scalar>(blob.substr(offset, static_cast<std::size_t>(t.size()) * sizeof(Scalar)), t.values());
    if (!t.all_finite()) throw ModelFormatError("non-finite parameter in " + std::string(kParamNames[i]));
  }
  return out;
}

}  // namespace

template <typename Scalar>
void save_model(const TrainedModel<Scalar>& trained, const std::filesystem::path& dir) {
  const auto& params = trained.model.params;
  if (!params.all_finite()) throw ModelFormatError("refusing to save non-finite parameters");

  std::string blob;
  json layout = json::array();
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const auto& t = params.tensors[i];
    const std::size_t offset = blob.size();
    append_le<Scalar>(blob, t.values());
    layout.push_back({{"name", kParamNames[i]},
                      {"shape", t.shape()},
                      {"offset", offset},
                      {"bytes", blob.size() - offset}});
  }

  json lexicon = json::array();
  for (const auto& [emoji, phrase] : trained.lexicon.entries()) lexicon.push_back({emoji, phrase});

  const json manifest = {{"format_version", kFormatVersion},
                         {"precision", precision_tag<Scalar>()},
                         {"model_config", config_to_json(trained.model.config)},
                         {"train_config", options_to_json(trained.options)},
                         {"vocabulary", trained.vocab.words()},
                         {"lexicon", lexicon},
                         {"layout", layout},
                         {"blob_bytes", blob.size()}};

  std::filesystem::create_directories(dir);
  write_bytes(dir / kManifestFile, manifest.dump(2) + "\n");
  write_bytes(dir / kWeightsFile, blob);
}

template void save_model<double>(const TrainedModel<double>&, const std::filesystem::path&);
template void save_model<float>(const TrainedModel<float>&, const std::filesystem::path&);

LoadedModel load_model(const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_bytes(dir / kManifestFile));
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  const std::string blob = read_bytes(dir / kWeightsFile);

  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw ModelFormatError("unsupported format_version " + std::to_string(version));
    }
    const auto precision = manifest.at("precision").get<std::string>();
    if (precision == "f64") return load_typed<double>(manifest, blob);
    if (precision == "f32") return load_typed<float>(manifest, blob);
    throw ModelFormatError("unknown precision " + precision);
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace emocnn
