#include "hlrp/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "hlrp/error.hpp"

namespace hlrp {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string_view take(std::uint64_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

json config_to_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"embedding_dim", c.embedding_dim},
              {"hidden_dim", c.hidden_dim},
              {"mlp_hidden_dim", c.mlp_hidden_dim},
              {"layers", c.layers},
              {"aggregator", to_string(c.aggregator)},
              {"epochs", c.epochs},
              {"negative_ratio", c.negative_ratio},
              {"seed", c.seed},
              {"test_fraction", c.test_fraction},
              {"fan_out", c.fan_out},
              {"training_mode", to_string(c.mode)},
              {"predictor", to_string(c.predictor)}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.mlp_hidden_dim = j.at("mlp_hidden_dim").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.aggregator = parse_aggregator(j.at("aggregator").get<std::string>());
  c.epochs = j.at("epochs").get<std::size_t>();
  c.negative_ratio = j.at("negative_ratio").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.test_fraction = j.at("test_fraction").get<double>();
  c.fan_out = j.at("fan_out").get<std::size_t>();
  c.mode = parse_training_mode(j.at("training_mode").get<std::string>());
  c.predictor = parse_predictor(j.at("predictor").get<std::string>());
  return c;
}

json scaler_to_json(const MinMaxScaler& s) { return json{{"min", s.min}, {"max", s.max}}; }

MinMaxScaler scaler_from_json(const json& j) {
  return MinMaxScaler{j.at("min").get<std::vector<double>>(),
                      j.at("max").get<std::vector<double>>()};
}

// Parameters a model with this configuration must carry, with their shapes.
ParamStore expected_params(const TrainedModel& model) {
  ParamStore store;
  model.encoder().register_params(store, 0);
  if (model.config.predictor == PredictorKind::Mlp) {
    MlpPredictor(model.sage.output_dim, model.config.mlp_hidden_dim).register_params(store, 0);
  }
  return store;
}

}  // namespace

std::string serialize_checkpoint(const TrainedModel& model) {
  json meta;
  json columns = json::array();
  for (const auto& c : model.schema.columns) columns.push_back({c.family, c.value});
  meta["schema"] = columns;
  meta["holder_scaler"] = scaler_to_json(model.holder_scaler);
  meta["fund_scaler"] = scaler_to_json(model.fund_scaler);
  meta["config"] = config_to_json(model.config);
  meta["input_dim"] = model.sage.input_dim;
  meta["fit_quarter"] = model.fit_quarter;
  meta["loss_curve"] = model.loss_curve;
  meta["test_auc"] = model.test_auc;
  const std::string meta_text = meta.dump();

  std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, meta_text.size());
  out += meta_text;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.size()));
  for (const auto& [name, p] : model.params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint32_t>(out, 2);
    put<std::uint64_t>(out, p.value.rows());
    put<std::uint64_t>(out, p.value.cols());
    for (double v : p.value.data()) put<double>(out, v);
  }
  return out;
}

TrainedModel deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  const auto magic = in.take(4, "magic bytes");
  if (magic != std::string_view(kCheckpointMagic, 4)) {
    throw CheckpointError("not a checkpoint: bad magic bytes");
  }
  const auto version = in.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " is not supported (expected " + std::to_string(kCheckpointVersion) +
                          ")");
  }
  const auto meta_len = in.get<std::uint64_t>("metadata length");
  const auto meta_text = in.take(meta_len, "metadata");

  TrainedModel model;
  try {
    const json meta = json::parse(meta_text);
    for (const auto& c : meta.at("schema")) {
      model.schema.columns.push_back({c.at(0).get<std::string>(), c.at(1).get<std::string>()});
    }
    model.holder_scaler = scaler_from_json(meta.at("holder_scaler"));
    model.fund_scaler = scaler_from_json(meta.at("fund_scaler"));
    model.config = config_from_json(meta.at("config"));
    model.fit_quarter = meta.at("fit_quarter").get<std::string>();
    model.loss_curve = meta.at("loss_curve").get<std::vector<double>>();
    model.test_auc = meta.at("test_auc").get<double>();
    model.sage = SageConfig{model.config.aggregator, meta.at("input_dim").get<std::size_t>(),
                            model.config.hidden_dim,  model.config.embedding_dim,
                            model.config.layers,      model.config.fan_out};
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint metadata: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("malformed checkpoint metadata: ") + e.what());
  }
  if (model.sage.input_dim != model.schema.width() ||
      model.holder_scaler.min.size() != model.schema.width() ||
      model.fund_scaler.min.size() != model.schema.width()) {
    throw CheckpointError("checkpoint metadata is inconsistent with its schema width");
  }

  const auto count = in.get<std::uint32_t>("parameter count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = in.get<std::uint32_t>("parameter name length");
    const std::string name(in.take(name_len, "parameter name"));
    const auto rank = in.get<std::uint32_t>("parameter rank");
    if (rank != 2) {
      throw CheckpointError("parameter '" + name + "' has rank " + std::to_string(rank) +
                            ", expected 2");
    }
    const auto rows = in.get<std::uint64_t>("parameter dims");
    const auto cols = in.get<std::uint64_t>("parameter dims");
    if (cols != 0 && rows > (bytes.size() / sizeof(double)) / cols) {
      throw CheckpointError("checkpoint truncated in parameter '" + name + "'");
    }
    Matrix m(rows, cols);
    for (double& v : m.data()) v = in.get<double>("parameter values");
    if (model.params.contains(name)) {
      throw CheckpointError("duplicate parameter '" + name + "' in checkpoint");
    }
    model.params.add(name, std::move(m));
  }
  if (!in.done()) throw CheckpointError("trailing bytes after checkpoint parameters");

  const ParamStore expected = expected_params(model);
  if (expected.size() != model.params.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(model.params.size()) +
                          " parameters, configuration requires " +
                          std::to_string(expected.size()));
  }
  for (const auto& [name, p] : expected) {
    if (!model.params.contains(name)) {
      throw CheckpointError("checkpoint is missing parameter '" + name + "'");
    }
    const Matrix& got = model.params.at(name).value;
    if (!got.same_shape(p.value)) {
      throw CheckpointError("parameter '" + name + "' has shape " + got.shape_string() +
                            ", configuration requires " + p.value.shape_string());
    }
  }
  return model;
}

void save_checkpoint(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  const std::string bytes = serialize_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

TrainedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

void check_schema_compatible(const FeatureSchema& checkpoint_schema,
                             const FeatureSchema& data_schema) {
  for (const auto& c : data_schema.columns) {
    if (!checkpoint_schema.contains(c)) {
      throw CheckpointError("schema mismatch: data column " + c.family + "='" + c.value +
                            "' is not in the checkpoint's " +
                            std::to_string(checkpoint_schema.width()) + "-column schema");
    }
  }
}

}  // namespace hlrp
