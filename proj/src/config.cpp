#include "hlrp/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "hlrp/error.hpp"

namespace hlrp {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& into) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (known.count(key) == 0) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"learning_rate", "embedding_dim", "hidden_dim", "mlp_hidden_dim", "layers",
                  "aggregator", "epochs", "negative_ratio", "seed", "test_fraction", "fan_out",
                  "training_mode", "predictor", "data", "checkpoint", "report", "loss_curve",
                  "out_dir", "quarter", "truth_quarter", "num_segments", "ks", "synthetic"},
                 "");

  RunConfig c;
  auto& t = c.train;
  read(j, "learning_rate", t.learning_rate);
  read(j, "embedding_dim", t.embedding_dim);
  read(j, "hidden_dim", t.hidden_dim);
  read(j, "mlp_hidden_dim", t.mlp_hidden_dim);
  read(j, "layers", t.layers);
  read(j, "epochs", t.epochs);
  read(j, "negative_ratio", t.negative_ratio);
  read(j, "seed", t.seed);
  read(j, "test_fraction", t.test_fraction);
  read(j, "fan_out", t.fan_out);
  std::string name;
  if (j.contains("aggregator")) {
    read(j, "aggregator", name);
    t.aggregator = parse_aggregator(name);
  }
  if (j.contains("training_mode")) {
    read(j, "training_mode", name);
    t.mode = parse_training_mode(name);
  }
  if (j.contains("predictor")) {
    read(j, "predictor", name);
    t.predictor = parse_predictor(name);
  }
  read(j, "data", c.data);
  read(j, "checkpoint", c.checkpoint);
  read(j, "report", c.report);
  read(j, "loss_curve", c.loss_curve);
  read(j, "out_dir", c.out_dir);
  read(j, "quarter", c.quarter);
  read(j, "truth_quarter", c.truth_quarter);
  read(j, "num_segments", c.num_segments);
  read(j, "ks", c.ks);

  if (auto it = j.find("synthetic"); it != j.end()) {
    const json& s = *it;
    if (!s.is_object()) throw ConfigError("config key 'synthetic' must be an object");
    reject_unknown(s,
                   {"num_holders", "num_funds", "num_styles", "within_style_edge_prob",
                    "cross_style_edge_prob", "persistence", "new_holder_fraction",
                    "attribute_fidelity", "base_quarter", "seed"},
                   "synthetic.");
    auto& y = c.synthetic;
    read(s, "num_holders", y.num_holders);
    read(s, "num_funds", y.num_funds);
    read(s, "num_styles", y.num_styles);
    read(s, "within_style_edge_prob", y.within_style_edge_prob);
    read(s, "cross_style_edge_prob", y.cross_style_edge_prob);
    read(s, "persistence", y.persistence);
    read(s, "new_holder_fraction", y.new_holder_fraction);
    read(s, "attribute_fidelity", y.attribute_fidelity);
    read(s, "base_quarter", y.base_quarter);
    read(s, "seed", y.seed);
  }
  t.validate();
  c.synthetic.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string RunConfig::to_json() const {
  const auto& t = train;
  const auto& y = synthetic;
  nlohmann::ordered_json j;
  j["learning_rate"] = t.learning_rate;
  j["embedding_dim"] = t.embedding_dim;
  j["hidden_dim"] = t.hidden_dim;
  j["mlp_hidden_dim"] = t.mlp_hidden_dim;
  j["layers"] = t.layers;
  j["aggregator"] = to_string(t.aggregator);
  j["epochs"] = t.epochs;
  j["negative_ratio"] = t.negative_ratio;
  j["seed"] = t.seed;
  j["test_fraction"] = t.test_fraction;
  j["fan_out"] = t.fan_out;
  j["training_mode"] = to_string(t.mode);
  j["predictor"] = to_string(t.predictor);
  j["data"] = data;
  j["checkpoint"] = checkpoint;
  j["report"] = report;
  j["loss_curve"] = loss_curve;
  j["out_dir"] = out_dir;
  j["quarter"] = quarter;
  j["truth_quarter"] = truth_quarter;
  j["num_segments"] = num_segments;
  j["ks"] = ks;
  j["synthetic"] = {{"num_holders", y.num_holders},
                    {"num_funds", y.num_funds},
                    {"num_styles", y.num_styles},
                    {"within_style_edge_prob", y.within_style_edge_prob},
                    {"cross_style_edge_prob", y.cross_style_edge_prob},
                    {"persistence", y.persistence},
                    {"new_holder_fraction", y.new_holder_fraction},
                    {"attribute_fidelity", y.attribute_fidelity},
                    {"base_quarter", y.base_quarter},
                    {"seed", y.seed}};
  return j.dump(2) + "\n";
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("HLRP_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string_view text(raw);
  std::uint64_t seed = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("HLRP_SEED='" + std::string(text) + "' is not an unsigned integer");
  }
  return seed;
}

}  // namespace hlrp
