// hlrp: holder lead recommendation over holdings data.
//
//   hlrp synth      --out-dir DIR
//   hlrp featurize  --data F.csv... --out-dir DIR
//   hlrp train      --data F.csv... [--checkpoint model.hlrp] [--loss-curve loss.csv]
//   hlrp recommend  --checkpoint model.hlrp --data F.csv... --fund ID --top K [--new-only]
//   hlrp evaluate   --checkpoint model.hlrp --data T.csv T1.csv [--report report.json]
//   hlrp baseline   --data F.csv... --fund ID --top K [--new-only] [--no-diversity]
//   hlrp gradcheck  [--seed S] [--seeds N] [--aggregator KIND]
//
// Every subcommand accepts --config FILE (flat JSON, see --print-defaults);
// flags override file values and HLRP_SEED supplies the seed when neither does.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hlrp/baseline.hpp"
#include "hlrp/checkpoint.hpp"
#include "hlrp/config.hpp"
#include "hlrp/error.hpp"
#include "hlrp/evaluate.hpp"
#include "hlrp/gradcheck.hpp"
#include "hlrp/holdings.hpp"
#include "hlrp/synthetic.hpp"

namespace {

using namespace hlrp;

constexpr double kGradTolerance = 1e-4;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  std::vector<std::string> data;
  std::optional<std::string> out_dir, checkpoint, loss_curve, report, quarter, truth_quarter;

  std::optional<std::string> aggregator, mode;
  std::optional<std::size_t> epochs, embedding_dim, hidden_dim, mlp_hidden_dim, layers, fan_out;
  std::optional<double> learning_rate, negative_ratio, test_fraction;

  std::optional<std::size_t> holders, funds, styles;

  std::string fund;
  std::size_t top = 10;
  bool new_only = false;
  bool no_diversity = false;
  std::optional<std::size_t> num_segments;
  std::vector<std::size_t> ks;
  std::string which = "both";

  std::size_t seeds = 1;
  std::string grad_aggregator = "all";
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  bool config_has_seed = false;
  if (!f.config_path.empty()) {
    c = RunConfig::load(f.config_path);
    std::ifstream in(f.config_path);
    config_has_seed = nlohmann::json::parse(in, nullptr, false).contains("seed");
  }
  if (f.seed) {
    c.train.seed = *f.seed;
    c.synthetic.seed = *f.seed;
  } else if (!config_has_seed) {
    if (auto env = seed_from_env()) {
      c.train.seed = *env;
      c.synthetic.seed = *env;
    }
  }

  auto& t = c.train;
  if (f.aggregator) t.aggregator = parse_aggregator(*f.aggregator);
  if (f.mode) t.mode = parse_training_mode(*f.mode);
  if (f.epochs) t.epochs = *f.epochs;
  if (f.embedding_dim) t.embedding_dim = *f.embedding_dim;
  if (f.hidden_dim) t.hidden_dim = *f.hidden_dim;
  if (f.mlp_hidden_dim) t.mlp_hidden_dim = *f.mlp_hidden_dim;
  if (f.layers) t.layers = *f.layers;
  if (f.fan_out) t.fan_out = *f.fan_out;
  if (f.learning_rate) t.learning_rate = *f.learning_rate;
  if (f.negative_ratio) t.negative_ratio = *f.negative_ratio;
  if (f.test_fraction) t.test_fraction = *f.test_fraction;
  t.validate();

  if (f.holders) c.synthetic.num_holders = *f.holders;
  if (f.funds) c.synthetic.num_funds = *f.funds;
  if (f.styles) c.synthetic.num_styles = *f.styles;
  c.synthetic.validate();

  if (!f.data.empty()) c.data = f.data;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.checkpoint) c.checkpoint = *f.checkpoint;
  if (f.loss_curve) c.loss_curve = *f.loss_curve;
  if (f.report) c.report = *f.report;
  if (f.quarter) c.quarter = *f.quarter;
  if (f.truth_quarter) c.truth_quarter = *f.truth_quarter;
  if (f.num_segments) c.num_segments = *f.num_segments;
  if (!f.ks.empty()) c.ks = f.ks;
  return c;
}

HoldingsData load_data(const RunConfig& c) {
  if (c.data.empty()) throw ConfigError("no holdings data given (use --data)");
  HoldingsData data = load_holdings(c.data);
  if (data.quarters.empty()) throw ParseError("holdings data contains no positions");
  return data;
}

const QuarterSnapshot& pick_quarter(const HoldingsData& data, const std::string& label) {
  if (!label.empty()) return data.quarter(label);
  const QuarterSnapshot* best = &data.quarters.front();
  for (const auto& q : data.quarters)
    if (quarter_ordinal(q.quarter) < quarter_ordinal(best->quarter)) best = &q;
  return *best;
}

std::size_t fund_index(const HoldingsData& data, const std::string& id) {
  auto f = data.funds.find(id);
  if (!f) throw GraphError("unknown fund id '" + id + "'");
  return *f;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

int run_synth(const RunConfig& c) {
  const SyntheticData d = generate_synthetic(c.synthetic);
  const auto dir = std::filesystem::path(c.out_dir);
  const auto t = dir / ("holdings_" + d.quarter_t + ".csv");
  const auto t1 = dir / ("holdings_" + d.quarter_t1 + ".csv");
  write_file(t, d.csv_t());
  write_file(t1, d.csv_t1());
  std::cout << t.string() << "\n" << t1.string() << "\n";
  return 0;
}

std::string matrix_csv(const Matrix& m, const IdIndex& ids, const FeatureSchema& schema) {
  std::ostringstream os;
  os << "id";
  for (const auto& col : schema.columns) os << ',' << col.family << ':' << col.value;
  os << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << ids.id(i);
    for (double v : m.row(i)) os << ',' << fmt(v, 10);
    os << '\n';
  }
  return os.str();
}

int run_featurize(const RunConfig& c) {
  const HoldingsData data = load_data(c);
  const QuarterSnapshot& q = pick_quarter(data, c.quarter);
  const std::vector<QuarterSnapshot> fit_on = {q};
  const FeatureSchema schema = build_schema(fit_on);
  const NodeFeatures nf = fit_features(q, schema);
  const auto dir = std::filesystem::path(c.out_dir);
  write_file(dir / ("holder_features_" + q.quarter + ".csv"),
             matrix_csv(nf.holders, data.holders, schema));
  write_file(dir / ("fund_features_" + q.quarter + ".csv"),
             matrix_csv(nf.funds, data.funds, schema));
  std::cout << "quarter=" << q.quarter << " columns=" << schema.width()
            << " holders=" << nf.holders.rows() << " funds=" << nf.funds.rows() << "\n";
  return 0;
}

int run_train(const RunConfig& c) {
  const HoldingsData data = load_data(c);
  const QuarterSnapshot& q = pick_quarter(data, c.quarter);
  const std::vector<QuarterSnapshot> fit_on = {q};
  const NodeFeatures nf = fit_features(q, build_schema(fit_on));
  const TrainedModel model = train(snapshot_graph(q), nf, c.train);
  save_checkpoint(model, c.checkpoint);

  std::ostringstream curve;
  curve << "epoch,loss\n";
  for (std::size_t e = 0; e < model.loss_curve.size(); ++e)
    curve << e + 1 << ',' << fmt(model.loss_curve[e], 10) << '\n';
  write_file(c.loss_curve, curve.str());

  std::cout << "quarter=" << q.quarter << " aggregator=" << to_string(c.train.aggregator)
            << " mode=" << to_string(c.train.mode) << " epochs=" << model.loss_curve.size();
  if (!model.loss_curve.empty()) {
    std::cout << " first_loss=" << fmt(model.loss_curve.front())
              << " final_loss=" << fmt(model.loss_curve.back());
  }
  std::cout << " test_auc=" << fmt(model.test_auc) << "\n";
  return 0;
}

NodeFeatures query_features(const TrainedModel& model, const QuarterSnapshot& q) {
  const std::vector<QuarterSnapshot> snaps = {q};
  check_schema_compatible(model.schema, build_schema(snaps));
  return apply_features(q, model.schema, model.holder_scaler, model.fund_scaler);
}

int run_recommend(const RunConfig& c, const Flags& f) {
  const TrainedModel model = load_checkpoint(c.checkpoint);
  const HoldingsData data = load_data(c);
  const QuarterSnapshot& q =
      c.quarter.empty() && !model.fit_quarter.empty() ? data.quarter(model.fit_quarter)
                                                      : pick_quarter(data, c.quarter);
  const std::size_t fund = fund_index(data, f.fund);
  if (f.top == 0) throw ConfigError("--top must be at least 1");
  const NodeFeatures nf = query_features(model, q);
  const auto ranked = recommend_holders(model, snapshot_graph(q), nf.holders, nf.funds, fund,
                                        f.top, f.new_only);
  std::cout << "rank,holder_id,probability\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::cout << i + 1 << ',' << data.holders.id(ranked[i].holder) << ','
              << fmt(ranked[i].probability, 8) << '\n';
  }
  return 0;
}

int run_baseline(const RunConfig& c, const Flags& f) {
  const HoldingsData data = load_data(c);
  const QuarterSnapshot& q = pick_quarter(data, c.quarter);
  const std::size_t fund = fund_index(data, f.fund);
  if (f.top == 0) throw ConfigError("--top must be at least 1");
  const std::vector<QuarterSnapshot> fit_on = {q};
  const NodeFeatures nf = fit_features(q, build_schema(fit_on));
  const BipartiteGraph g = snapshot_graph(q);
  std::span<const std::size_t> exclude;
  if (f.new_only) exclude = g.fund_neighbors(fund);
  auto ranked = baseline_recommend(nf.funds.row(fund), nf.holders, nf.holders.rows(), exclude);
  if (f.no_diversity) {
    if (ranked.size() > f.top) ranked.resize(f.top);
  } else {
    ranked = diversity_constrain(ranked, segment_holders(q, c.num_segments), f.top);
  }
  std::cout << "rank,holder_id,similarity\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::cout << i + 1 << ',' << data.holders.id(ranked[i].holder) << ','
              << fmt(ranked[i].similarity, 8) << '\n';
  }
  return 0;
}

int run_evaluate(const RunConfig& c, const Flags& f) {
  const HoldingsData data = load_data(c);
  const bool use_model = f.which == "both" || f.which == "model";
  const bool use_baseline = f.which == "both" || f.which == "baseline";
  if (!use_model && !use_baseline) throw ConfigError("--recommender must be model, baseline or both");

  std::optional<TrainedModel> model;
  if (use_model) model = load_checkpoint(c.checkpoint);
  std::string label_t = c.quarter;
  if (label_t.empty()) label_t = model ? model->fit_quarter : pick_quarter(data, "").quarter;
  const QuarterSnapshot& q = data.quarter(label_t);
  const QuarterSnapshot& q1 =
      data.quarter(c.truth_quarter.empty() ? next_quarter(q.quarter) : c.truth_quarter);

  const GroundTruth truth_t = ground_truth(q), truth_t1 = ground_truth(q1);
  const BipartiteGraph g = snapshot_graph(q);
  std::vector<EvalReport> reports;
  if (model) {
    const NodeFeatures nf = query_features(*model, q);
    const LinkScorer scorer(*model, g, nf.holders, nf.funds);
    const std::string name = "graphsage_" + std::string(to_string(model->config.aggregator)) +
                             "_" + std::string(to_string(model->config.predictor));
    for (EvalVariant v : {EvalVariant::AllHolders, EvalVariant::NewlyAdded}) {
      reports.push_back(evaluate(model_recommender(scorer), name, model->fit_quarter, truth_t,
                                 truth_t1, c.ks, v));
      reports.back().test_auc = model->test_auc;
    }
  }
  if (use_baseline) {
    const std::vector<QuarterSnapshot> fit_on = {q};
    const NodeFeatures nf = fit_features(q, build_schema(fit_on));
    const AumSegmentation seg = segment_holders(q, c.num_segments);
    const auto rec = baseline_recommender(nf, g, f.no_diversity ? nullptr : &seg);
    const std::string name = f.no_diversity ? "cosine_baseline" : "cosine_baseline_diverse";
    for (EvalVariant v : {EvalVariant::AllHolders, EvalVariant::NewlyAdded})
      reports.push_back(evaluate(rec, name, q.quarter, truth_t, truth_t1, c.ks, v));
  }

  std::string json = "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::string one = reports[i].to_json();
    while (!one.empty() && one.back() == '\n') one.pop_back();
    json += one + (i + 1 < reports.size() ? ",\n" : "\n");
  }
  json += "]\n";
  write_file(c.report, json);
  for (const auto& r : reports) {
    std::cout << r.recommender << ' ' << to_string(r.variant);
    for (std::size_t i = 0; i < r.ks.size(); ++i)
      std::cout << " hits@" << r.ks[i] << '=' << fmt(r.mean_hits[i], 4);
    std::cout << " funds=" << r.funds_evaluated << '\n';
  }
  return 0;
}

int run_gradcheck(const RunConfig& c, const Flags& f) {
  std::vector<AggregatorKind> kinds;
  if (f.grad_aggregator == "all") {
    kinds = {AggregatorKind::Mean, AggregatorKind::Pool, AggregatorKind::Gcn, AggregatorKind::Lstm};
  } else {
    kinds = {parse_aggregator(f.grad_aggregator)};
  }
  if (f.seeds == 0) throw ConfigError("--seeds must be at least 1");
  bool ok = true;
  for (AggregatorKind kind : kinds) {
    for (std::size_t i = 0; i < f.seeds; ++i) {
      const std::uint64_t seed = c.train.seed + i;
      const GradCheckResult r = check_joint_gradients(kind, seed);
      for (const auto& [name, err] : r.max_relative_error) {
        const bool pass = err < kGradTolerance;
        ok = ok && pass;
        char line[256];
        std::snprintf(line, sizeof line, "%-5s seed=%llu %-18s max_rel_err=%.3e %s\n",
                      std::string(to_string(kind)).c_str(), static_cast<unsigned long long>(seed),
                      name.c_str(), err, pass ? "ok" : "FAIL");
        std::cout << line;
      }
    }
  }
  std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (tolerance "
            << kGradTolerance << ")\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holder lead recommendation with GraphSAGE link prediction"};
  app.require_subcommand(0, 1);
  Flags f;
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration as JSON");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Random seed (overrides config and HLRP_SEED)");
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--data", f.data, "Holdings CSV files");
    sub->add_option("--quarter", f.quarter, "Quarter label (YYYYQn)");
  };
  auto train_opts = [&](CLI::App* sub) {
    sub->add_option("--aggregator", f.aggregator, "mean, pool, gcn or lstm");
    sub->add_option("--mode", f.mode, "joint or separate");
    sub->add_option("--epochs", f.epochs);
    sub->add_option("--lr", f.learning_rate);
    sub->add_option("--embedding-dim", f.embedding_dim);
    sub->add_option("--hidden-dim", f.hidden_dim);
    sub->add_option("--mlp-hidden-dim", f.mlp_hidden_dim);
    sub->add_option("--layers", f.layers);
    sub->add_option("--fan-out", f.fan_out);
    sub->add_option("--negative-ratio", f.negative_ratio);
    sub->add_option("--test-fraction", f.test_fraction);
  };

  auto* synth = app.add_subcommand("synth", "Write a synthetic pair of quarterly holdings files");
  common(synth);
  synth->add_option("--out-dir", f.out_dir);
  synth->add_option("--holders", f.holders);
  synth->add_option("--funds", f.funds);
  synth->add_option("--styles", f.styles);

  auto* featurize = app.add_subcommand("featurize", "Write scaled holder and fund features");
  common(featurize);
  data_opts(featurize);
  featurize->add_option("--out-dir", f.out_dir);

  auto* train_cmd = app.add_subcommand("train", "Train encoder and link predictor");
  common(train_cmd);
  data_opts(train_cmd);
  train_opts(train_cmd);
  train_cmd->add_option("--checkpoint", f.checkpoint);
  train_cmd->add_option("--loss-curve", f.loss_curve);

  auto* recommend = app.add_subcommand("recommend", "Rank holders for a fund");
  common(recommend);
  data_opts(recommend);
  recommend->add_option("--checkpoint", f.checkpoint);
  recommend->add_option("--fund", f.fund, "Fund id")->required();
  recommend->add_option("--top", f.top, "Number of holders");
  recommend->add_flag("--new-only", f.new_only, "Skip holders already invested in the fund");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Hits@K against the next quarter");
  common(evaluate_cmd);
  data_opts(evaluate_cmd);
  evaluate_cmd->add_option("--truth-quarter", f.truth_quarter);
  evaluate_cmd->add_option("--checkpoint", f.checkpoint);
  evaluate_cmd->add_option("--report", f.report);
  evaluate_cmd->add_option("--recommender", f.which, "model, baseline or both");
  evaluate_cmd->add_option("--segments", f.num_segments);
  evaluate_cmd->add_option("--ks", f.ks)->delimiter(',');
  evaluate_cmd->add_flag("--no-diversity", f.no_diversity, "Baseline without AUM quotas");

  auto* baseline = app.add_subcommand("baseline", "Cosine-similarity holder ranking for a fund");
  common(baseline);
  data_opts(baseline);
  baseline->add_option("--fund", f.fund, "Fund id")->required();
  baseline->add_option("--top", f.top);
  baseline->add_option("--segments", f.num_segments);
  baseline->add_flag("--new-only", f.new_only);
  baseline->add_flag("--no-diversity", f.no_diversity);

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of joint gradients");
  common(gradcheck);
  gradcheck->add_option("--seeds", f.seeds, "Number of consecutive seeds");
  gradcheck->add_option("--aggregator", f.grad_aggregator, "mean, pool, gcn, lstm or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (print_defaults) {
      std::cout << RunConfig{}.to_json();
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return 0;
    }
    const RunConfig c = resolve(f);
    if (synth->parsed()) return run_synth(c);
    if (featurize->parsed()) return run_featurize(c);
    if (train_cmd->parsed()) return run_train(c);
    if (recommend->parsed()) return run_recommend(c, f);
    if (evaluate_cmd->parsed()) return run_evaluate(c, f);
    if (baseline->parsed()) return run_baseline(c, f);
    if (gradcheck->parsed()) return run_gradcheck(c, f);
  } catch (const hlrp::Error& e) {
    std::cerr << "hlrp: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hlrp: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
