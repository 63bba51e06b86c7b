#include "modal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "modal/format.hpp"
#include "modal/rng.hpp"

namespace modal {

namespace {

const std::vector<std::string> kSyntheticKinds = {
    "circle", "double_circle", "biased_circle", "highfreq", "inverse_sin",
    "two_branch"};

bool is_synthetic(const std::string& kind) {
  return std::find(kSyntheticKinds.begin(), kSyntheticKinds.end(), kind) !=
         kSyntheticKinds.end();
}

Labeled generate_synthetic(const std::string& kind, int n, double noise_sd,
                           double gap, std::uint64_t seed) {
  if (kind == "circle") return gen_circle(n, noise_sd, seed);
  if (kind == "double_circle") return gen_double_circle(n, noise_sd, seed);
  if (kind == "biased_circle") return gen_biased_circle(n, seed, noise_sd);
  if (kind == "highfreq") return gen_highfreq(n, noise_sd, seed);
  if (kind == "two_branch") return gen_two_branch(n, gap, noise_sd, seed);
  if (kind == "inverse_sin") return {gen_inverse_sin(n, seed), ModeOracle{}};
  throw ConfigError("unknown dataset kind: " + kind);
}

struct BuiltModal {
  ModalityBuild build;
  TargetScaler scaler;
  bool unscale = false;
};

// Shared modality construction: deterministic in the dataset seed only, so
// every run splits the same constructed dataset.
BuiltModal build_modality(const Config& cfg) {
  const std::string kind = cfg.require_string("dataset.kind");
  const std::string flip = cfg.require_string("dataset.flip");
  const auto ds = static_cast<std::uint64_t>(cfg.get_long("dataset.seed", 0));

  Dataset raw;
  TargetScaler scaler;
  bool unscale = false;
  if (kind == "csv") {
    raw = load_csv(cfg.require_string("dataset.path"),
                   cfg.require_string("dataset.target"),
                   cfg.get_string_list("dataset.categorical", {}));
    const auto std_cols = cfg.get_string_list("dataset.standardize", {});
    if (!std_cols.empty()) standardize(raw, std_cols);
    if (cfg.get_bool("dataset.log_target", false)) log_transform_target(raw);
    if (cfg.get_bool("dataset.scale_target", false)) {
      scaler = scale_target(raw);
      unscale = true;
    }
  } else if (kind == "two_branch") {
    raw = gen_two_branch(static_cast<int>(cfg.get_long("dataset.n", 2000)),
                         cfg.get_double("dataset.gap", 2.0),
                         cfg.get_double("dataset.noise_sd", 0.05),
                         derive_seed(ds, 20))
              .data;
  } else {
    throw ConfigError("dataset.flip requires kind csv or two_branch");
  }

  NetConfig l2_net;
  l2_net.input_dim = raw.d;
  l2_net.hidden = cfg.get_int_list("build.hidden", {64, 64});
  l2_net.hidden_act = activation_from_string(cfg.get_string("build.activation", "tanh"));
  l2_net.output_act =
      activation_from_string(cfg.get_string("build.output_activation", "identity"));

  TrainConfig l2_cfg;
  l2_cfg.learning_rate = cfg.get_double("build.learning_rate", 0.001);
  l2_cfg.batch_size = static_cast<int>(cfg.get_long("build.batch_size", 128));
  l2_cfg.steps = cfg.get_long("build.steps", 20000);
  l2_cfg.eval_every = 0;
  l2_cfg.seed = derive_seed(ds, 21);

  return {modality_build(raw, flip, l2_net, l2_cfg), scaler, unscale};
}

}  // namespace

RunData build_run_data(const Config& cfg, std::uint64_t run_seed) {
  RunData data;
  const std::string kind = cfg.require_string("dataset.kind");
  const auto ds = static_cast<std::uint64_t>(cfg.get_long("dataset.seed", 0));

  if (cfg.has("dataset.flip")) {
    BuiltModal built = build_modality(cfg);
    const int n = static_cast<int>(built.build.eval_targets.size());
    const double test_fraction = cfg.get_double("dataset.test_fraction", 0.2);
    const SplitIndices split =
        split_indices(n, test_fraction, derive_seed(run_seed + ds, 12));

    // training rows: both copies (original and flipped) of each train instance
    std::vector<int> train_rows;
    train_rows.reserve(2 * split.train.size());
    for (int i : split.train) train_rows.push_back(i);
    for (int i : split.train) train_rows.push_back(n + i);
    data.train = subset(built.build.train, train_rows);
    data.test = subset(built.build.eval_features, split.test);
    data.test_target_sets.reserve(split.test.size());
    for (int i : split.test) {
      auto [a, b] = built.build.eval_targets[i];
      if (built.unscale) {
        a = built.scaler.unscale(a);
        b = built.scaler.unscale(b);
      }
      data.test_target_sets.push_back({a, b});
    }
    data.has_target_sets = true;
    data.scaler = built.scaler;
    data.unscale_errors = built.unscale;
    return data;
  }

  if (kind == "csv") {
    Dataset raw = load_csv(cfg.require_string("dataset.path"),
                           cfg.require_string("dataset.target"),
                           cfg.get_string_list("dataset.categorical", {}));
    if (cfg.get_bool("dataset.log_target", false)) log_transform_target(raw);
    const double test_fraction = cfg.get_double("dataset.test_fraction", 0.2);
    const SplitIndices split =
        split_indices(raw.n, test_fraction, derive_seed(run_seed + ds, 12));
    data.train = subset(raw, split.train);
    data.test = subset(raw, split.test);
    const auto std_cols = cfg.get_string_list("dataset.standardize", {});
    if (!std_cols.empty()) {
      const ColumnStats stats = standardize(data.train, std_cols);
      apply_standardize(data.test, stats);
    }
    if (cfg.get_bool("dataset.scale_target", false)) {
      data.scaler = scale_target(data.train);
      for (double& v : data.test.y) v = data.scaler.scale(v);
      data.unscale_errors = true;
    }
    return data;
  }

  if (!is_synthetic(kind)) throw ConfigError("unknown dataset kind: " + kind);

  const int n = static_cast<int>(cfg.get_long("dataset.n", 4000));
  const int test_n = static_cast<int>(cfg.get_long("dataset.test_n", 1000));
  const double noise_sd = cfg.get_double("dataset.noise_sd", 0.1);
  const double gap = cfg.get_double("dataset.gap", 2.0);

  Labeled train = generate_synthetic(kind, n, noise_sd, gap,
                                     derive_seed(ds + run_seed, 10));
  // noiseless targets for testing
  Labeled test = generate_synthetic(kind, test_n, 0.0, gap,
                                    derive_seed(ds + run_seed, 11));
  data.oracle = train.oracle;
  data.has_oracle = static_cast<bool>(train.oracle.modes);

  if (cfg.get_bool("dataset.tile_coding", false)) {
    const TileCoder coder;
    data.train = tile_encode_dataset(coder, train.data);
    data.test = tile_encode_dataset(coder, test.data);
  } else {
    data.train = std::move(train.data);
    data.test = std::move(test.data);
  }
  return data;
}

ModeGrid build_grid(const Config& cfg, const Dataset& train) {
  return grid_from_targets(train,
                           static_cast<int>(cfg.get_long("grid.count", 200)),
                           cfg.get_double("grid.pad_fraction", 0.0));
}

NetConfig build_net(const Config& cfg, int feature_dim, bool implicit_model) {
  NetConfig net;
  net.input_dim = implicit_model ? feature_dim + 1 : feature_dim;
  net.hidden = cfg.get_int_list("net.hidden", {16, 16});
  net.hidden_act = activation_from_string(cfg.get_string("net.activation", "tanh"));
  net.output_act = activation_from_string(cfg.get_string(
      "net.output_activation", implicit_model ? "tanh" : "identity"));
  net.output_dim = 1;
  return net;
}

TrainConfig build_train_config(const Config& cfg, std::uint64_t run_seed,
                               const std::vector<std::string>& metrics) {
  TrainConfig tc;
  tc.learning_rate = cfg.get_double("train.learning_rate", 0.001);
  tc.batch_size = static_cast<int>(cfg.get_long("train.batch_size", 128));
  tc.steps = cfg.get_long("train.steps", 20000);
  tc.eval_every = cfg.get_long("train.eval_every", 200);
  tc.eta = cfg.get_double("train.eta", 0.0);
  tc.seed = run_seed;
  tc.record_heldout =
      std::find(metrics.begin(), metrics.end(), "heldout_loss") != metrics.end();
  if (tc.learning_rate <= 0.0) throw ConfigError("train.learning_rate must be > 0");
  if (tc.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  return tc;
}

namespace {

std::vector<std::string> default_metrics() { return {"rmse_global_pick"}; }

// Wraps a predictor so reported modes live in the error-reporting space.
ModePredictor unscaled(const ModePredictor& inner, const TargetScaler& scaler) {
  return [inner, scaler](std::span<const double> x) {
    ModalPredictions p = inner(x);
    for (double& m : p.global.modes) m = scaler.unscale(m);
    for (double& m : p.local.modes) m = scaler.unscale(m);
    return p;
  };
}

std::vector<double> truth_for_row(const RunData& data, int i) {
  if (data.has_target_sets) return data.test_target_sets[i];
  const double key =
      data.test.oracle_key.empty() ? data.test.x[i] : data.test.oracle_key[i];
  return data.oracle.modes(key);
}

// Random-pick RMSE restricted to rows whose oracle key passes the filter.
double pick_rmse(const ModePredictor& pred, const RunData& data,
                 const std::function<bool(double)>& filter, Rng& rng) {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < data.test.n; ++i) {
    const double key = data.test.oracle_key.empty() ? data.test.x[i]
                                                    : data.test.oracle_key[i];
    if (filter && !filter(key)) continue;
    const ModalPredictions p = pred(data.test.row(i));
    const double pick = pick_random_mode(p.global, rng);
    sum += closest_mode_error(pick, truth_for_row(data, i), ErrorTerm::Squared);
    ++count;
  }
  if (count == 0) return 0.0;
  return std::sqrt(sum / count);
}

std::vector<std::pair<std::string, double>> compute_metrics(
    const ModePredictor& pred, const RunData& data,
    const std::vector<std::string>& wanted, std::uint64_t run_seed, long step) {
  Rng rng(derive_seed(derive_seed(run_seed, 2), static_cast<std::uint64_t>(step)));
  ModalEvalResult res;
  if (data.has_target_sets)
    res = evaluate_modal_targets(pred, data.test, data.test_target_sets, rng);
  else
    res = evaluate_modal(pred, data.test, data.oracle, rng);

  std::vector<std::pair<std::string, double>> out;
  for (const auto& rec : res.records(step, 0, wanted))
    out.emplace_back(rec.metric, rec.value);

  const bool want_high =
      std::find(wanted.begin(), wanted.end(), "rmse_high") != wanted.end();
  const bool want_low =
      std::find(wanted.begin(), wanted.end(), "rmse_low") != wanted.end();
  if (want_high || want_low) {
    Rng region_rng(
        derive_seed(derive_seed(run_seed, 3), static_cast<std::uint64_t>(step)));
    if (want_high)
      out.emplace_back("rmse_high", pick_rmse(pred, data,
                                              [](double k) { return k < 0.0; },
                                              region_rng));
    if (want_low)
      out.emplace_back("rmse_low", pick_rmse(pred, data,
                                             [](double k) { return k >= 0.0; },
                                             region_rng));
  }
  return out;
}

struct MethodSetup {
  std::string name;
  std::vector<std::string> metrics;
  double grid_eta = 0.0;
};

MethodSetup method_setup(const Config& cfg) {
  MethodSetup m;
  m.name = cfg.get_string("method.name", "implicit");
  const std::vector<std::string> known = {"implicit", "l2", "huber", "kde", "mdn"};
  if (std::find(known.begin(), known.end(), m.name) == known.end())
    throw ConfigError("unknown method: " + m.name);
  m.metrics = cfg.get_string_list("experiment.metrics", default_metrics());
  m.grid_eta = cfg.get_double("grid.eta", 0.0);
  return m;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void write_records_csv(std::ofstream& out, const std::vector<EvalRecord>& records) {
  for (const auto& r : records)
    out << r.step << "," << r.seed << "," << r.metric << ","
        << fmt_double(r.value) << "\n";
}

std::string model_path(const std::string& dir, const std::string& method,
                       std::uint64_t seed) {
  const std::string stem = method == "kde" ? "kde_seed" : "model_seed";
  return dir + "/" + stem + std::to_string(seed) + ".json";
}

}  // namespace

std::vector<EvalRecord> run_single(const Config& cfg, std::uint64_t run_seed,
                                   const std::string& output_dir) {
  const MethodSetup method = method_setup(cfg);
  RunData data = build_run_data(cfg, run_seed);
  const ModeGrid grid = build_grid(cfg, data.train);
  const long seed_l = static_cast<long>(run_seed);
  const std::vector<std::string> header = {
      "config=" + cfg.hash_hex(), "seed=" + std::to_string(run_seed)};

  auto finalize = [&](std::vector<EvalRecord> curve) {
    for (auto& r : curve) r.seed = seed_l;
    return curve;
  };

  if (method.name == "kde") {
    auto model = std::make_shared<KdeModel>(kde_fit(data.train));
    ModePredictor pred = density_predictor(
        [model](std::span<const double> x, double y) {
          return kde_joint(*model, x, y);
        },
        grid);
    if (data.unscale_errors) pred = unscaled(pred, data.scaler);
    std::vector<EvalRecord> curve;
    for (const auto& [name, value] :
         compute_metrics(pred, data, method.metrics, run_seed, 0))
      curve.push_back({0, name, value, seed_l});
    save_kde(model_path(output_dir, method.name, run_seed), *model, header);
    return curve;
  }

  const TrainConfig tc = build_train_config(cfg, run_seed, method.metrics);
  const bool implicit_model = method.name == "implicit";
  const NetConfig net = build_net(cfg, data.train.d, implicit_model);
  const double grid_eta = method.grid_eta;

  Evaluator evaluator = [&](long step, const MlpParams& params) {
    ModePredictor pred;
    if (implicit_model) {
      pred = implicit_predictor(params, grid, grid_eta);
    } else if (method.name == "mdn") {
      pred = density_predictor(
          [&params](std::span<const double> x, double y) {
            return mdn_density(params, x, y);
          },
          grid);
    } else {
      pred = point_predictor([&params](std::span<const double> x) {
        return forward_value(params, x);
      });
    }
    if (data.unscale_errors) pred = unscaled(pred, data.scaler);
    return compute_metrics(pred, data, method.metrics, run_seed, step);
  };

  TrainResult result;
  if (method.name == "implicit") {
    result = train(data.train, net, tc, evaluator);
  } else if (method.name == "l2") {
    result = l2_train(data.train, net, tc, evaluator);
  } else if (method.name == "huber") {
    result = huber_train(data.train, net, tc,
                         cfg.get_double("method.huber_delta", 1.0), evaluator);
  } else {  // mdn
    result = mdn_train(data.train, net.hidden,
                       static_cast<int>(cfg.get_long("method.mdn_components", 3)),
                       tc, evaluator);
  }
  save_params(model_path(output_dir, method.name, run_seed), result.params, header);
  return finalize(std::move(result.curve));
}

int cmd_generate(const Config& cfg) {
  const std::string dir = cfg.get_string("experiment.output_dir", "out");
  ensure_dir(dir);
  const auto seeds = cfg.get_long_list("experiment.seeds", {1});
  const auto run_seed = static_cast<std::uint64_t>(seeds.front());
  const RunData data = build_run_data(cfg, run_seed);
  const std::vector<std::string> header = {
      "config=" + cfg.hash_hex(), "seed=" + std::to_string(run_seed)};

  write_csv(data.train, dir + "/train.csv", header);
  write_csv(data.test, dir + "/test.csv", header);

  nlohmann::json manifest;
  manifest["generator"] = cfg.require_string("dataset.kind");
  manifest["seed"] = seeds.front();
  manifest["config"] = cfg.hash_hex();
  manifest["train_rows"] = data.train.n;
  manifest["test_rows"] = data.test.n;
  if (data.has_target_sets) {
    manifest["targets_per_instance"] = 2;
    // also emit the evaluation file with both targets per instance
    auto out = open_out(dir + "/eval_targets.csv");
    for (const auto& h : header) out << "# " << h << "\n";
    for (int j = 0; j < data.test.d; ++j) out << data.test.feature_names[j] << ",";
    out << "target1,target2\n";
    for (int i = 0; i < data.test.n; ++i) {
      for (double v : data.test.row(i)) out << fmt_double(v) << ",";
      out << fmt_double(data.test_target_sets[i][0]) << ","
          << fmt_double(data.test_target_sets[i][1]) << "\n";
    }
  }
  auto mout = open_out(dir + "/manifest.json");
  mout << "# config=" << cfg.hash_hex() << " seed=" << seeds.front() << "\n";
  mout << manifest.dump(2) << "\n";
  std::cout << "wrote " << dir << "/train.csv, test.csv, manifest.json\n";
  return 0;
}

int cmd_train(const Config& cfg) {
  const std::string dir = cfg.get_string("experiment.output_dir", "out");
  ensure_dir(dir);
  const auto seeds = cfg.get_long_list("experiment.seeds", {1});
  const auto run_seed = static_cast<std::uint64_t>(seeds.front());
  const auto curve = run_single(cfg, run_seed, dir);

  auto out = open_out(dir + "/curve_seed" + std::to_string(run_seed) + ".csv");
  out << "# config=" << cfg.hash_hex() << " seed=" << run_seed << "\n";
  out << "step,seed,metric,value\n";
  write_records_csv(out, curve);
  std::cout << "trained seed " << run_seed << ", " << curve.size()
            << " curve records\n";
  return 0;
}

int cmd_eval(const Config& cfg) {
  const std::string dir = cfg.get_string("experiment.output_dir", "out");
  ensure_dir(dir);
  const auto seeds = cfg.get_long_list("experiment.seeds", {1});
  const auto run_seed = static_cast<std::uint64_t>(seeds.front());
  const MethodSetup method = method_setup(cfg);
  RunData data = build_run_data(cfg, run_seed);
  const ModeGrid grid = build_grid(cfg, data.train);

  const std::string path = cfg.get_string(
      "eval.model", model_path(dir, method.name, run_seed));

  ModePredictor pred;
  std::shared_ptr<KdeModel> kde;
  std::shared_ptr<MlpParams> params;
  if (method.name == "kde") {
    kde = std::make_shared<KdeModel>(load_kde(path));
    pred = density_predictor(
        [kde](std::span<const double> x, double y) {
          return kde_joint(*kde, x, y);
        },
        grid);
  } else {
    params = std::make_shared<MlpParams>(load_params(path));
    if (method.name == "implicit")
      pred = implicit_predictor(*params, grid, method.grid_eta);
    else if (method.name == "mdn")
      pred = density_predictor(
          [params](std::span<const double> x, double y) {
            return mdn_density(*params, x, y);
          },
          grid);
    else
      pred = point_predictor([params](std::span<const double> x) {
        return forward_value(*params, x);
      });
  }
  if (data.unscale_errors) pred = unscaled(pred, data.scaler);

  // the eval command reports the full metric set unless narrowed
  std::vector<std::string> wanted = cfg.get_string_list(
      "experiment.metrics",
      {"rmse_global_pick", "mae_global_pick", "hausdorff_rmse", "hausdorff_mae",
       "worst_rmse", "worst_mae", "local_empty_count",
       "local_singleton_fraction"});
  std::vector<EvalRecord> records;
  for (const auto& [name, value] :
       compute_metrics(pred, data, wanted, run_seed, 0))
    records.push_back({0, name, value, static_cast<long>(run_seed)});

  auto out = open_out(dir + "/metrics.csv");
  out << "# config=" << cfg.hash_hex() << " seed=" << run_seed << "\n";
  out << "step,seed,metric,value\n";
  write_records_csv(out, records);
  for (const auto& r : records)
    std::cout << r.metric << " = " << fmt_double(r.value) << "\n";
  return 0;
}

int cmd_experiment(const Config& cfg) {
  const std::string dir = cfg.get_string("experiment.output_dir", "out");
  ensure_dir(dir);
  const auto seeds = cfg.get_long_list("experiment.seeds", {1, 2, 3, 4, 5});
  method_setup(cfg);  // validate the method early

  const bool parallel = cfg.get_bool("experiment.parallel", true);
  std::vector<std::vector<EvalRecord>> curves(seeds.size());
  if (parallel && seeds.size() > 1) {
    std::vector<std::future<std::vector<EvalRecord>>> futures;
    futures.reserve(seeds.size());
    for (long s : seeds)
      futures.push_back(std::async(std::launch::async, [&cfg, s, &dir] {
        return run_single(cfg, static_cast<std::uint64_t>(s), dir);
      }));
    for (size_t i = 0; i < futures.size(); ++i) curves[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < seeds.size(); ++i)
      curves[i] = run_single(cfg, static_cast<std::uint64_t>(seeds[i]), dir);
  }

  std::string seed_list;
  for (size_t i = 0; i < seeds.size(); ++i)
    seed_list += (i ? "," : "") + std::to_string(seeds[i]);

  auto out = open_out(dir + "/curve.csv");
  out << "# config=" << cfg.hash_hex() << " seeds=" << seed_list << "\n";
  out << "step,seed,metric,value\n";
  for (const auto& curve : curves) write_records_csv(out, curve);

  // mean / standard error per (step, metric) across seeds
  std::map<std::pair<long, std::string>, std::vector<double>> groups;
  for (const auto& curve : curves)
    for (const auto& r : curve) groups[{r.step, r.metric}].push_back(r.value);
  for (const auto& [key, values] : groups) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double stderr_ =
        values.size() > 1
            ? std::sqrt(var / (static_cast<double>(values.size()) - 1.0)) /
                  std::sqrt(static_cast<double>(values.size()))
            : 0.0;
    out << key.first << ",mean," << key.second << "," << fmt_double(mean) << "\n";
    out << key.first << ",stderr," << key.second << "," << fmt_double(stderr_)
        << "\n";
  }
  std::cout << "wrote " << dir << "/curve.csv (" << seeds.size() << " seeds)\n";
  return 0;
}

int cmd_predict(const Config& cfg) {
  const std::string dir = cfg.get_string("experiment.output_dir", "out");
  ensure_dir(dir);
  const auto seeds = cfg.get_long_list("experiment.seeds", {1});
  const auto run_seed = static_cast<std::uint64_t>(seeds.front());
  const MethodSetup method = method_setup(cfg);
  RunData data = build_run_data(cfg, run_seed);
  const ModeGrid grid = build_grid(cfg, data.train);

  const std::string path =
      cfg.get_string("predict.model", model_path(dir, method.name, run_seed));
  auto params = std::make_shared<MlpParams>();
  std::shared_ptr<KdeModel> kde;
  ModePredictor pred;
  if (method.name == "kde") {
    kde = std::make_shared<KdeModel>(load_kde(path));
    pred = density_predictor(
        [kde](std::span<const double> x, double y) {
          return kde_joint(*kde, x, y);
        },
        grid);
  } else {
    *params = load_params(path);
    if (method.name == "implicit")
      pred = implicit_predictor(*params, grid, method.grid_eta);
    else if (method.name == "mdn")
      pred = density_predictor(
          [params](std::span<const double> x, double y) {
            return mdn_density(*params, x, y);
          },
          grid);
    else
      pred = point_predictor([params](std::span<const double> x) {
        return forward_value(*params, x);
      });
  }
  if (data.unscale_errors) pred = unscaled(pred, data.scaler);

  // query points: scalar scan when configured, otherwise the test rows
  std::vector<std::vector<double>> queries;
  std::vector<double> query_keys;
  const bool tiled = cfg.get_bool("dataset.tile_coding", false);
  if (cfg.has("predict.x_min")) {
    const double lo = cfg.get_double("predict.x_min", -1.0);
    const double hi = cfg.get_double("predict.x_max", 1.0);
    const long count = cfg.get_long("predict.x_count", 201);
    if (count < 2) throw ConfigError("predict.x_count must be >= 2");
    const TileCoder coder;
    for (long i = 0; i < count; ++i) {
      const double xq = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
      query_keys.push_back(xq);
      queries.push_back(tiled ? tile_encode(coder, xq)
                              : std::vector<double>{xq});
    }
  } else {
    for (int i = 0; i < data.test.n; ++i) {
      const auto r = data.test.row(i);
      queries.emplace_back(r.begin(), r.end());
      query_keys.push_back(data.test.oracle_key.empty()
                               ? (data.test.d == 1 ? r[0] : 0.0)
                               : data.test.oracle_key[i]);
    }
  }

  // scalar scans report the scanned x; otherwise all feature columns
  const bool scalar_scan = cfg.has("predict.x_min") || data.test.d == 1;
  auto out = open_out(dir + "/predictions.csv");
  out << "# config=" << cfg.hash_hex() << " seed=" << run_seed << "\n";
  if (scalar_scan) {
    out << "x,mode,kind\n";
  } else {
    for (int j = 0; j < data.test.d; ++j) out << data.test.feature_names[j] << ",";
    out << "mode,kind\n";
  }
  auto write_row = [&](size_t q, double m, const char* kind) {
    if (scalar_scan) {
      out << fmt_double(query_keys[q]) << ",";
    } else {
      for (double v : queries[q]) out << fmt_double(v) << ",";
    }
    out << fmt_double(m) << "," << kind << "\n";
  };
  for (size_t q = 0; q < queries.size(); ++q) {
    const ModalPredictions p = pred(queries[q]);
    for (double m : p.global.modes) write_row(q, m, "global");
    for (double m : p.local.modes) write_row(q, m, "local");
  }
  std::cout << "wrote " << dir << "/predictions.csv (" << queries.size()
            << " query points)\n";
  return 0;
}

int run_cli(int argc, char** argv) {
  const std::string usage =
      "usage: modal <generate|train|eval|experiment|predict> <config> "
      "[--override key=value ...]\n";
  if (argc < 3) {
    std::cerr << usage;
    return 2;
  }
  const std::string command = argv[1];
  const std::string config_path = argv[2];
  try {
    Config cfg = Config::parse_file(config_path);
    for (int i = 3; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--override") {
        if (i + 1 >= argc) throw ConfigError("--override needs key=value");
        cfg.apply_override(argv[++i]);
      } else {
        throw ConfigError("unknown argument: " + arg);
      }
    }
    if (command == "generate") return cmd_generate(cfg);
    if (command == "train") return cmd_train(cfg);
    if (command == "eval") return cmd_eval(cfg);
    if (command == "experiment") return cmd_experiment(cfg);
    if (command == "predict") return cmd_predict(cfg);
    std::cerr << usage;
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace modal
