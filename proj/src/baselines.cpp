#include "modal/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace modal {

// Scaled so the quadratic region equals the squared loss exactly; still C1
// at |r| = delta (slope 2 delta from both sides).
double huber_loss(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? r * r : delta * (2.0 * a - delta);
}

double huber_deriv(double r, double delta) {
  if (std::abs(r) <= delta) return 2.0 * r;
  return r > 0.0 ? 2.0 * delta : -2.0 * delta;
}

namespace {

// Shared engine for value-channel regression objectives: runs the jet
// forward with all-constant inputs so the reverse pass can be reused.
struct RegressionObjective {
  std::function<double(double)> loss;        // of residual r = f - y
  std::function<double(double)> dloss;       // dL/dr
  ForwardTrace trace;
  std::vector<Jet2> input;

  double operator()(const MlpParams& params, const Dataset& data,
                    std::span<const int> idx, MlpGrad& grad) {
    grad.set_zero();
    const double inv = 1.0 / static_cast<double>(idx.size());
    double total = 0.0;
    input.resize(params.net.input_dim);
    for (int i : idx) {
      const auto row = data.row(i);
      if (static_cast<int>(row.size()) != params.net.input_dim)
        throw std::invalid_argument("regression: feature dimension mismatch");
      for (size_t j = 0; j < row.size(); ++j) input[j] = jet_const(row[j]);
      const Jet2 out = forward_jets(params, input, trace)[0];
      const double r = out.v - data.y[i];
      total += loss(r);
      const JetUpstream up{dloss(r) * inv, 0.0, 0.0};
      backward(params, trace, std::span<const JetUpstream>(&up, 1), grad);
    }
    return total * inv;
  }
};

}  // namespace

TrainResult l2_train(const Dataset& data, const NetConfig& net,
                     const TrainConfig& config, const Evaluator& evaluator) {
  auto obj = std::make_shared<RegressionObjective>();
  obj->loss = [](double r) { return r * r; };
  obj->dloss = [](double r) { return 2.0 * r; };
  return train_custom(data, net, config,
                      [obj](const MlpParams& p, const Dataset& d,
                            std::span<const int> idx, MlpGrad& g) {
                        return (*obj)(p, d, idx, g);
                      },
                      evaluator);
}

TrainResult huber_train(const Dataset& data, const NetConfig& net,
                        const TrainConfig& config, double delta,
                        const Evaluator& evaluator) {
  if (delta <= 0.0) throw std::invalid_argument("huber_train: delta <= 0");
  auto obj = std::make_shared<RegressionObjective>();
  obj->loss = [delta](double r) { return huber_loss(r, delta); };
  obj->dloss = [delta](double r) { return huber_deriv(r, delta); };
  return train_custom(data, net, config,
                      [obj](const MlpParams& p, const Dataset& d,
                            std::span<const int> idx, MlpGrad& g) {
                        return (*obj)(p, d, idx, g);
                      },
                      evaluator);
}

// ---- KDE ----

namespace {

bool is_binary_column(const Dataset& data, int c) {
  for (int i = 0; i < data.n; ++i) {
    const double v = data.x[static_cast<size_t>(i) * data.d + c];
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

double column_sd(std::span<const double> flat, int stride, int c, int n) {
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += flat[static_cast<size_t>(i) * stride + c];
  mean /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = flat[static_cast<size_t>(i) * stride + c] - mean;
    var += v * v;
  }
  return std::sqrt(var / n);
}

}  // namespace

KdeModel kde_fit(const Dataset& data, const KdeConfig& config) {
  if (data.n == 0) throw std::invalid_argument("kde_fit: empty dataset");
  KdeModel model;
  model.n = data.n;
  model.d = data.d;
  model.points.reserve(static_cast<size_t>(data.n) * (data.d + 1));
  for (int i = 0; i < data.n; ++i) {
    const auto r = data.row(i);
    model.points.insert(model.points.end(), r.begin(), r.end());
    model.points.push_back(data.y[i]);
  }
  model.kind.resize(data.d + 1, KernelKind::Gaussian);
  int n_cat = 0;
  for (int c = 0; c < data.d; ++c) {
    if (is_binary_column(data, c)) {
      model.kind[c] = KernelKind::Categorical;
      ++n_cat;
    }
  }
  model.cat_lambda = config.categorical_lambda > 0.0
                         ? config.categorical_lambda
                         : (n_cat > 0 ? std::pow(0.5, 1.0 / n_cat) : 1.0);

  // normal reference rule per continuous dimension
  const double factor = config.bandwidth_scale * std::pow(data.n, -0.2);
  model.bandwidth.resize(data.d + 1, 0.0);
  for (int c = 0; c <= data.d; ++c) {
    if (model.kind[c] == KernelKind::Categorical) continue;
    const double sd = c < data.d ? column_sd(data.x, data.d, c, data.n)
                                 : column_sd(data.y, 1, 0, data.n);
    model.bandwidth[c] = factor * (sd > 0.0 ? sd : 1.0);
  }
  return model;
}

double kde_joint(const KdeModel& model, std::span<const double> x, double y) {
  if (model.n == 0) throw std::invalid_argument("kde_joint: empty model");
  if (static_cast<int>(x.size()) != model.d)
    throw std::invalid_argument("kde_joint: dimension mismatch");
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (int i = 0; i < model.n; ++i) {
    const double* p = model.points.data() + static_cast<size_t>(i) * (model.d + 1);
    double k = 1.0;
    for (int c = 0; c <= model.d; ++c) {
      const double q = c < model.d ? x[c] : y;
      if (model.kind[c] == KernelKind::Categorical) {
        k *= q == p[c] ? model.cat_lambda : 1.0 - model.cat_lambda;
      } else {
        const double h = model.bandwidth[c];
        const double t = (q - p[c]) / h;
        k *= inv_sqrt2pi / h * std::exp(-0.5 * t * t);
      }
      if (k == 0.0) break;
    }
    total += k;
  }
  return total / model.n;
}

double kde_mode(const KdeModel& model, std::span<const double> x,
                const ModeGrid& grid, bool* degenerate) {
  double best = -1.0;
  double arg = grid.values[0];
  for (double yv : grid.values) {
    const double p = kde_joint(model, x, yv);
    if (p > best) {
      best = p;
      arg = yv;
    }
  }
  if (degenerate) *degenerate = best <= 0.0;
  if (best <= 0.0) return 0.5 * (grid.y_min + grid.y_max);
  return arg;
}

void save_kde(const std::string& path, const KdeModel& model,
              const std::vector<std::string>& comment_lines) {
  nlohmann::json j;
  j["n"] = model.n;
  j["d"] = model.d;
  j["points"] = model.points;
  j["bandwidth"] = model.bandwidth;
  j["cat_lambda"] = model.cat_lambda;
  std::vector<int> kinds;
  for (auto k : model.kind) kinds.push_back(k == KernelKind::Categorical ? 1 : 0);
  j["kind"] = kinds;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << j.dump() << "\n";
}

KdeModel load_kde(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line, body;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body += line;
  }
  const auto j = nlohmann::json::parse(body);
  KdeModel model;
  model.n = j.at("n").get<int>();
  model.d = j.at("d").get<int>();
  model.points = j.at("points").get<std::vector<double>>();
  model.bandwidth = j.at("bandwidth").get<std::vector<double>>();
  model.cat_lambda = j.at("cat_lambda").get<double>();
  for (int k : j.at("kind").get<std::vector<int>>())
    model.kind.push_back(k ? KernelKind::Categorical : KernelKind::Gaussian);
  return model;
}

// ---- MDN ----

namespace {

constexpr double kLogSdClamp = 7.0;

struct MdnRaw {
  std::vector<double> logit, mean, logsd;  // each K
};

MdnRaw split_outputs(std::span<const double> out, int k) {
  MdnRaw raw;
  raw.logit.assign(out.begin(), out.begin() + k);
  raw.mean.assign(out.begin() + k, out.begin() + 2 * k);
  raw.logsd.assign(out.begin() + 2 * k, out.begin() + 3 * k);
  for (double& s : raw.logsd) s = std::clamp(s, -kLogSdClamp, kLogSdClamp);
  return raw;
}

std::vector<double> softmax(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> w(z.size());
  double sum = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    w[i] = std::exp(z[i] - zmax);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

double log_sum_exp(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - zmax);
  return zmax + std::log(sum);
}

// per-component log joint: log w_k + log N(y; mu_k, sd_k)
std::vector<double> component_logs(const MdnRaw& raw, double y) {
  const auto w = softmax(raw.logit);
  std::vector<double> lp(w.size());
  for (size_t k = 0; k < w.size(); ++k) {
    const double sd = std::exp(raw.logsd[k]);
    const double z = (y - raw.mean[k]) / sd;
    lp[k] = std::log(w[k]) - 0.5 * std::log(2.0 * std::numbers::pi) -
            raw.logsd[k] - 0.5 * z * z;
  }
  return lp;
}

int mdn_components(const MlpParams& params) {
  if (params.net.output_dim % 3 != 0)
    throw std::invalid_argument("mdn: output_dim is not 3K");
  return params.net.output_dim / 3;
}

}  // namespace

NetConfig mdn_net_config(int feature_dim, const std::vector<int>& hidden, int k) {
  if (k < 1) throw std::invalid_argument("mdn_net_config: k < 1");
  NetConfig net;
  net.input_dim = feature_dim;
  net.hidden = hidden;
  net.hidden_act = Activation::Tanh;
  net.output_act = Activation::Identity;
  net.output_dim = 3 * k;
  return net;
}

MixtureParams mdn_mixture(const MlpParams& params, std::span<const double> x) {
  const int k = mdn_components(params);
  const auto out = forward_values(params, x);
  const MdnRaw raw = split_outputs(out, k);
  MixtureParams mix;
  mix.weight = softmax(raw.logit);
  mix.mean = raw.mean;
  mix.sd.resize(k);
  for (int i = 0; i < k; ++i) mix.sd[i] = std::exp(raw.logsd[i]);
  return mix;
}

double mdn_nll(const MlpParams& params, std::span<const double> x, double y) {
  const int k = mdn_components(params);
  const auto out = forward_values(params, x);
  const MdnRaw raw = split_outputs(out, k);
  return -log_sum_exp(component_logs(raw, y));
}

double mdn_density(const MlpParams& params, std::span<const double> x, double y) {
  return std::exp(-mdn_nll(params, x, y));
}

double mdn_mode(const MlpParams& params, std::span<const double> x,
                const ModeGrid& grid) {
  double best = -std::numeric_limits<double>::infinity();
  double arg = grid.values[0];
  for (double yv : grid.values) {
    const double p = -mdn_nll(params, x, yv);
    if (p > best) {
      best = p;
      arg = yv;
    }
  }
  return arg;
}

double mdn_nll_and_grad(const MlpParams& params, std::span<const double> x,
                        double y, MlpGrad& grad, double grad_scale) {
  const int k = mdn_components(params);
  std::vector<Jet2> input(params.net.input_dim);
  if (static_cast<int>(x.size()) != params.net.input_dim)
    throw std::invalid_argument("mdn: feature dimension mismatch");
  for (size_t j = 0; j < x.size(); ++j) input[j] = jet_const(x[j]);
  ForwardTrace trace;
  const auto out = forward_jets(params, input, trace);

  std::vector<double> raw_out(out.size());
  for (size_t j = 0; j < out.size(); ++j) raw_out[j] = out[j].v;
  const MdnRaw raw = split_outputs(raw_out, k);
  const auto w = softmax(raw.logit);
  const auto lp = component_logs(raw, y);
  const double lse = log_sum_exp(lp);

  // responsibilities give closed-form NLL gradients per raw output
  std::vector<JetUpstream> upstream(params.net.output_dim);
  for (int c = 0; c < k; ++c) {
    const double resp = std::exp(lp[c] - lse);
    const double sd = std::exp(raw.logsd[c]);
    const double z = (y - raw.mean[c]) / sd;
    upstream[c] = {(w[c] - resp) * grad_scale, 0.0, 0.0};
    upstream[k + c] = {-resp * z / sd * grad_scale, 0.0, 0.0};
    // the clamp zeroes the gradient outside its active range
    const double raw_logsd = raw_out[2 * k + c];
    const double g_logsd =
        std::abs(raw_logsd) < kLogSdClamp ? resp * (1.0 - z * z) : 0.0;
    upstream[2 * k + c] = {g_logsd * grad_scale, 0.0, 0.0};
  }
  backward(params, trace, upstream, grad);
  return -lse;
}

TrainResult mdn_train(const Dataset& data, const std::vector<int>& hidden,
                      int k, const TrainConfig& config,
                      const Evaluator& evaluator) {
  const NetConfig net = mdn_net_config(data.d, hidden, k);

  auto objective = [](const MlpParams& params, const Dataset& d,
                      std::span<const int> idx, MlpGrad& grad) {
    grad.set_zero();
    const double inv = 1.0 / static_cast<double>(idx.size());
    double total = 0.0;
    for (int i : idx)
      total += mdn_nll_and_grad(params, d.row(i), d.y[i], grad, inv);
    const double mean_nll = total * inv;
    if (!std::isfinite(mean_nll))
      throw TrainingDiverged("mdn: non-finite negative log-likelihood");
    return mean_nll;
  };

  return train_custom(data, net, config, objective, evaluator);
}

}  // namespace modal
