#include "modal/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "modal/rng.hpp"

namespace modal {

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
  }
  return "?";
}

std::vector<int> NetConfig::layer_sizes() const {
  std::vector<int> sizes;
  sizes.push_back(input_dim);
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(output_dim);
  return sizes;
}

size_t MlpParams::count() const {
  size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

void MlpGrad::set_zero() {
  for (auto& l : layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
}

void MlpGrad::scale(double c) {
  for (auto& l : layers) {
    for (double& x : l.w) x *= c;
    for (double& x : l.b) x *= c;
  }
}

void MlpGrad::add_scaled(const MlpGrad& other, double c) {
  for (size_t li = 0; li < layers.size(); ++li) {
    for (size_t i = 0; i < layers[li].w.size(); ++i)
      layers[li].w[i] += c * other.layers[li].w[i];
    for (size_t i = 0; i < layers[li].b.size(); ++i)
      layers[li].b[i] += c * other.layers[li].b[i];
  }
}

MlpGrad make_grad(const MlpParams& params) {
  MlpGrad g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    DenseLayer z;
    z.in = l.in;
    z.out = l.out;
    z.w.assign(l.w.size(), 0.0);
    z.b.assign(l.b.size(), 0.0);
    g.layers.push_back(std::move(z));
  }
  return g;
}

MlpParams init_xavier(const NetConfig& config, std::uint64_t seed) {
  if (config.hidden.empty()) throw std::invalid_argument("hidden sizes empty");
  MlpParams p;
  p.net = config;
  Rng rng(seed);
  const auto sizes = config.layer_sizes();
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer;
    layer.in = sizes[l];
    layer.out = sizes[l + 1];
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    layer.w.resize(static_cast<size_t>(layer.in) * layer.out);
    for (double& w : layer.w) w = rng.uniform(-bound, bound);
    layer.b.assign(layer.out, 0.0);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

namespace {

inline Jet2 apply_act(Activation a, const Jet2& z) {
  switch (a) {
    case Activation::Tanh: return tanh(z);
    case Activation::Relu: return relu(z);
    case Activation::Identity: return z;
  }
  return z;
}

inline double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Identity: return z;
  }
  return z;
}

}  // namespace

std::vector<Jet2> forward_jets(const MlpParams& params,
                               std::span<const Jet2> input,
                               ForwardTrace& trace) {
  if (static_cast<int>(input.size()) != params.net.input_dim)
    throw std::invalid_argument("forward_jets: input dimension mismatch");
  const size_t L = params.layers.size();
  trace.act.resize(L + 1);
  trace.pre.resize(L);
  trace.act[0].assign(input.begin(), input.end());
  for (size_t l = 0; l < L; ++l) {
    const DenseLayer& layer = params.layers[l];
    const std::vector<Jet2>& a = trace.act[l];
    std::vector<Jet2>& z = trace.pre[l];
    std::vector<Jet2>& out = trace.act[l + 1];
    z.resize(layer.out);
    out.resize(layer.out);
    const Activation act =
        (l + 1 == L) ? params.net.output_act : params.net.hidden_act;
    for (int i = 0; i < layer.out; ++i) {
      Jet2 acc = jet_const(layer.b[i]);
      const double* wrow = layer.w.data() + static_cast<size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j) {
        acc.v += wrow[j] * a[j].v;
        acc.d1 += wrow[j] * a[j].d1;
        acc.d2 += wrow[j] * a[j].d2;
      }
      z[i] = acc;
      out[i] = apply_act(act, acc);
    }
  }
  return trace.act[L];
}

Jet2 forward_jet(const MlpParams& params, std::span<const double> x, double y,
                 ForwardTrace& trace) {
  if (params.net.output_dim != 1)
    throw std::invalid_argument("forward_jet: implicit network must have one output");
  if (static_cast<int>(x.size()) != params.net.input_dim - 1)
    throw std::invalid_argument("forward_jet: feature dimension mismatch");
  std::vector<Jet2> input(params.net.input_dim);
  for (size_t j = 0; j < x.size(); ++j) input[j] = jet_const(x[j]);
  input.back() = jet_seed(y);
  return forward_jets(params, input, trace)[0];
}

Jet2 forward_jet(const MlpParams& params, std::span<const double> x, double y) {
  ForwardTrace trace;
  return forward_jet(params, x, y, trace);
}

std::vector<double> forward_values(const MlpParams& params,
                                   std::span<const double> input) {
  if (static_cast<int>(input.size()) != params.net.input_dim)
    throw std::invalid_argument("forward_values: input dimension mismatch");
  const size_t L = params.layers.size();
  std::vector<double> a(input.begin(), input.end());
  std::vector<double> z;
  for (size_t l = 0; l < L; ++l) {
    const DenseLayer& layer = params.layers[l];
    const Activation act =
        (l + 1 == L) ? params.net.output_act : params.net.hidden_act;
    z.assign(layer.out, 0.0);
    for (int i = 0; i < layer.out; ++i) {
      double acc = layer.b[i];
      const double* wrow = layer.w.data() + static_cast<size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j) acc += wrow[j] * a[j];
      z[i] = apply_act(act, acc);
    }
    a = z;
  }
  return a;
}

double forward_value(const MlpParams& params, std::span<const double> input) {
  if (params.net.output_dim != 1)
    throw std::invalid_argument("forward_value: network must have one output");
  return forward_values(params, input)[0];
}

namespace {

// Adjoint triple for one jet scalar (channels v, d1, d2).
struct Adj {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Reverse through u = act(z) given the pre-activation jet z.
// For tanh, with t = tanh(z.v) and s = 1 - t^2:
//   u.v  = t
//   u.d1 = s z.d1
//   u.d2 = s z.d2 - 2 t s z.d1^2
// so the partials w.r.t. (z.v, z.d1, z.d2) follow by differentiating each.
inline Adj reverse_act(Activation act, const Jet2& z, const Adj& gu) {
  switch (act) {
    case Activation::Identity:
      return gu;
    case Activation::Relu: {
      const double step = z.v > 0.0 ? 1.0 : 0.0;
      return {gu.v * step, gu.d1 * step, gu.d2 * step};
    }
    case Activation::Tanh: {
      const double t = std::tanh(z.v);
      const double s = 1.0 - t * t;
      Adj gz;
      gz.v = gu.v * s + gu.d1 * (-2.0 * t * s * z.d1) +
             gu.d2 * (-2.0 * t * s * z.d2 - 2.0 * s * (1.0 - 3.0 * t * t) * z.d1 * z.d1);
      gz.d1 = gu.d1 * s + gu.d2 * (-4.0 * t * s * z.d1);
      gz.d2 = gu.d2 * s;
      return gz;
    }
  }
  return gu;
}

}  // namespace

void backward(const MlpParams& params, const ForwardTrace& trace,
              std::span<const JetUpstream> upstream, MlpGrad& grad) {
  const size_t L = params.layers.size();
  if (trace.act.size() != L + 1 || trace.pre.size() != L)
    throw std::invalid_argument("backward: trace does not match params");
  if (static_cast<int>(upstream.size()) != params.net.output_dim)
    throw std::invalid_argument("backward: upstream size mismatch");
  if (grad.layers.size() != L)
    throw std::invalid_argument("backward: gradient shape mismatch");

  // adjoint of the post-activation jets of the current layer
  std::vector<Adj> ga(params.net.output_dim);
  for (int i = 0; i < params.net.output_dim; ++i)
    ga[i] = {upstream[i].gf, upstream[i].gd1, upstream[i].gd2};

  std::vector<Adj> gz, gprev;
  for (size_t l = L; l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    const Activation act =
        (l + 1 == L) ? params.net.output_act : params.net.hidden_act;
    const std::vector<Jet2>& pre = trace.pre[l];
    const std::vector<Jet2>& a = trace.act[l];

    gz.resize(layer.out);
    for (int i = 0; i < layer.out; ++i) gz[i] = reverse_act(act, pre[i], ga[i]);

    // z_i = sum_j w_ij a_j + b_i, channel-wise; parameters touch all three
    // channels through a_j's jet components.
    DenseLayer& g = grad.layers[l];
    gprev.assign(layer.in, Adj{});
    for (int i = 0; i < layer.out; ++i) {
      const double* wrow = layer.w.data() + static_cast<size_t>(i) * layer.in;
      double* grow = g.w.data() + static_cast<size_t>(i) * layer.in;
      const Adj& gi = gz[i];
      g.b[i] += gi.v;
      for (int j = 0; j < layer.in; ++j) {
        grow[j] += gi.v * a[j].v + gi.d1 * a[j].d1 + gi.d2 * a[j].d2;
        gprev[j].v += wrow[j] * gi.v;
        gprev[j].d1 += wrow[j] * gi.d1;
        gprev[j].d2 += wrow[j] * gi.d2;
      }
    }
    ga = gprev;
  }
}

void save_params(const std::string& path, const MlpParams& params,
                 const std::vector<std::string>& comment_lines) {
  nlohmann::json j;
  j["net"]["input_dim"] = params.net.input_dim;
  j["net"]["hidden"] = params.net.hidden;
  j["net"]["hidden_act"] = to_string(params.net.hidden_act);
  j["net"]["output_act"] = to_string(params.net.output_act);
  j["net"]["output_dim"] = params.net.output_dim;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : params.layers) {
    nlohmann::json jl;
    jl["in"] = l.in;
    jl["out"] = l.out;
    jl["w"] = l.w;
    jl["b"] = l.b;
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << j.dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

MlpParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line, body;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body += line;
    body += '\n';
  }
  const nlohmann::json j = nlohmann::json::parse(body);
  MlpParams p;
  p.net.input_dim = j.at("net").at("input_dim").get<int>();
  p.net.hidden = j.at("net").at("hidden").get<std::vector<int>>();
  p.net.hidden_act = activation_from_string(j.at("net").at("hidden_act").get<std::string>());
  p.net.output_act = activation_from_string(j.at("net").at("output_act").get<std::string>());
  p.net.output_dim = j.at("net").at("output_dim").get<int>();
  for (const auto& jl : j.at("layers")) {
    DenseLayer l;
    l.in = jl.at("in").get<int>();
    l.out = jl.at("out").get<int>();
    l.w = jl.at("w").get<std::vector<double>>();
    l.b = jl.at("b").get<std::vector<double>>();
    if (l.w.size() != static_cast<size_t>(l.in) * l.out ||
        l.b.size() != static_cast<size_t>(l.out))
      throw std::runtime_error("corrupt parameter file: " + path);
    p.layers.push_back(std::move(l));
  }
  return p;
}

}  // namespace modal
