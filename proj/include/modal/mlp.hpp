#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modal/jet.hpp"

namespace modal {

enum class Activation { Tanh, Relu, Identity };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct NetConfig {
  int input_dim = 2;  // feature dim d, plus one for the appended y input
  std::vector<int> hidden = {16, 16};
  Activation hidden_act = Activation::Tanh;
  Activation output_act = Activation::Tanh;
  int output_dim = 1;

  std::vector<int> layer_sizes() const;  // [input, hidden..., output]
};

// One fully-connected layer; weights are row-major (out x in). The same
// struct holds parameter gradients and Adam moments, which share the shape.
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // out * in
  std::vector<double> b;  // out

  double& weight(int i, int j) { return w[static_cast<size_t>(i) * in + j]; }
  double weight(int i, int j) const { return w[static_cast<size_t>(i) * in + j]; }
};

struct MlpParams {
  NetConfig net;
  std::vector<DenseLayer> layers;

  size_t count() const;  // total number of scalar parameters
};

// Gradient (or moment) buffer with the same layer shapes as MlpParams.
struct MlpGrad {
  std::vector<DenseLayer> layers;

  void set_zero();
  void scale(double c);
  void add_scaled(const MlpGrad& other, double c);
};

MlpGrad make_grad(const MlpParams& params);

// Glorot-uniform init: weights uniform in +-sqrt(6/(fan_in+fan_out)),
// biases zero. Deterministic given the seed.
MlpParams init_xavier(const NetConfig& config, std::uint64_t seed);

// Per-layer jets retained by the forward pass for reverse accumulation.
// act[0] holds the network inputs; act[l+1] / pre[l] belong to layer l.
struct ForwardTrace {
  std::vector<std::vector<Jet2>> act;
  std::vector<std::vector<Jet2>> pre;
};

// Adjoints of the three output channels (f, f_y, f_yy) of one output unit.
struct JetUpstream {
  double gf = 0.0;
  double gd1 = 0.0;
  double gd2 = 0.0;
};

// General forward pass over jet inputs; returns the output-layer jets.
std::vector<Jet2> forward_jets(const MlpParams& params,
                               std::span<const Jet2> input, ForwardTrace& trace);

// Implicit-network forward: features are lifted as constants, y is seeded as
// the differentiation variable and appended as the last input. Requires
// output_dim == 1. Returns the jet (f(x,y), df/dy, d2f/dy2).
Jet2 forward_jet(const MlpParams& params, std::span<const double> x, double y,
                 ForwardTrace& trace);

// Convenience overload that discards the trace.
Jet2 forward_jet(const MlpParams& params, std::span<const double> x, double y);

// Plain value-only pass over the full input vector, evaluated in the same
// arithmetic order as the jet forward, so the results agree bit for bit.
double forward_value(const MlpParams& params, std::span<const double> input);
std::vector<double> forward_values(const MlpParams& params,
                                   std::span<const double> input);

// Reverse accumulation through the jet circuit: accumulates
// d(sum_k gf_k f_k + gd1_k f_y,k + gd2_k f_yy,k)/dtheta into grad.
void backward(const MlpParams& params, const ForwardTrace& trace,
              std::span<const JetUpstream> upstream, MlpGrad& grad);

// Parameter serialization (JSON, layer-major, row-major weights). Writer
// prepends '#' comment lines; the loader skips them.
void save_params(const std::string& path, const MlpParams& params,
                 const std::vector<std::string>& comment_lines = {});
MlpParams load_params(const std::string& path);

}  // namespace modal
