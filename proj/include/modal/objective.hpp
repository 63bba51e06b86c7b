#pragma once

#include <span>

#include "modal/datasets.hpp"
#include "modal/mlp.hpp"

namespace modal {

// Per-sample modal regression loss on the output jet (f, f_y, f_yy):
//   f^2 + (f_y + 1)^2 + eta * f_yy^2
double local_loss(const Jet2& jet, double eta);

// Its derivatives with respect to the three jet channels.
JetUpstream loss_upstream(const Jet2& jet, double eta);

// Scratch buffers reused across minibatches.
struct BatchWorkspace {
  ForwardTrace trace;
};

// Mean local loss over the rows of `data` selected by `idx`, with the mean
// parameter gradient accumulated into `grad` (which is zeroed first).
double batch_loss_and_grad(const MlpParams& params, const Dataset& data,
                           std::span<const int> idx, double eta, MlpGrad& grad,
                           BatchWorkspace& ws);

double batch_loss_and_grad(const MlpParams& params, const Dataset& data,
                           std::span<const int> idx, double eta, MlpGrad& grad);

}  // namespace modal
