#include "modal/objective.hpp"

#include <stdexcept>

namespace modal {

double local_loss(const Jet2& jet, double eta) {
  const double slope = jet.d1 + 1.0;
  return jet.v * jet.v + slope * slope + eta * jet.d2 * jet.d2;
}

JetUpstream loss_upstream(const Jet2& jet, double eta) {
  return {2.0 * jet.v, 2.0 * (jet.d1 + 1.0), 2.0 * eta * jet.d2};
}

double batch_loss_and_grad(const MlpParams& params, const Dataset& data,
                           std::span<const int> idx, double eta, MlpGrad& grad,
                           BatchWorkspace& ws) {
  if (idx.empty()) throw std::invalid_argument("batch_loss_and_grad: empty batch");
  grad.set_zero();
  const double inv = 1.0 / static_cast<double>(idx.size());
  double loss = 0.0;
  for (int i : idx) {
    const Jet2 jet = forward_jet(params, data.row(i), data.y[i], ws.trace);
    loss += local_loss(jet, eta);
    JetUpstream up = loss_upstream(jet, eta);
    up.gf *= inv;
    up.gd1 *= inv;
    up.gd2 *= inv;
    backward(params, ws.trace, std::span<const JetUpstream>(&up, 1), grad);
  }
  return loss * inv;
}

double batch_loss_and_grad(const MlpParams& params, const Dataset& data,
                           std::span<const int> idx, double eta, MlpGrad& grad) {
  BatchWorkspace ws;
  return batch_loss_and_grad(params, data, idx, eta, grad, ws);
}

}  // namespace modal
