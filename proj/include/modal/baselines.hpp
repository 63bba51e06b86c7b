#pragma once

#include <span>
#include <vector>

#include "modal/datasets.hpp"
#include "modal/prediction.hpp"
#include "modal/training.hpp"

namespace modal {

// ---- robust / squared-error regression ----

double huber_loss(double r, double delta);
double huber_deriv(double r, double delta);

// Regression MLP trained by Adam on mean squared error. The network takes
// the features only (no target input).
TrainResult l2_train(const Dataset& data, const NetConfig& net,
                     const TrainConfig& config, const Evaluator& evaluator = {});

TrainResult huber_train(const Dataset& data, const NetConfig& net,
                        const TrainConfig& config, double delta = 1.0,
                        const Evaluator& evaluator = {});

// ---- kernel density estimation ----

enum class KernelKind { Gaussian, Categorical };

struct KdeConfig {
  double bandwidth_scale = 1.06;  // normal reference rule constant
  double categorical_lambda = -1.0;  // <= 0 selects the 0.5^(1/d) default
};

// Product-kernel joint density over (x, y) with the training set stored
// verbatim. Binary feature columns are treated as categorical.
struct KdeModel {
  int n = 0;
  int d = 0;                   // feature dims; target is dimension d
  std::vector<double> points;  // n x (d+1), row-major, y last
  std::vector<double> bandwidth;
  std::vector<KernelKind> kind;
  double cat_lambda = 1.0;
};

KdeModel kde_fit(const Dataset& data, const KdeConfig& config = {});
double kde_joint(const KdeModel& model, std::span<const double> x, double y);
// Grid argmax of the joint at fixed x (equal to the conditional argmax).
// Sets *degenerate and returns the grid midpoint if the density is zero
// everywhere on the grid.
double kde_mode(const KdeModel& model, std::span<const double> x,
                const ModeGrid& grid, bool* degenerate = nullptr);

void save_kde(const std::string& path, const KdeModel& model,
              const std::vector<std::string>& comment_lines = {});
KdeModel load_kde(const std::string& path);

// ---- mixture density network ----

// The MDN head reads 3K raw network outputs as [logits | means | log sds];
// weights go through softmax, sds through exp of a clamped raw value.
struct MixtureParams {
  std::vector<double> weight;
  std::vector<double> mean;
  std::vector<double> sd;
};

NetConfig mdn_net_config(int feature_dim, const std::vector<int>& hidden, int k);
MixtureParams mdn_mixture(const MlpParams& params, std::span<const double> x);
double mdn_nll(const MlpParams& params, std::span<const double> x, double y);
// Single-sample NLL with its parameter gradient (times grad_scale)
// accumulated into grad.
double mdn_nll_and_grad(const MlpParams& params, std::span<const double> x,
                        double y, MlpGrad& grad, double grad_scale = 1.0);
double mdn_density(const MlpParams& params, std::span<const double> x, double y);
double mdn_mode(const MlpParams& params, std::span<const double> x,
                const ModeGrid& grid);

TrainResult mdn_train(const Dataset& data, const std::vector<int>& hidden,
                      int k, const TrainConfig& config,
                      const Evaluator& evaluator = {});

}  // namespace modal
