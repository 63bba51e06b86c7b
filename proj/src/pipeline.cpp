#include "modal/pipeline.hpp"

#include <stdexcept>

#include "modal/baselines.hpp"

namespace modal {

namespace {

std::vector<int> onehot_columns(const Dataset& data, const std::string& name) {
  std::vector<int> cols;
  const std::string prefix = name + "=";
  for (size_t i = 0; i < data.feature_names.size(); ++i) {
    if (data.feature_names[i].rfind(prefix, 0) == 0)
      cols.push_back(static_cast<int>(i));
  }
  if (cols.empty()) {
    // allow a plain 0/1 column under the bare name
    const int c = data.feature_index(name);
    if (c >= 0) cols.push_back(c);
  }
  return cols;
}

Dataset drop_columns(const Dataset& data, const std::vector<int>& cols) {
  std::vector<bool> keep(data.d, true);
  for (int c : cols) keep[c] = false;
  Dataset out;
  out.name = data.name;
  out.n = data.n;
  out.d = 0;
  for (int j = 0; j < data.d; ++j)
    if (keep[j]) {
      out.feature_names.push_back(data.feature_names[j]);
      ++out.d;
    }
  out.x.reserve(static_cast<size_t>(out.n) * out.d);
  for (int i = 0; i < data.n; ++i) {
    const auto r = data.row(i);
    for (int j = 0; j < data.d; ++j)
      if (keep[j]) out.x.push_back(r[j]);
  }
  out.y = data.y;
  out.oracle_key = data.oracle_key;
  return out;
}

}  // namespace

ModalityBuild modality_build(const Dataset& raw, const std::string& flip_column,
                             const NetConfig& l2_net,
                             const TrainConfig& l2_config) {
  const auto cols = onehot_columns(raw, flip_column);
  if (cols.size() == 1) {
    // plain 0/1 column: flipping means 1 - v
    for (int i = 0; i < raw.n; ++i) {
      const double v = raw.x[static_cast<size_t>(i) * raw.d + cols[0]];
      if (v != 0.0 && v != 1.0)
        throw std::invalid_argument("modality_build: flip column is not binary");
    }
  } else if (cols.size() != 2) {
    throw std::invalid_argument("modality_build: flip column is not binary");
  }

  NetConfig net = l2_net;
  net.input_dim = raw.d;
  net.output_dim = 1;
  const TrainResult l2 = l2_train(raw, net, l2_config);

  // flipped copy of the raw features
  Dataset flipped = raw;
  for (int i = 0; i < raw.n; ++i) {
    double* row = flipped.x.data() + static_cast<size_t>(i) * raw.d;
    if (cols.size() == 2) {
      std::swap(row[cols[0]], row[cols[1]]);
    } else {
      row[cols[0]] = 1.0 - row[cols[0]];
    }
  }
  std::vector<double> synthetic(raw.n);
  for (int i = 0; i < raw.n; ++i)
    synthetic[i] = forward_value(l2.params, flipped.row(i));

  // augment to 2n rows, then drop the flip columns
  Dataset augmented = raw;
  augmented.x.insert(augmented.x.end(), flipped.x.begin(), flipped.x.end());
  augmented.y.insert(augmented.y.end(), synthetic.begin(), synthetic.end());
  if (!augmented.oracle_key.empty())
    augmented.oracle_key.insert(augmented.oracle_key.end(),
                                raw.oracle_key.begin(), raw.oracle_key.end());
  augmented.n = 2 * raw.n;

  ModalityBuild build;
  build.train = drop_columns(augmented, cols);
  build.train.name = raw.name + "_modal";
  build.eval_features = drop_columns(raw, cols);
  build.eval_targets.resize(raw.n);
  for (int i = 0; i < raw.n; ++i)
    build.eval_targets[i] = {raw.y[i], synthetic[i]};
  build.l2_model = l2.params;
  return build;
}

}  // namespace modal
