#pragma once

#include <array>
#include <string>
#include <vector>

#include "modal/datasets.hpp"
#include "modal/training.hpp"

namespace modal {

// Output of the modality-construction pipeline: a doubled training set with
// the flipped column removed, plus the two acceptable targets per original
// instance for evaluation.
struct ModalityBuild {
  Dataset train;                                // 2n rows, flip columns dropped
  Dataset eval_features;                        // n rows, flip columns dropped
  std::vector<std::array<double, 2>> eval_targets;
  MlpParams l2_model;                           // the regressor used to synthesize targets
};

// Constructs a modal-regression dataset from a regular one:
//  1. fit an L2 regressor on the raw data,
//  2. flip the binary categorical column for every row and query the model
//     for a second target,
//  3. append the flipped rows (2n total),
//  4. drop the flipped column from the features.
// `flip_column` names the original categorical; its one-hot pair
// "<name>=a"/"<name>=b" must be exactly two columns.
ModalityBuild modality_build(const Dataset& raw, const std::string& flip_column,
                             const NetConfig& l2_net,
                             const TrainConfig& l2_config);

}  // namespace modal
