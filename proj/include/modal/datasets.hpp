#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace modal {

// Feature matrix plus target vector. `oracle_key` optionally carries the
// scalar input that generated each row (it survives feature encodings such
// as tile coding, so ground-truth modes stay queryable per row).
struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  int n = 0;
  int d = 0;
  std::vector<double> x;  // row-major n*d
  std::vector<double> y;  // n
  std::vector<double> oracle_key;

  std::span<const double> row(int i) const {
    return {x.data() + static_cast<size_t>(i) * d, static_cast<size_t>(d)};
  }
  void add_row(std::span<const double> features, double target);
  int feature_index(const std::string& name) const;  // -1 if absent
};

// Ground truth for synthetic tasks: all conditional modes at a query point,
// and the dominant (highest-likelihood) one where the generator defines it.
struct ModeOracle {
  std::function<std::vector<double>(double)> modes;
  std::function<std::optional<double>(double)> dominant;
};

struct Labeled {
  Dataset data;
  ModeOracle oracle;
};

// x ~ U(-1,1); y = +-sqrt(1-x^2) with equal probability, plus N(0, noise_sd^2).
Labeled gen_circle(int n, double noise_sd, std::uint64_t seed);

// angle ~ U(0,2pi), radius 1 or 2 with equal probability;
// x = r cos a, y = r sin a + noise.
Labeled gen_double_circle(int n, double noise_sd, std::uint64_t seed);

// Circle with x-dependent mixture weights: the positive branch carries
// weight 0.8 for x < 0 and 0.2 for x >= 0.
Labeled gen_biased_circle(int n, std::uint64_t seed, double noise_sd = 0.1);

// y = sin(8 pi x) for x in [-2.5, 0), sin(0.5 pi x) for x in [0, 2.5], plus noise.
Labeled gen_highfreq(int n, double noise_sd, std::uint64_t seed);

// Inverse-sine problem: x = y + 0.3 sin(2 pi y) + U(-0.1, 0.1), y ~ U(0,1).
// Multi-valued inverse, no closed-form oracle.
Dataset gen_inverse_sin(int n, std::uint64_t seed);

// Two-branch stand-in for the modality-construction pipeline: one binary
// categorical column (one-hot, 2 columns) picks the branch, one continuous
// column drives a smooth base curve. Branches sit `gap` apart.
Labeled gen_two_branch(int n, double gap, double noise_sd, std::uint64_t seed);

// 4 tilings x 32 tiles over [-2, 2], offsets of (tile width)*k/4 per tiling,
// allocated directly into the 128 slots (no hashing).
struct TileCoder {
  double lo = -2.0;
  double hi = 2.0;
  int memory = 128;
  int tilings = 4;

  int tiles_per_tiling() const { return memory / tilings; }
};

// Returns a binary vector of length coder.memory with exactly one active
// tile per tiling. Throws on out-of-domain x.
std::vector<double> tile_encode(const TileCoder& coder, double x);

// Replaces a 1-d feature column with its tile code; keeps targets and the
// oracle key (defaulting the key to the original feature).
Dataset tile_encode_dataset(const TileCoder& coder, const Dataset& data);

// CSV ingestion with one-hot expansion of declared categorical columns.
// The first line is a header; '#' lines are skipped.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::vector<std::string>& categorical_columns = {});

void write_csv(const Dataset& data, const std::string& path,
               const std::vector<std::string>& comment_lines = {});

// Per-column affine transform fitted on one split and applicable to others.
struct ColumnStats {
  std::vector<int> cols;
  std::vector<double> mean;
  std::vector<double> sd;
};

// Standardizes the named columns in place using the dataset's own statistics
// and returns them. Zero-variance columns are skipped with a warning.
ColumnStats standardize(Dataset& data, const std::vector<std::string>& columns);
void apply_standardize(Dataset& data, const ColumnStats& stats);

// Affine map of the targets onto [0,1] with a stored inverse.
struct TargetScaler {
  double lo = 0.0;
  double hi = 1.0;

  double scale(double y) const { return (y - lo) / (hi - lo); }
  double unscale(double s) const { return lo + s * (hi - lo); }
};

TargetScaler scale_target(Dataset& data);
void log_transform_target(Dataset& data);

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> test;
};

// Disjoint shuffled split covering all rows exactly once.
SplitIndices split_indices(int n, double test_fraction, std::uint64_t seed);
Dataset subset(const Dataset& data, std::span<const int> idx);

}  // namespace modal
