#include "modal/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "modal/format.hpp"
#include "modal/rng.hpp"

namespace modal {

void Dataset::add_row(std::span<const double> features, double target) {
  if (n == 0 && d == 0) d = static_cast<int>(features.size());
  if (static_cast<int>(features.size()) != d)
    throw std::invalid_argument("add_row: feature width mismatch");
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(target);
  ++n;
}

int Dataset::feature_index(const std::string& name) const {
  for (size_t i = 0; i < feature_names.size(); ++i)
    if (feature_names[i] == name) return static_cast<int>(i);
  return -1;
}

Labeled gen_circle(int n, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.name = "circle";
  data.feature_names = {"x"};
  data.d = 1;
  data.x.reserve(n);
  data.y.reserve(n);
  data.oracle_key.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double xi = rng.uniform(-1.0, 1.0);
    const double branch = rng.uniform() < 0.5 ? 1.0 : -1.0;
    const double mode = branch * std::sqrt(1.0 - xi * xi);
    data.x.push_back(xi);
    data.y.push_back(noise_sd > 0.0 ? rng.normal(mode, noise_sd) : mode);
    data.oracle_key.push_back(xi);
  }
  data.n = n;

  ModeOracle oracle;
  oracle.modes = [](double xq) {
    const double m = std::sqrt(std::max(0.0, 1.0 - xq * xq));
    return std::vector<double>{-m, m};
  };
  oracle.dominant = [](double) { return std::nullopt; };
  return {std::move(data), std::move(oracle)};
}

Labeled gen_double_circle(int n, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.name = "double_circle";
  data.feature_names = {"x"};
  data.d = 1;
  for (int i = 0; i < n; ++i) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = rng.uniform() < 0.5 ? 1.0 : 2.0;
    const double xi = r * std::cos(angle);
    const double mode = r * std::sin(angle);
    data.x.push_back(xi);
    data.y.push_back(noise_sd > 0.0 ? rng.normal(mode, noise_sd) : mode);
    data.oracle_key.push_back(xi);
  }
  data.n = n;

  ModeOracle oracle;
  oracle.modes = [](double xq) {
    std::vector<double> m;
    const double outer = std::sqrt(std::max(0.0, 4.0 - xq * xq));
    if (std::abs(xq) < 1.0) {
      const double inner = std::sqrt(1.0 - xq * xq);
      m = {-outer, -inner, inner, outer};
    } else {
      m = {-outer, outer};
    }
    return m;
  };
  oracle.dominant = [](double) { return std::nullopt; };
  return {std::move(data), std::move(oracle)};
}

Labeled gen_biased_circle(int n, std::uint64_t seed, double noise_sd) {
  Rng rng(seed);
  Dataset data;
  data.name = "biased_circle";
  data.feature_names = {"x"};
  data.d = 1;
  for (int i = 0; i < n; ++i) {
    const double xi = rng.uniform(-1.0, 1.0);
    const double pos_weight = xi < 0.0 ? 0.8 : 0.2;
    const double branch = rng.uniform() < pos_weight ? 1.0 : -1.0;
    const double mode = branch * std::sqrt(1.0 - xi * xi);
    data.x.push_back(xi);
    data.y.push_back(noise_sd > 0.0 ? rng.normal(mode, noise_sd) : mode);
    data.oracle_key.push_back(xi);
  }
  data.n = n;

  ModeOracle oracle;
  oracle.modes = [](double xq) {
    const double m = std::sqrt(std::max(0.0, 1.0 - xq * xq));
    return std::vector<double>{-m, m};
  };
  oracle.dominant = [](double xq) -> std::optional<double> {
    const double m = std::sqrt(std::max(0.0, 1.0 - xq * xq));
    return xq < 0.0 ? m : -m;
  };
  return {std::move(data), std::move(oracle)};
}

namespace {

double highfreq_truth(double xq) {
  return xq < 0.0 ? std::sin(8.0 * std::numbers::pi * xq)
                  : std::sin(0.5 * std::numbers::pi * xq);
}

}  // namespace

Labeled gen_highfreq(int n, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.name = "highfreq";
  data.feature_names = {"x"};
  data.d = 1;
  for (int i = 0; i < n; ++i) {
    const double xi = rng.uniform(-2.5, 2.5);
    const double mode = highfreq_truth(xi);
    data.x.push_back(xi);
    data.y.push_back(noise_sd > 0.0 ? rng.normal(mode, noise_sd) : mode);
    data.oracle_key.push_back(xi);
  }
  data.n = n;

  ModeOracle oracle;
  oracle.modes = [](double xq) { return std::vector<double>{highfreq_truth(xq)}; };
  oracle.dominant = [](double xq) -> std::optional<double> {
    return highfreq_truth(xq);
  };
  return {std::move(data), std::move(oracle)};
}

Dataset gen_inverse_sin(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.name = "inverse_sin";
  data.feature_names = {"x"};
  data.d = 1;
  for (int i = 0; i < n; ++i) {
    const double yi = rng.uniform(0.0, 1.0);
    const double xi =
        yi + 0.3 * std::sin(2.0 * std::numbers::pi * yi) + rng.uniform(-0.1, 0.1);
    data.x.push_back(xi);
    data.y.push_back(yi);
    data.oracle_key.push_back(xi);
  }
  data.n = n;
  return data;
}

Labeled gen_two_branch(int n, double gap, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.name = "two_branch";
  data.feature_names = {"branch=a", "branch=b", "t"};
  data.d = 3;
  const double half = 0.5 * gap;
  for (int i = 0; i < n; ++i) {
    const double t = rng.uniform(-1.0, 1.0);
    const bool b = rng.uniform() < 0.5;
    const double base = 0.2 * std::sin(2.0 * std::numbers::pi * t);
    const double mode = base + (b ? half : -half);
    const double row[3] = {b ? 0.0 : 1.0, b ? 1.0 : 0.0, t};
    data.x.insert(data.x.end(), row, row + 3);
    data.y.push_back(noise_sd > 0.0 ? rng.normal(mode, noise_sd) : mode);
    data.oracle_key.push_back(t);
  }
  data.n = n;

  const double g = gap;
  ModeOracle oracle;
  oracle.modes = [g](double t) {
    const double base = 0.2 * std::sin(2.0 * std::numbers::pi * t);
    return std::vector<double>{base - 0.5 * g, base + 0.5 * g};
  };
  oracle.dominant = [](double) { return std::nullopt; };
  return {std::move(data), std::move(oracle)};
}

std::vector<double> tile_encode(const TileCoder& coder, double x) {
  if (!(x >= coder.lo && x <= coder.hi))
    throw std::invalid_argument("tile_encode: input outside coder domain");
  const int tiles = coder.tiles_per_tiling();
  const double width = (coder.hi - coder.lo) / tiles;
  std::vector<double> code(coder.memory, 0.0);
  for (int k = 0; k < coder.tilings; ++k) {
    const double origin = coder.lo + width * k / coder.tilings;
    int idx = static_cast<int>(std::floor((x - origin) / width));
    idx = std::clamp(idx, 0, tiles - 1);
    code[static_cast<size_t>(k) * tiles + idx] = 1.0;
  }
  return code;
}

Dataset tile_encode_dataset(const TileCoder& coder, const Dataset& data) {
  if (data.d != 1)
    throw std::invalid_argument("tile_encode_dataset: expects a 1-d feature");
  Dataset out;
  out.name = data.name + "_tiled";
  out.d = coder.memory;
  out.n = data.n;
  out.y = data.y;
  out.oracle_key = data.oracle_key.empty()
                       ? data.x
                       : data.oracle_key;
  out.feature_names.reserve(coder.memory);
  for (int i = 0; i < coder.memory; ++i)
    out.feature_names.push_back("tile" + std::to_string(i));
  out.x.reserve(static_cast<size_t>(data.n) * coder.memory);
  for (int i = 0; i < data.n; ++i) {
    const auto code = tile_encode(coder, data.x[i]);
    out.x.insert(out.x.end(), code.begin(), code.end());
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::vector<std::string>& categorical_columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_line(line, ',');
    break;
  }
  if (header.empty()) throw std::runtime_error("empty CSV: " + path);
  for (auto& h : header) h = trim(h);

  int target_idx = -1;
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == target_column) target_idx = static_cast<int>(i);
  if (target_idx < 0)
    throw std::runtime_error("missing column '" + target_column + "' in " + path);

  std::set<std::string> cat(categorical_columns.begin(), categorical_columns.end());
  for (const auto& c : categorical_columns) {
    if (std::find(header.begin(), header.end(), c) == header.end())
      throw std::runtime_error("missing column '" + c + "' in " + path);
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_line(line, ',');
    if (fields.size() != header.size())
      throw std::runtime_error("ragged CSV row in " + path);
    for (auto& f : fields) f = trim(f);
    rows.push_back(std::move(fields));
  }

  // discover categorical levels in sorted order for a stable layout
  std::map<int, std::vector<std::string>> levels;
  for (size_t ci = 0; ci < header.size(); ++ci) {
    if (!cat.count(header[ci])) continue;
    std::set<std::string> seen;
    for (const auto& r : rows) seen.insert(r[ci]);
    levels[static_cast<int>(ci)] =
        std::vector<std::string>(seen.begin(), seen.end());
  }

  Dataset data;
  data.name = path;
  for (size_t ci = 0; ci < header.size(); ++ci) {
    if (static_cast<int>(ci) == target_idx) continue;
    if (levels.count(static_cast<int>(ci))) {
      for (const auto& lv : levels[static_cast<int>(ci)])
        data.feature_names.push_back(header[ci] + "=" + lv);
    } else {
      data.feature_names.push_back(header[ci]);
    }
  }
  data.d = static_cast<int>(data.feature_names.size());

  for (const auto& r : rows) {
    std::vector<double> feat;
    feat.reserve(data.d);
    for (size_t ci = 0; ci < header.size(); ++ci) {
      if (static_cast<int>(ci) == target_idx) continue;
      if (levels.count(static_cast<int>(ci))) {
        for (const auto& lv : levels[static_cast<int>(ci)])
          feat.push_back(r[ci] == lv ? 1.0 : 0.0);
      } else {
        try {
          size_t pos = 0;
          const double v = std::stod(r[ci], &pos);
          if (pos != r[ci].size()) throw std::invalid_argument(r[ci]);
          feat.push_back(v);
        } catch (const std::exception&) {
          throw std::runtime_error("non-numeric cell '" + r[ci] +
                                   "' in numeric column '" + header[ci] + "'");
        }
      }
    }
    double target = 0.0;
    try {
      target = std::stod(r[target_idx]);
    } catch (const std::exception&) {
      throw std::runtime_error("non-numeric target '" + r[target_idx] + "'");
    }
    data.add_row(feat, target);
  }
  return data;
}

void write_csv(const Dataset& data, const std::string& path,
               const std::vector<std::string>& comment_lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& c : comment_lines) out << "# " << c << "\n";
  for (int j = 0; j < data.d; ++j) {
    out << (j < static_cast<int>(data.feature_names.size())
                ? data.feature_names[j]
                : "f" + std::to_string(j))
        << ",";
  }
  out << "target\n";
  for (int i = 0; i < data.n; ++i) {
    const auto r = data.row(i);
    for (double v : r) out << fmt_double(v) << ",";
    out << fmt_double(data.y[i]) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ColumnStats standardize(Dataset& data, const std::vector<std::string>& columns) {
  ColumnStats stats;
  for (const auto& name : columns) {
    const int c = data.feature_index(name);
    if (c < 0) throw std::runtime_error("standardize: missing column " + name);
    double mean = 0.0;
    for (int i = 0; i < data.n; ++i) mean += data.x[static_cast<size_t>(i) * data.d + c];
    mean /= data.n;
    double var = 0.0;
    for (int i = 0; i < data.n; ++i) {
      const double v = data.x[static_cast<size_t>(i) * data.d + c] - mean;
      var += v * v;
    }
    var /= data.n;
    const double sd = std::sqrt(var);
    if (sd == 0.0) {
      std::cerr << "warning: column '" << name << "' has zero variance, skipped\n";
      continue;
    }
    stats.cols.push_back(c);
    stats.mean.push_back(mean);
    stats.sd.push_back(sd);
  }
  apply_standardize(data, stats);
  return stats;
}

void apply_standardize(Dataset& data, const ColumnStats& stats) {
  for (size_t k = 0; k < stats.cols.size(); ++k) {
    const int c = stats.cols[k];
    for (int i = 0; i < data.n; ++i) {
      double& v = data.x[static_cast<size_t>(i) * data.d + c];
      v = (v - stats.mean[k]) / stats.sd[k];
    }
  }
}

TargetScaler scale_target(Dataset& data) {
  if (data.n == 0) throw std::invalid_argument("scale_target: empty dataset");
  TargetScaler s;
  s.lo = *std::min_element(data.y.begin(), data.y.end());
  s.hi = *std::max_element(data.y.begin(), data.y.end());
  if (s.hi == s.lo) s.hi = s.lo + 1.0;  // degenerate range maps to 0
  for (double& v : data.y) v = s.scale(v);
  return s;
}

void log_transform_target(Dataset& data) {
  for (double& v : data.y) {
    if (v <= 0.0)
      throw std::invalid_argument("log_transform_target: nonpositive target");
    v = std::log(v);
  }
}

SplitIndices split_indices(int n, double test_fraction, std::uint64_t seed) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[static_cast<int>(rng.integer(i + 1))]);
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  SplitIndices split;
  split.test.assign(idx.begin(), idx.begin() + n_test);
  split.train.assign(idx.begin() + n_test, idx.end());
  return split;
}

Dataset subset(const Dataset& data, std::span<const int> idx) {
  Dataset out;
  out.name = data.name;
  out.feature_names = data.feature_names;
  out.d = data.d;
  out.n = static_cast<int>(idx.size());
  out.x.reserve(static_cast<size_t>(out.n) * out.d);
  out.y.reserve(out.n);
  for (int i : idx) {
    const auto r = data.row(i);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.y.push_back(data.y[i]);
    if (!data.oracle_key.empty()) out.oracle_key.push_back(data.oracle_key[i]);
  }
  return out;
}

}  // namespace modal
