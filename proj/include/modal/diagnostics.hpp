#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modal/datasets.hpp"
#include "modal/mlp.hpp"
#include "modal/prediction.hpp"

namespace modal {

// The implicit surface along y at one query point: f, df/dy, d2f/dy2
// sampled on a uniform grid.
struct ProfileScan {
  std::vector<double> x;
  std::vector<double> ys;
  std::vector<double> f;
  std::vector<double> fy;
  std::vector<double> fyy;
};

ProfileScan scan_profile(const MlpParams& params, std::span<const double> x,
                         const ModeGrid& grid);

// Numeric check of the exclusion-radius bound: with u an upper bound on
// |f''| and slope target -1, two mode-like points cannot sit closer than
// 2/u. Pairs that do indicate numerical artifacts or a too-coarse grid.
struct ExclusionReport {
  double u = 0.0;       // max |f_yy| over the scan
  double radius = 0.0;  // 2/u; infinity when u == 0
  std::vector<int> mode_like;                 // grid indices passing the filter
  std::vector<std::pair<int, int>> violations;
};

ExclusionReport exclusion_radius_check(const ProfileScan& scan,
                                       double eps_f = 1e-2, double eps_d = 1e-1);

std::string exclusion_report_json(const ExclusionReport& report,
                                  const ProfileScan& scan);

struct Histogram {
  std::vector<double> edges;  // bins+1
  std::vector<long> counts;   // bins
  double mean = 0.0;
  double sd = 0.0;
};

// Histogram of the trained residuals f(x_i, y_i) over a dataset.
Histogram residual_histogram(const MlpParams& params, const Dataset& data,
                             int bins);

void write_histogram_csv(const Histogram& hist, const std::string& path,
                         const std::vector<std::string>& comment_lines = {});

}  // namespace modal
