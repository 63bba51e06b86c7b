#include "modal/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "modal/format.hpp"

namespace modal {

ProfileScan scan_profile(const MlpParams& params, std::span<const double> x,
                         const ModeGrid& grid) {
  ProfileScan scan;
  scan.x.assign(x.begin(), x.end());
  scan.ys = grid.values;
  scan.f.reserve(grid.values.size());
  scan.fy.reserve(grid.values.size());
  scan.fyy.reserve(grid.values.size());
  ForwardTrace trace;
  for (double yv : grid.values) {
    const Jet2 jet = forward_jet(params, x, yv, trace);
    scan.f.push_back(jet.v);
    scan.fy.push_back(jet.d1);
    scan.fyy.push_back(jet.d2);
  }
  return scan;
}

ExclusionReport exclusion_radius_check(const ProfileScan& scan, double eps_f,
                                       double eps_d) {
  if (scan.ys.empty())
    throw std::invalid_argument("exclusion_radius_check: empty scan");
  ExclusionReport report;
  for (double v : scan.fyy) report.u = std::max(report.u, std::abs(v));
  report.radius = report.u > 0.0 ? 2.0 / report.u
                                 : std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < scan.ys.size(); ++j) {
    if (std::abs(scan.f[j]) < eps_f && std::abs(scan.fy[j] + 1.0) < eps_d)
      report.mode_like.push_back(static_cast<int>(j));
  }
  for (size_t a = 0; a < report.mode_like.size(); ++a) {
    for (size_t b = a + 1; b < report.mode_like.size(); ++b) {
      const double gap =
          std::abs(scan.ys[report.mode_like[b]] - scan.ys[report.mode_like[a]]);
      if (gap < report.radius)
        report.violations.emplace_back(report.mode_like[a], report.mode_like[b]);
    }
  }
  return report;
}

std::string exclusion_report_json(const ExclusionReport& report,
                                  const ProfileScan& scan) {
  nlohmann::json j;
  j["u"] = report.u;
  j["radius"] = std::isinf(report.radius) ? -1.0 : report.radius;
  nlohmann::json pts = nlohmann::json::array();
  for (int idx : report.mode_like)
    pts.push_back({{"index", idx}, {"y", scan.ys[idx]}});
  j["mode_like"] = std::move(pts);
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& [a, b] : report.violations)
    viol.push_back({{"i", a},
                    {"j", b},
                    {"distance", std::abs(scan.ys[b] - scan.ys[a])}});
  j["violations"] = std::move(viol);
  return j.dump(2);
}

Histogram residual_histogram(const MlpParams& params, const Dataset& data,
                             int bins) {
  if (bins < 1) throw std::invalid_argument("residual_histogram: bins < 1");
  if (data.n == 0) throw std::invalid_argument("residual_histogram: empty data");
  std::vector<double> residuals(data.n);
  ForwardTrace trace;
  for (int i = 0; i < data.n; ++i)
    residuals[i] = forward_jet(params, data.row(i), data.y[i], trace).v;

  Histogram hist;
  double lo = residuals[0], hi = residuals[0];
  for (double r : residuals) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    hist.mean += r;
  }
  hist.mean /= data.n;
  for (double r : residuals) hist.sd += (r - hist.mean) * (r - hist.mean);
  hist.sd = std::sqrt(hist.sd / data.n);

  if (lo == hi) {
    // all residuals identical: a single degenerate bin
    hist.edges = {lo, hi};
    hist.counts = {data.n};
    return hist;
  }
  hist.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b)
    hist.edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
  hist.counts.assign(bins, 0);
  for (double r : residuals) {
    int b = static_cast<int>((r - lo) / (hi - lo) * bins);
    b = std::min(b, bins - 1);
    ++hist.counts[b];
  }
  return hist;
}

void write_histogram_csv(const Histogram& hist, const std::string& path,
                         const std::vector<std::string>& comment_lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& c : comment_lines) out << "# " << c << "\n";
  out << "bin_left,bin_right,count\n";
  for (size_t b = 0; b < hist.counts.size(); ++b)
    out << fmt_double(hist.edges[b]) << "," << fmt_double(hist.edges[b + 1])
        << "," << hist.counts[b] << "\n";
}

}  // namespace modal
