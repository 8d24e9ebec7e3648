#include "cqca/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace cqca::analysis {

Threshold securityThreshold(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  double lo = 0.0;
  double hi = std::numbers::pi / 2;
  const double kLo = keyRate(lo).keyRate;
  const double kHi = keyRate(hi).keyRate;
  if (!(kLo > 0.0 && kHi < 0.0)) throw std::logic_error("key rate is not bracketed on [0, pi/2]");

  int it = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (keyRate(mid).keyRate > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++it;
  }
  const double root = 0.5 * (lo + hi);
  return {root, errorRateTheory(root), it};
}

std::vector<double> uniformGrid(std::size_t points) {
  std::vector<double> grid;
  if (points == 0) return grid;
  if (points == 1) return {0.0};
  grid.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(std::numbers::pi / 2 * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  grid.back() = std::numbers::pi / 2;
  return grid;
}

SecurityCurve sweepCurves(const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("grid must be sorted");
  SecurityCurve curve;
  curve.reserve(grid.size());
  for (double t : grid) curve.push_back(keyRate(t));
  return curve;
}

void writeCurveCsv(std::ostream& os, const SecurityCurve& curve) {
  os << "theta,e,visibility,e1,chi,i_bc,key_rate\n";
  char line[256];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", p.theta, p.e, p.visibility, p.e1,
                  p.chi, p.iBC, p.keyRate);
    os << line;
  }
}

std::vector<std::size_t> keyRateSignChanges(const SecurityCurve& curve) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if ((curve[i].keyRate > 0.0) != (curve[i + 1].keyRate > 0.0)) out.push_back(i);
  }
  return out;
}

}  // namespace cqca::analysis
