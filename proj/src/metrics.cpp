#include "cqca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cqca::metrics {

namespace {

bool isCell(const RoundRecord& r, Action b, Action c) { return r.settingB == b && r.settingC == c; }

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct CellDifference {
  std::size_t count = 0;
  double difference = 0.0;
};

CellDifference cellBias(std::span<const RoundRecord> sample, Action b, Action c) {
  std::size_t n = 0, d1 = 0, d2 = 0;
  for (const auto& r : sample) {
    if (!isCell(r, b, c)) continue;
    ++n;
    if (r.outcomeAlice == Announcement::D1) ++d1;
    if (r.outcomeAlice == Announcement::D2) ++d2;
  }
  if (n == 0) return {};
  return {n, std::abs(static_cast<double>(d1) - static_cast<double>(d2)) / static_cast<double>(n)};
}

}  // namespace

Estimate estimateKappa(std::span<const RoundRecord> sample) {
  std::size_t n = 0, both = 0;
  for (const auto& r : sample) {
    if (!isCell(r, Action::A, Action::A)) continue;
    ++n;
    if (r.clickB && r.clickC) ++both;
  }
  if (n == 0) throw InsufficientSample("no disclosed (A,A) rounds");
  return {static_cast<double>(both) / static_cast<double>(n), n};
}

Estimate estimateVisibility(std::span<const RoundRecord> sample) {
  std::size_t d1 = 0, d2 = 0;
  for (const auto& r : sample) {
    if (!isCell(r, Action::F, Action::F)) continue;
    if (r.outcomeAlice == Announcement::D1) ++d1;
    if (r.outcomeAlice == Announcement::D2) ++d2;
  }
  const std::size_t clicks = d1 + d2;
  if (clicks == 0) throw InsufficientSample("no disclosed (F,F) rounds with a click");
  return {(static_cast<double>(d2) - static_cast<double>(d1)) / static_cast<double>(clicks), clicks};
}

Estimate estimateBias(std::span<const RoundRecord> sample) {
  const auto af = cellBias(sample, Action::A, Action::F);
  const auto fa = cellBias(sample, Action::F, Action::A);
  if (af.count == 0 || fa.count == 0) throw InsufficientSample("no disclosed anti-correlated rounds in one cell");
  return {std::max(af.difference, fa.difference), std::min(af.count, fa.count)};
}

Estimate estimateErrorRate(std::span<const RoundRecord> sample) {
  std::size_t d1 = 0, correlated = 0;
  for (const auto& r : sample) {
    if (r.outcomeAlice != Announcement::D1) continue;
    ++d1;
    if (!r.anticorrelated()) ++correlated;
  }
  if (d1 == 0) throw InsufficientSample("no disclosed D1 rounds");
  return {static_cast<double>(correlated) / static_cast<double>(d1), d1};
}

Rates estimateRatesRLambda(std::span<const RoundRecord> rounds, std::size_t n) {
  Rates out;
  out.n = n;
  if (n == 0) return out;
  std::size_t multi = 0, nulls = 0;
  for (const auto& r : rounds) {
    if (r.multipleCount) ++multi;
    if (r.outcomeAlice == Announcement::Null) ++nulls;
  }
  const double nd = static_cast<double>(n);
  out.multiCount = static_cast<double>(multi) / nd;
  // Honest lossless NULL fraction is 1/2; loss adds lambda/2 on top.
  out.loss = std::clamp(2.0 * static_cast<double>(nulls) / nd - 1.0, 0.0, 1.0);
  return out;
}

Expectations expectedHonest(const channel::ChannelConfig& cfg) {
  enum Dest { ToD1, ToD2, ToDB, ToDC, Lost };
  struct Branch {
    Dest dest;
    double prob;
  };
  const double lam = cfg.lossRate;
  const double dark = cfg.darkRate;

  // [cell][announcement] joint probabilities, cell = 2 * (B is A) + (C is A).
  double announce[4][3] = {};
  double cellProb[4] = {};
  double coincidence = 0.0, multi = 0.0, nulls = 0.0;

  for (int cell = 0; cell < 4; ++cell) {
    const bool bAbsorbs = cell & 2;
    const bool cAbsorbs = cell & 1;
    std::vector<Branch> branches;
    if (!bAbsorbs && !cAbsorbs) {
      branches = {{ToD2, 1.0 - lam}, {Lost, lam}};
    } else if (bAbsorbs && cAbsorbs) {
      branches = {{ToDB, 0.5}, {ToDC, 0.5}};
    } else {
      branches = {{bAbsorbs ? ToDB : ToDC, 0.5}, {ToD1, 0.25 * (1.0 - lam)}, {ToD2, 0.25 * (1.0 - lam)}, {Lost, 0.5 * lam}};
    }
    const double w = 0.25;
    cellProb[cell] = w;
    // Dark-count patterns over D1, D2, DB, DC; absent detectors never fire.
    for (int mask = 0; mask < 16; ++mask) {
      const bool dk[4] = {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)};
      if ((dk[2] && !bAbsorbs) || (dk[3] && !cAbsorbs)) continue;
      double pm = 1.0;
      const bool present[4] = {true, true, bAbsorbs, cAbsorbs};
      for (int d = 0; d < 4; ++d) {
        if (present[d]) pm *= dk[d] ? dark : 1.0 - dark;
      }
      for (const auto& br : branches) {
        const double p = w * br.prob * pm;
        if (p == 0.0) continue;
        const int clicks = (br.dest != Lost ? 1 : 0) + dk[0] + dk[1] + dk[2] + dk[3];
        Announcement a = Announcement::Null;
        if (br.dest == ToD1) {
          a = Announcement::D1;
        } else if (br.dest == ToD2) {
          a = Announcement::D2;
        } else if (dk[0]) {
          a = Announcement::D1;
        } else if (dk[1]) {
          a = Announcement::D2;
        }
        announce[cell][static_cast<int>(a)] += p;
        const bool clickB = br.dest == ToDB || dk[2];
        const bool clickC = br.dest == ToDC || dk[3];
        if (cell == 3 && clickB && clickC) coincidence += p;
        if (clicks >= 2) multi += p;
        if (a == Announcement::Null) nulls += p;
      }
    }
  }

  Expectations ex;
  ex.kappa = coincidence / cellProb[3];
  ex.kappaVariance = ex.kappa * (1.0 - ex.kappa);

  const double ff1 = announce[0][0], ff2 = announce[0][1];
  ex.visibility = (ff2 - ff1) / (ff1 + ff2);
  const double q = ff1 / (ff1 + ff2);
  ex.visibilityVariance = 4.0 * q * (1.0 - q);

  for (int cell : {1, 2}) {
    const double p1 = announce[cell][0] / cellProb[cell];
    const double p2 = announce[cell][1] / cellProb[cell];
    ex.bias = std::max(ex.bias, std::abs(p1 - p2));
    ex.biasVariance = std::max(ex.biasVariance, p1 + p2 - (p1 - p2) * (p1 - p2));
  }

  const double d1 = announce[0][0] + announce[1][0] + announce[2][0] + announce[3][0];
  ex.d1Fraction = d1;
  ex.errorRate = (announce[0][0] + announce[3][0]) / d1;
  ex.errorRateVariance = ex.errorRate * (1.0 - ex.errorRate);

  ex.multiCount = multi;
  ex.multiCountVariance = multi * (1.0 - multi);

  ex.loss = std::clamp(2.0 * nulls - 1.0, 0.0, 1.0);
  const double clickFraction = 1.0 - nulls;
  ex.lossVariance = 4.0 * clickFraction * (1.0 - clickFraction);
  return ex;
}

std::string_view figureName(Figure f) {
  switch (f) {
    case Figure::Coincidence: return "coincidence";
    case Figure::Visibility: return "visibility";
    case Figure::Bias: return "bias";
    case Figure::ErrorRate: return "errorRate";
    case Figure::MultiCount: return "multiCount";
    case Figure::Loss: return "loss";
  }
  return "?";
}

std::vector<Figure> MeritReport::failures() const {
  std::vector<Figure> out;
  for (const auto& f : figures) {
    if (!f.pass) out.push_back(f.figure);
  }
  return out;
}

std::string Verdict::describe() const {
  if (keyProduced) return "KeyProduced";
  std::string s = "Aborted(";
  for (std::size_t i = 0; i < reasons.size(); ++i) {
    if (i) s += ',';
    s += figureName(reasons[i]);
  }
  return s + ")";
}

Verdict abortDecision(MeritReport& report, const TolerancePolicy& policy) {
  // Under the probe attack V = 1 - sin^2 and e = sin^2 / (1 + sin^2), so e = (1 - V) / (2 - V).
  const double ceilingVisibility = (1.0 - 2.0 * policy.errorCeiling) / (1.0 - policy.errorCeiling);
  for (auto& f : report.figures) {
    const double sigma = f.count > 0 ? std::sqrt(f.variance / static_cast<double>(f.count)) : 0.0;
    const double tol = std::max(policy.floor, policy.z * sigma);
    switch (f.figure) {
      case Figure::ErrorRate:
        f.lower = 0.0;
        f.upper = policy.errorCeiling;
        break;
      case Figure::Visibility:
        f.lower = std::min(f.expected, ceilingVisibility) - tol;
        f.upper = 1.0;
        break;
      default:
        f.lower = f.expected - tol;
        f.upper = f.expected + tol;
        break;
    }
    const bool inBand = f.figure == Figure::ErrorRate ? f.value < f.upper : (f.value >= f.lower && f.value <= f.upper);
    f.pass = f.available && inBand;
  }
  Verdict v;
  v.reasons = report.failures();
  v.keyProduced = v.reasons.empty();
  report.pass = v.keyProduced;
  return v;
}

MeritReport buildReport(std::span<const RoundRecord> sample, std::span<const RoundRecord> all,
                        const channel::ChannelConfig& cfg, const TolerancePolicy& policy) {
  const Expectations ex = expectedHonest(cfg);
  MeritReport report;
  report.n = all.size();

  auto fill = [&](Figure fig, auto estimator, double expected, double variance) {
    FigureCheck& f = report[fig];
    f.figure = fig;
    f.expected = expected;
    f.variance = variance;
    try {
      const Estimate e = estimator(sample);
      f.value = e.value;
      f.count = e.count;
      f.available = true;
    } catch (const InsufficientSample&) {
      f.available = false;
    }
  };
  fill(Figure::Coincidence, estimateKappa, ex.kappa, ex.kappaVariance);
  fill(Figure::Visibility, estimateVisibility, ex.visibility, ex.visibilityVariance);
  fill(Figure::Bias, estimateBias, ex.bias, ex.biasVariance);
  fill(Figure::ErrorRate, estimateErrorRate, ex.errorRate, ex.errorRateVariance);

  const Rates rates = estimateRatesRLambda(all, all.size());
  auto& r = report[Figure::MultiCount];
  r = {Figure::MultiCount, !all.empty(), rates.multiCount, ex.multiCount, ex.multiCountVariance, all.size()};
  auto& l = report[Figure::Loss];
  l = {Figure::Loss, !all.empty(), rates.loss, ex.loss, ex.lossVariance, all.size()};

  abortDecision(report, policy);
  return report;
}

std::string toKeyValue(const MeritReport& report) {
  std::string s = "n = " + std::to_string(report.n) + "\n";
  for (const auto& f : report.figures) {
    const std::string name(figureName(f.figure));
    s += name + " = " + (f.available ? fmt12(f.value) : std::string("NA")) + "\n";
    s += name + ".expected = " + fmt12(f.expected) + "\n";
    s += name + ".count = " + std::to_string(f.count) + "\n";
    s += name + ".accept = [" + fmt12(f.lower) + ", " + fmt12(f.upper) + "]\n";
    s += name + ".pass = " + (f.pass ? "true" : "false") + "\n";
  }
  Verdict v;
  v.reasons = report.failures();
  v.keyProduced = v.reasons.empty();
  s += "verdict = " + v.describe() + "\n";
  return s;
}

std::string csvHeader() { return "n,kappa,visibility,bias,errorRate,r,lambda,verdict"; }

std::string toCsvRow(const MeritReport& report) {
  std::string s = std::to_string(report.n);
  for (Figure f : {Figure::Coincidence, Figure::Visibility, Figure::Bias, Figure::ErrorRate, Figure::MultiCount,
                   Figure::Loss}) {
    s += ',';
    s += report[f].available ? fmt12(report[f].value) : std::string("NA");
  }
  s += report.pass ? ",pass" : ",abort";
  return s;
}

}  // namespace cqca::metrics
