#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cqca/channel.hpp"
#include "cqca/record.hpp"

namespace cqca::metrics {

class InsufficientSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conditional frequency and the number of rounds it was computed from.
struct Estimate {
  double value = 0.0;
  std::size_t count = 0;
};

/// Coincidence rate P(DB DC | AA) over disclosed (A,A) rounds.
Estimate estimateKappa(std::span<const RoundRecord> sample);

/// (n2 - n1) / (n1 + n2) over disclosed (F,F) rounds where Alice saw a click.
Estimate estimateVisibility(std::span<const RoundRecord> sample);

/// max over the (A,F) and (F,A) cells of |P(D1|cell) - P(D2|cell)|; count is the smaller cell.
Estimate estimateBias(std::span<const RoundRecord> sample);

/// Fraction of disclosed D1 rounds with correlated settings, P(FF|D1) + P(AA|D1).
Estimate estimateErrorRate(std::span<const RoundRecord> sample);

struct Rates {
  double multiCount = 0.0;  ///< r
  double loss = 0.0;        ///< lambda-hat
  std::size_t n = 0;
};

/// r = multiple-count rounds / n. lambda-hat inverts the honest NULL fraction
/// (1 + lambda) / 2 and is clamped to [0, 1]. Uses every round, disclosed or not.
Rates estimateRatesRLambda(std::span<const RoundRecord> rounds, std::size_t n);

/// Honest expectation of every figure of merit for a given channel, by exact
/// enumeration over the outcome table, loss and dark-count patterns.
/// `*Variance` members are the per-observation variances used for tolerance bands.
struct Expectations {
  double kappa = 0.0;
  double kappaVariance = 0.0;
  double visibility = 1.0;
  double visibilityVariance = 0.0;
  double bias = 0.0;
  double biasVariance = 0.0;
  double errorRate = 0.0;
  double errorRateVariance = 0.0;
  double multiCount = 0.0;
  double multiCountVariance = 0.0;
  double loss = 0.0;
  double lossVariance = 0.0;
  double d1Fraction = 0.125;  ///< P(Alice announces D1) per round
};

Expectations expectedHonest(const channel::ChannelConfig& cfg);

enum class Figure : std::uint8_t { Coincidence, Visibility, Bias, ErrorRate, MultiCount, Loss };
inline constexpr std::size_t kFigureCount = 6;

std::string_view figureName(Figure f);

struct TolerancePolicy {
  double floor = 0.02;
  double z = 4.0;
  /// Largest error rate with a positive asymptotic key rate.
  double errorCeiling = 0.1425;

  bool operator==(const TolerancePolicy&) const = default;
};

struct FigureCheck {
  Figure figure = Figure::Coincidence;
  bool available = false;
  double value = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
  /// Filled by abortDecision: accepted band is [lower, upper].
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
};

struct MeritReport {
  std::uint64_t n = 0;
  std::array<FigureCheck, kFigureCount> figures{};
  bool pass = false;

  FigureCheck& operator[](Figure f) { return figures[static_cast<std::size_t>(f)]; }
  const FigureCheck& operator[](Figure f) const { return figures[static_cast<std::size_t>(f)]; }
  std::vector<Figure> failures() const;
};

struct Verdict {
  bool keyProduced = false;
  std::vector<Figure> reasons;

  /// "KeyProduced" or "Aborted(<comma-separated figures>)".
  std::string describe() const;
};

/// Fills the acceptance band and pass flag of every figure.
///
/// Coincidence, bias, multi-count and loss must lie within
/// max(floor, z * sigma) of their honest expectation. The error rate must stay
/// below the security ceiling, and the visibility must not fall below the
/// visibility implied by that ceiling, (1 - 2e) / (1 - e), by more than the
/// same tolerance. A figure that could not be estimated fails.
Verdict abortDecision(MeritReport& report, const TolerancePolicy& policy);

/// Estimates every figure from the disclosed sample (conditional figures) and
/// the full announcement stream (r, lambda-hat), then applies abortDecision.
MeritReport buildReport(std::span<const RoundRecord> sample, std::span<const RoundRecord> all,
                        const channel::ChannelConfig& cfg, const TolerancePolicy& policy);

/// Flat `key = value` block.
std::string toKeyValue(const MeritReport& report);

/// Column order: n, kappa, visibility, bias, errorRate, r, lambda, verdict.
std::string csvHeader();
std::string toCsvRow(const MeritReport& report);

}  // namespace cqca::metrics
