#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cqca/config.hpp"
#include "cqca/parties.hpp"

namespace cqca::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kAborted = 2 };

/// Alice's outcome distribution {D1, D2, NULL} for one settings cell under the
/// configured channel and attack, ignoring dark counts.
std::array<double, 3> predictedCell(Action settingB, Action settingC, const RunConfig& cfg);

struct ComparisonRow {
  std::string name;
  double empirical = 0.0;
  double theory = 0.0;
  std::size_t count = 0;
};

/// Empirical estimates next to closed-form predictions for every simulated round.
std::vector<ComparisonRow> compareWithTheory(std::span<const parties::RoundTrace> traces, const RunConfig& cfg);

/// Entry point used by the executable. Output streams are injectable for tests.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqca::cli
