#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cqca/channel.hpp"
#include "cqca/metrics.hpp"

namespace cqca {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  enum class Command : std::uint8_t { Simulate, Protocol, Analyze, Threshold };
  enum class Format : std::uint8_t { Text, Csv, JsonLines };

  Command command = Command::Simulate;
  std::uint64_t n = 100000;
  double f = 0.25;
  std::uint64_t seed = 1;
  channel::AttackConfig attack;
  channel::ChannelConfig channel;
  metrics::TolerancePolicy tolerance;
  std::string out;
  Format format = Format::Text;
  std::uint64_t grid = 200;    ///< analyze: number of theta points
  double bisectionTol = 1e-10;  ///< threshold
  unsigned threads = 0;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Every accepted key, in the order toConfigText writes them.
const std::vector<std::string_view>& configKeys();

/// Sets one field from its textual form; unknown keys and bad values throw ConfigError.
void applyKeyValue(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment; blank lines ignored.
RunConfig parseConfigText(std::string_view text, RunConfig base = {});
RunConfig loadConfigFile(const std::string& path, RunConfig base = {});

/// Inverse of parseConfigText for every key (doubles written round-trip exact).
std::string toConfigText(const RunConfig& cfg);

std::string_view commandName(RunConfig::Command c);

}  // namespace cqca
