#include "cqca/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cqca {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "': " + std::string(why));
}

double toDouble(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d)) bad(key, v, "expected a finite number");
  return d;
}

std::uint64_t toU64(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return x;
}

bool toBool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "expected true or false");
}

// Shortest representation that parses back to the same double.
std::string exact(double d) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

std::string_view attackName(channel::AttackKind k) {
  switch (k) {
    case channel::AttackKind::None: return "none";
    case channel::AttackKind::EveProbe: return "eve";
    case channel::AttackKind::AliceSinglePath: return "alice-single";
    case channel::AttackKind::AliceDoublePath: return "alice-double";
  }
  return "none";
}

std::string_view formatName(RunConfig::Format f) {
  switch (f) {
    case RunConfig::Format::Text: return "text";
    case RunConfig::Format::Csv: return "csv";
    case RunConfig::Format::JsonLines: return "json-lines";
  }
  return "text";
}

std::string_view targetName(channel::AttackTarget t) {
  switch (t) {
    case channel::AttackTarget::B: return "B";
    case channel::AttackTarget::C: return "C";
    case channel::AttackTarget::Either: return "either";
  }
  return "either";
}

}  // namespace

std::string_view commandName(RunConfig::Command c) {
  switch (c) {
    case RunConfig::Command::Simulate: return "simulate";
    case RunConfig::Command::Protocol: return "protocol";
    case RunConfig::Command::Analyze: return "analyze";
    case RunConfig::Command::Threshold: return "threshold";
  }
  return "simulate";
}

const std::vector<std::string_view>& configKeys() {
  static const std::vector<std::string_view> keys = {
      "command", "n",     "f",        "seed",          "attack",  "theta",    "p",           "strategy",
      "target",  "knows-schedule", "loss", "dark-rate", "timing-jitter", "tol-floor", "tol-z", "error-ceiling",
      "out",     "format", "grid",    "tol",           "threads"};
  return keys;
}

void applyKeyValue(RunConfig& cfg, std::string_view key, std::string_view rawValue) {
  const std::string_view v = trim(rawValue);
  if (key == "command") {
    if (v == "simulate") cfg.command = RunConfig::Command::Simulate;
    else if (v == "protocol") cfg.command = RunConfig::Command::Protocol;
    else if (v == "analyze") cfg.command = RunConfig::Command::Analyze;
    else if (v == "threshold") cfg.command = RunConfig::Command::Threshold;
    else bad(key, v, "expected simulate, protocol, analyze or threshold");
  } else if (key == "n") {
    cfg.n = toU64(key, v);
  } else if (key == "f") {
    cfg.f = toDouble(key, v);
  } else if (key == "seed") {
    cfg.seed = toU64(key, v);
  } else if (key == "attack") {
    if (v == "none") cfg.attack.kind = channel::AttackKind::None;
    else if (v == "eve") cfg.attack.kind = channel::AttackKind::EveProbe;
    else if (v == "alice-single") cfg.attack.kind = channel::AttackKind::AliceSinglePath;
    else if (v == "alice-double") cfg.attack.kind = channel::AttackKind::AliceDoublePath;
    else bad(key, v, "expected none, eve, alice-single or alice-double");
  } else if (key == "theta") {
    cfg.attack.theta = toDouble(key, v);
  } else if (key == "p") {
    cfg.attack.p = toDouble(key, v);
  } else if (key == "strategy") {
    if (v == "random-quarter") cfg.attack.strategy = channel::SinglePathStrategy::RandomQuarter;
    else if (v == "always-d2") cfg.attack.strategy = channel::SinglePathStrategy::AlwaysD2;
    else bad(key, v, "expected random-quarter or always-d2");
  } else if (key == "target") {
    if (v == "B" || v == "b") cfg.attack.target = channel::AttackTarget::B;
    else if (v == "C" || v == "c") cfg.attack.target = channel::AttackTarget::C;
    else if (v == "either") cfg.attack.target = channel::AttackTarget::Either;
    else bad(key, v, "expected B, C or either");
  } else if (key == "knows-schedule") {
    cfg.attack.knowsSchedule = toBool(key, v);
  } else if (key == "loss") {
    cfg.channel.lossRate = toDouble(key, v);
  } else if (key == "dark-rate") {
    cfg.channel.darkRate = toDouble(key, v);
  } else if (key == "timing-jitter") {
    cfg.channel.timingJitter = toBool(key, v);
  } else if (key == "tol-floor") {
    cfg.tolerance.floor = toDouble(key, v);
  } else if (key == "tol-z") {
    cfg.tolerance.z = toDouble(key, v);
  } else if (key == "error-ceiling") {
    cfg.tolerance.errorCeiling = toDouble(key, v);
  } else if (key == "out") {
    cfg.out = std::string(v);
  } else if (key == "format") {
    if (v == "text") cfg.format = RunConfig::Format::Text;
    else if (v == "csv") cfg.format = RunConfig::Format::Csv;
    else if (v == "json-lines") cfg.format = RunConfig::Format::JsonLines;
    else bad(key, v, "expected text, csv or json-lines");
  } else if (key == "grid") {
    cfg.grid = toU64(key, v);
  } else if (key == "tol") {
    cfg.bisectionTol = toDouble(key, v);
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(toU64(key, v));
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  try {
    attack.validate();
    channel.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n == 0) throw ConfigError("n must be positive");
  if (command == Command::Protocol && !(f > 0.0 && f < 1.0)) throw ConfigError("f must lie in (0, 1)");
  if (!(tolerance.floor >= 0.0) || !(tolerance.z >= 0.0)) throw ConfigError("tolerances must be non-negative");
  if (!(tolerance.errorCeiling > 0.0 && tolerance.errorCeiling < 0.5)) {
    throw ConfigError("error-ceiling must lie in (0, 1/2)");
  }
  if (grid == 0) throw ConfigError("grid must be positive");
  if (!(bisectionTol > 0.0)) throw ConfigError("tol must be positive");
}

RunConfig parseConfigText(std::string_view text, RunConfig base) {
  std::size_t lineNo = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineNo) + ": expected 'key = value'");
    }
    applyKeyValue(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig loadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfigText(ss.str(), std::move(base));
}

std::string toConfigText(const RunConfig& c) {
  std::string s;
  auto kv = [&](std::string_view k, std::string_view v) {
    s.append(k).append(" = ").append(v).append("\n");
  };
  kv("command", commandName(c.command));
  kv("n", std::to_string(c.n));
  kv("f", exact(c.f));
  kv("seed", std::to_string(c.seed));
  kv("attack", attackName(c.attack.kind));
  kv("theta", exact(c.attack.theta));
  kv("p", exact(c.attack.p));
  kv("strategy", c.attack.strategy == channel::SinglePathStrategy::RandomQuarter ? "random-quarter" : "always-d2");
  kv("target", targetName(c.attack.target));
  kv("knows-schedule", c.attack.knowsSchedule ? "true" : "false");
  kv("loss", exact(c.channel.lossRate));
  kv("dark-rate", exact(c.channel.darkRate));
  kv("timing-jitter", c.channel.timingJitter ? "true" : "false");
  kv("tol-floor", exact(c.tolerance.floor));
  kv("tol-z", exact(c.tolerance.z));
  kv("error-ceiling", exact(c.tolerance.errorCeiling));
  kv("out", c.out);
  kv("format", formatName(c.format));
  kv("grid", std::to_string(c.grid));
  kv("tol", exact(c.bisectionTol));
  kv("threads", std::to_string(c.threads));
  return s;
}

}  // namespace cqca
