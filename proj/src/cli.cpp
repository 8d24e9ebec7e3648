#include "cqca/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqca/analysis.hpp"
#include "cqca/photonics.hpp"

namespace cqca::cli {

namespace {

using nlohmann::json;

std::string fmt(double v, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

int cellIndex(Action b, Action c) { return (b == Action::A ? 2 : 0) + (c == Action::A ? 1 : 0); }

struct CellCounts {
  std::array<std::array<std::size_t, 3>, 4> n{};
  std::array<std::size_t, 4> total{};
};

CellCounts countCells(std::span<const parties::RoundTrace> traces) {
  CellCounts c;
  for (const auto& t : traces) {
    const int k = cellIndex(t.record.settingB, t.record.settingC);
    ++c.n[k][static_cast<int>(t.record.outcomeAlice)];
    ++c.total[k];
  }
  return c;
}

std::array<double, 3> strategyOutcome(channel::SinglePathStrategy s) {
  if (s == channel::SinglePathStrategy::RandomQuarter) return {0.25, 0.75, 0.0};
  return {0.0, 1.0, 0.0};
}

bool eveActive(const RunConfig& cfg) { return channel::eveAttacksOnwardLeg(cfg.channel, cfg.attack); }

}  // namespace

std::array<double, 3> predictedCell(Action b, Action c, const RunConfig& cfg) {
  const double lam = cfg.channel.lossRate;
  const double s2 = eveActive(cfg) ? std::pow(std::sin(cfg.attack.theta), 2) : 0.0;

  std::array<double, 3> honest{};
  if (b == Action::F && c == Action::F) {
    honest = {(1 - lam) * s2 / 2, (1 - lam) * (1 - s2 / 2), lam};
  } else if (b == Action::A && c == Action::A) {
    honest = {0.0, 0.0, 1.0};
  } else {
    honest = {(1 - lam) / 4, (1 - lam) / 4, 0.5 + lam / 2};
  }

  using channel::AttackKind;
  if (cfg.attack.kind != AttackKind::AliceSinglePath) return honest;  // double path replays the honest table

  std::array<double, 3> attacked{};
  auto addTarget = [&](Action targetSetting, double w) {
    const auto o = targetSetting == Action::A ? std::array<double, 3>{0, 0, 1} : strategyOutcome(cfg.attack.strategy);
    for (int i = 0; i < 3; ++i) attacked[i] += w * o[i];
  };
  switch (cfg.attack.target) {
    case channel::AttackTarget::B: addTarget(b, 1.0); break;
    case channel::AttackTarget::C: addTarget(c, 1.0); break;
    case channel::AttackTarget::Either:
      addTarget(b, 0.5);
      addTarget(c, 0.5);
      break;
  }
  const double p = cfg.attack.p;
  std::array<double, 3> mixed{};
  for (int i = 0; i < 3; ++i) mixed[i] = (1 - p) * honest[i] + p * attacked[i];
  return mixed;
}

std::vector<ComparisonRow> compareWithTheory(std::span<const parties::RoundTrace> traces, const RunConfig& cfg) {
  std::vector<ComparisonRow> rows;
  const CellCounts counts = countCells(traces);
  const char* cellNames[4] = {"FF", "FA", "AF", "AA"};
  const char* outNames[3] = {"D1", "D2", "NULL"};

  std::array<std::array<double, 3>, 4> theory{};
  for (int k = 0; k < 4; ++k) {
    const Action b = (k & 2) ? Action::A : Action::F;
    const Action c = (k & 1) ? Action::A : Action::F;
    theory[k] = predictedCell(b, c, cfg);
    for (int o = 0; o < 3; ++o) {
      const double emp = counts.total[k] ? static_cast<double>(counts.n[k][o]) / static_cast<double>(counts.total[k]) : 0.0;
      rows.push_back({std::string("P(") + outNames[o] + "|" + cellNames[k] + ")", emp, theory[k][o], counts.total[k]});
    }
  }

  double d1Theory = 0.0;
  std::size_t d1 = 0;
  for (int k = 0; k < 4; ++k) {
    d1Theory += theory[k][0] / 4;
    d1 += counts.n[k][0];
  }
  rows.push_back({"P(D1)", traces.empty() ? 0.0 : static_cast<double>(d1) / static_cast<double>(traces.size()), d1Theory,
                  traces.size()});

  const auto records = parties::recordsOf(traces);
  auto addEstimate = [&](const char* name, auto estimator, double predicted) {
    try {
      const auto e = estimator(records);
      rows.push_back({name, e.value, predicted, e.count});
    } catch (const metrics::InsufficientSample&) {
      rows.push_back({name, std::nan(""), predicted, 0});
    }
  };
  const double kappaTheory = cfg.attack.kind == channel::AttackKind::AliceDoublePath ? cfg.attack.p : 0.0;
  const auto& ff = theory[0];
  const double visTheory = (ff[1] - ff[0]) / (ff[0] + ff[1]);
  const double biasTheory = std::max(std::abs(theory[1][0] - theory[1][1]), std::abs(theory[2][0] - theory[2][1]));
  const double eTheory = (theory[0][0] + theory[3][0]) / (4 * d1Theory);
  addEstimate("kappa", metrics::estimateKappa, kappaTheory);
  addEstimate("visibility", metrics::estimateVisibility, visTheory);
  addEstimate("bias", metrics::estimateBias, biasTheory);
  addEstimate("errorRate", metrics::estimateErrorRate, eTheory);

  if (eveActive(cfg)) {
    parties::SimulationConfig sim{cfg.channel, cfg.attack, cfg.seed, cfg.threads};
    const auto eve = parties::eveRecords(traces, sim);
    const auto info = adversary::empiricalInformation(eve);
    const double theta = cfg.attack.theta;
    const double helstrom = 1.0 - analysis::binaryEntropy(1.0 - photonics::helstromSuccessProbability(theta));
    rows.push_back({"eve.helstromInformation", info.mutualInformation, helstrom, info.count});
    rows.push_back({"eve.holevoChi", info.mutualInformation, analysis::holevoChi(theta), info.count});
  }
  return rows;
}

namespace {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

void writeEffectiveConfig(const RunConfig& cfg, Streams io) {
  const std::string text = toConfigText(cfg);
  if (cfg.out.empty()) {
    io.err << "# effective-config\n" << text;
    return;
  }
  std::ofstream f(cfg.out + ".effective-config");
  if (!f) throw ConfigError("cannot write " + cfg.out + ".effective-config");
  f << text;
}

json reportJson(const metrics::MeritReport& r) {
  json j;
  j["type"] = "merit";
  j["n"] = r.n;
  for (const auto& f : r.figures) {
    json fj;
    fj["value"] = f.available ? json(f.value) : json(nullptr);
    fj["expected"] = f.expected;
    fj["count"] = f.count;
    fj["accept"] = {f.lower, f.upper};
    fj["pass"] = f.pass;
    j[std::string(metrics::figureName(f.figure))] = fj;
  }
  j["verdict"] = r.pass ? "pass" : "abort";
  return j;
}

void printComparison(const std::vector<ComparisonRow>& rows, RunConfig::Format format, std::ostream& os) {
  if (format == RunConfig::Format::Csv) {
    os << "quantity,empirical,theory,count\n";
    for (const auto& r : rows) os << r.name << ',' << fmt(r.empirical) << ',' << fmt(r.theory) << ',' << r.count << '\n';
  } else if (format == RunConfig::Format::JsonLines) {
    for (const auto& r : rows) {
      json j = {{"type", "comparison"}, {"quantity", r.name}, {"theory", r.theory}, {"count", r.count}};
      j["empirical"] = std::isnan(r.empirical) ? json(nullptr) : json(r.empirical);
      os << j.dump() << '\n';
    }
  } else {
    char line[160];
    std::snprintf(line, sizeof line, "%-26s %14s %14s %10s\n", "quantity", "empirical", "theory", "count");
    os << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-26s %14.6f %14.6f %10zu\n", r.name.c_str(), r.empirical, r.theory, r.count);
      os << line;
    }
  }
}

void printReport(const metrics::MeritReport& report, RunConfig::Format format, std::ostream& os) {
  if (format == RunConfig::Format::Csv) {
    os << metrics::csvHeader() << '\n' << metrics::toCsvRow(report) << '\n';
  } else if (format == RunConfig::Format::JsonLines) {
    os << reportJson(report).dump() << '\n';
  } else {
    os << metrics::toKeyValue(report);
  }
}

std::string abortLine(const metrics::Verdict& v) {
  std::string reasons;
  for (std::size_t i = 0; i < v.reasons.size(); ++i) {
    if (i) reasons += ',';
    reasons += metrics::figureName(v.reasons[i]);
  }
  return "verdict=Aborted reason=" + reasons;
}

int runSimulate(const RunConfig& cfg, Streams io) {
  const parties::SimulationConfig sim{cfg.channel, cfg.attack, cfg.seed, cfg.threads};
  const auto traces = parties::simulateRounds(cfg.n, sim);
  const auto records = parties::recordsOf(traces);
  const auto report = metrics::buildReport(records, records, cfg.channel, cfg.tolerance);
  const auto rows = compareWithTheory(traces, cfg);

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw ConfigError("cannot write " + cfg.out);
  }
  std::ostream& os = cfg.out.empty() ? io.out : file;
  printReport(report, cfg.format, os);
  if (cfg.format != RunConfig::Format::JsonLines) os << '\n';
  printComparison(rows, cfg.format, os);
  return kOk;
}

int runProtocolCommand(const RunConfig& cfg, Streams io) {
  const parties::SimulationConfig sim{cfg.channel, cfg.attack, cfg.seed, cfg.threads};
  const auto result = parties::runProtocol(cfg.n, cfg.f, sim, cfg.tolerance);
  const std::string path = cfg.out.empty() ? "transcript.txt" : cfg.out;
  {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    writeRoundRecords(f, result.transcript.rounds);
  }
  {
    std::ofstream f(path + ".packets", std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path + ".packets");
    std::vector<std::uint8_t> bytes;
    for (const auto& p : result.transcript.packets) appendPacket(p, bytes);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }

  const auto& v = result.transcript.verdict;
  if (cfg.format == RunConfig::Format::JsonLines) {
    io.out << reportJson(result.report).dump() << '\n';
    json j = {{"type", "protocol"}, {"verdict", v.describe()}, {"transcript", path}};
    if (v.keyProduced) {
      j["key_length"] = result.keys.bob.size();
      j["key_bob"] = parties::bitsToHex(result.keys.bob);
      j["key_charlie"] = parties::bitsToHex(result.keys.charlie);
      j["key_mismatches"] = result.keys.mismatches();
    }
    io.out << j.dump() << '\n';
  } else {
    printReport(result.report, cfg.format, io.out);
    io.out << "transcript = " << path << '\n';
    if (v.keyProduced) {
      io.out << "verdict=KeyProduced\n";
      io.out << "key_length = " << result.keys.bob.size() << '\n';
      io.out << "key_mismatches = " << result.keys.mismatches() << '\n';
      io.out << "key_bob = " << parties::bitsToHex(result.keys.bob) << '\n';
      io.out << "key_charlie = " << parties::bitsToHex(result.keys.charlie) << '\n';
    }
  }
  if (!v.keyProduced) {
    io.out << abortLine(v) << '\n';
    io.err << "protocol aborted: " << v.describe() << '\n';
    return kAborted;
  }
  return kOk;
}

int runAnalyze(const RunConfig& cfg, Streams io) {
  const auto curve = analysis::sweepCurves(analysis::uniformGrid(cfg.grid));
  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw ConfigError("cannot write " + cfg.out);
  }
  std::ostream& os = cfg.out.empty() ? io.out : file;
  if (cfg.format == RunConfig::Format::JsonLines) {
    for (const auto& p : curve) {
      os << json{{"theta", p.theta}, {"e", p.e}, {"visibility", p.visibility}, {"e1", p.e1},
                 {"chi", p.chi},     {"i_bc", p.iBC}, {"key_rate", p.keyRate}}
                .dump()
         << '\n';
    }
  } else {
    analysis::writeCurveCsv(os, curve);
  }
  return kOk;
}

int runThreshold(const RunConfig& cfg, Streams io) {
  const auto t = analysis::securityThreshold(cfg.bisectionTol);
  if (cfg.format == RunConfig::Format::JsonLines) {
    io.out << json{{"theta_star", t.theta}, {"e_star", t.e}}.dump() << '\n';
  } else if (cfg.format == RunConfig::Format::Csv) {
    io.out << "theta_star,e_star\n" << fmt(t.theta, 10) << ',' << fmt(t.e, 10) << '\n';
  } else {
    io.out << "theta_star = " << fmt(t.theta, 10) << '\n' << "e_star = " << fmt(t.e, 10) << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual quantum certificate authorization simulator"};
  app.require_subcommand(0, 1);
  std::string configPath;
  app.add_option("--config", configPath, "flat key = value configuration file");

  struct Sub {
    CLI::App* app;
    RunConfig::Command command;
  };
  std::vector<Sub> subs = {
      {app.add_subcommand("simulate", "Monte Carlo figures of merit versus closed forms"), RunConfig::Command::Simulate},
      {app.add_subcommand("protocol", "full session with disclosure, checks and sifting"), RunConfig::Command::Protocol},
      {app.add_subcommand("analyze", "security curve CSV over a theta grid"), RunConfig::Command::Analyze},
      {app.add_subcommand("threshold", "theta* and e* where the key rate vanishes"), RunConfig::Command::Threshold}};

  // One string slot per key and subcommand; applied after the config file so flags win.
  std::vector<std::vector<std::pair<std::string, CLI::Option*>>> slots(subs.size());
  std::vector<std::vector<std::string>> values(subs.size(), std::vector<std::string>(configKeys().size()));
  for (std::size_t s = 0; s < subs.size(); ++s) {
    subs[s].app->add_option("--config", configPath, "flat key = value configuration file");
    for (std::size_t k = 0; k < configKeys().size(); ++k) {
      const std::string key(configKeys()[k]);
      if (key == "command") continue;
      slots[s].emplace_back(key, subs[s].app->add_option("--" + key, values[s][k]));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    RunConfig cfg;
    if (!configPath.empty()) cfg = loadConfigFile(configPath, cfg);
    for (std::size_t s = 0; s < subs.size(); ++s) {
      if (!subs[s].app->parsed()) continue;
      cfg.command = subs[s].command;
      for (std::size_t k = 0; k < slots[s].size(); ++k) {
        if (slots[s][k].second->count() > 0) applyKeyValue(cfg, slots[s][k].first, slots[s][k].second->results().back());
      }
    }
    if (app.get_subcommands().empty() && configPath.empty()) {
      out << app.help();
      return kUsage;
    }
    cfg.validate();
    writeEffectiveConfig(cfg, {out, err});
    switch (cfg.command) {
      case RunConfig::Command::Simulate: return runSimulate(cfg, {out, err});
      case RunConfig::Command::Protocol: return runProtocolCommand(cfg, {out, err});
      case RunConfig::Command::Analyze: return runAnalyze(cfg, {out, err});
      case RunConfig::Command::Threshold: return runThreshold(cfg, {out, err});
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cqca::cli
