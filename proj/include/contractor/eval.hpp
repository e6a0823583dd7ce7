#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "contractor/agent.hpp"
#include "contractor/contract.hpp"
#include "contractor/kernel.hpp"
#include "contractor/workspace.hpp"

namespace contractor {

struct Metric {
  double value = 1.0;
  std::string warning;  // set when the value is a convention (empty denominator)
};

// F1 of the generated file set against the reference set.
inline Metric s_arch(const std::set<std::string>& gen, const std::set<std::string>& ref) {
  if (gen.empty() && ref.empty()) return {1.0, "both file sets empty; s_arch defined as 1"};
  std::size_t common = 0;
  for (const auto& p : gen) common += ref.count(p);
  return {2.0 * static_cast<double>(common) / static_cast<double>(gen.size() + ref.size()), {}};
}

struct LinkMetric {
  Metric metric;
  std::vector<ImportCheck> checks;
};

// Fraction of internal imports that resolve to a defined symbol.
inline LinkMetric s_link(const Workspace& ws) {
  LinkMetric out;
  out.checks = resolve_imports(ws);
  if (out.checks.empty()) {
    out.metric = {1.0, "no internal imports; s_link defined as 1"};
    return out;
  }
  std::size_t valid = 0;
  for (const auto& c : out.checks) valid += c.valid ? 1 : 0;
  out.metric.value = static_cast<double>(valid) / static_cast<double>(out.checks.size());
  return out;
}

// Mean of the three dynamic sub-scores, as a percentage.
inline double s_overall(double exec, double inter, double rule) {
  for (double x : {exec, inter, rule})
    if (!(x >= 0.0 && x <= 1.0)) throw ScoreRangeError("score " + std::to_string(x) + " outside [0,1]");
  return (exec + inter + rule) / 3.0 * 100.0;
}

struct TokenReport {
  std::size_t contract_tokens = 0;
  std::size_t repo_tokens = 0;
  double ratio = 0.0;
};

inline TokenReport token_report(const LanguageContract& c, const Workspace& ws, const TokenEstimator& estimator = estimate_tokens) {
  TokenReport r;
  r.contract_tokens = estimator(render(c));
  for (const auto& [_, u] : ws.files()) r.repo_tokens += estimator(u.body);
  if (r.contract_tokens == 0) throw RatioUndefined("contract has zero tokens");
  r.ratio = static_cast<double>(r.repo_tokens) / static_cast<double>(r.contract_tokens);
  return r;
}

// Newline-delimited path list; blank lines and '#' comments skipped.
inline std::set<std::string> read_manifest(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto p = normalize_path(t);
    if (!p) throw ConfigError("manifest path '" + t + "' escapes the root");
    out.insert(*p);
  }
  return out;
}

inline std::set<std::string> read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  return read_manifest(in);
}

struct DynamicScores {
  double exec = 0, inter = 0, rule = 0;
};

// Scores file: {"<task>": {"exec": x, "inter": y, "rule": z}, ...}
inline std::map<std::string, DynamicScores> parse_scores(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scores file must hold a JSON object");
  std::map<std::string, DynamicScores> out;
  for (const auto& [task, v] : j.items()) {
    try {
      out[task] = {v.at("exec").get<double>(), v.at("inter").get<double>(), v.at("rule").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("scores for '" + task + "': " + e.what());
    }
  }
  return out;
}

struct EvalReport {
  std::optional<Metric> arch;
  Metric link;
  std::vector<ImportCheck> imports;
  std::optional<TokenReport> tokens;
  std::map<std::string, DynamicScores> scores;
};

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  std::vector<std::string> warnings;
  if (r.arch) {
    j["s_arch"] = r.arch->value;
    if (!r.arch->warning.empty()) warnings.push_back(r.arch->warning);
  }
  j["s_link"] = r.link.value;
  if (!r.link.warning.empty()) warnings.push_back(r.link.warning);
  nlohmann::json dangling = nlohmann::json::array();
  for (const auto& c : r.imports)
    if (!c.valid)
      dangling.push_back({{"file", c.file}, {"module", c.import.module}, {"symbol", c.import.symbol}, {"line", c.import.line}});
  j["internal_imports"] = r.imports.size();
  j["dangling_imports"] = dangling;
  if (r.tokens)
    j["tokens"] = {{"contract", r.tokens->contract_tokens}, {"repository", r.tokens->repo_tokens}, {"ratio", r.tokens->ratio}};
  if (!r.scores.empty()) {
    nlohmann::json s;
    for (const auto& [task, d] : r.scores)
      s[task] = {{"exec", d.exec}, {"inter", d.inter}, {"rule", d.rule}, {"s_overall", s_overall(d.exec, d.inter, d.rule)}};
    j["dynamic"] = s;
  }
  j["warnings"] = warnings;
  return j;
}

}  // namespace contractor
