// contractor: generate, audit, eval and replay from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "contractor/contractor.hpp"
#include "contractor/remote_backend.hpp"

namespace fs = std::filesystem;
using namespace contractor;
using nlohmann::json;

namespace {

constexpr const char* kMetaDir = ".contract";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& body) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw Error("IoError", "cannot write " + p.string());
}

struct RunOptions {
  std::string intent;
  std::string out;
  std::string backend = "scripted";
  std::string transcript;
  std::string model = "gpt-4o-2024-11-20";
  std::string base_url = "https://api.openai.com/v1";
  double temperature = 0.0;
  std::size_t context_limit = 16384;
  int t_max = 8;
  int attempt_cap = 3;
  std::string mode = "PARALLEL";
  bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool replay) {
  cmd->add_option("--intent", o.intent, "File holding the user intent")->required()->check(CLI::ExistingFile);
  cmd->add_option("--transcript", o.transcript, "Transcript JSONL (scripted: read, record: written)");
  if (!replay) {
    cmd->add_option("--out", o.out, "Output directory for the generated repository")->required();
    cmd->add_option("--backend", o.backend, "remote, scripted or record")
        ->check(CLI::IsMember({"remote", "scripted", "record"}))
        ->capture_default_str();
    cmd->add_option("--model", o.model, "Model id for the remote backend")->capture_default_str();
    cmd->add_option("--base-url", o.base_url, "Chat-completion endpoint base URL")->capture_default_str();
    cmd->add_option("--temperature", o.temperature, "Sampling temperature")->check(CLI::NonNegativeNumber)->capture_default_str();
  } else {
    cmd->add_option("--out", o.out, "Optional directory for the replayed repository");
  }
  cmd->add_option("--context-limit", o.context_limit, "Prompt limit in estimated tokens")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--t-max", o.t_max, "Maximum number of layers")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--attempt-cap", o.attempt_cap, "Worker dispatches per task before it is parked")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--mode", o.mode, "PARALLEL, SEQUENTIAL or NO_CONTRACT")
      ->transform([](std::string s) {
        auto m = parse_mode(s);
        if (!m) throw CLI::ValidationError("--mode", "expected PARALLEL, SEQUENTIAL or NO_CONTRACT");
        return std::string(to_string(*m));
      })
      ->capture_default_str();
  cmd->add_flag("--quiet", o.quiet, "Suppress progress events on stderr");
}

RunConfig run_config(const RunOptions& o) {
  RunConfig cfg;
  cfg.t_max = o.t_max;
  cfg.attempt_cap = o.attempt_cap;
  cfg.mode = *parse_mode(o.mode);
  cfg.model = o.model;
  cfg.temperature = o.temperature;
  cfg.context_limit = o.context_limit;
  return cfg;
}

EventSink progress(bool quiet) {
  if (quiet) return {};
  return [](const json& j) { std::cerr << j.dump() << "\n"; };
}

json run_summary(const RunResult& r) {
  json tasks = json::object();
  for (const auto& t : r.tasks) tasks[t.id] = {{"status", to_string(t.status)}, {"attempts", t.attempts}, {"feedback", t.feedback}};
  return {{"converged", r.converged()},
          {"best_effort", r.best_effort},
          {"layers", r.layers},
          {"tasks", tasks},
          {"workspace", r.workspace.hashes()},
          {"contract_sha256", sha256_hex(render(r.contract))},
          {"ledger_sha256", sha256_hex(r.ledger_jsonl())}};
}

void save_run(const RunResult& r, const fs::path& out) {
  r.workspace.save(out);
  auto meta = out / kMetaDir;
  write_file(meta / "contract.contract.md", render(r.contract));
  write_file(meta / "contract.journal.jsonl", r.journal.to_jsonl());
  write_file(meta / "run.ledger.jsonl", r.ledger_jsonl());
}

int cmd_generate(const RunOptions& o) {
  if ((o.backend == "scripted" || o.backend == "record") && o.transcript.empty())
    throw UsageError("--backend " + o.backend + " requires --transcript");
  auto intent = slurp(o.intent);
  auto cfg = run_config(o);
  RunResult result;
  if (o.backend == "scripted") {
    ScriptedBackend backend(read_transcript_file(o.transcript));
    result = run(intent, cfg, backend, progress(o.quiet));
  } else {
    RemoteConfig rc;
    rc.base_url = o.base_url;
    rc.model = o.model;
    rc.temperature = o.temperature;
    RemoteBackend remote(rc);
    if (o.backend == "record") {
      std::ofstream sink(o.transcript, std::ios::binary);
      if (!sink) throw ConfigError("cannot write transcript '" + o.transcript + "'");
      RecordingBackend rec(remote, sink);
      result = run(intent, cfg, rec, progress(o.quiet));
    } else {
      result = run(intent, cfg, remote, progress(o.quiet));
    }
  }
  save_run(result, o.out);
  std::cout << run_summary(result).dump(2) << "\n";
  return 0;
}

int cmd_replay(const RunOptions& o, const std::string& ledger_path) {
  if (o.transcript.empty()) throw UsageError("replay requires --transcript");
  auto expected = slurp(ledger_path);
  auto intent = slurp(o.intent);
  ScriptedBackend backend(read_transcript_file(o.transcript));
  auto result = run(intent, run_config(o), backend, progress(o.quiet));
  if (!o.out.empty()) save_run(result, o.out);
  auto actual = result.ledger_jsonl();
  bool match = actual == expected;
  json j = run_summary(result);
  j["replay"] = {{"match", match}, {"expected_sha256", sha256_hex(expected)}, {"actual_sha256", sha256_hex(actual)}};
  std::cout << j.dump(2) << "\n";
  return match ? 0 : 1;
}

int cmd_audit(const std::string& workspace_dir, std::string contract_path) {
  if (contract_path.empty()) contract_path = (fs::path(workspace_dir) / kMetaDir / "contract.contract.md").string();
  auto c = parse(slurp(contract_path));
  auto ws = Workspace::load(workspace_dir);
  auto e = existence_E(c, ws);
  auto v = consistency_V(c, ws);
  json j{{"existence", e.value},
         {"missing", e.missing},
         {"consistent", v.consistent},
         {"critical", v.critical},
         {"patchable", v.patchable},
         {"violations", json::array()},
         {"warnings", e.warnings}};
  for (const auto& viol : validate(project(c))) j["violations"].push_back(describe(viol));
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& gen, const std::string& ref, std::string contract_path, const std::string& scores) {
  auto ws = Workspace::load(gen);
  EvalReport r;
  if (!ref.empty()) r.arch = s_arch(ws.paths(), read_manifest_file(ref));
  auto link = s_link(ws);
  r.link = link.metric;
  r.imports = link.checks;
  if (contract_path.empty()) {
    auto p = fs::path(gen) / kMetaDir / "contract.contract.md";
    if (fs::exists(p)) contract_path = p.string();
  }
  if (!contract_path.empty()) r.tokens = token_report(parse(slurp(contract_path)), ws);
  if (!scores.empty()) {
    try {
      r.scores = parse_scores(json::parse(slurp(scores)));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("scores file: ") + e.what());
    }
  }
  std::cout << to_json(r).dump(2) << "\n";
  return 0;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cout << json{{"error", {{"kind", kind}, {"message", message}}}}.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contract-driven multi-agent repository generation"};
  app.set_config("--config", "", "INI/TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  RunOptions gen_opts, replay_opts;
  auto* generate = app.add_subcommand("generate", "Synthesize a contract and build the repository");
  add_run_options(generate, gen_opts, false);

  auto* replay = app.add_subcommand("replay", "Re-run a recorded transcript and compare the run ledger");
  std::string ledger;
  add_run_options(replay, replay_opts, true);
  replay->add_option("--ledger", ledger, "Recorded run.ledger.jsonl")->required()->check(CLI::ExistingFile);

  auto* audit_cmd = app.add_subcommand("audit", "Measure existence and consistency of a workspace against a contract");
  std::string audit_ws, audit_contract;
  audit_cmd->add_option("--workspace", audit_ws, "Repository directory")->required()->check(CLI::ExistingDirectory);
  audit_cmd->add_option("--contract", audit_contract, "Contract file (default: <workspace>/.contract/contract.contract.md)");

  auto* eval_cmd = app.add_subcommand("eval", "Static metrics and token report for a generated repository");
  std::string eval_gen, eval_ref, eval_contract, eval_scores;
  eval_cmd->add_option("--gen", eval_gen, "Generated repository directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--ref", eval_ref, "Reference manifest (one path per line)")->check(CLI::ExistingFile);
  eval_cmd->add_option("--contract", eval_contract, "Contract file for the token report");
  eval_cmd->add_option("--scores", eval_scores, "Dynamic scores JSON {task: {exec, inter, rule}}")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) return cmd_generate(gen_opts);
    if (*replay) return cmd_replay(replay_opts, ledger);
    if (*audit_cmd) return cmd_audit(audit_ws, audit_contract);
    if (*eval_cmd) return cmd_eval(eval_gen, eval_ref, eval_contract, eval_scores);
  } catch (const UsageError& e) {
    print_error("UsageError", e.what());
    return 2;
  } catch (const contractor::Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("Failure", e.what());
    return 1;
  }
  return 2;
}
