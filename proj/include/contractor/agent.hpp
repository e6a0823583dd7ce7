#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "contractor/contract.hpp"
#include "contractor/kernel.hpp"
#include "contractor/task.hpp"
#include "contractor/util.hpp"
#include "contractor/workspace.hpp"

namespace contractor {

enum class Role { Generator, Discriminator, Worker, Critic };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::Generator: return "generator";
    case Role::Discriminator: return "discriminator";
    case Role::Worker: return "worker";
    case Role::Critic: return "critic";
  }
  return "?";
}

enum class RunMode { Parallel, Sequential, NoContract };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Parallel: return "PARALLEL";
    case RunMode::Sequential: return "SEQUENTIAL";
    case RunMode::NoContract: return "NO_CONTRACT";
  }
  return "?";
}

inline std::optional<RunMode> parse_mode(std::string_view s) {
  std::string up;
  for (char c : s) up += c == '-' ? '_' : static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
  if (up == "PARALLEL") return RunMode::Parallel;
  if (up == "SEQUENTIAL") return RunMode::Sequential;
  if (up == "NO_CONTRACT") return RunMode::NoContract;
  return std::nullopt;
}

struct Artifact {
  std::string path;
  std::string body;
  bool operator==(const Artifact&) const = default;
};

struct Verdict {
  bool pass = false;
  std::string reason;
  bool operator==(const Verdict&) const = default;
};

struct AgentResponse {
  std::string thinking;
  std::string output;  // summary text without artifacts or verdict line
  std::vector<ContractAction> actions;
  std::vector<Artifact> artifacts;
  std::optional<Verdict> verdict;
  bool operator==(const AgentResponse&) const = default;
};

namespace response_detail {

inline std::string trimmed_block(std::string_view s) { return text::join_lines(text::trim_blank_edges(text::split_lines(s))); }

inline std::size_t backtick_run(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && line[n] == '`') ++n;
  return n;
}

inline std::optional<Verdict> verdict_of(std::string_view line) {
  auto t = text::trim_view(line);
  if (!text::starts_with(t, "VERDICT:")) return std::nullopt;
  auto rest = text::trim_view(t.substr(8));
  if (rest == "PASS") return Verdict{true, ""};
  if (text::starts_with(rest, "FAIL")) return Verdict{false, text::trim(rest.substr(4))};
  return std::nullopt;
}

inline std::vector<ContractAction> parse_actions(std::string_view json_text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("document_action is not valid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ParseError("document_action must hold a JSON array");
  std::vector<ContractAction> out;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("type") || !item["type"].is_string())
      throw ParseError("each action needs a string 'type'");
    std::string type;
    for (char c : item["type"].get<std::string>()) type += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    ActionOp op;
    if (type == "update" || type == "update|add") op = ActionOp::Update;
    else if (type == "add") op = ActionOp::Add;
    else throw ParseError("unknown action type '" + item["type"].get<std::string>() + "'");
    if (!item.contains("content")) throw ParseError("action without content");
    const auto& content = item["content"];
    try {
      if (content.is_object()) {
        // Section-patch mode: every key is a full replacement of that section.
        std::map<SectionKey, std::string> patches;
        for (const auto& [key, value] : content.items()) {
          if (!value.is_string()) throw ParseError("section patch '" + key + "' must be a string");
          if (!patches.emplace(section_key_or_throw(key), value.get<std::string>()).second)
            throw ParseError("section '" + key + "' patched twice in one action");
        }
        for (auto& [k, v] : patches) out.push_back({ActionOp::Update, k, std::move(v)});
      } else if (content.is_string()) {
        if (item.contains("section")) {
          if (!item["section"].is_string()) throw ParseError("'section' must be a string");
          out.push_back({op, section_key_or_throw(item["section"].get<std::string>()), content.get<std::string>()});
        } else {
          auto sections = parse_sections(content.get<std::string>());
          for (auto k : kAllSections)
            out.push_back({ActionOp::Update, k, text::join_lines(sections[static_cast<std::size_t>(k)])});
        }
      } else {
        throw ParseError("action content must be a string or an object");
      }
    } catch (const UnknownSection& e) {
      throw ParseError(e.what());
    } catch (const MalformedTemplate& e) {
      throw ParseError(std::string("full-document content: ") + e.what());
    }
  }
  for (const auto& a : out) {
    if (a.section == SectionKey::SymbolicApiSpecifications && is_partial_api_patch(a.content))
      throw ParseError("API specification patch has a Status field but no File field");
  }
  return out;
}

}  // namespace response_detail

// Parses the <thinking>/<output>/<document_action> response format.
inline AgentResponse parse_response(std::string_view raw) {
  using namespace response_detail;
  AgentResponse r;
  std::size_t cursor = 0;
  auto th_open = raw.find("<thinking>");
  if (th_open != std::string_view::npos) {
    auto th_close = raw.find("</thinking>", th_open);
    if (th_close == std::string_view::npos) throw ParseError("unterminated <thinking> block");
    r.thinking = trimmed_block(raw.substr(th_open + 10, th_close - th_open - 10));
    cursor = th_close + 11;
  }
  auto out_open = raw.find("<output>", cursor);
  if (out_open == std::string_view::npos) throw ParseError("missing <output> block");
  auto da_open = raw.rfind("<document_action>");
  if (da_open != std::string_view::npos && da_open < out_open) da_open = std::string_view::npos;
  auto out_limit = da_open == std::string_view::npos ? raw.size() : da_open;
  auto out_close = raw.substr(0, out_limit).rfind("</output>");
  if (out_close == std::string_view::npos || out_close < out_open) throw ParseError("unterminated <output> block");
  if (da_open != std::string_view::npos) {
    auto da_close = raw.find("</document_action>", da_open);
    if (da_close == std::string_view::npos) throw ParseError("unterminated <document_action> block");
    auto body = text::trim(raw.substr(da_open + 17, da_close - da_open - 17));
    if (!body.empty()) r.actions = parse_actions(body);
  }

  std::vector<std::string> summary;
  auto lines = text::split_lines(raw.substr(out_open + 8, out_close - out_open - 8));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    auto fence = backtick_run(line);
    if (fence >= 3 && i + 1 < lines.size() && text::starts_with(lines[i + 1], "# FILE:")) {
      auto path = text::trim(std::string_view(lines[i + 1]).substr(7));
      std::size_t j = i + 2;
      std::vector<std::string> body;
      for (; j < lines.size(); ++j) {
        auto close = backtick_run(lines[j]);
        if (close >= fence && text::is_blank(std::string_view(lines[j]).substr(close))) break;
        body.push_back(lines[j]);
      }
      if (j == lines.size()) throw ParseError("unterminated artifact block for '" + path + "'");
      r.artifacts.push_back({path, body.empty() ? "" : text::join_lines(body) + "\n"});
      i = j;
      continue;
    }
    if (auto v = verdict_of(line); v && !r.verdict) {
      r.verdict = v;
      continue;
    }
    summary.push_back(line);
  }
  r.output = text::join_lines(text::trim_blank_edges(std::move(summary)));
  return r;
}

// Inverse of parse_response for well-formed values.
inline std::string format_response(const AgentResponse& r) {
  std::string out = "<thinking>\n" + r.thinking + "\n</thinking>\n<output>\n";
  if (!r.output.empty()) out += r.output + "\n";
  for (const auto& a : r.artifacts) {
    std::size_t longest = 0, run = 0;
    for (char c : a.body) {
      run = c == '`' ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    std::string fence(std::max<std::size_t>(3, longest + 1), '`');
    out += fence + "\n# FILE: " + a.path + "\n" + a.body;
    if (!a.body.empty() && a.body.back() != '\n') out += "\n";
    out += fence + "\n";
  }
  if (r.verdict) out += r.verdict->pass ? "VERDICT: PASS\n" : "VERDICT: FAIL " + r.verdict->reason + "\n";
  out += "</output>\n";
  if (!r.actions.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : r.actions)
      arr.push_back({{"type", a.op == ActionOp::Add ? "add" : "update"}, {"section", std::string(heading(a.section))}, {"content", a.content}});
    out += "<document_action>\n" + arr.dump(2) + "\n</document_action>\n";
  }
  return out;
}

struct DispatchKey {
  int layer = 0;
  std::string role;
  std::string task;
  bool operator==(const DispatchKey&) const = default;
  auto operator<=>(const DispatchKey&) const = default;
};

struct PromptBundle {
  DispatchKey key;
  std::string system;
  std::string role_prompt;
  std::string context;
  std::string directive;
  std::vector<Artifact> attachments;

  std::string text() const {
    std::string out = system + "\n\n" + role_prompt + "\n\n## Context\n\n" + context + "\n\n## Task\n\n" + directive + "\n";
    for (const auto& a : attachments) out += "\n## Attachment: " + a.path + "\n\n" + a.body + "\n";
    return out;
  }
  std::string sha256() const { return sha256_hex(text()); }
};

using TokenEstimator = std::function<std::size_t(std::string_view)>;

struct PromptOptions {
  RunMode mode = RunMode::Parallel;
  std::size_t context_limit = 16384;
  TokenEstimator estimator = estimate_tokens;
};

namespace prompts {

inline constexpr std::string_view kSystem = R"(You are one agent in a team that builds a software repository together.
Every agent reads and edits one shared document, the Language Contract. It is the only authority on file
layout, public interfaces and dependencies; code must agree with it.

Answer in exactly this shape:
<thinking> your private reasoning </thinking>
<output> a short summary of what you did, plus any files or verdict you were asked for </output>
<document_action> optional JSON array of contract edits </document_action>

Contract edits: [{"type": "update", "section": "<section>", "content": "<markdown body>"}]
or section-patch form [{"type": "update", "content": {"<section>": "<markdown body>", ...}}].
Section names: Project Overview, User Stories (Features), Constraints, Directory Structure,
Global Shared Knowledge, Dependency Relationships, Symbolic API Specifications.
A patch replaces the whole body of its section, so repeat unchanged lines. Never send an API
specification patch that sets a Status without the File line of that entry.
Source files go inside <output> as fenced blocks whose first line is "# FILE: <path>".)";

inline constexpr std::string_view kGenerator = R"(Role: project manager (contract generator).
Turn the user intent into a complete Language Contract. Split the work into files that can be written
in parallel. For each file add an entry to Symbolic API Specifications:
### File: `<path>`
* **Owner:** <engineer role>
* **Version:** 1
* **Status:** TODO
* **Classes:** / **Class:** `<Name>` / **Attributes:** `name: type` - meaning / **Methods:** `def name(arg: type) -> type` - docstring
* **Functions:** `def name(arg: type) -> type` - docstring
Omit self from method signatures. List module dependencies as `a.py --> b.py` lines.)";

inline constexpr std::string_view kDiscriminator = R"(Role: contract reviewer (single rectification pass).
Read the draft contract and the reported problems. Fix dependency cycles, types that no class declares,
and entries whose callables have no docstring. Emit the corrected sections as full replacements; leave
correct sections alone.)";

inline constexpr std::string_view kWorker = R"(Role: engineer.
Implement exactly one file, the one named in the task, so that it matches its contract entry: every
declared class, attribute, method and function with the declared signature. Use other modules only
through their contract interfaces. If the contract is missing something you truly need, say so and
propose a contract edit instead of inventing it silently.)";

inline constexpr std::string_view kCritic = R"(Role: code reviewer.
Check the attached file against its contract entry and the rest of the contract. End your output with
one line: "VERDICT: PASS" or "VERDICT: FAIL <what must change>". You may also patch the contract when it
is the contract, not the code, that is wrong.)";

}  // namespace prompts

namespace prompt_detail {

inline std::string intent_and_paths(std::string_view intent, const LanguageContract& c) {
  std::string out = "User intent:\n" + std::string(intent) + "\n\nFiles to produce:\n";
  try {
    for (const auto& e : parse_api_entries(c.section(SectionKey::SymbolicApiSpecifications)))
      out += "- " + e.file_path + " (" + e.owner + ")\n";
  } catch (const ProjectionError&) {
  }
  return out;
}

}  // namespace prompt_detail

// Assembles the prompt for one dispatch. Worker prompts carry the contract
// and nothing from the workspace; critic prompts attach the task's file.
inline PromptBundle build_prompt(Role role, const Task* task, const LanguageContract& c, std::string_view intent,
                                 int layer, const PromptOptions& opt = {}, const FileUnit* impl = nullptr,
                                 std::string_view extra = {}) {
  if ((role == Role::Worker || role == Role::Critic) && !task) throw InternalInconsistency("worker and critic prompts need a task");
  if (role == Role::Critic && !impl) throw InternalInconsistency("critic prompt needs the implementation");
  PromptBundle b;
  b.key = {layer, to_string(role), task ? task->id : ""};
  b.system = prompts::kSystem;
  switch (role) {
    case Role::Generator: b.role_prompt = prompts::kGenerator; break;
    case Role::Discriminator: b.role_prompt = prompts::kDiscriminator; break;
    case Role::Worker: b.role_prompt = prompts::kWorker; break;
    case Role::Critic: b.role_prompt = prompts::kCritic; break;
  }
  if (opt.mode == RunMode::NoContract && task) {
    b.context = prompt_detail::intent_and_paths(intent, c);
  } else {
    b.context = render(c);
    if (role == Role::Generator || role == Role::Discriminator) b.context += "\nUser intent:\n" + std::string(intent) + "\n";
  }
  if (task) {
    b.directive = (role == Role::Worker ? "Implement `" : "Review `") + task->file_path + "` (owner: " + task->owner + ").";
    if (!task->feedback.empty()) {
      b.directive += "\nOpen feedback:";
      for (const auto& f : task->feedback) b.directive += "\n- " + f;
    }
  } else {
    b.directive = role == Role::Generator ? "Create the initial contract." : "Rectify the draft contract.";
  }
  if (!extra.empty()) b.directive += "\n" + std::string(extra);
  if (role == Role::Critic) b.attachments.push_back({impl->path, impl->body});
  auto tokens = opt.estimator(b.text());
  if (tokens > opt.context_limit)
    throw ContextOverflow("prompt for " + b.key.role + " '" + b.key.task + "' needs " + std::to_string(tokens) +
                          " tokens, limit is " + std::to_string(opt.context_limit));
  return b;
}

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const PromptBundle& bundle) = 0;
};

struct TranscriptRecord {
  DispatchKey key;
  std::string request_sha256;  // empty: not checked
  std::string response;
  std::string error;  // "timeout" or other simulated failure
};

inline nlohmann::json to_json(const TranscriptRecord& r) {
  nlohmann::json j{{"layer", r.key.layer}, {"role", r.key.role}, {"task", r.key.task}, {"request_sha256", r.request_sha256}};
  if (r.error.empty()) j["response"] = r.response;
  else j["error"] = r.error;
  return j;
}

inline TranscriptRecord transcript_record_from_json(const nlohmann::json& j) {
  TranscriptRecord r;
  r.key.layer = j.at("layer").get<int>();
  r.key.role = j.at("role").get<std::string>();
  r.key.task = j.value("task", "");
  r.request_sha256 = j.value("request_sha256", "");
  r.response = j.value("response", "");
  r.error = j.value("error", "");
  return r;
}

inline std::vector<TranscriptRecord> read_transcript(std::istream& in) {
  std::vector<TranscriptRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::is_blank(line)) continue;
    try {
      out.push_back(transcript_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("transcript line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<TranscriptRecord> read_transcript_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open transcript '" + path + "'");
  return read_transcript(in);
}

// Deterministic replay keyed by (layer, role, task). Lookup only; safe to
// call concurrently.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<TranscriptRecord> records) {
    for (auto& r : records) {
      auto key = r.key;
      if (!records_.emplace(key, std::move(r)).second)
        throw ConfigError("duplicate transcript entry for layer " + std::to_string(key.layer) + " " + key.role + " '" +
                          key.task + "'");
    }
  }

  std::string complete(const PromptBundle& bundle) override {
    auto it = records_.find(bundle.key);
    if (it == records_.end())
      throw MissingTranscriptEntry("no transcript entry for layer " + std::to_string(bundle.key.layer) + " " +
                                   bundle.key.role + " '" + bundle.key.task + "'");
    const auto& r = it->second;
    if (!r.error.empty()) {
      if (r.error == "timeout") throw BackendTimeout("scripted timeout for " + bundle.key.role + " '" + bundle.key.task + "'");
      throw BackendError("scripted failure: " + r.error);
    }
    if (!r.request_sha256.empty() && r.request_sha256 != bundle.sha256())
      throw BackendError("request hash mismatch for " + bundle.key.role + " '" + bundle.key.task + "'");
    return r.response;
  }

  std::size_t size() const { return records_.size(); }

 private:
  std::map<DispatchKey, TranscriptRecord> records_;
};

// Forwards to another backend and appends every exchange to a transcript.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(Backend& inner, std::ostream& sink) : inner_(inner), sink_(sink) {}

  std::string complete(const PromptBundle& bundle) override {
    TranscriptRecord r{bundle.key, bundle.sha256(), {}, {}};
    try {
      r.response = inner_.complete(bundle);
    } catch (const BackendTimeout&) {
      r.error = "timeout";
      append(r);
      throw;
    }
    append(r);
    return r.response;
  }

 private:
  void append(const TranscriptRecord& r) {
    std::lock_guard<std::mutex> lock(mu_);
    sink_ << to_json(r).dump() << "\n";
    sink_.flush();
  }

  Backend& inner_;
  std::ostream& sink_;
  std::mutex mu_;
};

struct SynthesisResult {
  LanguageContract contract;
  std::map<std::string, std::vector<std::string>> feedback;  // task id -> notes
  std::vector<std::string> trace;                            // role phases in order
  std::vector<Violation> rejected;                           // actions refused on structural grounds
  ContractJournal journal;
};

namespace synthesis_detail {

inline void apply_all(LanguageContract& c, const std::vector<ContractAction>& actions, SynthesisResult& out) {
  for (const auto& a : actions) {
    auto o = apply_action(c, a, {});
    if (o.accepted) {
      c = std::move(o.contract);
      out.journal.record_action(c, a);
    } else {
      for (auto& v : o.violations) {
        v.detail = std::string(identifier(a.section)) + ": " + v.detail;
        out.rejected.push_back(std::move(v));
      }
    }
  }
}

inline std::string problems(const LanguageContract& c) {
  std::string out;
  try {
    for (const auto& v : validate(project(c))) out += "- " + describe(v) + "\n";
  } catch (const Error& e) {
    out += std::string("- ") + e.kind() + ": " + e.what() + "\n";
  }
  return out;
}

}  // namespace synthesis_detail

// Two-stage initialization: one generator proposal, then exactly one
// discriminator rectification pass. The draft is structure-checked only;
// the rectified contract must have no blocking kernel violations.
inline SynthesisResult synthesize_contract(std::string_view intent, Backend& backend, const PromptOptions& opt = {}) {
  using namespace synthesis_detail;
  if (text::is_blank(intent)) throw SynthesisFailure("intent is empty");
  SynthesisResult out;
  LanguageContract c = empty_contract();

  auto gen_prompt = build_prompt(Role::Generator, nullptr, c, intent, 0, opt);
  out.trace.push_back(to_string(Role::Generator));
  AgentResponse gen;
  try {
    gen = parse_response(backend.complete(gen_prompt));
  } catch (const ParseError& e) {
    throw SynthesisFailure(std::string("generator response: ") + e.what());
  }
  if (gen.actions.empty()) throw SynthesisFailure("generator emitted no contract actions");
  if (std::none_of(gen.actions.begin(), gen.actions.end(), [](const ContractAction& a) {
        return a.section == SectionKey::SymbolicApiSpecifications && !text::is_blank(a.content);
      }))
    throw SynthesisFailure("generator produced no Symbolic API Specifications content");
  apply_all(c, gen.actions, out);

  std::string notes = "Problems found in the draft:\n" + problems(c);
  for (const auto& v : out.rejected) notes += "- rejected edit: " + describe(v) + "\n";
  auto disc_prompt = build_prompt(Role::Discriminator, nullptr, c, intent, 0, opt, nullptr, notes);
  out.trace.push_back(to_string(Role::Discriminator));
  AgentResponse disc;
  try {
    disc = parse_response(backend.complete(disc_prompt));
  } catch (const ParseError& e) {
    throw SynthesisFailure(std::string("discriminator response: ") + e.what());
  }
  apply_all(c, disc.actions, out);

  auto blocking = blocking_violations(c);
  if (!blocking.empty()) {
    std::string msg = "contract still invalid after rectification:";
    for (const auto& v : blocking) msg += " " + describe(v) + ";";
    throw SynthesisFailure(msg);
  }
  auto k = project(c);
  if (k.entries.empty()) throw SynthesisFailure("contract has no API entries");
  for (const auto& v : validate(k)) {
    if (v.kind == ViolationKind::Incomplete && !v.nodes.empty())
      out.feedback[v.nodes.front()].push_back("Contract entry is incomplete (" + v.detail +
                                              "); document each callable while implementing.");
  }
  out.contract = c.rebased();
  return out;
}

}  // namespace contractor
