#pragma once

#include <algorithm>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "contractor/agent.hpp"
#include "contractor/api_edit.hpp"
#include "contractor/auditor.hpp"
#include "contractor/contract.hpp"
#include "contractor/kernel.hpp"
#include "contractor/workspace.hpp"

namespace contractor {

struct RunConfig {
  int t_max = 8;
  int attempt_cap = 3;
  RunMode mode = RunMode::Parallel;
  std::string model = "gpt-4o-2024-11-20";
  double temperature = 0.0;
  std::size_t context_limit = 16384;
  TokenEstimator estimator = estimate_tokens;

  void check() const {
    if (t_max < 0) throw ConfigError("t_max must be >= 0");
    if (attempt_cap < 1) throw ConfigError("attempt cap must be >= 1");
    if (temperature < 0) throw ConfigError("temperature must be >= 0");
    if (context_limit == 0) throw ConfigError("context limit must be positive");
  }

  PromptOptions prompt_options() const { return PromptOptions{mode, context_limit, estimator}; }
};

struct Dispatch {
  DispatchKind kind = DispatchKind::None;
  std::string task;
  std::optional<PromptBundle> prompt;
  std::string error;  // set when the prompt could not be built
};

// Phi: TODO/ERROR -> worker on the contract, DONE -> verifier with the
// implementation, VERIFIED -> nothing.
inline Dispatch phi(const Task& t, const LanguageContract& c, const FileUnit* impl, std::string_view intent = {},
                    int layer = 0, const PromptOptions& opt = {}) {
  Dispatch d;
  d.task = t.id;
  switch (t.status) {
    case TaskStatus::Verified: return d;
    case TaskStatus::Todo:
    case TaskStatus::Error: d.kind = DispatchKind::Worker; break;
    case TaskStatus::Done:
      if (!impl) throw InternalInconsistency("task " + t.id + " is DONE but its file is missing");
      d.kind = DispatchKind::Verifier;
      break;
  }
  try {
    d.prompt = build_prompt(d.kind == DispatchKind::Worker ? Role::Worker : Role::Critic, &t, c, intent, layer, opt,
                            d.kind == DispatchKind::Verifier ? impl : nullptr);
  } catch (const ContextOverflow& e) {
    d.error = std::string("ContextOverflow: ") + e.what();
  }
  return d;
}

struct LayerPlan {
  int layer = 0;
  std::vector<Dispatch> dispatches;  // task-id order
  std::vector<std::string> parked;   // reached the attempt cap
};

inline LayerPlan plan_layer(const std::vector<Task>& tasks, const LanguageContract& c, const Workspace& ws,
                            std::string_view intent = {}, int layer = 0, const PromptOptions& opt = {},
                            int attempt_cap = 1 << 30) {
  std::vector<const Task*> order;
  for (const auto& t : tasks) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Task* a, const Task* b) { return a->id < b->id; });
  LayerPlan plan;
  plan.layer = layer;
  for (const auto* t : order) {
    if (t->status == TaskStatus::Verified) continue;
    bool worker = t->status != TaskStatus::Done;
    if (worker && t->attempts >= attempt_cap) {
      plan.parked.push_back(t->id);
      continue;
    }
    plan.dispatches.push_back(phi(*t, c, ws.find(t->file_path), intent, layer, opt));
  }
  return plan;
}

using EventSink = std::function<void(const nlohmann::json&)>;

namespace sched_detail {

inline DispatchOutcome execute(const Dispatch& d, Backend& backend, const EventSink& emit, int layer) {
  DispatchOutcome o{d.kind, d.task, std::nullopt, d.error};
  if (emit) emit({{"event", "dispatch_start"}, {"layer", layer}, {"kind", to_string(d.kind)}, {"task", d.task}});
  if (d.error.empty()) {
    try {
      o.response = parse_response(backend.complete(*d.prompt));
    } catch (const Error& e) {
      o.error = e.kind() + ": " + e.what();
    }
  }
  if (emit)
    emit({{"event", "dispatch_finish"}, {"layer", layer}, {"kind", to_string(d.kind)}, {"task", d.task}, {"ok", o.error.empty()},
          {"error", o.error}});
  return o;
}

}  // namespace sched_detail

// Executes every dispatch against the same snapshot (baked into the
// prompts) and returns outcomes in plan order once all have finished.
inline std::vector<DispatchOutcome> run_layer(const LayerPlan& plan, Backend& backend, RunMode mode,
                                              const EventSink& emit = {}) {
  std::vector<DispatchOutcome> out;
  if (mode == RunMode::Sequential) {
    for (const auto& d : plan.dispatches) out.push_back(sched_detail::execute(d, backend, emit, plan.layer));
    return out;
  }
  std::mutex mu;
  EventSink locked;
  if (emit)
    locked = [&](const nlohmann::json& j) {
      std::lock_guard<std::mutex> lock(mu);
      emit(j);
    };
  std::vector<std::future<DispatchOutcome>> futures;
  for (const auto& d : plan.dispatches)
    futures.push_back(std::async(std::launch::async, [&, d] { return sched_detail::execute(d, backend, locked, plan.layer); }));
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

struct RunResult {
  Workspace workspace;
  LanguageContract contract;
  int layers = 0;
  std::vector<Task> tasks;
  bool best_effort = false;
  std::vector<nlohmann::json> ledger;  // header record, then one per layer
  std::vector<AuditReport> reports;
  ContractJournal journal;
  std::vector<std::string> transitions;  // "layer:task:FROM->TO", in order

  bool converged() const {
    return !tasks.empty() && std::all_of(tasks.begin(), tasks.end(), [](const Task& t) { return t.status == TaskStatus::Verified; });
  }

  std::string ledger_jsonl() const {
    std::string out;
    for (const auto& r : ledger) out += r.dump() + "\n";
    return out;
  }
};

namespace sched_detail {

// Mirrors task statuses into the Status fields of the API section.
inline LanguageContract write_back(const LanguageContract& c, const std::vector<Task>& tasks, ContractJournal& journal,
                                   std::vector<std::string>& warnings) {
  auto k = project(c);
  auto api = c.section(SectionKey::SymbolicApiSpecifications);
  bool changed = false;
  for (const auto& t : tasks) {
    const auto* e = k.find_entry(t.file_path);
    if (!e || (e->status == t.status && e->status_line)) continue;
    api = api_edit::set_status(api, t.file_path, t.status);
    changed = true;
  }
  if (!changed) return c;
  ContractAction a{ActionOp::Update, SectionKey::SymbolicApiSpecifications, text::join_lines(api)};
  auto o = apply_action(c, a, kernel_guard());
  if (!o.accepted) {
    warnings.push_back("status write-back refused: " + audit_detail::joined(o.violations));
    return c;
  }
  journal.record_action(o.contract, a);
  return o.contract.rebased();
}

}  // namespace sched_detail

// Contract-driven orchestration: synthesize, then plan / run / audit /
// commit layer by layer until every task is VERIFIED or t_max layers ran.
inline RunResult run(std::string_view intent, const RunConfig& cfg, Backend& backend, const EventSink& emit = {}) {
  cfg.check();
  RunResult res;
  auto opt = cfg.prompt_options();
  nlohmann::json header{{"type", "header"},
                        {"intent_sha256", sha256_hex(intent)},
                        {"mode", to_string(cfg.mode)},
                        {"t_max", cfg.t_max},
                        {"attempt_cap", cfg.attempt_cap},
                        {"model", cfg.model},
                        {"temperature", cfg.temperature},
                        {"context_limit", cfg.context_limit}};
  if (cfg.t_max == 0) {
    res.best_effort = true;
    header["tasks"] = nlohmann::json::array();
    res.ledger.push_back(header);
    return res;
  }

  auto synth = synthesize_contract(intent, backend, opt);
  res.journal = synth.journal;
  std::vector<std::string> warnings;
  for (const auto& v : synth.rejected) warnings.push_back("synthesis edit refused: " + describe(v));
  res.tasks = tasks_of(project(synth.contract));
  for (auto& t : res.tasks) {
    t.status = TaskStatus::Todo;
    if (auto it = synth.feedback.find(t.id); it != synth.feedback.end()) t.feedback = it->second;
  }
  auto c = sched_detail::write_back(synth.contract, res.tasks, res.journal, warnings);
  nlohmann::json task_list = nlohmann::json::array();
  for (const auto& t : res.tasks) task_list.push_back({{"id", t.id}, {"owner", t.owner}});
  header["tasks"] = task_list;
  header["synthesis"] = synth.trace;
  header["contract_sha256"] = contract_digest(c);
  header["warnings"] = warnings;
  res.ledger.push_back(header);

  std::set<std::string> parked_noted;
  for (int layer = 1; layer <= cfg.t_max; ++layer) {
    if (res.converged()) break;
    auto plan = plan_layer(res.tasks, c, res.workspace, intent, layer, opt, cfg.attempt_cap);
    for (const auto& id : plan.parked) {
      if (!parked_noted.insert(id).second) continue;
      for (auto& t : res.tasks)
        if (t.id == id) t.feedback.push_back("Attempt cap of " + std::to_string(cfg.attempt_cap) + " reached; task left as is.");
    }
    if (plan.dispatches.empty()) break;
    for (const auto& d : plan.dispatches)
      if (d.kind == DispatchKind::Worker)
        for (auto& t : res.tasks)
          if (t.id == d.task) ++t.attempts;

    auto outcomes = run_layer(plan, backend, cfg.mode, emit);
    auto report = audit({c, res.workspace, res.tasks, outcomes, layer});
    if (emit)
      for (const auto& i : report.interventions)
        emit({{"event", "intervention"}, {"layer", layer}, {"kind", to_string(i.kind)}, {"task", i.task}, {"detail", i.detail}});

    for (const auto& u : report.commits) res.workspace.commit_file(u.path, u.body, u.writer, u.layer);
    if (report.contract.revision() != c.revision()) res.journal.record_merge(c, report.contract);
    c = report.contract;
    for (const auto& u : report.status_updates) {
      for (auto& t : res.tasks)
        if (t.id == u.task) t.status = u.to;
      res.transitions.push_back(std::to_string(layer) + ":" + u.task + ":" + to_string(u.from) + "->" + to_string(u.to));
    }
    for (const auto& [id, notes] : report.feedback)
      for (auto& t : res.tasks)
        if (t.id == id) t.feedback.insert(t.feedback.end(), notes.begin(), notes.end());
    for (const auto& t : report.new_tasks) res.tasks.push_back(t);
    std::sort(res.tasks.begin(), res.tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
    std::vector<std::string> wb_warnings;
    c = sched_detail::write_back(c, res.tasks, res.journal, wb_warnings);

    nlohmann::json dispatches = nlohmann::json::array(), transitions = nlohmann::json::array();
    for (std::size_t i = 0; i < plan.dispatches.size(); ++i) {
      const auto& d = plan.dispatches[i];
      dispatches.push_back({{"kind", to_string(d.kind)},
                            {"task", d.task},
                            {"prompt_sha256", d.prompt ? d.prompt->sha256() : ""},
                            {"ok", outcomes[i].error.empty()}});
    }
    for (const auto& u : report.status_updates)
      transitions.push_back({{"task", u.task}, {"from", to_string(u.from)}, {"to", to_string(u.to)}});
    auto audit_json = to_json(report);
    for (const auto& w : wb_warnings) audit_json["warnings"].push_back(w);
    res.ledger.push_back({{"type", "layer"},
                          {"layer", layer},
                          {"width", cfg.mode == RunMode::Sequential ? 1 : static_cast<int>(plan.dispatches.size())},
                          {"dispatches", dispatches},
                          {"parked", plan.parked},
                          {"transitions", transitions},
                          {"audit", audit_json},
                          {"audit_sha256", sha256_hex(audit_json.dump())},
                          {"contract_sha256", contract_digest(c)},
                          {"workspace", res.workspace.hashes()}});
    res.reports.push_back(std::move(report));
    res.layers = layer;
  }
  res.contract = c;
  res.best_effort = !res.converged();
  return res;
}

}  // namespace contractor
