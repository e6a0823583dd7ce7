#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "contractor/agent.hpp"
#include "contractor/api_edit.hpp"
#include "contractor/contract.hpp"
#include "contractor/kernel.hpp"
#include "contractor/patch_merge.hpp"
#include "contractor/task.hpp"
#include "contractor/workspace.hpp"

namespace contractor {

enum class DispatchKind { None, Worker, Verifier };

inline const char* to_string(DispatchKind k) {
  switch (k) {
    case DispatchKind::None: return "none";
    case DispatchKind::Worker: return "worker";
    case DispatchKind::Verifier: return "verifier";
  }
  return "?";
}

// What one dispatch of a layer produced: a parsed response or an error.
struct DispatchOutcome {
  DispatchKind kind = DispatchKind::None;
  std::string task;
  std::optional<AgentResponse> response;
  std::string error;
};

enum class DeltaKind { Empty, Critical, Patchable };

inline const char* to_string(DeltaKind k) {
  switch (k) {
    case DeltaKind::Empty: return "EMPTY";
    case DeltaKind::Critical: return "CRITICAL";
    case DeltaKind::Patchable: return "PATCHABLE";
  }
  return "?";
}

struct AuditDelta {
  std::string task;
  DeltaKind kind = DeltaKind::Empty;
  std::vector<std::string> details;
  bool operator==(const AuditDelta&) const = default;
};

enum class InterventionKind { TaskInjection, StatusRegression, SyncTask, ContractAmendment };

inline const char* to_string(InterventionKind k) {
  switch (k) {
    case InterventionKind::TaskInjection: return "TaskInjection";
    case InterventionKind::StatusRegression: return "StatusRegression";
    case InterventionKind::SyncTask: return "SyncTask";
    case InterventionKind::ContractAmendment: return "ContractAmendment";
  }
  return "?";
}

struct Intervention {
  InterventionKind kind;
  std::string task;
  std::string detail;
  bool operator==(const Intervention&) const = default;
};

struct StatusUpdate {
  std::string task;
  TaskStatus from;
  TaskStatus to;
  std::string note;
  bool operator==(const StatusUpdate&) const = default;
};

// Symbol-level comparison of one contract entry with one analyzed file.
struct SymbolDelta {
  std::vector<std::string> critical;
  std::vector<std::string> patchable;
  std::map<std::string, Amendment> amendments;  // entry path -> symbols to add

  DeltaKind kind() const {
    if (!critical.empty()) return DeltaKind::Critical;
    if (!patchable.empty()) return DeltaKind::Patchable;
    return DeltaKind::Empty;
  }
};

namespace audit_detail {

inline std::string norm_type(const std::string& t) {
  try {
    return normalize_type(t);
  } catch (const SignatureError&) {
    return t;
  }
}

// "any" on either side is the top type and matches everything.
inline bool type_compatible(const std::string& contract, const std::string& code) {
  auto a = norm_type(contract), b = norm_type(code);
  return a == b || a == "any" || b == "any";
}

inline bool signature_compatible(const MethodSig& contract, const MethodSig& code) {
  if (contract.params.size() != code.params.size()) return false;
  for (std::size_t i = 0; i < contract.params.size(); ++i) {
    if (contract.params[i].name != code.params[i].name) return false;
    if (!type_compatible(contract.params[i].type, code.params[i].type)) return false;
  }
  return type_compatible(contract.return_type, code.return_type);
}

inline bool is_public(const std::string& name) { return !name.empty() && name.front() != '_'; }

inline const MethodSig* find_sig(const std::vector<MethodSig>& v, std::string_view name) {
  for (const auto& m : v)
    if (m.name == name) return &m;
  return nullptr;
}

inline std::set<std::string> declared_classes(const SymbolicKernel& k) {
  std::set<std::string> out;
  for (const auto& e : k.entries)
    for (const auto& c : e.classes) out.insert(c.name);
  return out;
}

// Types the kernel cannot resolve are recorded as "any" so an amendment
// never introduces an undefined type.
inline std::string contract_type(const std::string& t, const std::set<std::string>& known) {
  auto n = norm_type(t);
  auto head = type_head(n);
  return primitive_types().count(head) || known.count(head) ? n : "any";
}

inline MethodSig contract_sig(MethodSig m, const std::set<std::string>& known, const std::string& doc) {
  for (auto& p : m.params) p.type = contract_type(p.type, known);
  m.return_type = contract_type(m.return_type, known);
  m.docstring = doc;
  return m;
}

}  // namespace audit_detail

inline constexpr std::string_view kImplementationNote = "Present in the implementation.";

// Compares declared symbols of `e` with what the file defines. Missing or
// mismatched declared symbols are critical; public extras are patchable and
// produce amendments. With `with_demands`, uses of undeclared members of
// contract classes through typed parameters are also checked.
inline SymbolDelta compare_entry(const ApiSpecEntry& e, const ExtractedSymbols& s, const SymbolicKernel& k,
                                 bool with_demands = true) {
  using namespace audit_detail;
  SymbolDelta d;
  if (!s.analyzable) {
    d.critical.push_back("unanalyzable: " + s.problem);
    return d;
  }
  auto known = declared_classes(k);
  for (const auto& c : s.classes)
    if (is_public(c.name)) known.insert(c.name);
  Amendment own;

  for (const auto& dc : e.classes) {
    const auto* xc = s.find_class(dc.name);
    if (!xc) {
      d.critical.push_back("missing class " + dc.name);
      continue;
    }
    for (const auto& a : dc.attributes) {
      bool found = std::any_of(xc->attributes.begin(), xc->attributes.end(), [&](const auto& x) { return x.name == a.name; });
      if (!found) d.critical.push_back("missing attribute " + dc.name + "." + a.name);
    }
    for (const auto& m : dc.methods) {
      const auto* xm = find_sig(xc->methods, m.name);
      if (!xm) d.critical.push_back("missing method " + dc.name + "." + m.name);
      else if (!signature_compatible(m, *xm))
        d.critical.push_back("signature mismatch " + dc.name + "." + m.name + ": contract `" + print_signature(m) + "`, code `" +
                             print_signature(*xm) + "`");
    }
    for (const auto& xa : xc->attributes) {
      if (!is_public(xa.name) || dc.find_attribute(xa.name)) continue;
      d.patchable.push_back("extra attribute " + dc.name + "." + xa.name);
      own.attributes[dc.name].push_back({xa.name, contract_type(xa.type, known), std::string(kImplementationNote), 0});
    }
    for (const auto& xm : xc->methods) {
      if (!is_public(xm.name) || find_sig(dc.methods, xm.name)) continue;
      d.patchable.push_back("extra method " + dc.name + "." + xm.name);
      own.methods[dc.name].push_back(contract_sig(xm, known, std::string(kImplementationNote)));
    }
  }
  for (const auto& f : e.functions) {
    const auto* xf = find_sig(s.functions, f.name);
    if (!xf) d.critical.push_back("missing function " + f.name);
    else if (!signature_compatible(f, *xf))
      d.critical.push_back("signature mismatch " + f.name + ": contract `" + print_signature(f) + "`, code `" +
                           print_signature(*xf) + "`");
  }
  for (const auto& xc : s.classes) {
    if (!is_public(xc.name) || e.find_class(xc.name)) continue;
    d.patchable.push_back("extra class " + xc.name);
    ClassSpec spec;
    spec.name = xc.name;
    for (const auto& xa : xc.attributes)
      if (is_public(xa.name)) spec.attributes.push_back({xa.name, contract_type(xa.type, known), std::string(kImplementationNote), 0});
    for (const auto& xm : xc.methods)
      if (is_public(xm.name)) spec.methods.push_back(contract_sig(xm, known, std::string(kImplementationNote)));
    own.classes.push_back(std::move(spec));
  }
  for (const auto& xf : s.functions) {
    if (!is_public(xf.name) || find_sig(e.functions, xf.name)) continue;
    d.patchable.push_back("extra function " + xf.name);
    own.functions.push_back(contract_sig(xf, known, std::string(kImplementationNote)));
  }
  if (!own.empty()) d.amendments[e.file_path].absorb(own);

  if (!with_demands) return d;
  for (const auto& dm : s.demands) {
    if (!is_public(dm.member)) continue;
    const ApiSpecEntry* home = nullptr;
    const ClassSpec* cls = nullptr;
    for (const auto& other : k.entries)
      if (const auto* c = other.find_class(dm.type)) {
        home = &other;
        cls = c;
        break;
      }
    if (!home || home->file_path == e.file_path) continue;
    if (cls->find_attribute(dm.member) || find_sig(cls->methods, dm.member)) continue;
    if (dm.call) {
      d.critical.push_back("call to undeclared method " + dm.type + "." + dm.member);
      continue;
    }
    d.patchable.push_back("undeclared attribute " + dm.type + "." + dm.member + " used");
    Amendment a;
    a.attributes[dm.type].push_back({dm.member, "any", "Used by " + e.file_path + ".", 0});
    d.amendments[home->file_path].absorb(a);
  }
  return d;
}

// match(task, unit): same path, non-blank body, and every declared class
// defined; a declared class with contract members must not be empty.
inline bool match(const ApiSpecEntry& e, const FileUnit& unit) {
  auto p = normalize_path(unit.path);
  if (!p || *p != e.file_path) return false;
  if (text::is_blank(unit.body)) return false;
  auto s = extract_symbols(unit);
  if (!s.analyzable) return false;
  for (const auto& dc : e.classes) {
    const auto* xc = s.find_class(dc.name);
    if (!xc) return false;
    bool declares = !dc.attributes.empty() || !dc.methods.empty();
    if (declares && xc->attributes.empty() && xc->methods.empty()) return false;
  }
  return true;
}

struct ExistenceResult {
  double value = 1.0;
  std::vector<std::string> missing;  // unmatched task paths, sorted
  std::vector<std::string> warnings;
};

inline ExistenceResult existence_E(const LanguageContract& c, const Workspace& ws) {
  auto k = project(c);
  ExistenceResult r;
  if (k.entries.empty()) {
    r.warnings.push_back("empty task set; existence defined as 1");
    return r;
  }
  std::size_t matched = 0;
  for (const auto& e : k.entries) {
    const auto* u = ws.find(e.file_path);
    if (u && match(e, *u)) ++matched;
    else r.missing.push_back(e.file_path);
  }
  r.value = static_cast<double>(matched) / static_cast<double>(k.entries.size());
  return r;
}

struct ConsistencyResult {
  bool consistent = true;
  std::vector<std::string> critical;   // "path: detail"
  std::vector<std::string> patchable;  // "path: detail"
};

// V(C): declared signatures of every task equal the extracted ones. Files
// not yet in the workspace are skipped (existence covers them).
inline ConsistencyResult consistency_V(const LanguageContract& c, const Workspace& ws) {
  auto k = project(c);
  ConsistencyResult r;
  for (const auto& e : k.entries) {
    const auto* u = ws.find(e.file_path);
    if (!u) continue;
    auto d = compare_entry(e, extract_symbols(*u), k, false);
    for (const auto& x : d.critical) r.critical.push_back(e.file_path + ": " + x);
    for (const auto& x : d.patchable) r.patchable.push_back(e.file_path + ": " + x);
  }
  r.consistent = r.critical.empty() && r.patchable.empty();
  return r;
}

struct AuditReport {
  int layer = 0;
  double existence = 1.0;
  std::vector<std::string> missing;
  ConsistencyResult consistency;
  std::vector<AuditDelta> deltas;
  std::vector<StatusUpdate> status_updates;
  std::vector<Intervention> interventions;
  std::map<std::string, std::vector<std::string>> feedback;
  std::vector<FileUnit> commits;
  std::vector<AtomicPatch> patches;
  std::vector<MergeConflict> conflicts;
  std::vector<Violation> merge_violations;
  std::vector<Task> new_tasks;
  std::vector<std::string> warnings;
  LanguageContract contract;  // after the layer commit
};

inline nlohmann::json to_json(const AuditReport& r) {
  using nlohmann::json;
  json deltas = json::array(), updates = json::array(), interventions = json::array(), commits = json::array(),
       patches = json::array(), conflicts = json::array(), violations = json::array(), new_tasks = json::array();
  for (const auto& d : r.deltas) deltas.push_back({{"task", d.task}, {"kind", to_string(d.kind)}, {"details", d.details}});
  for (const auto& u : r.status_updates)
    updates.push_back({{"task", u.task}, {"from", to_string(u.from)}, {"to", to_string(u.to)}, {"note", u.note}});
  for (const auto& i : r.interventions) interventions.push_back({{"kind", to_string(i.kind)}, {"task", i.task}, {"detail", i.detail}});
  for (const auto& c : r.commits)
    commits.push_back({{"path", c.path}, {"sha256", sha256_hex(c.body)}, {"writer", c.writer}, {"layer", c.layer}});
  for (const auto& p : r.patches) patches.push_back(to_json(p));
  for (const auto& c : r.conflicts)
    conflicts.push_back({{"section", std::string(identifier(c.section))},
                         {"interval", {c.start, c.end}},
                         {"authors", c.authors},
                         {"resolution", c.resolution}});
  for (const auto& v : r.merge_violations) violations.push_back(describe(v));
  for (const auto& t : r.new_tasks) new_tasks.push_back({{"id", t.id}, {"owner", t.owner}});
  return {{"layer", r.layer},
          {"existence", r.existence},
          {"missing", r.missing},
          {"consistent", r.consistency.consistent},
          {"consistency_critical", r.consistency.critical},
          {"consistency_patchable", r.consistency.patchable},
          {"deltas", deltas},
          {"status_updates", updates},
          {"interventions", interventions},
          {"feedback", r.feedback},
          {"commits", commits},
          {"patches", patches},
          {"conflicts", conflicts},
          {"merge_violations", violations},
          {"new_tasks", new_tasks},
          {"warnings", r.warnings},
          {"contract_revision", r.contract.revision()}};
}

inline std::string audit_digest(const AuditReport& r) { return sha256_hex(to_json(r).dump()); }

namespace audit_detail {

struct Contribution {
  std::string author;
  std::string task;
  bool amendment = false;
  std::vector<AtomicPatch> patches;
};

struct Pending {
  std::string task;
  FileUnit unit;
  SymbolDelta delta;
};

inline std::string amendment_summary(const std::string& path, const Amendment& a) {
  std::vector<std::string> parts;
  for (const auto& [cls, attrs] : a.attributes)
    for (const auto& x : attrs) parts.push_back(cls + "." + x.name + ": " + x.type);
  for (const auto& [cls, ms] : a.methods)
    for (const auto& m : ms) parts.push_back(cls + "." + m.name + "()");
  for (const auto& c : a.classes) parts.push_back("class " + c.name);
  for (const auto& f : a.functions) parts.push_back(f.name + "()");
  std::string out = "UPDATE SymbolicApiSpecifications " + path + ":";
  for (const auto& p : parts) out += " +" + p;
  return out;
}

inline std::string joined(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) out += (out.empty() ? "" : "; ") + describe(v);
  return out;
}

}  // namespace audit_detail

struct AuditInput {
  const LanguageContract& snapshot;  // must be rebased (base == sections)
  const Workspace& workspace;
  const std::vector<Task>& tasks;
  const std::vector<DispatchOutcome>& outcomes;
  int layer = 0;
};

// Layer barrier: classifies every dispatch outcome, decides commits and
// status transitions, merges contract edits and amendments, then measures
// E and V on the result. Pure in its inputs.
inline AuditReport audit(const AuditInput& in) {
  using namespace audit_detail;
  AuditReport r;
  r.layer = in.layer;
  r.contract = in.snapshot;
  auto k = project(in.snapshot);

  std::map<std::string, TaskStatus> status;
  std::map<std::string, const Task*> by_id;
  for (const auto& t : in.tasks) {
    status[t.id] = t.status;
    by_id[t.id] = &t;
  }
  auto transition = [&](const std::string& id, TaskStatus to, const std::string& note) {
    auto from = status.at(id);
    if (!is_legal_transition(from, to)) {
      r.warnings.push_back(std::string("skipped illegal transition ") + to_string(from) + "->" + to_string(to) + " for " + id);
      return false;
    }
    status[id] = to;
    r.status_updates.push_back({id, from, to, note});
    return true;
  };
  auto note = [&](const std::string& id, const std::string& text) { r.feedback[id].push_back(text); };

  std::vector<DispatchOutcome> outcomes = in.outcomes;
  std::stable_sort(outcomes.begin(), outcomes.end(), [](const auto& a, const auto& b) { return a.task < b.task; });

  std::vector<Pending> pending;
  std::vector<Contribution> contributions;
  std::map<std::string, AuditDelta> deltas;

  auto contribute_actions = [&](const std::string& task, const std::string& author, const std::vector<ContractAction>& actions) {
    if (actions.empty()) return;
    auto c = in.snapshot;
    for (const auto& a : actions) {
      auto o = apply_action(c, a, {});
      if (o.accepted) c = std::move(o.contract);
      else {
        r.warnings.push_back(author + ": contract edit refused: " + joined(o.violations));
        note(task, "Contract edit refused: " + joined(o.violations));
      }
    }
    auto ps = diff_contract(in.snapshot, c.sections(), author, in.layer);
    if (!ps.empty()) contributions.push_back({author, task, false, std::move(ps)});
  };

  for (const auto& o : outcomes) {
    auto it = by_id.find(o.task);
    if (it == by_id.end()) {
      r.warnings.push_back("outcome for unknown task " + o.task);
      continue;
    }
    const Task& t = *it->second;
    if (!o.response) {
      note(t.id, "Dispatch failed: " + o.error);
      r.warnings.push_back(std::string(to_string(o.kind)) + " dispatch for " + t.id + " failed: " + o.error);
      if (status[t.id] == TaskStatus::Done) transition(t.id, TaskStatus::Error, "dispatch failed");
      continue;
    }
    const auto& resp = *o.response;
    if (o.kind == DispatchKind::Worker) {
      contribute_actions(t.id, "worker:" + t.id, resp.actions);
      const auto* entry = k.find_entry(t.file_path);
      if (!entry) {
        r.warnings.push_back("task " + t.id + " has no contract entry");
        continue;
      }
      const Artifact* art = nullptr;
      for (const auto& a : resp.artifacts) {
        auto p = normalize_path(a.path);
        if (p && *p == t.file_path) art = &a;
        else r.warnings.push_back("worker " + t.id + " emitted non-owned artifact '" + a.path + "' (ignored)");
      }
      if (!art) {
        deltas[t.id] = {t.id, DeltaKind::Critical, {"no artifact for " + t.file_path}};
        note(t.id, "No file was produced for " + t.file_path + ".");
        continue;
      }
      FileUnit unit{t.file_path, art->body, "worker:" + t.id, in.layer};
      auto d = compare_entry(*entry, extract_symbols(unit), k);
      if (d.kind() == DeltaKind::Critical) {
        auto details = d.critical;
        deltas[t.id] = {t.id, DeltaKind::Critical, details};
        std::string msg = "Rejected: the file does not satisfy its contract entry:";
        for (const auto& x : details) msg += "\n  " + x;
        note(t.id, msg);
        continue;
      }
      pending.push_back({t.id, std::move(unit), std::move(d)});
    } else if (o.kind == DispatchKind::Verifier) {
      contribute_actions(t.id, "critic:" + t.id, resp.actions);
      if (!resp.artifacts.empty()) r.warnings.push_back("critic " + t.id + " emitted artifacts (ignored)");
      if (!resp.verdict) {
        r.warnings.push_back("critic " + t.id + " gave no verdict");
        continue;
      }
      if (!resp.verdict->pass) {
        auto reason = resp.verdict->reason.empty() ? std::string("critic rejected the implementation") : resp.verdict->reason;
        if (transition(t.id, TaskStatus::Error, reason)) {
          note(t.id, reason);
          r.interventions.push_back({InterventionKind::StatusRegression, t.id, reason});
        }
        continue;
      }
      const auto* entry = k.find_entry(t.file_path);
      const auto* unit = in.workspace.find(t.file_path);
      std::vector<std::string> gaps;
      if (!entry) gaps.push_back("no contract entry");
      else if (!unit) gaps.push_back("file missing from workspace");
      else {
        auto d = compare_entry(*entry, extract_symbols(*unit), k, false);
        gaps = d.critical;
        gaps.insert(gaps.end(), d.patchable.begin(), d.patchable.end());
      }
      if (gaps.empty()) {
        transition(t.id, TaskStatus::Verified, "critic pass");
      } else {
        std::string msg = "Contract and code disagree:";
        for (const auto& g : gaps) msg += "\n  " + g;
        if (transition(t.id, TaskStatus::Error, "sync")) {
          note(t.id, msg);
          r.interventions.push_back({InterventionKind::SyncTask, t.id, msg});
        }
      }
    }
  }

  // Amendments legitimizing patchable supersets, one contribution per task.
  std::map<std::string, std::vector<std::string>> amendment_notes;
  for (const auto& p : pending) {
    if (p.delta.amendments.empty()) continue;
    auto api = in.snapshot.section(SectionKey::SymbolicApiSpecifications);
    std::vector<std::string> summaries;
    try {
      for (const auto& [path, a] : p.delta.amendments) {
        api = api_edit::amend(api, path, a);
        summaries.push_back(amendment_summary(path, a));
      }
    } catch (const Error& e) {
      r.warnings.push_back("amendment for " + p.task + " not applicable: " + e.what());
      continue;
    }
    auto sections = in.snapshot.sections();
    sections[static_cast<std::size_t>(SectionKey::SymbolicApiSpecifications)] = api;
    auto ps = diff_contract(in.snapshot, sections, "auditor:" + p.task, in.layer);
    if (ps.empty()) continue;
    contributions.push_back({"auditor:" + p.task, p.task, true, std::move(ps)});
    amendment_notes[p.task] = summaries;
  }

  // Commit: everything, else amendments only, else nothing.
  std::set<std::string> accepted_authors;
  std::vector<Violation> first_rejection;
  auto try_commit = [&](bool amendments_only) {
    std::vector<AtomicPatch> all;
    std::set<std::string> authors;
    for (const auto& c : contributions) {
      if (amendments_only && !c.amendment) continue;
      all.insert(all.end(), c.patches.begin(), c.patches.end());
      authors.insert(c.author);
    }
    if (all.empty()) return true;
    auto merged = merge_layer(in.snapshot, all);
    auto out = commit_merge(in.snapshot, merged, kernel_guard());
    if (!out.accepted) {
      if (first_rejection.empty()) first_rejection = out.violations;
      r.merge_violations.insert(r.merge_violations.end(), out.violations.begin(), out.violations.end());
      return false;
    }
    r.contract = out.contract;
    r.patches = all;
    r.conflicts = merged.conflicts;
    accepted_authors = authors;
    return true;
  };
  if (!contributions.empty() && !try_commit(false)) try_commit(true);
  for (const auto& c : contributions) {
    if (accepted_authors.count(c.author) || c.amendment) continue;
    note(c.task, "Contract edit rejected: " + joined(first_rejection));
  }

  for (auto& p : pending) {
    bool amended = amendment_notes.count(p.task) > 0;
    if (amended && !accepted_authors.count("auditor:" + p.task)) {
      std::vector<std::string> details = p.delta.patchable;
      details.push_back("contract amendment rejected: " + joined(r.merge_violations));
      deltas[p.task] = {p.task, DeltaKind::Critical, details};
      note(p.task, "Rejected: the file goes beyond its contract entry and the amendment was refused (" +
                       joined(r.merge_violations) + ").");
      continue;
    }
    deltas[p.task] = {p.task, p.delta.kind(), p.delta.patchable};
    if (amended)
      for (const auto& s : amendment_notes[p.task]) r.interventions.push_back({InterventionKind::ContractAmendment, p.task, s});
    r.commits.push_back(p.unit);
    auto from = status[p.task];
    if (from == TaskStatus::Todo || from == TaskStatus::Error) transition(p.task, TaskStatus::Done, "artifact committed");
  }
  for (auto& [_, d] : deltas) r.deltas.push_back(std::move(d));

  // Existence and consistency on the post-commit state.
  Workspace ws = in.workspace;
  for (const auto& u : r.commits) ws.commit_file(u.path, u.body, u.writer, u.layer);
  auto e = existence_E(r.contract, ws);
  r.existence = e.value;
  r.missing = e.missing;
  r.warnings.insert(r.warnings.end(), e.warnings.begin(), e.warnings.end());
  auto k2 = project(r.contract);
  for (const auto& path : e.missing) {
    if (!status.count(path)) {
      const auto* entry = k2.find_entry(path);
      r.new_tasks.push_back(Task{path, path, entry ? entry->owner : "", TaskStatus::Todo, 0, {}});
      r.interventions.push_back({InterventionKind::TaskInjection, path, "contracted file missing"});
    } else if (status[path] == TaskStatus::Done) {
      if (transition(path, TaskStatus::Error, "hollow")) {
        note(path, "The file at " + path + " does not define its declared classes.");
        r.interventions.push_back({InterventionKind::StatusRegression, path, "hollow or missing file"});
      }
    }
  }
  r.consistency = consistency_V(r.contract, ws);
  if (!accepted_authors.empty() && r.contract != in.snapshot)
    for (const auto& [id, st] : status)
      if (st == TaskStatus::Verified) r.warnings.push_back("contract changed; " + id + " stays VERIFIED without re-review");
  return r;
}

}  // namespace contractor
