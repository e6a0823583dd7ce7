#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "contractor/util.hpp"
#include "contractor/violation.hpp"

namespace contractor {

// The seven canonical contract sections, in render order.
enum class SectionKey {
  ProjectOverview,
  UserStories,
  Constraints,
  DirectoryStructure,
  GlobalSharedKnowledge,
  DependencyRelationships,
  SymbolicApiSpecifications,
};

inline constexpr std::size_t kSectionCount = 7;

inline constexpr std::array<SectionKey, kSectionCount> kAllSections = {
    SectionKey::ProjectOverview,       SectionKey::UserStories,
    SectionKey::Constraints,           SectionKey::DirectoryStructure,
    SectionKey::GlobalSharedKnowledge, SectionKey::DependencyRelationships,
    SectionKey::SymbolicApiSpecifications,
};

inline std::string_view identifier(SectionKey k) {
  static constexpr std::array<std::string_view, kSectionCount> names = {
      "ProjectOverview",       "UserStories",
      "Constraints",           "DirectoryStructure",
      "GlobalSharedKnowledge", "DependencyRelationships",
      "SymbolicApiSpecifications",
  };
  return names[static_cast<std::size_t>(k)];
}

// Heading text used in the markdown form.
inline std::string_view heading(SectionKey k) {
  static constexpr std::array<std::string_view, kSectionCount> names = {
      "Project Overview",        "User Stories (Features)",
      "Constraints",             "Directory Structure",
      "Global Shared Knowledge", "Dependency Relationships",
      "Symbolic API Specifications",
  };
  return names[static_cast<std::size_t>(k)];
}

inline constexpr std::string_view kRequirementsTier = "# Requirements Document";
inline constexpr std::string_view kTechnicalTier = "# Technical Document";

namespace detail {

inline std::string fold_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (text::is_ident_char(c) && c != '_') out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  }
  return out;
}

}  // namespace detail

// Accepts the heading text or the identifier, compared case- and
// punctuation-insensitively. Anything else is not a section.
inline std::optional<SectionKey> parse_section_key(std::string_view name) {
  auto folded = detail::fold_key(name);
  if (folded.empty()) return std::nullopt;
  for (auto k : kAllSections) {
    if (folded == detail::fold_key(heading(k)) || folded == detail::fold_key(identifier(k))) return k;
  }
  return std::nullopt;
}

inline SectionKey section_key_or_throw(std::string_view name) {
  if (auto k = parse_section_key(name)) return *k;
  throw UnknownSection("unknown section key '" + std::string(name) + "'");
}

using SectionBody = std::vector<std::string>;
using Sections = std::array<SectionBody, kSectionCount>;

// Immutable contract value: section bodies, a revision counter and the base
// snapshot that anchors patch coordinates until the next layer commit.
class LanguageContract {
 public:
  LanguageContract() = default;

  static LanguageContract from_parts(Sections sections, std::uint64_t revision, Sections base) {
    LanguageContract c;
    c.sections_ = std::move(sections);
    c.revision_ = revision;
    c.base_ = std::move(base);
    return c;
  }

  const SectionBody& section(SectionKey k) const { return sections_[static_cast<std::size_t>(k)]; }
  const SectionBody& base_section(SectionKey k) const { return base_[static_cast<std::size_t>(k)]; }
  const Sections& sections() const { return sections_; }
  const Sections& base() const { return base_; }
  std::uint64_t revision() const { return revision_; }

  // Next revision with one section replaced; base untouched.
  LanguageContract with_section(SectionKey k, SectionBody body) const {
    LanguageContract next = *this;
    next.sections_[static_cast<std::size_t>(k)] = std::move(body);
    ++next.revision_;
    return next;
  }

  // Next revision with every section replaced and base reset to it.
  LanguageContract committed(Sections sections) const {
    LanguageContract next = *this;
    next.sections_ = std::move(sections);
    next.base_ = next.sections_;
    ++next.revision_;
    return next;
  }

  // Same revision, base reset to the current sections.
  LanguageContract rebased() const {
    LanguageContract next = *this;
    next.base_ = next.sections_;
    return next;
  }

  bool operator==(const LanguageContract&) const = default;

 private:
  Sections sections_{};
  std::uint64_t revision_ = 0;
  Sections base_{};
};

namespace markdown {

inline bool is_section_heading(std::string_view line) {
  auto r = text::rtrim(line);
  return r == "##" || text::starts_with(r, "## ");
}

inline bool is_tier_heading(std::string_view line) {
  auto r = text::rtrim(line);
  return r == kRequirementsTier || r == kTechnicalTier;
}

// Tracks fenced code blocks (``` or ~~~) line by line.
class FenceTracker {
 public:
  // Feeds one line; returns true if the line is inside a fence or is a fence
  // delimiter itself.
  bool feed(std::string_view line) {
    std::size_t indent = 0;
    while (indent < line.size() && indent < 3 && line[indent] == ' ') ++indent;
    auto rest = line.substr(indent);
    char ch = rest.empty() ? '\0' : rest.front();
    std::size_t run = 0;
    if (ch == '`' || ch == '~') {
      while (run < rest.size() && rest[run] == ch) ++run;
    }
    if (!open_) {
      if (run >= 3 && (ch == '~' || rest.substr(run).find('`') == std::string_view::npos)) {
        open_ = true;
        fence_char_ = ch;
        fence_len_ = run;
        return true;
      }
      return false;
    }
    if (ch == fence_char_ && run >= fence_len_ && text::is_blank(rest.substr(run))) open_ = false;
    return true;
  }

  bool open() const { return open_; }

 private:
  bool open_ = false;
  char fence_char_ = '\0';
  std::size_t fence_len_ = 0;
};

// Returns an error message if `body` cannot live inside a section without
// changing the document structure, or nullopt when it is fine.
inline std::optional<std::string> body_problem(const SectionBody& body) {
  FenceTracker fences;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto& line = body[i];
    if (line.find_first_of("\r\n") != std::string::npos)
      return "line " + std::to_string(i + 1) + " contains a line break";
    if (fences.feed(line)) continue;
    if (is_section_heading(line)) return "line " + std::to_string(i + 1) + " is a section heading";
    if (is_tier_heading(line)) return "line " + std::to_string(i + 1) + " is a tier heading";
  }
  if (fences.open()) return "unterminated code fence";
  if (!body.empty() && (text::is_blank(body.front()) || text::is_blank(body.back())))
    return "leading or trailing blank line";
  return std::nullopt;
}

}  // namespace markdown

// Splits action content into a canonical body (blank edge lines dropped).
inline SectionBody to_body(std::string_view content) { return text::trim_blank_edges(text::split_lines(content)); }

inline std::string render_sections(const Sections& sections) {
  std::vector<std::string> out;
  auto emit = [&](SectionKey k) {
    out.push_back("## " + std::string(heading(k)));
    out.emplace_back();
    const auto& body = sections[static_cast<std::size_t>(k)];
    if (!body.empty()) {
      out.insert(out.end(), body.begin(), body.end());
      out.emplace_back();
    }
  };
  out.emplace_back(kRequirementsTier);
  out.emplace_back();
  for (auto k : {SectionKey::ProjectOverview, SectionKey::UserStories, SectionKey::Constraints}) emit(k);
  out.emplace_back(kTechnicalTier);
  out.emplace_back();
  for (auto k : {SectionKey::DirectoryStructure, SectionKey::GlobalSharedKnowledge,
                 SectionKey::DependencyRelationships, SectionKey::SymbolicApiSpecifications})
    emit(k);
  return text::join_lines(out);
}

// Canonical markdown form; sections always in the fixed order.
inline std::string render(const LanguageContract& c) { return render_sections(c.sections()); }

inline Sections parse_sections(std::string_view doc) {
  Sections sections{};
  std::array<bool, kSectionCount> seen{};
  std::optional<SectionKey> current;
  markdown::FenceTracker fences;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(doc)) {
    ++line_no;
    bool fenced = fences.feed(line);
    if (!fenced && markdown::is_section_heading(line)) {
      auto name = text::trim(text::rtrim(line).substr(2));
      auto key = parse_section_key(name);
      if (!key) throw MalformedTemplate("line " + std::to_string(line_no) + ": unknown section heading '" + name + "'");
      auto idx = static_cast<std::size_t>(*key);
      if (seen[idx]) throw MalformedTemplate("line " + std::to_string(line_no) + ": duplicate section '" + name + "'");
      seen[idx] = true;
      current = key;
      continue;
    }
    if (!fenced && markdown::is_tier_heading(line)) continue;
    if (!current) {
      bool title = !fenced && text::starts_with(line, "# ");
      if (text::is_blank(line) || title) continue;
      throw MalformedTemplate("line " + std::to_string(line_no) + ": content before the first section heading");
    }
    sections[static_cast<std::size_t>(*current)].push_back(line);
  }
  if (fences.open()) throw MalformedTemplate("unterminated code fence");
  std::string missing;
  for (auto k : kAllSections) {
    if (!seen[static_cast<std::size_t>(k)]) missing += (missing.empty() ? "" : ", ") + std::string(heading(k));
  }
  if (!missing.empty()) throw MalformedTemplate("missing section(s): " + missing);
  for (auto& body : sections) body = text::trim_blank_edges(std::move(body));
  return sections;
}

// Inverse of render on canonical documents. Revision 0, base == sections.
inline LanguageContract parse(std::string_view doc) {
  auto sections = parse_sections(doc);
  return LanguageContract::from_parts(sections, 0, sections);
}

inline LanguageContract new_contract(std::string_view template_text) { return parse(template_text); }

inline LanguageContract empty_contract() { return LanguageContract{}; }

enum class ActionOp { Add, Update };

inline const char* to_string(ActionOp op) { return op == ActionOp::Add ? "ADD" : "UPDATE"; }

struct ContractAction {
  ActionOp op = ActionOp::Update;
  SectionKey section = SectionKey::ProjectOverview;
  // Full section body for UPDATE; lines to append for ADD.
  std::string content;

  bool operator==(const ContractAction&) const = default;
};

// Value of an API entry's file label: "**File:** x", "**File Path:** x" or a
// heading "### File: x".
inline std::optional<std::string> file_label_value(std::string_view line) {
  for (std::string_view label : {"**File:**", "**File Path:**"}) {
    auto pos = line.find(label);
    if (pos != std::string_view::npos) return text::trim(line.substr(pos + label.size()));
  }
  auto t = text::trim_view(line);
  if (t.empty() || t.front() != '#') return std::nullopt;
  while (!t.empty() && t.front() == '#') t.remove_prefix(1);
  t = text::trim_view(t);
  for (std::string_view label : {"File:", "File Path:"}) {
    if (text::starts_with(t, label)) return text::trim(t.substr(label.size()));
  }
  return std::nullopt;
}

// True for an API-specification patch that carries a Status field without
// any File field; such a patch would clobber the section.
inline bool is_partial_api_patch(std::string_view content) {
  bool status = false;
  bool file = false;
  for (const auto& line : text::split_lines(content)) {
    if (line.find("**Status:**") != std::string::npos) status = true;
    if (file_label_value(line)) file = true;
  }
  return status && !file;
}

using KernelGuard = std::function<std::vector<Violation>(const LanguageContract&)>;

struct ActionOutcome {
  LanguageContract contract;
  bool accepted = false;
  std::vector<Violation> violations;
};

// Section body the action would produce, or the violation that blocks it.
inline std::variant<SectionBody, Violation> proposed_body(const SectionBody& current, const ContractAction& a) {
  if (a.section == SectionKey::SymbolicApiSpecifications && is_partial_api_patch(a.content))
    return Violation{ViolationKind::PartialPatch, "Status field without File field", {}};
  auto lines = to_body(a.content);
  SectionBody body;
  if (a.op == ActionOp::Add) {
    body = current;
    body.insert(body.end(), lines.begin(), lines.end());
    body = text::trim_blank_edges(std::move(body));
  } else {
    body = std::move(lines);
  }
  if (auto problem = markdown::body_problem(body)) return Violation{ViolationKind::MalformedContent, *problem, {}};
  return body;
}

// Transition C_{t+1} = T(C_t, a). Rejected actions return the input
// contract unchanged.
inline ActionOutcome apply_action(const LanguageContract& c, const ContractAction& a, const KernelGuard& guard) {
  auto body = proposed_body(c.section(a.section), a);
  if (auto* v = std::get_if<Violation>(&body)) return {c, false, {*v}};
  auto next = c.with_section(a.section, std::get<SectionBody>(std::move(body)));
  if (guard) {
    auto violations = guard(next);
    if (!violations.empty()) return {c, false, std::move(violations)};
  }
  return {std::move(next), true, {}};
}

inline std::string contract_digest(const LanguageContract& c) {
  return sha256_hex(render(c) + "\n@revision " + std::to_string(c.revision()) + "\n@base\n" +
                    render_sections(c.base()));
}

struct JournalRecord {
  std::uint64_t revision = 0;
  std::string op;  // ADD, UPDATE, or MERGE for layer commits
  std::string section;
  std::string content_sha256;

  bool operator==(const JournalRecord&) const = default;
};

// Append-only sidecar log of accepted contract transitions.
class ContractJournal {
 public:
  void append(JournalRecord r) { records_.push_back(std::move(r)); }

  void record_action(const LanguageContract& after, const ContractAction& a) {
    append({after.revision(), to_string(a.op), std::string(identifier(a.section)),
            sha256_hex(text::join_lines(after.section(a.section)))});
  }

  // One record per section that differs between the two contracts.
  void record_merge(const LanguageContract& before, const LanguageContract& after) {
    for (auto k : kAllSections) {
      if (before.section(k) != after.section(k))
        append({after.revision(), "MERGE", std::string(identifier(k)), sha256_hex(text::join_lines(after.section(k)))});
    }
  }

  const std::vector<JournalRecord>& records() const { return records_; }

  std::string to_jsonl() const {
    std::string out;
    for (const auto& r : records_) {
      nlohmann::json j{{"revision", r.revision}, {"op", r.op}, {"section", r.section}, {"content_sha256", r.content_sha256}};
      out += j.dump() + "\n";
    }
    return out;
  }

 private:
  std::vector<JournalRecord> records_;
};

}  // namespace contractor
