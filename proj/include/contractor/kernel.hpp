#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contractor/contract.hpp"
#include "contractor/task.hpp"
#include "contractor/util.hpp"
#include "contractor/violation.hpp"

namespace contractor {

class SignatureError : public Error {
 public:
  SignatureError(std::size_t column, const std::string& message)
      : Error("SignatureError", "column " + std::to_string(column) + ": " + message), column_(column) {}
  // 1-based column of the offending character.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class ProjectionError : public Error {
 public:
  ProjectionError(std::size_t line, const std::string& message)
      : Error("ProjectionError", "line " + std::to_string(line) + ": " + message), line_(line) {}
  // 1-based line within the section body.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownEdgeEndpoint : public Error {
 public:
  explicit UnknownEdgeEndpoint(const std::string& message) : Error("UnknownEdgeEndpoint", message) {}
};

struct Param {
  std::string name;
  std::string type;
  bool operator==(const Param&) const = default;
};

struct MethodSig {
  std::string name;
  std::vector<Param> params;
  std::string return_type;
  std::string docstring;

  bool operator==(const MethodSig&) const = default;
  bool same_signature(const MethodSig& o) const {
    return name == o.name && params == o.params && return_type == o.return_type;
  }
};

namespace sig_detail {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  std::size_t column() const { return pos_ + 1; }
  bool followed_by_space() const { return pos_ < s_.size() && text::is_space(s_[pos_]); }

  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok, const char* what) {
    if (!accept(tok)) throw SignatureError(column(), std::string("expected ") + what);
  }
  std::string ident(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && text::is_ident_start(s_[pos_])) {
      while (pos_ < s_.size() && text::is_ident_char(s_[pos_])) ++pos_;
    }
    if (start == pos_) throw SignatureError(column(), std::string("expected ") + what);
    return std::string(s_.substr(start, pos_ - start));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// TYPE := NAME ('.' NAME)* ('[' TYPE (',' TYPE)* ']')?
inline std::string parse_type(Cursor& c) {
  std::string out = c.ident("type name");
  while (c.accept(".")) out += "." + c.ident("type name after '.'");
  if (c.accept("[")) {
    out += "[";
    out += parse_type(c);
    while (c.accept(",")) out += ", " + parse_type(c);
    c.expect("]", "']'");
    out += "]";
  }
  return out;
}

}  // namespace sig_detail

// Canonical spelling of a type name (whitespace-normalized).
inline std::string normalize_type(std::string_view t) {
  sig_detail::Cursor c(t);
  auto out = sig_detail::parse_type(c);
  if (!c.at_end()) throw SignatureError(c.column(), "trailing characters after type");
  return out;
}

// Grammar: def NAME ( [NAME : TYPE {, NAME : TYPE}] ) -> TYPE, whitespace
// insensitive, optional trailing ':'.
inline MethodSig parse_signature(std::string_view s) {
  sig_detail::Cursor c(s);
  MethodSig sig;
  if (!c.accept("def")) throw SignatureError(c.column(), "expected 'def'");
  if (!c.followed_by_space()) throw SignatureError(c.column(), "expected whitespace after 'def'");
  sig.name = c.ident("function name");
  c.expect("(", "'('");
  if (!c.accept(")")) {
    do {
      Param p;
      p.name = c.ident("parameter name");
      c.expect(":", "':' after parameter name");
      p.type = sig_detail::parse_type(c);
      sig.params.push_back(std::move(p));
    } while (c.accept(","));
    c.expect(")", "')' or ','");
  }
  c.expect("->", "'->' return annotation");
  sig.return_type = sig_detail::parse_type(c);
  c.accept(":");
  if (!c.at_end()) throw SignatureError(c.column(), "trailing characters after signature");
  return sig;
}

inline std::string print_signature(const MethodSig& sig) {
  std::string out = "def " + sig.name + "(";
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    if (i) out += ", ";
    out += sig.params[i].name + ": " + sig.params[i].type;
  }
  return out + ") -> " + sig.return_type;
}

struct AttributeSpec {
  std::string name;
  std::string type;
  std::string description;
  std::size_t line = 0;  // 0-based line within the API section body
  bool operator==(const AttributeSpec&) const = default;
};

struct ClassSpec {
  std::string name;
  std::vector<AttributeSpec> attributes;
  std::vector<MethodSig> methods;
  // Line loci inside the API section body (0-based), used for edits.
  std::size_t line = 0;
  std::optional<std::size_t> attributes_label;
  std::optional<std::size_t> methods_label;
  std::size_t last_line = 0;
  std::vector<std::size_t> method_lines;

  bool operator==(const ClassSpec&) const = default;

  const AttributeSpec* find_attribute(std::string_view n) const {
    for (const auto& a : attributes)
      if (a.name == n) return &a;
    return nullptr;
  }
};

struct ApiSpecEntry {
  std::string file_path;
  std::string owner;
  int version = 0;
  TaskStatus status = TaskStatus::Todo;
  std::vector<ClassSpec> classes;
  std::vector<MethodSig> functions;  // module-level callables
  std::size_t line = 0;
  std::optional<std::size_t> status_line;
  std::optional<std::size_t> functions_label;
  std::vector<std::size_t> function_lines;
  std::size_t last_line = 0;

  bool operator==(const ApiSpecEntry&) const = default;

  const ClassSpec* find_class(std::string_view name) const {
    for (const auto& c : classes)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// Workspace-relative path with '/' separators, no '.' segments, no '..',
// not absolute. Returns nullopt for paths that escape the root.
inline std::optional<std::string> normalize_path(std::string_view raw) {
  std::string p = text::trim(raw);
  for (auto& ch : p)
    if (ch == '\\') ch = '/';
  if (p.empty() || p.front() == '/' || (p.size() > 1 && p[1] == ':')) return std::nullopt;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= p.size()) {
    auto slash = p.find('/', pos);
    auto end = slash == std::string::npos ? p.size() : slash;
    auto seg = p.substr(pos, end - pos);
    if (seg == "..") return std::nullopt;
    if (!seg.empty() && seg != ".") parts.push_back(seg);
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  if (parts.empty()) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "/" : "") + parts[i];
  return out;
}

enum class SymbolKind { Attribute, Method, Function };

struct SymbolEntry {
  SymbolKind kind;
  std::string entry;  // owning file path
  std::string type;   // attribute type
  MethodSig signature;
  bool operator==(const SymbolEntry&) const = default;
};

// K = <N, Sigma, Delta>.
struct SymbolicKernel {
  std::map<std::string, std::string> nodes;  // module id -> file path
  std::vector<ApiSpecEntry> entries;         // sorted by file path
  std::map<std::string, SymbolEntry> signatures;
  std::set<std::pair<std::string, std::string>> edges;          // authoritative
  std::set<std::pair<std::string, std::string>> derived_edges;  // implied by type references
  std::vector<std::string> warnings;

  bool operator==(const SymbolicKernel&) const = default;

  const ApiSpecEntry* find_entry(std::string_view path) const {
    for (const auto& e : entries)
      if (e.file_path == path) return &e;
    return nullptr;
  }
};

inline const std::set<std::string>& primitive_types() {
  static const std::set<std::string> kTypes = {"int",  "float", "str", "bool", "None", "list",
                                               "dict", "tuple", "set", "any",  "object"};
  return kTypes;
}

// Head symbol of a type: "list[int]" -> "list", "a.b.Player" -> "Player".
inline std::string type_head(std::string_view type) {
  auto bracket = type.find('[');
  auto head = type.substr(0, bracket);
  auto dot = head.rfind('.');
  if (dot != std::string_view::npos) head = head.substr(dot + 1);
  return text::trim(head);
}

// Every head symbol mentioned in a type, including generic arguments.
inline std::vector<std::string> type_symbols(std::string_view type) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto t = text::trim(cur);
    if (!t.empty()) out.push_back(type_head(t));
    cur.clear();
  };
  for (char ch : type) {
    if (ch == '[' || ch == ']' || ch == ',') flush();
    else cur += ch;
  }
  flush();
  return out;
}

namespace kernel_detail {

inline std::size_t indent_of(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

// Strips list bullets and surrounding whitespace: "  * foo" -> "foo".
inline std::string_view strip_bullet(std::string_view line) {
  auto t = text::trim_view(line);
  if (t.size() >= 2 && (t[0] == '*' || t[0] == '-' || t[0] == '+') && t[1] == ' ') t = text::trim_view(t.substr(2));
  return t;
}

inline bool is_bullet(std::string_view line) {
  auto t = text::trim_view(line);
  return t.size() >= 2 && (t[0] == '*' || t[0] == '-' || t[0] == '+') && t[1] == ' ';
}

// Finds "**Label:**" in the line and returns the text after it.
inline std::optional<std::string> label_value(std::string_view line, std::string_view label) {
  std::string needle = "**" + std::string(label) + ":**";
  auto pos = line.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  return text::trim(line.substr(pos + needle.size()));
}

inline std::string unquote(std::string_view v) {
  auto t = text::trim_view(v);
  while (t.size() >= 2 && ((t.front() == '`' && t.back() == '`') || (t.front() == '"' && t.back() == '"') ||
                           (t.front() == '\'' && t.back() == '\''))) {
    t = text::trim_view(t.substr(1, t.size() - 2));
  }
  return std::string(t);
}

// Splits a list item "`spec` - description" into (spec, description).
inline std::pair<std::string, std::string> split_item(std::string_view item) {
  if (!item.empty() && item.front() == '`') {
    auto close = item.find('`', 1);
    if (close != std::string_view::npos) {
      auto spec = item.substr(1, close - 1);
      auto rest = text::trim_view(item.substr(close + 1));
      if (text::starts_with(rest, "-") || text::starts_with(rest, ":")) rest = text::trim_view(rest.substr(1));
      return {text::trim(spec), std::string(rest)};
    }
  }
  auto dash = item.find(" - ");
  if (dash != std::string_view::npos) return {text::trim(item.substr(0, dash)), text::trim(item.substr(dash + 3))};
  return {text::trim(item), ""};
}

inline AttributeSpec parse_attribute(std::string_view spec, std::string desc, std::size_t line_no) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ProjectionError(line_no, "attribute needs 'name: type'");
  auto name = text::trim(spec.substr(0, colon));
  if (!text::is_identifier(name)) throw ProjectionError(line_no, "invalid attribute name '" + name + "'");
  std::string type;
  try {
    type = normalize_type(spec.substr(colon + 1));
  } catch (const SignatureError& e) {
    throw ProjectionError(line_no, "attribute '" + name + "': " + e.what());
  }
  return {name, type, std::move(desc), line_no - 1};
}

}  // namespace kernel_detail

// Parses the Symbolic API Specifications section into entries.
inline std::vector<ApiSpecEntry> parse_api_entries(const SectionBody& body) {
  using namespace kernel_detail;
  enum class Mode { None, Attributes, Methods, Functions };
  std::vector<ApiSpecEntry> entries;
  ApiSpecEntry* entry = nullptr;
  ClassSpec* cls = nullptr;
  Mode mode = Mode::None;
  markdown::FenceTracker fences;
  std::set<std::string> paths;

  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::string& line = body[i];
    const std::size_t line_no = i + 1;
    if (fences.feed(line) || text::is_blank(line)) continue;

    std::optional<std::string> v;
    if ((v = file_label_value(line))) {
      auto path = normalize_path(unquote(*v));
      if (!path) throw ProjectionError(line_no, "invalid file path '" + *v + "'");
      if (!paths.insert(*path).second) throw ProjectionError(line_no, "duplicate entry for '" + *path + "'");
      entries.emplace_back();
      entry = &entries.back();
      entry->file_path = *path;
      entry->line = i;
      entry->last_line = i;
      cls = nullptr;
      mode = Mode::None;
      continue;
    }
    if (!entry) continue;  // preamble prose
    entry->last_line = i;

    if ((v = label_value(line, "Owner"))) {
      entry->owner = unquote(*v);
    } else if ((v = label_value(line, "Version"))) {
      auto raw = unquote(*v);
      try {
        std::size_t used = 0;
        int n = std::stoi(raw, &used);
        if (used != raw.size() || n < 0) throw std::invalid_argument(raw);
        entry->version = n;
      } catch (const std::exception&) {
        throw ProjectionError(line_no, "version must be a non-negative integer, got '" + raw + "'");
      }
    } else if ((v = label_value(line, "Status"))) {
      auto st = parse_status(unquote(*v));
      if (!st) throw ProjectionError(line_no, "unknown status '" + *v + "'");
      entry->status = *st;
      entry->status_line = i;
    } else if (label_value(line, "Classes")) {
      cls = nullptr;
      mode = Mode::None;
    } else if ((v = label_value(line, "Class")) || (v = label_value(line, "Class Name"))) {
      auto name = unquote(*v);
      if (!text::is_identifier(name)) throw ProjectionError(line_no, "invalid class name '" + name + "'");
      if (entry->find_class(name)) throw ProjectionError(line_no, "duplicate class '" + name + "'");
      entry->classes.emplace_back();
      cls = &entry->classes.back();
      cls->name = name;
      cls->line = i;
      cls->last_line = i;
      mode = Mode::None;
    } else if (label_value(line, "Attributes")) {
      if (!cls) throw ProjectionError(line_no, "Attributes outside a class");
      cls->attributes_label = i;
      mode = Mode::Attributes;
    } else if (label_value(line, "Methods")) {
      if (!cls) throw ProjectionError(line_no, "Methods outside a class");
      cls->methods_label = i;
      mode = Mode::Methods;
    } else if (label_value(line, "Functions")) {
      cls = nullptr;
      entry->functions_label = i;
      mode = Mode::Functions;
    } else if (is_bullet(line) && mode != Mode::None) {
      auto [spec, desc] = split_item(strip_bullet(line));
      if (mode == Mode::Attributes) {
        auto attr = parse_attribute(spec, desc, line_no);
        for (const auto& a : cls->attributes)
          if (a.name == attr.name) throw ProjectionError(line_no, "duplicate attribute '" + attr.name + "'");
        cls->attributes.push_back(std::move(attr));
      } else {
        MethodSig sig;
        try {
          sig = parse_signature(spec);
        } catch (const SignatureError& e) {
          throw ProjectionError(line_no, e.what());
        }
        sig.docstring = desc;
        auto& list = mode == Mode::Methods ? cls->methods : entry->functions;
        for (const auto& m : list)
          if (m.name == sig.name) throw ProjectionError(line_no, "duplicate callable '" + sig.name + "'");
        list.push_back(std::move(sig));
        (mode == Mode::Methods ? cls->method_lines : entry->function_lines).push_back(i);
      }
    }
    // Other prose lines inside an entry are ignored.
    if (cls) cls->last_line = i;
  }
  for (const auto& e : entries) {
    if (e.owner.empty()) throw ProjectionError(e.line + 1, "entry '" + e.file_path + "' has no Owner");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.file_path < b.file_path; });
  return entries;
}

// "a/b/c.py" -> "a.b.c"
inline std::string dotted_module(std::string_view path) {
  std::string p(path);
  auto slash = p.rfind('/');
  auto dot = p.rfind('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) p.erase(dot);
  for (auto& ch : p)
    if (ch == '/') ch = '.';
  return p;
}

inline std::string strip_extension(std::string_view path) {
  std::string p(path);
  auto slash = p.rfind('/');
  auto dot = p.rfind('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) p.erase(dot);
  return p;
}

inline std::string path_stem(std::string_view path) {
  auto p = strip_extension(path);
  auto slash = p.rfind('/');
  return slash == std::string::npos ? p : p.substr(slash + 1);
}

namespace kernel_detail {

// Node token of an edge line: "A", "A[label]", "A[\"label\"]" -> label if present.
inline std::string edge_token(std::string_view tok) {
  auto t = text::trim_view(tok);
  auto open = t.find_first_of("[(");
  if (open != std::string_view::npos && open > 0) {
    auto close = t.find_last_of("])");
    if (close != std::string_view::npos && close > open) return unquote(t.substr(open + 1, close - open - 1));
  }
  return unquote(t);
}

inline std::string resolve_node(const std::map<std::string, std::string>& nodes, const std::string& token) {
  if (auto norm = normalize_path(token); norm && nodes.count(*norm)) return *norm;
  std::vector<std::string> stem_hits;
  for (const auto& [id, path] : nodes) {
    if (strip_extension(path) == token || dotted_module(path) == token) return id;
    if (path_stem(path) == token) stem_hits.push_back(id);
  }
  if (stem_hits.size() == 1) return stem_hits.front();
  if (stem_hits.size() > 1) throw UnknownEdgeEndpoint("ambiguous edge endpoint '" + token + "'");
  throw UnknownEdgeEndpoint("edge endpoint '" + token + "' names no API entry");
}

}  // namespace kernel_detail

// Projects the API-specification and dependency sections into the kernel.
// Throws ProjectionError or UnknownEdgeEndpoint.
inline SymbolicKernel project(const LanguageContract& c) {
  using namespace kernel_detail;
  SymbolicKernel k;
  k.entries = parse_api_entries(c.section(SectionKey::SymbolicApiSpecifications));
  std::map<std::string, std::string> class_home;
  for (const auto& e : k.entries) {
    k.nodes.emplace(e.file_path, e.file_path);
    for (const auto& cls : e.classes) {
      class_home.emplace(cls.name, e.file_path);
      for (const auto& a : cls.attributes)
        k.signatures.emplace(e.file_path + "::" + cls.name + "." + a.name,
                             SymbolEntry{SymbolKind::Attribute, e.file_path, a.type, {}});
      for (const auto& m : cls.methods)
        k.signatures.emplace(e.file_path + "::" + cls.name + "." + m.name,
                             SymbolEntry{SymbolKind::Method, e.file_path, {}, m});
    }
    for (const auto& f : e.functions)
      k.signatures.emplace(e.file_path + "::" + f.name, SymbolEntry{SymbolKind::Function, e.file_path, {}, f});
  }

  markdown::FenceTracker fences;
  for (const auto& raw : c.section(SectionKey::DependencyRelationships)) {
    bool fence_line = fences.feed(raw);
    auto line = text::trim(raw);
    if (line.empty() || (fence_line && (text::starts_with(line, "```") || text::starts_with(line, "~~~")))) continue;
    auto item = std::string(strip_bullet(line));
    if (!item.empty() && item.back() == ';') item.pop_back();
    auto arrow = item.find("-->");
    if (arrow == std::string::npos) {
      k.warnings.push_back("ignored diagram line: " + line);
      continue;
    }
    auto from = edge_token(std::string_view(item).substr(0, arrow));
    auto to = edge_token(std::string_view(item).substr(arrow + 3));
    if (from.empty() || to.empty() || to.find("-->") != std::string::npos) {
      k.warnings.push_back("ignored diagram line: " + line);
      continue;
    }
    k.edges.emplace(resolve_node(k.nodes, from), resolve_node(k.nodes, to));
  }

  for (const auto& [sym, entry] : k.signatures) {
    std::vector<std::string> types;
    if (entry.kind == SymbolKind::Attribute) types.push_back(entry.type);
    else {
      for (const auto& p : entry.signature.params) types.push_back(p.type);
      types.push_back(entry.signature.return_type);
    }
    for (const auto& t : types) {
      for (const auto& head : type_symbols(t)) {
        auto home = class_home.find(head);
        if (home == class_home.end() || home->second == entry.entry) continue;
        std::pair<std::string, std::string> edge{entry.entry, home->second};
        if (!k.edges.count(edge)) k.derived_edges.insert(edge);
      }
    }
  }
  return k;
}

// Topological order of the authoritative edges (lexicographic tie-break);
// nullopt when cyclic.
inline std::optional<std::vector<std::string>> topological_order(const SymbolicKernel& k) {
  std::map<std::string, int> indeg;
  for (const auto& [id, _] : k.nodes) indeg[id] = 0;
  for (const auto& [a, b] : k.edges) ++indeg[b];
  std::set<std::string> ready;
  for (const auto& [id, d] : indeg)
    if (d == 0) ready.insert(id);
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& [a, b] : k.edges)
      if (a == id && --indeg[b] == 0) ready.insert(b);
  }
  if (order.size() != indeg.size()) return std::nullopt;
  return order;
}

namespace kernel_detail {

// Tarjan SCC; returns components with a cycle (size > 1 or self loop), each
// as a concrete cycle path starting at its smallest node.
inline std::vector<std::vector<std::string>> find_cycles(const std::set<std::string>& nodes,
                                                         const std::set<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& n : nodes) adj[n];
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b];
  }
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> comps;
  int counter = 0;
  std::function<void(const std::string&)> strong = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& w : adj[v]) {
      if (!index.count(w)) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      comps.push_back(std::move(comp));
    }
  };
  for (const auto& [n, _] : adj)
    if (!index.count(n)) strong(n);

  std::vector<std::vector<std::string>> cycles;
  for (auto& comp : comps) {
    std::set<std::string> members(comp.begin(), comp.end());
    const auto& start = *members.begin();
    bool self_loop = edges.count({start, start}) > 0;
    if (comp.size() == 1 && !self_loop) continue;
    if (self_loop) {
      cycles.push_back({start});
      continue;
    }
    // BFS inside the component for the lexicographically-first shortest cycle back to start.
    std::map<std::string, std::string> parent;
    std::vector<std::string> frontier{start};
    std::set<std::string> visited{start};
    std::string last;
    while (!frontier.empty() && last.empty()) {
      std::vector<std::string> next;
      for (const auto& v : frontier) {
        auto succ = adj[v];
        std::sort(succ.begin(), succ.end());
        for (const auto& w : succ) {
          if (!members.count(w)) continue;
          if (w == start) {
            last = v;
            break;
          }
          if (visited.insert(w).second) {
            parent[w] = v;
            next.push_back(w);
          }
        }
        if (!last.empty()) break;
      }
      frontier = std::move(next);
    }
    std::vector<std::string> path;
    for (auto v = last; v != start; v = parent[v]) path.push_back(v);
    path.push_back(start);
    std::reverse(path.begin(), path.end());
    cycles.push_back(std::move(path));
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

}  // namespace kernel_detail

inline bool has_cycle(const SymbolicKernel& k) {
  std::set<std::string> nodes;
  for (const auto& [id, _] : k.nodes) nodes.insert(id);
  return !kernel_detail::find_cycles(nodes, k.edges).empty();
}

// All kernel violations; empty means valid.
inline std::vector<Violation> validate(const SymbolicKernel& k) {
  std::vector<Violation> out;
  std::set<std::string> nodes;
  for (const auto& [id, _] : k.nodes) nodes.insert(id);
  for (auto& cycle : kernel_detail::find_cycles(nodes, k.edges))
    out.push_back({ViolationKind::Cycle, "dependency cycle", std::move(cycle)});

  std::set<std::string> declared;
  for (const auto& e : k.entries)
    for (const auto& c : e.classes) declared.insert(c.name);
  auto check = [&](const std::string& path, const std::string& where, const std::string& type) {
    auto head = type_head(type);
    if (!primitive_types().count(head) && !declared.count(head))
      out.push_back({ViolationKind::TypeUndefined, where + " uses undeclared type '" + head + "'", {path}});
  };
  for (const auto& e : k.entries) {
    auto check_sig = [&](const std::string& where, const MethodSig& m) {
      for (const auto& p : m.params) check(e.file_path, where + "(" + p.name + ")", p.type);
      check(e.file_path, where + " return", m.return_type);
    };
    for (const auto& c : e.classes) {
      for (const auto& a : c.attributes) check(e.file_path, c.name + "." + a.name, a.type);
      for (const auto& m : c.methods) check_sig(c.name + "." + m.name, m);
    }
    for (const auto& f : e.functions) check_sig(f.name, f);

    bool documented = false;
    for (const auto& c : e.classes)
      for (const auto& m : c.methods) documented = documented || !text::is_blank(m.docstring);
    for (const auto& f : e.functions) documented = documented || !text::is_blank(f.docstring);
    if (!documented)
      out.push_back({ViolationKind::Incomplete, "no documented method or function", {e.file_path}});
  }
  return out;
}

// Violations that block a contract transition: projection failures, cycles,
// undefined types. INCOMPLETE is advisory.
inline std::vector<Violation> blocking_violations(const LanguageContract& c) {
  SymbolicKernel k;
  try {
    k = project(c);
  } catch (const ProjectionError& e) {
    return {{ViolationKind::Projection, e.what(), {}}};
  } catch (const UnknownEdgeEndpoint& e) {
    return {{ViolationKind::UnknownEdgeEndpoint, e.what(), {}}};
  }
  std::vector<Violation> out;
  for (auto& v : validate(k))
    if (v.kind != ViolationKind::Incomplete) out.push_back(std::move(v));
  return out;
}

inline KernelGuard kernel_guard() { return blocking_violations; }

// One task per API entry, path-lexicographic.
inline std::vector<Task> tasks_of(const SymbolicKernel& k) {
  std::vector<Task> out;
  for (const auto& e : k.entries) out.push_back(Task{e.file_path, e.file_path, e.owner, e.status, 0, {}});
  return out;
}

}  // namespace contractor
