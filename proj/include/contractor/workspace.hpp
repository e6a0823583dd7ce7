#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "contractor/kernel.hpp"
#include "contractor/util.hpp"

namespace contractor {

struct FileUnit {
  std::string path;
  std::string body;
  std::string writer;
  int layer = 0;
  bool operator==(const FileUnit&) const = default;
};

struct ExtractedAttribute {
  std::string name;
  std::string type;  // annotation, literal-inferred type, or "any"
  bool operator==(const ExtractedAttribute&) const = default;
};

struct ExtractedClass {
  std::string name;
  std::vector<ExtractedAttribute> attributes;  // constructor self-assignments, first-seen order
  std::vector<MethodSig> methods;
  bool operator==(const ExtractedClass&) const = default;
};

struct Import {
  std::string module;  // absolute dotted module path
  std::string symbol;  // empty when whole_module
  bool whole_module = false;
  std::size_t line = 0;
  bool operator==(const Import&) const = default;
};

// `param.member` use where `param` is annotated with a class name.
struct Demand {
  std::string type;
  std::string member;
  bool call = false;
  bool operator==(const Demand&) const = default;
  auto operator<=>(const Demand&) const = default;
};

struct ExtractedSymbols {
  bool analyzable = true;
  std::string problem;
  std::vector<ExtractedClass> classes;
  std::vector<MethodSig> functions;
  std::vector<std::string> top_level_names;
  std::vector<Import> imports;
  std::vector<Demand> demands;  // sorted, unique
  bool operator==(const ExtractedSymbols&) const = default;

  const ExtractedClass* find_class(std::string_view name) const {
    for (const auto& c : classes)
      if (c.name == name) return &c;
    return nullptr;
  }

  bool defines(std::string_view name) const {
    for (const auto& c : classes)
      if (c.name == name) return true;
    for (const auto& f : functions)
      if (f.name == name) return true;
    for (const auto& n : top_level_names)
      if (n == name) return true;
    return false;
  }
};

class Analyzer {
 public:
  virtual ~Analyzer() = default;
  virtual ExtractedSymbols extract(const FileUnit& unit) const = 0;
};

namespace py {

struct LogicalLine {
  std::size_t indent = 0;
  std::size_t line = 0;  // 1-based first physical line
  std::string text;      // comments removed, string contents blanked
};

// Joins physical lines into logical lines. Comments are dropped, string
// literal contents are emptied (quotes kept), docstrings vanish.
inline std::optional<std::vector<LogicalLine>> logical_lines(std::string_view src, std::string& problem) {
  std::vector<LogicalLine> out;
  LogicalLine cur;
  bool in_line = false;
  int depth = 0;
  bool continuation = false;
  std::string triple;  // active triple-quote delimiter
  std::size_t line_no = 0;
  for (const auto& phys : text::split_lines(src)) {
    ++line_no;
    std::size_t i = 0;
    if (!in_line && triple.empty()) {
      std::size_t ind = 0;
      while (ind < phys.size() && (phys[ind] == ' ' || phys[ind] == '\t')) ind += 1;
      if (ind == phys.size()) continue;
      cur = LogicalLine{ind, line_no, {}};
      in_line = true;
      i = ind;
    }
    continuation = false;
    while (i < phys.size()) {
      if (!triple.empty()) {
        auto end = phys.find(triple, i);
        if (end == std::string::npos) {
          i = phys.size();
          break;
        }
        cur.text += triple;
        i = end + 3;
        triple.clear();
        continue;
      }
      char ch = phys[i];
      if (ch == '#') break;
      if (ch == '"' || ch == '\'') {
        std::string q3(3, ch);
        if (phys.compare(i, 3, q3) == 0) {
          cur.text += q3;
          triple = q3;
          i += 3;
          continue;
        }
        // single-line string
        std::size_t j = i + 1;
        while (j < phys.size() && phys[j] != ch) j += phys[j] == '\\' ? 2 : 1;
        if (j >= phys.size()) {
          problem = "line " + std::to_string(line_no) + ": unterminated string";
          return std::nullopt;
        }
        cur.text += ch;
        cur.text += ch;
        i = j + 1;
        continue;
      }
      if (ch == '(' || ch == '[' || ch == '{') ++depth;
      if (ch == ')' || ch == ']' || ch == '}') {
        if (--depth < 0) {
          problem = "line " + std::to_string(line_no) + ": unbalanced bracket";
          return std::nullopt;
        }
      }
      if (ch == '\\' && i + 1 == phys.size()) {
        continuation = true;
        ++i;
        continue;
      }
      cur.text += ch;
      ++i;
    }
    if (triple.empty() && depth == 0 && !continuation) {
      auto t = text::trim(cur.text);
      // A line made only of an (emptied) string is a docstring or expression; drop it.
      bool bare_string = !t.empty() && t.find_first_not_of("\"'") == std::string::npos;
      if (!t.empty() && !bare_string) {
        cur.text = t;
        out.push_back(cur);
      }
      in_line = false;
    } else {
      cur.text += ' ';
    }
  }
  if (!triple.empty()) {
    problem = "unterminated triple-quoted string";
    return std::nullopt;
  }
  if (depth != 0) {
    problem = "unbalanced bracket at end of file";
    return std::nullopt;
  }
  return out;
}

// Splits on commas that are not nested in brackets.
inline std::vector<std::string> split_top(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(' || ch == '[' || ch == '{') ++depth;
    if (ch == ')' || ch == ']' || ch == '}') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(text::trim(cur));
      cur.clear();
      continue;
    }
    cur += ch;
  }
  if (!text::is_blank(cur)) out.push_back(text::trim(cur));
  return out;
}

inline std::string annotation_type(std::string_view raw) {
  auto t = text::trim(raw);
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) t = t.substr(1, t.size() - 2);
  if (t.empty()) return "any";
  try {
    return normalize_type(t);
  } catch (const SignatureError&) {
    std::string compact;
    for (char ch : t)
      if (!text::is_space(ch)) compact += ch;
    return compact;
  }
}

inline std::string literal_type(std::string_view raw) {
  auto v = text::trim(raw);
  if (v.empty()) return "any";
  auto is_num = [](std::string_view s, bool allow_dot) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    bool dot = false;
    bool digit = false;
    for (char ch : s) {
      if (ch >= '0' && ch <= '9') digit = true;
      else if (ch == '_') continue;
      else if (ch == '.' && allow_dot && !dot) dot = true;
      else return false;
    }
    return digit && (allow_dot ? dot : true);
  };
  if (is_num(v, false)) return "int";
  if (is_num(v, true)) return "float";
  std::size_t q = 0;
  while (q < v.size() && q < 2 && std::string_view("fFrRbBuU").find(v[q]) != std::string_view::npos) ++q;
  if (q < v.size() && (v[q] == '"' || v[q] == '\'')) return "str";
  if (v == "True" || v == "False") return "bool";
  if (v.front() == '[') return "list";
  if (v.front() == '{') return "dict";
  if (v.front() == '(') return "tuple";
  auto paren = v.find('(');
  if (paren != std::string::npos) {
    auto callee = text::trim(v.substr(0, paren));
    auto dot = callee.rfind('.');
    auto last = dot == std::string::npos ? callee : callee.substr(dot + 1);
    if (text::is_identifier(last)) {
      static const std::set<std::string> builtins = {"int", "float", "str", "bool", "list", "dict", "tuple", "set"};
      if (builtins.count(last)) return last;
      if (last.front() >= 'A' && last.front() <= 'Z') return last;
    }
  }
  return "any";
}

struct DefHeader {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  // (name, type or "" when unannotated)
  std::string return_type;                                  // "" when unannotated
};

inline std::optional<DefHeader> parse_def(std::string_view line) {
  auto t = text::trim_view(line);
  if (text::starts_with(t, "async ")) t = text::trim_view(t.substr(6));
  if (!text::starts_with(t, "def ")) return std::nullopt;
  t = text::trim_view(t.substr(4));
  auto open = t.find('(');
  if (open == std::string_view::npos) return std::nullopt;
  DefHeader h;
  h.name = text::trim(t.substr(0, open));
  if (!text::is_identifier(h.name)) return std::nullopt;
  int depth = 0;
  std::size_t close = std::string_view::npos;
  for (std::size_t i = open; i < t.size(); ++i) {
    if (t[i] == '(' || t[i] == '[' || t[i] == '{') ++depth;
    if (t[i] == ')' || t[i] == ']' || t[i] == '}') {
      if (--depth == 0) {
        close = i;
        break;
      }
    }
  }
  if (close == std::string_view::npos) return std::nullopt;
  for (const auto& raw : split_top(t.substr(open + 1, close - open - 1))) {
    if (raw == "*" || raw == "/") continue;
    auto param = split_top(raw, '=').empty() ? raw : split_top(raw, '=').front();
    auto colon = param.find(':');
    std::string name = text::trim(param.substr(0, colon));
    std::string type = colon == std::string::npos ? "" : annotation_type(param.substr(colon + 1));
    h.params.emplace_back(name, type);
  }
  auto rest = text::trim_view(t.substr(close + 1));
  if (text::starts_with(rest, "->")) {
    rest = text::trim_view(rest.substr(2));
    std::size_t colon = 0;
    for (int d = 0; colon < rest.size(); ++colon) {
      if (rest[colon] == '[' || rest[colon] == '(') ++d;
      if (rest[colon] == ']' || rest[colon] == ')') --d;
      if (rest[colon] == ':' && d == 0) break;
    }
    h.return_type = annotation_type(rest.substr(0, colon));
  }
  return h;
}

inline MethodSig to_sig(const DefHeader& h, bool drop_receiver) {
  MethodSig sig;
  sig.name = h.name;
  for (std::size_t i = 0; i < h.params.size(); ++i) {
    const auto& [name, type] = h.params[i];
    if (drop_receiver && i == 0 && (name == "self" || name == "cls")) continue;
    sig.params.push_back({name, type.empty() ? "any" : type});
  }
  sig.return_type = h.return_type.empty() ? "any" : h.return_type;
  return sig;
}

inline std::string resolve_relative(std::string_view file_path, std::string_view module) {
  std::size_t dots = 0;
  while (dots < module.size() && module[dots] == '.') ++dots;
  if (dots == 0) return std::string(module);
  std::vector<std::string> pkg;
  std::string dir(file_path);
  auto slash = dir.rfind('/');
  dir = slash == std::string::npos ? "" : dir.substr(0, slash);
  std::stringstream ss(dir);
  std::string seg;
  while (std::getline(ss, seg, '/'))
    if (!seg.empty()) pkg.push_back(seg);
  for (std::size_t i = 1; i < dots && !pkg.empty(); ++i) pkg.pop_back();
  std::string out;
  for (const auto& p : pkg) out += (out.empty() ? "" : ".") + p;
  auto tail = module.substr(dots);
  if (!tail.empty()) out += (out.empty() ? "" : ".") + std::string(tail);
  return out;
}

inline std::vector<Import> parse_import(std::string_view line, std::string_view file_path, std::size_t line_no) {
  std::vector<Import> out;
  auto t = text::trim(line);
  if (text::starts_with(t, "import ")) {
    for (const auto& part : split_top(t.substr(7))) {
      auto as = part.find(" as ");
      auto mod = text::trim(part.substr(0, as));
      if (!mod.empty()) out.push_back({mod, "", true, line_no});
    }
  } else if (text::starts_with(t, "from ")) {
    auto imp = t.find(" import ");
    if (imp == std::string::npos) return out;
    auto mod = resolve_relative(file_path, text::trim(t.substr(5, imp - 5)));
    auto names = text::trim(t.substr(imp + 8));
    if (!names.empty() && names.front() == '(') names = names.substr(1, names.rfind(')') - 1);
    for (const auto& part : split_top(names)) {
      auto as = part.find(" as ");
      auto sym = text::trim(part.substr(0, as));
      if (sym.empty()) continue;
      if (sym == "*") out.push_back({mod, "", true, line_no});
      else out.push_back({mod, sym, false, line_no});
    }
  }
  return out;
}

}  // namespace py

// Line-level analyzer for Python sources.
class PythonAnalyzer : public Analyzer {
 public:
  ExtractedSymbols extract(const FileUnit& unit) const override {
    ExtractedSymbols out;
    if (!text::valid_utf8(unit.body)) {
      out.analyzable = false;
      out.problem = "not valid UTF-8";
      return out;
    }
    std::string problem;
    auto lines = py::logical_lines(unit.body, problem);
    if (!lines) {
      out.analyzable = false;
      out.problem = problem;
      return out;
    }

    struct Scope {
      enum Kind { Class, Function, Other } kind;
      std::size_t indent;
      int class_index = -1;  // top-level class this scope belongs to
      bool constructor = false;
      std::map<std::string, std::string> typed_params;
    };
    std::vector<Scope> stack;
    std::set<Demand> demands;
    std::set<std::string> top_names;

    for (const auto& ll : *lines) {
      while (!stack.empty() && stack.back().indent >= ll.indent) stack.pop_back();
      const auto& t = ll.text;
      bool top = stack.empty();

      if (t.rfind("import ", 0) == 0 || t.rfind("from ", 0) == 0) {
        auto imps = py::parse_import(t, unit.path, ll.line);
        out.imports.insert(out.imports.end(), imps.begin(), imps.end());
        continue;
      }

      if (t.rfind("class ", 0) == 0 && t.find(':') != std::string::npos) {
        auto name_end = t.find_first_of("(:", 6);
        auto name = text::trim(t.substr(6, name_end - 6));
        if (top && text::is_identifier(name)) {
          out.classes.push_back({name, {}, {}});
          stack.push_back({Scope::Class, ll.indent, static_cast<int>(out.classes.size() - 1), false, {}});
        } else {
          stack.push_back({Scope::Other, ll.indent, top ? -1 : stack.back().class_index, false, {}});
        }
        continue;
      }

      if (auto def = py::parse_def(t)) {
        bool in_class = !stack.empty() && stack.back().kind == Scope::Class;
        Scope scope{Scope::Function, ll.indent, stack.empty() ? -1 : stack.back().class_index, false, {}};
        if (!stack.empty() && stack.back().kind == Scope::Function) scope.typed_params = stack.back().typed_params;
        for (const auto& [pname, ptype] : def->params) {
          auto bare = pname;
          while (!bare.empty() && bare.front() == '*') bare.erase(0, 1);
          auto head = type_head(ptype);
          if (!ptype.empty() && text::is_identifier(head) && !primitive_types().count(head))
            scope.typed_params[bare] = head;
        }
        if (top) {
          out.functions.push_back(py::to_sig(*def, false));
        } else if (in_class) {
          auto& cls = out.classes[static_cast<std::size_t>(stack.back().class_index)];
          auto sig = py::to_sig(*def, true);
          scope.constructor = sig.name == "__init__";
          bool dup = false;
          for (auto& m : cls.methods)
            if (m.name == sig.name) {
              m = sig;  // later definition wins, as at runtime
              dup = true;
            }
          if (!dup) cls.methods.push_back(std::move(sig));
        }
        // Demands may already appear in default values; the body follows.
        stack.push_back(std::move(scope));
        continue;
      }

      if (top) {
        auto eq = t.find('=');
        if (eq != std::string::npos && eq + 1 < t.size() && t[eq + 1] != '=') {
          auto lhs = t.substr(0, eq);
          auto colon = lhs.find(':');
          auto name = text::trim(lhs.substr(0, colon));
          if (text::is_identifier(name)) top_names.insert(name);
        }
        continue;
      }

      auto& scope = stack.back();
      if (scope.kind == Scope::Function && scope.constructor && scope.class_index >= 0 &&
          stack.size() >= 2 && stack[stack.size() - 2].kind == Scope::Class) {
        collect_self_assignment(t, out.classes[static_cast<std::size_t>(scope.class_index)]);
      } else if (scope.kind == Scope::Function && scope.constructor && scope.class_index >= 0) {
        collect_self_assignment(t, out.classes[static_cast<std::size_t>(scope.class_index)]);
      }
      if (scope.kind == Scope::Function) collect_demands(t, scope.typed_params, demands);
    }
    out.top_level_names.assign(top_names.begin(), top_names.end());
    out.demands.assign(demands.begin(), demands.end());
    return out;
  }

 private:
  static void collect_self_assignment(const std::string& t, ExtractedClass& cls) {
    if (t.rfind("self.", 0) != 0) return;
    std::size_t i = 5;
    while (i < t.size() && text::is_ident_char(t[i])) ++i;
    auto name = t.substr(5, i - 5);
    if (!text::is_identifier(name)) return;
    auto rest = text::trim_view(std::string_view(t).substr(i));
    std::string type;
    if (!rest.empty() && rest.front() == ':') {
      auto eq = rest.find('=');
      type = py::annotation_type(rest.substr(1, eq == std::string_view::npos ? std::string_view::npos : eq - 1));
    } else if (!rest.empty() && rest.front() == '=' && (rest.size() == 1 || rest[1] != '=')) {
      type = py::literal_type(rest.substr(1));
    } else {
      return;
    }
    for (const auto& a : cls.attributes)
      if (a.name == name) return;
    cls.attributes.push_back({name, type});
  }

  static void collect_demands(const std::string& t, const std::map<std::string, std::string>& typed,
                              std::set<Demand>& out) {
    for (const auto& [param, type] : typed) {
      std::size_t pos = 0;
      while ((pos = t.find(param + ".", pos)) != std::string::npos) {
        bool boundary = pos == 0 || (!text::is_ident_char(t[pos - 1]) && t[pos - 1] != '.');
        std::size_t m = pos + param.size() + 1;
        std::size_t e = m;
        while (e < t.size() && text::is_ident_char(t[e])) ++e;
        if (boundary && e > m) {
          std::size_t k = e;
          while (k < t.size() && t[k] == ' ') ++k;
          out.insert({type, t.substr(m, e - m), k < t.size() && t[k] == '('});
        }
        pos = e > pos ? e : pos + 1;
      }
    }
  }
};

// Analyzer lookup by file extension. Files without an analyzer yield empty,
// analyzable symbol sets.
class AnalyzerRegistry {
 public:
  AnalyzerRegistry() { by_ext_[".py"] = std::make_shared<PythonAnalyzer>(); }

  void add(std::string extension, std::shared_ptr<const Analyzer> a) { by_ext_[std::move(extension)] = std::move(a); }

  ExtractedSymbols extract(const FileUnit& unit) const {
    auto slash = unit.path.rfind('/');
    auto dot = unit.path.rfind('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
      auto it = by_ext_.find(unit.path.substr(dot));
      if (it != by_ext_.end()) return it->second->extract(unit);
    }
    return {};
  }

  static const AnalyzerRegistry& standard() {
    static const AnalyzerRegistry r;
    return r;
  }

 private:
  std::map<std::string, std::shared_ptr<const Analyzer>> by_ext_;
};

inline ExtractedSymbols extract_symbols(const FileUnit& unit) { return AnalyzerRegistry::standard().extract(unit); }

// The generated repository R: path -> latest unit.
class Workspace {
 public:
  const FileUnit& commit_file(std::string_view path, std::string body, std::string writer, int layer) {
    auto norm = normalize_path(path);
    if (!norm) throw PathViolation("path '" + std::string(path) + "' escapes the workspace root");
    auto& unit = files_[*norm];
    unit = FileUnit{*norm, std::move(body), std::move(writer), layer};
    return unit;
  }

  const FileUnit* find(std::string_view path) const {
    auto norm = normalize_path(path);
    if (!norm) return nullptr;
    auto it = files_.find(*norm);
    return it == files_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, FileUnit>& files() const { return files_; }
  bool empty() const { return files_.empty(); }

  std::set<std::string> paths() const {
    std::set<std::string> out;
    for (const auto& [p, _] : files_) out.insert(p);
    return out;
  }

  std::map<std::string, std::string> hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& [p, u] : files_) out[p] = sha256_hex(u.body);
    return out;
  }

  void save(const std::filesystem::path& root) const {
    for (const auto& [p, u] : files_) {
      auto target = root / p;
      std::filesystem::create_directories(target.parent_path());
      std::ofstream os(target, std::ios::binary);
      os << u.body;
      if (!os) throw Error("IoError", "cannot write " + target.string());
    }
  }

  // Loads every regular file under root, skipping dot-directories and dot-files.
  static Workspace load(const std::filesystem::path& root) {
    Workspace ws;
    if (!std::filesystem::is_directory(root)) throw Error("IoError", "not a directory: " + root.string());
    for (auto it = std::filesystem::recursive_directory_iterator(root); it != std::filesystem::recursive_directory_iterator(); ++it) {
      auto name = it->path().filename().string();
      if (!name.empty() && name.front() == '.') {
        if (it->is_directory()) it.disable_recursion_pending();
        continue;
      }
      if (!it->is_regular_file()) continue;
      std::ifstream is(it->path(), std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      auto rel = std::filesystem::relative(it->path(), root).generic_string();
      ws.commit_file(rel, ss.str(), "disk", 0);
    }
    return ws;
  }

  bool operator==(const Workspace&) const = default;

 private:
  std::map<std::string, FileUnit> files_;
};

struct ImportCheck {
  std::string file;
  Import import;
  bool valid = false;
  bool operator==(const ImportCheck&) const = default;
};

namespace ws_detail {

struct ModuleIndex {
  std::map<std::string, std::string> module_file;  // dotted module -> path (incl. packages via __init__)
  std::set<std::string> packages;                  // dotted names of directories
  std::set<std::string> names;                     // file stems and directory names

  explicit ModuleIndex(const Workspace& ws) {
    for (const auto& [path, _] : ws.files()) {
      auto mod = dotted_module(path);
      auto stem = path_stem(path);
      if (stem == "__init__") {
        auto dot = mod.rfind('.');
        auto pkg = dot == std::string::npos ? std::string() : mod.substr(0, dot);
        if (!pkg.empty()) module_file.emplace(pkg, path);
      } else {
        module_file.emplace(mod, path);
        names.insert(stem);
      }
      std::string dir;
      std::stringstream ss(path);
      std::string seg;
      std::vector<std::string> segs;
      while (std::getline(ss, seg, '/')) segs.push_back(seg);
      for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        dir += (dir.empty() ? "" : ".") + segs[i];
        packages.insert(dir);
        names.insert(segs[i]);
      }
    }
  }

  // An import is internal when any module segment names a repository file
  // stem or directory.
  bool internal(std::string_view module) const {
    std::stringstream ss{std::string(module)};
    std::string seg;
    while (std::getline(ss, seg, '.'))
      if (names.count(seg)) return true;
    return false;
  }
};

}  // namespace ws_detail

// Validity of every internal import in the repository. External imports are
// not part of the result.
inline std::vector<ImportCheck> resolve_imports(const Workspace& ws,
                                                const AnalyzerRegistry& analyzers = AnalyzerRegistry::standard()) {
  ws_detail::ModuleIndex index(ws);
  std::map<std::string, ExtractedSymbols> symbols;
  auto symbols_of = [&](const std::string& path) -> const ExtractedSymbols& {
    auto it = symbols.find(path);
    if (it == symbols.end()) it = symbols.emplace(path, analyzers.extract(ws.files().at(path))).first;
    return it->second;
  };
  std::vector<ImportCheck> out;
  for (const auto& [path, unit] : ws.files()) {
    for (const auto& imp : symbols_of(path).imports) {
      if (!index.internal(imp.module)) continue;
      ImportCheck check{path, imp, false};
      auto file = index.module_file.find(imp.module);
      bool is_package = index.packages.count(imp.module) > 0;
      if (imp.whole_module) {
        check.valid = file != index.module_file.end() || is_package;
      } else {
        if (file != index.module_file.end() && symbols_of(file->second).defines(imp.symbol)) check.valid = true;
        if (!check.valid && is_package && index.module_file.count(imp.module + "." + imp.symbol)) check.valid = true;
      }
      out.push_back(std::move(check));
    }
  }
  return out;
}

}  // namespace contractor
