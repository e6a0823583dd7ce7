#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "contractor/kernel.hpp"

namespace contractor {

// Symbols to add to one API entry.
struct Amendment {
  std::map<std::string, std::vector<AttributeSpec>> attributes;  // class -> new attributes
  std::map<std::string, std::vector<MethodSig>> methods;         // class -> new methods
  std::vector<ClassSpec> classes;                                // whole new classes
  std::vector<MethodSig> functions;

  bool empty() const { return attributes.empty() && methods.empty() && classes.empty() && functions.empty(); }

  // Merges `o` into this amendment, skipping names already present.
  void absorb(const Amendment& o) {
    for (const auto& [cls, attrs] : o.attributes)
      for (const auto& a : attrs) {
        auto& mine = attributes[cls];
        if (std::none_of(mine.begin(), mine.end(), [&](const AttributeSpec& x) { return x.name == a.name; })) mine.push_back(a);
      }
    for (const auto& [cls, ms] : o.methods)
      for (const auto& m : ms) {
        auto& mine = methods[cls];
        if (std::none_of(mine.begin(), mine.end(), [&](const MethodSig& x) { return x.name == m.name; })) mine.push_back(m);
      }
    for (const auto& c : o.classes)
      if (std::none_of(classes.begin(), classes.end(), [&](const ClassSpec& x) { return x.name == c.name; })) classes.push_back(c);
    for (const auto& f : o.functions)
      if (std::none_of(functions.begin(), functions.end(), [&](const MethodSig& x) { return x.name == f.name; }))
        functions.push_back(f);
  }
};

namespace api_edit {

namespace detail {

inline std::string indent(std::size_t n) { return std::string(n, ' '); }

inline std::size_t bullet_indent(const std::string& line) {
  auto t = kernel_detail::indent_of(line);
  return kernel_detail::is_bullet(line) ? t : 0;
}

inline std::string attribute_line(std::size_t ind, const AttributeSpec& a) {
  return indent(ind) + "* `" + a.name + ": " + a.type + "`" + (a.description.empty() ? "" : " - " + a.description);
}

inline std::string callable_line(std::size_t ind, const MethodSig& m) {
  return indent(ind) + "* `" + print_signature(m) + "`" + (m.docstring.empty() ? "" : " - " + m.docstring);
}

struct Insert {
  std::size_t before;  // insert before this body index
  std::size_t seq;
  std::vector<std::string> lines;
};

inline SectionBody apply_inserts(SectionBody body, std::vector<Insert> inserts) {
  std::sort(inserts.begin(), inserts.end(),
            [](const Insert& a, const Insert& b) { return std::tie(a.before, a.seq) > std::tie(b.before, b.seq); });
  for (const auto& ins : inserts) body.insert(body.begin() + static_cast<std::ptrdiff_t>(ins.before), ins.lines.begin(), ins.lines.end());
  return body;
}

inline const ApiSpecEntry& entry_or_throw(const std::vector<ApiSpecEntry>& entries, const std::string& path) {
  for (const auto& e : entries)
    if (e.file_path == path) return e;
  throw InternalInconsistency("no API entry for '" + path + "'");
}

}  // namespace detail

// Rewrites (or inserts) the Status field of one entry.
inline SectionBody set_status(const SectionBody& body, const std::string& path, TaskStatus status) {
  auto entries = parse_api_entries(body);
  const auto& e = detail::entry_or_throw(entries, path);
  SectionBody out = body;
  if (e.status_line) {
    auto& line = out[*e.status_line];
    auto pos = line.find("**Status:**");
    line = line.substr(0, pos + 11) + " " + to_string(status);
  } else {
    auto ind = detail::bullet_indent(body[e.line]);
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(e.line + 1), detail::indent(ind) + "* **Status:** " + to_string(status));
  }
  return out;
}

// Inserts the amendment's symbols into the entry for `path`, next to the
// existing lists they extend.
inline SectionBody amend(const SectionBody& body, const std::string& path, const Amendment& a) {
  using detail::indent;
  auto entries = parse_api_entries(body);
  const auto& e = detail::entry_or_throw(entries, path);
  std::size_t base_ind = detail::bullet_indent(body[e.line]);
  std::vector<detail::Insert> inserts;
  std::size_t seq = 0;

  for (const auto& [cls_name, attrs] : a.attributes) {
    const auto* cls = e.find_class(cls_name);
    if (!cls) throw InternalInconsistency("class '" + cls_name + "' not declared in '" + path + "'");
    std::size_t cls_ind = kernel_detail::indent_of(body[cls->line]);
    detail::Insert ins{0, seq++, {}};
    std::size_t item_ind;
    if (!cls->attributes.empty()) {
      std::size_t last = 0;
      for (const auto& x : cls->attributes) last = std::max(last, x.line);
      ins.before = last + 1;
      item_ind = kernel_detail::indent_of(body[last]);
    } else if (cls->attributes_label) {
      ins.before = *cls->attributes_label + 1;
      item_ind = kernel_detail::indent_of(body[*cls->attributes_label]) + 2;
    } else {
      ins.before = cls->line + 1;
      ins.lines.push_back(indent(cls_ind + 2) + "* **Attributes:**");
      item_ind = cls_ind + 4;
    }
    for (const auto& at : attrs) ins.lines.push_back(detail::attribute_line(item_ind, at));
    inserts.push_back(std::move(ins));
  }

  for (const auto& [cls_name, ms] : a.methods) {
    const auto* cls = e.find_class(cls_name);
    if (!cls) throw InternalInconsistency("class '" + cls_name + "' not declared in '" + path + "'");
    std::size_t cls_ind = kernel_detail::indent_of(body[cls->line]);
    detail::Insert ins{0, seq++, {}};
    std::size_t item_ind;
    if (!cls->method_lines.empty()) {
      auto last = *std::max_element(cls->method_lines.begin(), cls->method_lines.end());
      ins.before = last + 1;
      item_ind = kernel_detail::indent_of(body[last]);
    } else if (cls->methods_label) {
      ins.before = *cls->methods_label + 1;
      item_ind = kernel_detail::indent_of(body[*cls->methods_label]) + 2;
    } else {
      ins.before = cls->last_line + 1;
      ins.lines.push_back(indent(cls_ind + 2) + "* **Methods:**");
      item_ind = cls_ind + 4;
    }
    for (const auto& m : ms) ins.lines.push_back(detail::callable_line(item_ind, m));
    inserts.push_back(std::move(ins));
  }

  if (!a.classes.empty()) {
    detail::Insert ins{0, seq++, {}};
    if (e.classes.empty()) ins.lines.push_back(indent(base_ind) + "* **Classes:**");
    if (e.functions_label && (e.classes.empty() || *e.functions_label > e.classes.back().line)) ins.before = *e.functions_label;
    else ins.before = e.last_line + 1;
    for (const auto& c : a.classes) {
      ins.lines.push_back(indent(base_ind + 2) + "* **Class:** `" + c.name + "`");
      if (!c.attributes.empty()) {
        ins.lines.push_back(indent(base_ind + 4) + "* **Attributes:**");
        for (const auto& at : c.attributes) ins.lines.push_back(detail::attribute_line(base_ind + 6, at));
      }
      if (!c.methods.empty()) {
        ins.lines.push_back(indent(base_ind + 4) + "* **Methods:**");
        for (const auto& m : c.methods) ins.lines.push_back(detail::callable_line(base_ind + 6, m));
      }
    }
    inserts.push_back(std::move(ins));
  }

  if (!a.functions.empty()) {
    detail::Insert ins{0, seq++, {}};
    std::size_t item_ind;
    if (!e.function_lines.empty()) {
      auto last = *std::max_element(e.function_lines.begin(), e.function_lines.end());
      ins.before = last + 1;
      item_ind = kernel_detail::indent_of(body[last]);
    } else if (e.functions_label) {
      ins.before = *e.functions_label + 1;
      item_ind = kernel_detail::indent_of(body[*e.functions_label]) + 2;
    } else {
      ins.before = e.last_line + 1;
      ins.lines.push_back(indent(base_ind) + "* **Functions:**");
      item_ind = base_ind + 2;
    }
    for (const auto& f : a.functions) ins.lines.push_back(detail::callable_line(item_ind, f));
    inserts.push_back(std::move(ins));
  }
  return detail::apply_inserts(body, std::move(inserts));
}

}  // namespace api_edit

}  // namespace contractor
