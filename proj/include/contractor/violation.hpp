#pragma once

#include <string>
#include <vector>

namespace contractor {

enum class ViolationKind {
  Cycle,
  TypeUndefined,
  Incomplete,
  Projection,
  UnknownEdgeEndpoint,
  PartialPatch,
  MalformedContent,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Cycle: return "CYCLE";
    case ViolationKind::TypeUndefined: return "TYPE_UNDEFINED";
    case ViolationKind::Incomplete: return "INCOMPLETE";
    case ViolationKind::Projection: return "PROJECTION";
    case ViolationKind::UnknownEdgeEndpoint: return "UNKNOWN_EDGE_ENDPOINT";
    case ViolationKind::PartialPatch: return "PARTIAL_PATCH";
    case ViolationKind::MalformedContent: return "MALFORMED_CONTENT";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
  // Nodes on the cycle for Cycle; offending entry path otherwise (may be empty).
  std::vector<std::string> nodes;

  bool operator==(const Violation&) const = default;
};

inline std::string describe(const Violation& v) {
  std::string out = to_string(v.kind);
  if (!v.nodes.empty()) {
    out += "(";
    for (std::size_t i = 0; i < v.nodes.size(); ++i) out += (i ? "," : "") + v.nodes[i];
    out += ")";
  }
  if (!v.detail.empty()) out += ": " + v.detail;
  return out;
}

}  // namespace contractor
