#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "contractor/contract.hpp"
#include "contractor/util.hpp"
#include "contractor/violation.hpp"

namespace contractor {

// Replacement of base lines [start, end) of one section. Coordinates always
// refer to the contract's base snapshot.
struct AtomicPatch {
  SectionKey section = SectionKey::ProjectOverview;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<std::string> replacement;
  std::string author;
  int layer = 0;

  bool operator==(const AtomicPatch&) const = default;
};

inline nlohmann::json to_json(const AtomicPatch& p) {
  return {{"section", std::string(identifier(p.section))},
          {"interval", {p.start, p.end}},
          {"replacement", p.replacement},
          {"author", p.author},
          {"layer", p.layer}};
}

struct MergeConflict {
  SectionKey section = SectionKey::ProjectOverview;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<std::string> authors;  // sorted, unique
  std::string resolution = "UNION";

  bool operator==(const MergeConflict&) const = default;
};

struct MergeResult {
  Sections sections{};
  std::vector<MergeConflict> conflicts;
  std::vector<AtomicPatch> dropped;  // stays empty: nothing is discarded
  std::string base_digest;           // digest of the base this merge was computed against

  bool operator==(const MergeResult&) const = default;
};

namespace merge_detail {

inline bool same_line(const std::string& a, const std::string& b) { return text::rtrim(a) == text::rtrim(b); }

// Suffix LCS table: t[i][j] = LCS(a[i..], b[j..]).
template <class Eq>
std::vector<std::vector<std::size_t>> lcs_table(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                                Eq eq) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;)
    for (std::size_t j = b.size(); j-- > 0;)
      t[i][j] = eq(a[i], b[j]) ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
  return t;
}

// Shortest common supersequence; lines equal after rtrim are shared, and the
// copy from `a` is kept.
inline std::vector<std::string> supersequence(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto t = lcs_table(a, b, same_line);
  std::vector<std::string> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (same_line(a[i], b[j])) {
      out.push_back(a[i]);
      ++i;
      ++j;
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
  return out;
}

// Half-open overlap; a pure insertion conflicts with a range strictly
// containing its point and with another insertion at the same point.
inline bool conflicts(std::size_t s1, std::size_t e1, std::size_t s2, std::size_t e2) {
  bool empty1 = s1 == e1, empty2 = s2 == e2;
  if (empty1 && empty2) return s1 == s2;
  if (empty1) return s2 < s1 && s1 < e2;
  if (empty2) return s1 < s2 && s2 < e1;
  return s1 < e2 && s2 < e1;
}

inline auto patch_key(const AtomicPatch& p) { return std::tie(p.author, p.start, p.end, p.replacement, p.layer); }

}  // namespace merge_detail

inline std::vector<std::string> apply_patches_unchecked(const std::vector<std::string>& base,
                                                         std::vector<AtomicPatch> patches);

// Minimal line diff of `proposed` against `base` as interval replacements.
inline std::vector<AtomicPatch> diff_against_base(const std::vector<std::string>& base,
                                                  const std::vector<std::string>& proposed,
                                                  SectionKey section = SectionKey::ProjectOverview,
                                                  const std::string& author = {}, int layer = 0) {
  auto t = merge_detail::lcs_table(base, proposed, [](const std::string& x, const std::string& y) { return x == y; });
  std::vector<AtomicPatch> out;
  std::size_t i = 0, j = 0;
  while (i < base.size() || j < proposed.size()) {
    if (i < base.size() && j < proposed.size() && base[i] == proposed[j]) {
      ++i;
      ++j;
      continue;
    }
    AtomicPatch p{section, i, i, {}, author, layer};
    while ((i < base.size() || j < proposed.size()) &&
           !(i < base.size() && j < proposed.size() && base[i] == proposed[j])) {
      if (j < proposed.size() && (i == base.size() || t[i][j + 1] >= t[i + 1][j])) {
        p.replacement.push_back(proposed[j++]);
      } else {
        ++i;
      }
    }
    p.end = i;
    out.push_back(std::move(p));
  }
  return out;
}

// Patches for every section that differs between the base of `c` and
// `proposed`.
inline std::vector<AtomicPatch> diff_contract(const LanguageContract& c, const Sections& proposed,
                                              const std::string& author, int layer) {
  std::vector<AtomicPatch> out;
  for (auto k : kAllSections) {
    auto ps = diff_against_base(c.base_section(k), proposed[static_cast<std::size_t>(k)], k, author, layer);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

// Applies non-conflicting patches of one section, positions taken from base.
inline std::vector<std::string> apply_patches_unchecked(const std::vector<std::string>& base,
                                                         std::vector<AtomicPatch> patches) {
  std::sort(patches.begin(), patches.end(), [](const AtomicPatch& a, const AtomicPatch& b) {
    return std::tie(a.start, a.end) < std::tie(b.start, b.end);
  });
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& p : patches) {
    if (p.start < pos || p.end > base.size() || p.start > p.end) throw StalePatch("overlapping or out-of-range patch");
    out.insert(out.end(), base.begin() + static_cast<std::ptrdiff_t>(pos), base.begin() + static_cast<std::ptrdiff_t>(p.start));
    out.insert(out.end(), p.replacement.begin(), p.replacement.end());
    pos = p.end;
  }
  out.insert(out.end(), base.begin() + static_cast<std::ptrdiff_t>(pos), base.end());
  return out;
}

// Union-first merge of one layer's patches against the base of `c`.
// Non-conflicting patches apply positionally; each conflict cluster becomes
// the shortest common supersequence of every author's version of the
// cluster region, so no proposed line is lost.
inline MergeResult merge_layer(const LanguageContract& c, const std::vector<AtomicPatch>& patches) {
  MergeResult result;
  result.base_digest = sha256_hex(render_sections(c.base()));
  for (const auto& p : patches) {
    const auto& base = c.base_section(p.section);
    if (p.start > p.end || p.end > base.size())
      throw StalePatch("patch by '" + p.author + "' (layer " + std::to_string(p.layer) + ") has interval [" +
                       std::to_string(p.start) + "," + std::to_string(p.end) + ") outside base section " +
                       std::string(identifier(p.section)) + " of " + std::to_string(base.size()) + " lines");
  }
  for (auto k : kAllSections) {
    const auto& base = c.base_section(k);
    std::vector<AtomicPatch> mine;
    for (const auto& p : patches)
      if (p.section == k) mine.push_back(p);
    // Canonical order makes the result independent of arrival order.
    std::sort(mine.begin(), mine.end(), [](const AtomicPatch& a, const AtomicPatch& b) {
      return merge_detail::patch_key(a) < merge_detail::patch_key(b);
    });
    mine.erase(std::unique(mine.begin(), mine.end()), mine.end());

    // Union-find over pairwise conflicts, repeated on cluster regions until stable.
    std::vector<std::size_t> parent(mine.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<std::pair<std::size_t, std::size_t>> region(mine.size());
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < mine.size(); ++i) region[i] = {mine[i].start, mine[i].end};
      for (std::size_t i = 0; i < mine.size(); ++i) {
        auto r = find(i);
        region[r].first = std::min(region[r].first, mine[i].start);
        region[r].second = std::max(region[r].second, mine[i].end);
      }
      for (std::size_t i = 0; i < mine.size(); ++i) {
        for (std::size_t j = i + 1; j < mine.size(); ++j) {
          auto ri = find(i), rj = find(j);
          if (ri == rj) continue;
          if (merge_detail::conflicts(region[ri].first, region[ri].second, region[rj].first, region[rj].second)) {
            parent[std::max(ri, rj)] = std::min(ri, rj);
            changed = true;
          }
        }
      }
    }

    std::map<std::size_t, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < mine.size(); ++i) clusters[find(i)].push_back(i);
    std::vector<AtomicPatch> resolved;
    for (const auto& [root, members] : clusters) {
      if (members.size() == 1) {
        resolved.push_back(mine[members.front()]);
        continue;
      }
      auto [rs, re] = region[root];
      std::vector<std::string> merged;
      std::vector<std::string> authors;
      for (auto m : members) {
        const auto& p = mine[m];
        std::vector<std::string> version(base.begin() + static_cast<std::ptrdiff_t>(rs),
                                         base.begin() + static_cast<std::ptrdiff_t>(p.start));
        version.insert(version.end(), p.replacement.begin(), p.replacement.end());
        version.insert(version.end(), base.begin() + static_cast<std::ptrdiff_t>(p.end),
                       base.begin() + static_cast<std::ptrdiff_t>(re));
        merged = merge_detail::supersequence(merged, version);
        authors.push_back(p.author);
      }
      std::sort(authors.begin(), authors.end());
      authors.erase(std::unique(authors.begin(), authors.end()), authors.end());
      result.conflicts.push_back({k, rs, re, authors, "UNION"});
      resolved.push_back(AtomicPatch{k, rs, re, std::move(merged), "union", mine[members.front()].layer});
    }
    result.sections[static_cast<std::size_t>(k)] = apply_patches_unchecked(base, std::move(resolved));
  }
  return result;
}

struct CommitOutcome {
  LanguageContract contract;
  bool accepted = false;
  std::vector<Violation> violations;
};

// Synchronized layer commit: revision + 1, base reset to the merged
// sections. An invalid merged kernel rejects the whole commit.
inline CommitOutcome commit_merge(const LanguageContract& c, const MergeResult& result, const KernelGuard& guard) {
  if (result.base_digest != sha256_hex(render_sections(c.base())))
    throw StalePatch("merge result was computed against a different base snapshot");
  if (result.sections == c.sections()) return {c.rebased(), true, {}};
  for (const auto& body : result.sections) {
    if (auto problem = markdown::body_problem(body)) return {c, false, {{ViolationKind::MalformedContent, *problem, {}}}};
  }
  auto next = c.committed(result.sections);
  if (guard) {
    auto violations = guard(next);
    if (!violations.empty()) return {c, false, std::move(violations)};
  }
  return {std::move(next), true, {}};
}

}  // namespace contractor
