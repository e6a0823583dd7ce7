#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "contractor/contract.hpp"
#include "contractor/kernel.hpp"
#include "support.hpp"

using namespace contractor;

namespace {

// Plain DFS over an explicit edge list; shares no code with the kernel.
bool edge_list_has_cycle(const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (auto& [a, b] : edges) adj[a].push_back(b), adj[b];
  std::map<std::string, int> color;
  std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
    color[v] = 1;
    for (auto& w : adj[v]) {
      if (color[w] == 1) return true;
      if (color[w] == 0 && dfs(w)) return true;
    }
    color[v] = 2;
    return false;
  };
  for (auto& [v, _] : adj)
    if (color[v] == 0 && dfs(v)) return true;
  return false;
}

std::string api_entry(const std::string& path, const std::string& cls) {
  return "### File: `" + path + "`\n* **Owner:** Dev\n* **Status:** TODO\n* **Classes:**\n  * **Class:** `" + cls +
         "`\n    * **Methods:**\n      * `def run() -> None` - Runs.\n";
}

LanguageContract two_module_contract() {
  auto c = new_contract(testsupport::read_fixture("contract_template.contract.md"));
  c = apply_action(c, {ActionOp::Update, SectionKey::SymbolicApiSpecifications, api_entry("a.py", "A") + api_entry("b.py", "B")},
                   kernel_guard())
          .contract;
  return apply_action(c, {ActionOp::Update, SectionKey::DependencyRelationships, "b.py --> a.py"}, kernel_guard()).contract;
}

}  // namespace

TEST(Contract, TemplateHasSevenEmptySectionsAtRevisionZero) {
  auto c = new_contract(testsupport::read_fixture("contract_template.contract.md"));
  EXPECT_EQ(c.revision(), 0u);
  for (auto k : kAllSections) EXPECT_TRUE(c.section(k).empty()) << identifier(k);
  EXPECT_EQ(c.base(), c.sections());
}

TEST(Contract, EmptyContractRendersTemplate) {
  EXPECT_EQ(render(empty_contract()), testsupport::read_fixture("contract_template.contract.md"));
}

TEST(Contract, MissingSectionIsMalformed) {
  auto doc = testsupport::read_fixture("contract_template.contract.md");
  doc = text::replace_all(doc, "## Dependency Relationships\n", "");
  EXPECT_THROW(new_contract(doc), MalformedTemplate);
}

TEST(Contract, DuplicateSectionIsMalformed) {
  auto doc = testsupport::read_fixture("contract_template.contract.md") + "\n## Constraints\n- twice\n";
  EXPECT_THROW(new_contract(doc), MalformedTemplate);
}

TEST(Contract, StrayHeadingIsMalformed) {
  auto doc = testsupport::read_fixture("contract_template.contract.md") + "\n## Budget\n- 5 dollars\n";
  EXPECT_THROW(parse(doc), MalformedTemplate);
}

TEST(Contract, SectionKeysAcceptHeadingOrIdentifier) {
  EXPECT_EQ(parse_section_key("User Stories (Features)"), SectionKey::UserStories);
  EXPECT_EQ(parse_section_key("UserStories"), SectionKey::UserStories);
  EXPECT_EQ(parse_section_key("symbolic api specifications"), SectionKey::SymbolicApiSpecifications);
  EXPECT_FALSE(parse_section_key("Budget"));
  EXPECT_THROW(section_key_or_throw("Budget"), UnknownSection);
}

TEST(Contract, GomokuDocumentPopulatesAllSections) {
  auto c = parse(testsupport::read_fixture("contracts/gomoku.contract.md"));
  for (auto k : kAllSections) EXPECT_FALSE(c.section(k).empty()) << identifier(k);
  EXPECT_EQ(render(c), testsupport::read_fixture("contracts/gomoku.contract.md"));
}

TEST(Contract, HeadingsInsideFencesAreBodyText) {
  auto c = empty_contract();
  auto out = apply_action(c, {ActionOp::Update, SectionKey::GlobalSharedKnowledge, "```\n## not a heading\n```"}, {});
  ASSERT_TRUE(out.accepted);
  EXPECT_EQ(parse(render(out.contract)).sections(), out.contract.sections());
}

TEST(Contract, UpdateReplacesBody) {
  auto c = empty_contract();
  c = apply_action(c, {ActionOp::Update, SectionKey::Constraints, "- python only\n- no network"}, {}).contract;
  auto out = apply_action(c, {ActionOp::Update, SectionKey::Constraints, "- offline only"}, kernel_guard());
  ASSERT_TRUE(out.accepted);
  EXPECT_EQ(out.contract.section(SectionKey::Constraints), (SectionBody{"- offline only"}));
}

TEST(Contract, AddAppendsLines) {
  auto c = empty_contract();
  c = apply_action(c, {ActionOp::Add, SectionKey::UserStories, "- move"}, {}).contract;
  c = apply_action(c, {ActionOp::Add, SectionKey::UserStories, "- shoot"}, {}).contract;
  EXPECT_EQ(c.section(SectionKey::UserStories), (SectionBody{"- move", "- shoot"}));
}

TEST(Contract, RevisionAdvancesPerAcceptedAction) {
  auto c = empty_contract();
  EXPECT_EQ(c.revision(), 0u);
  c = apply_action(c, {ActionOp::Update, SectionKey::ProjectOverview, "A game."}, kernel_guard()).contract;
  EXPECT_EQ(c.revision(), 1u);
  c = apply_action(c, {ActionOp::Add, SectionKey::UserStories, "- play"}, kernel_guard()).contract;
  EXPECT_EQ(c.revision(), 2u);
}

TEST(Contract, CycleIntroducingAddIsRejectedUnchanged) {
  auto c = two_module_contract();
  ASSERT_EQ(c.section(SectionKey::DependencyRelationships), (SectionBody{"b.py --> a.py"}));
  std::vector<std::pair<std::string, std::string>> edges{{"b.py", "a.py"}, {"a.py", "b.py"}};
  ASSERT_TRUE(edge_list_has_cycle(edges));
  auto out = apply_action(c, {ActionOp::Add, SectionKey::DependencyRelationships, "a.py --> b.py"}, kernel_guard());
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.contract, c);
  ASSERT_FALSE(out.violations.empty());
  EXPECT_EQ(out.violations.front().kind, ViolationKind::Cycle);
}

TEST(Contract, PartialApiPatchIsRejected) {
  auto c = two_module_contract();
  auto out = apply_action(c, {ActionOp::Update, SectionKey::SymbolicApiSpecifications, "* **Status:** DONE"}, kernel_guard());
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.contract, c);
  EXPECT_EQ(out.violations.at(0).kind, ViolationKind::PartialPatch);
}

TEST(Contract, StructureBreakingContentIsRejected) {
  auto c = empty_contract();
  for (std::string bad : {"## Sneaky\ntext", "# Technical Document", "```\nopen fence"}) {
    auto out = apply_action(c, {ActionOp::Update, SectionKey::Constraints, bad}, {});
    EXPECT_FALSE(out.accepted) << bad;
    EXPECT_EQ(out.contract, c);
  }
}

TEST(Contract, ParseToleratesBlankEdgeLines) {
  auto doc = text::replace_all(testsupport::read_fixture("contract_template.contract.md"), "## Constraints\n",
                               "## Constraints\n\n\n- offline\n\n\n");
  EXPECT_EQ(parse(doc).section(SectionKey::Constraints), (SectionBody{"- offline"}));
}

TEST(ContractProperty, RenderParseRoundTrip) {
  std::mt19937 rng(7);
  const std::vector<std::string> pool = {"- item",     "plain prose",  "### File: `x.py`", "    indented",
                                         "```python", "```",          "## inside fence", "",
                                         "* **Owner:** Dev", "# a title", "~~~",  "| a | b |"};
  for (int iter = 0; iter < 500; ++iter) {
    Sections s{};
    for (auto& body : s) {
      int n = static_cast<int>(rng() % 8);
      for (int i = 0; i < n; ++i) body.push_back(pool[rng() % pool.size()]);
      body = text::trim_blank_edges(body);
      if (markdown::body_problem(body)) body.clear();
    }
    auto c = LanguageContract::from_parts(s, 0, s);
    auto doc = render(c);
    auto back = parse(doc);
    ASSERT_EQ(back.sections(), c.sections()) << doc;
    ASSERT_EQ(render(back), doc);
  }
}

TEST(ContractJournal, RecordsAcceptedActions) {
  ContractJournal journal;
  auto c = empty_contract();
  ContractAction a{ActionOp::Update, SectionKey::Constraints, "- offline only"};
  auto out = apply_action(c, a, {});
  journal.record_action(out.contract, a);
  ASSERT_EQ(journal.records().size(), 1u);
  EXPECT_EQ(journal.records()[0].revision, 1u);
  EXPECT_EQ(journal.records()[0].op, "UPDATE");
  EXPECT_EQ(journal.records()[0].content_sha256, sha256_hex("- offline only"));
  EXPECT_NE(journal.to_jsonl().find("\"section\":\"Constraints\""), std::string::npos);
}

TEST(Util, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
