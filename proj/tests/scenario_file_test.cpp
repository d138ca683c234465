#include "causalview/scenario_file.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "causalview/randgen.hpp"

using namespace causalview;

namespace {

std::string fixture(const std::string& name) { return std::string(CAUSALVIEW_FIXTURE_DIR) + "/" + name; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("causalview_file_test_" + name)).string();
}

std::string error_location(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const FormatError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST(ScenarioFile, ReadsEveryKind) {
  EXPECT_STREQ(kind_name(read_scenario_file(fixture("bell_causal.json"))), "causal");
  EXPECT_STREQ(kind_name(read_scenario_file(fixture("bell_spacelike.json"))), "spacelike");
  EXPECT_STREQ(kind_name(read_scenario_file(fixture("tripartite_depolarizing_causal.json"))), "tripartite_causal");
  const auto s = std::get<CausalScenario>(read_scenario_file(fixture("polarizer_causal.json")));
  EXPECT_EQ(s.povm_a().labels(), (std::vector<std::string>{"a_r", "a_t"}));
}

TEST(ScenarioFile, ErrorsNameTheOffendingField) {
  try {
    read_scenario_file(fixture("bad_povm_causal.json"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(e.where().find("/povm_b"), std::string::npos) << e.what();
  }
  try {
    read_scenario_file(fixture("noncptp_causal.json"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(e.where().find("/kraus"), std::string::npos) << e.what();
  }
  try {
    read_scenario_file(fixture("malformed.json"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_scenario_file(fixture("does_not_exist.json")), FormatError);
}

TEST(ScenarioFile, StructuralErrors) {
  EXPECT_EQ(error_location(R"({"dims": {"a": 2, "b": 2}})"), "/kind");
  EXPECT_EQ(error_location(R"({"kind": "weird", "dims": {"a": 2, "b": 2}})"), "/kind");
  EXPECT_EQ(error_location(R"({"kind": "causal", "dims": {"a": 0, "b": 2}})"), "/dims/a");
  EXPECT_EQ(error_location(R"({"kind": "causal", "dims": {"a": 2, "b": 2}, "rho": [[[1, 0], 0], [[0, 0], [0, 0]]]})"),
            "/rho/0/1");
  EXPECT_EQ(error_location(R"({"kind": "causal", "dims": {"a": 2, "b": 2}, "rho": [[[1, 0]]]})"), "/rho");
  EXPECT_EQ(error_location(R"({"kind": "spacelike", "dims": {"a": 2, "b": 2}})"), "/tau");
}

TEST(ScenarioFile, RankDeficientCausalRhoIsInvalidInput) {
  EXPECT_EQ(error_location(R"({"kind": "causal", "dims": {"a": 2, "b": 2},
    "rho": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
    "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]],
    "povm_a": {"effects": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]},
    "povm_b": {"effects": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}})"),
            "/rho");
}

TEST(ScenarioFile, RoundTripPreservesDistributionsExactly) {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const CausalScenario s = random_causal_scenario({61, t});
    const std::string path = temp_path("causal.json");
    write_scenario_file(path, s);
    const auto back = std::get<CausalScenario>(read_scenario_file(path));
    EXPECT_EQ(back.rho().mat(), s.rho().mat());
    EXPECT_EQ(joint_causal(back).max_abs_gap(joint_causal(s)), 0.0);

    const SpacelikeScenario sp = to_spacelike(s);
    write_scenario_file(path, sp);
    const auto sp_back = std::get<SpacelikeScenario>(read_scenario_file(path));
    EXPECT_LT(joint_spacelike(sp_back).max_abs_gap(joint_spacelike(sp)), 1e-12);

    const TripartiteCausalScenario tri = random_tripartite_scenario({62, t}, {2}, {2});
    write_scenario_file(path, to_spacelike_tri(tri));
    const auto tri_back = std::get<TripartiteSpacelikeScenario>(read_scenario_file(path));
    EXPECT_LT(joint_tri_spacelike(tri_back).max_abs_gap(joint_tri_causal(tri)), 1e-12);
    std::filesystem::remove(path);
  }
}
