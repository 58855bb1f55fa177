// SPDX-License-Identifier: Apache-2.0

#include "risim/config.hpp"

#include <string>

#include <gtest/gtest.h>

#include "risim/csv.hpp"

namespace risim {
namespace {

bool any_error_contains(const std::vector<std::string>& errors, const std::string& needle) {
  for (const std::string& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

TEST(Parse, EmptyInputKeepsDefaults) {
  const ConfigParse parsed = parse_config_text("");
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed.config.mode, SimMode::kTheory);
  EXPECT_EQ(parsed.config.scheduler, SchedulerKind::kPf);
  EXPECT_EQ(parsed.config.n_slots, 200000);
  EXPECT_EQ(parsed.config.ue_count, 10);
  EXPECT_EQ(parsed.config.n_states, 10);
  EXPECT_DOUBLE_EQ(parsed.config.budget.tx_snr_db, 110.0);
}

TEST(Parse, FullScenarioRoundTrip) {
  const std::string text = R"(
# comment line
[system]
mode = nr
scheduler = rr
n_slots = 4000
n_trials = 3
seed = 99
fading_refresh = per-block

[geometry]
bs_position = -1.2 0
ris_position = 0 0
ris_nx = 32
ris_ny = 32
ue_positions = 1 0.5  0.8 1.1   # trailing comment

[ris]
n_states = 2
ts_slots = 2000
beam_angles_deg = 30 60
floor_mode = additive
diffuse_floor_db = -25

[budget]
tx_snr_db = 30

[scheduler]
tc_slots = 20000
)";
  const ConfigParse parsed = parse_config_text(text);
  ASSERT_TRUE(parsed.ok()) << parsed.errors.front();
  const SimConfig& c = parsed.config;
  EXPECT_EQ(c.mode, SimMode::kNr);
  EXPECT_EQ(c.scheduler, SchedulerKind::kRr);
  EXPECT_EQ(c.n_slots, 4000);
  EXPECT_EQ(c.n_trials, 3);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.fading_refresh, FadingRefresh::kPerBlock);
  EXPECT_DOUBLE_EQ(c.bs_position.x, -1.2);
  ASSERT_EQ(c.ue_positions.size(), 2u);
  EXPECT_DOUBLE_EQ(c.ue_positions[1].x, 0.8);
  EXPECT_EQ(c.effective_ue_count(), 2);
  EXPECT_EQ(c.n_states, 2);
  EXPECT_EQ(c.ts_slots, 2000);
  ASSERT_EQ(c.beam_angles_deg.size(), 2u);
  EXPECT_EQ(c.floor_mode, FloorMode::kAdditive);
  EXPECT_DOUBLE_EQ(c.diffuse_floor_db, -25.0);
  EXPECT_DOUBLE_EQ(c.budget.tx_snr_db, 30.0);
  EXPECT_DOUBLE_EQ(c.tc_slots, 20000.0);
}

TEST(Parse, UnknownKeyIsReportedWithLineNumber) {
  const ConfigParse parsed = parse_config_text("[system]\nmode = theory\nbogus_key = 3\n");
  ASSERT_FALSE(parsed.ok());
  EXPECT_TRUE(any_error_contains(parsed.errors, "line 3"));
  EXPECT_TRUE(any_error_contains(parsed.errors, "system.bogus_key"));
  EXPECT_TRUE(any_error_contains(parsed.errors, "unknown key"));
}

TEST(Parse, MalformedValuesAreDiagnosed) {
  const ConfigParse parsed = parse_config_text(
      "[system]\nn_slots = many\n[geometry]\nue_box = 1 2 3\nris_position =\n");
  ASSERT_FALSE(parsed.ok());
  EXPECT_TRUE(any_error_contains(parsed.errors, "system.n_slots"));
  EXPECT_TRUE(any_error_contains(parsed.errors, "geometry.ue_box"));
  EXPECT_TRUE(any_error_contains(parsed.errors, "empty value"));
}

TEST(Parse, BadEnumValues) {
  const ConfigParse parsed =
      parse_config_text("[system]\nmode = quantum\nscheduler = lottery\n");
  ASSERT_FALSE(parsed.ok());
  EXPECT_TRUE(any_error_contains(parsed.errors, "theory|nr"));
  EXPECT_TRUE(any_error_contains(parsed.errors, "pf|rr|genie|no-ris"));
}

TEST(Validation, RejectsBrokenGeometryAndCounts) {
  SimConfig c;
  c.ue_count = 0;
  c.n_slots = -5;
  c.ris_position = c.bs_position;
  const auto errors = c.validate();
  EXPECT_TRUE(any_error_contains(errors, "geometry.ue_count"));
  EXPECT_TRUE(any_error_contains(errors, "system.n_slots"));
  EXPECT_TRUE(any_error_contains(errors, "geometry.ris_position"));
}

TEST(Validation, GenieRequiresTheoryMode) {
  SimConfig c;
  c.mode = SimMode::kNr;
  c.scheduler = SchedulerKind::kGenie;
  EXPECT_TRUE(any_error_contains(c.validate(), "theory mode only"));
  c.mode = SimMode::kTheory;
  EXPECT_TRUE(c.validate().empty());
}

TEST(Validation, ExplicitBeamsMustMatchStateCount) {
  SimConfig c;
  c.beam_angles_deg = {10.0, 40.0};  // n_states still 10
  EXPECT_TRUE(any_error_contains(c.validate(), "ris.beam_angles_deg"));
  c.n_states = 2;
  EXPECT_TRUE(c.validate().empty());
}

TEST(Validation, ParseRunsValidationOnTheResult) {
  const ConfigParse parsed = parse_config_text("[geometry]\nue_count = -1\n");
  ASSERT_FALSE(parsed.ok());
  EXPECT_TRUE(any_error_contains(parsed.errors, "geometry.ue_count"));
}

TEST(Dump, CoversResultAffectingFieldsAndIsStable) {
  SimConfig a, b;
  EXPECT_EQ(dump_config(a), dump_config(b));
  b.seed = 2;
  EXPECT_NE(dump_config(a), dump_config(b));
  b = a;
  b.diffuse_floor_db = -33.0;
  EXPECT_NE(dump_config(a), dump_config(b));
  b = a;
  b.mcs_max = 26;
  EXPECT_NE(dump_config(a), dump_config(b));
}

TEST(Dump, HashTracksTheDump) {
  SimConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.tc_slots = 12345.0;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

}  // namespace
}  // namespace risim
