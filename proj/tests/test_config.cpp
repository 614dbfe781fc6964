#include <doctest.h>

#include <string>

#include "rydsim/config.hpp"

using namespace rydsim;

TEST_CASE("empty config text yields the defaults") {
  const RunConfig cfg = parse_config_text("");
  const RunConfig defaults;
  CHECK(emit_config(cfg) == emit_config(defaults));
  CHECK(cfg.telegraph.r_high_per_us == 8.0);
  CHECK(cfg.telegraph.f_prep == 0.93);
  CHECK(cfg.prep.delta_e_MHz == 100.0);
}

TEST_CASE("values parse with comments and whitespace") {
  const RunConfig cfg = parse_config_text(
      "# comment\n"
      "\n"
      "telegraph.r_high = 10.5   # inline comment\n"
      "  prep.mw_rampdown = false\n"
      "run.master_seed = 777\n");
  CHECK(cfg.telegraph.r_high_per_us == 10.5);
  CHECK(!cfg.prep.mw_rampdown);
  CHECK(cfg.master_seed == 777);
}

TEST_CASE("unknown keys are rejected with the line number") {
  CHECK_THROWS_WITH_AS(parse_config_text("\n\ntelegraph.bogus = 1\n"),
                       doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("telegraph.bogus = 1\n"),
                       doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("out-of-range values name the offending field") {
  CHECK_THROWS_WITH_AS(parse_config_text("telegraph.f_prep = 1.2\n"),
                       doctest::Contains("telegraph.f_prep"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("ensemble.n_atoms = 0\n"),
                       doctest::Contains("ensemble.n_atoms"), ConfigError);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse_config_text("telegraph.r_high ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("telegraph.r_high = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("prep.mw_rampdown = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("run.master_seed = 12x\n"), ConfigError);
}

TEST_CASE("cross-field validation runs after parsing") {
  // r_low above r_high passes the per-key range but fails the model invariant.
  CHECK_THROWS_AS(parse_config_text("telegraph.r_low = 9.5\n"), ConfigError);
}

TEST_CASE("emit-defaults round trip is the identity") {
  const std::string text = emit_defaults();
  const RunConfig cfg = parse_config_text(text);
  CHECK(emit_config(cfg) == text);
}

TEST_CASE("modified values round trip and change the hash") {
  const RunConfig defaults;
  RunConfig cfg = parse_config_text("qubit.omega = 4.4\n");
  CHECK(cfg.rabi.omega_MHz == 4.4);
  CHECK(config_hash(cfg) != config_hash(defaults));
  const RunConfig again = parse_config_text(emit_config(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
}

TEST_CASE("provenance covers every key with a known source") {
  const RunConfig defaults;
  const auto prov = config_provenance(defaults);
  CHECK(prov.size() > 40);
  int measured = 0;
  for (const auto& kp : prov) {
    const bool known = kp.source == "measured" || kp.source == "derived" ||
                       kp.source == "choice";
    CHECK(known);
    measured += kp.source == "measured";
  }
  CHECK(measured > 15);
}

TEST_CASE("derived pair models and thresholds come out consistent") {
  const RunConfig cfg;
  CHECK(cfg.detection_pair(Branch::Plus).c3_MHz_um3 == 2.36e4);
  CHECK(cfg.prep_pair().kind == PairKind::VdwAnisotropic);
  CHECK(cfg.prep_threshold().threshold_MHz() == 0.6);
  CHECK_NOTHROW(cfg.validate());
}
