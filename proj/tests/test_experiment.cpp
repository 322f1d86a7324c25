#include <gtest/gtest.h>

#include <sstream>

#include "threestage/experiment.hpp"

using namespace threestage;

namespace {

ExperimentConfig parse(std::vector<std::string> args) { return parse_arguments(std::move(args)).config; }

std::string flag_of(std::vector<std::string> args) {
  try {
    parse_arguments(std::move(args));
  } catch (const UsageError& e) {
    return e.flag();
  }
  return "";
}

std::string without_wall_time(const std::string& json_text) {
  auto j = nlohmann::ordered_json::parse(json_text);
  j.erase("wall_time_seconds");
  return j.dump();
}

}  // namespace

TEST(ParseArguments, Defaults) {
  const auto c = parse({"--family", "pauli", "--blocks", "100", "--seed", "7"});
  EXPECT_EQ(c.family, "pauli");
  EXPECT_EQ(c.blocks, 100u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.trials, 1u);
  EXPECT_TRUE(c.eve_stages.empty());
  EXPECT_FALSE(c.eve_basis);
  EXPECT_EQ(c.noise_p, 0.0);
  EXPECT_EQ(c.mode, Mode::MonteCarlo);
  EXPECT_EQ(c.output, OutputFormat::Json);
}

TEST(ParseArguments, ExactModeForcesSingleTrial) {
  const auto c = parse({"--family", "dft", "--eve-stages", "1", "--mode", "exact", "--trials", "9"});
  EXPECT_EQ(c.mode, Mode::Exact);
  EXPECT_EQ(c.trials, 1u);
  EXPECT_EQ(c.eve_stages, std::vector<int>{1});
}

TEST(ParseArguments, FullFlagSet) {
  const auto c = parse({"run", "--family", "hadamard", "--blocks", "50", "--trials", "4", "--eve-stages", "3,1,3",
                        "--eve-basis", "L", "--noise", "0.02", "--parity-rounds", "5", "--seed",
                        "18446744073709551615", "--output", "csv"});
  EXPECT_EQ(c.eve_stages, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.eve_basis, std::optional<std::string>("L"));
  EXPECT_EQ(c.noise_p, 0.02);
  EXPECT_EQ(c.parity_rounds, 5u);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.output, OutputFormat::Csv);
  EXPECT_EQ(c.trials, 4u);
}

TEST(ParseArguments, UsageErrorsNameTheFlag) {
  EXPECT_EQ(flag_of({"--family", "pauli", "--noise", "1.5"}), "--noise");
  EXPECT_EQ(flag_of({"--family", "rotation"}), "--family");
  EXPECT_EQ(flag_of({"--family", "pauli", "--eve-stages", "4"}), "--eve-stages");
  EXPECT_EQ(flag_of({"--family", "pauli", "--mode", "exact", "--noise", "0.1", "--eve-stages", "1"}), "--noise");
  EXPECT_EQ(flag_of({"--family", "pauli", "--eve-basis", "F", "--eve-stages", "1"}), "--eve-basis");
  EXPECT_EQ(flag_of({"--family", "pauli", "--eve-basis", "L", "--eve-stages", "1"}), "");
  EXPECT_EQ(flag_of({"--family", "pauli", "--eve-basis", "X"}), "--eve-basis");
  EXPECT_EQ(flag_of({"--family", "pauli", "--mode", "fast"}), "--mode");
  EXPECT_EQ(flag_of({"--family", "pauli", "--output", "xml"}), "--output");
  EXPECT_EQ(flag_of({"--family", "pauli", "--blocks", "0"}), "--blocks");
  EXPECT_EQ(flag_of({"--family", "pauli", "--blocks", "many"}), "--blocks");
  EXPECT_EQ(flag_of({"--blocks", "3"}), "--family");
  EXPECT_FALSE(flag_of({"--family", "pauli", "--bogus"}).empty());
}

TEST(ParseArguments, Subcommands) {
  EXPECT_EQ(parse_arguments({"list-families"}).command, Command::ListFamilies);
  EXPECT_EQ(parse_arguments({"verify-families"}).command, Command::VerifyFamilies);
  EXPECT_EQ(parse_arguments({"--help"}).command, Command::Help);
  EXPECT_THROW(parse_arguments({"list-families", "--family", "pauli"}), UsageError);
}

TEST(RunExperiment, CleanPauli) {
  const auto r = run_experiment(parse({"--family", "pauli", "--blocks", "100", "--seed", "7"}));
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.bit_error_rate_mean, 0.0);
  EXPECT_FALSE(r.trials[0].parity_detected);
  EXPECT_GT(r.trials[0].disclosed_bits, 0u);
  EXPECT_FALSE(r.eve_guess_success_rate);
  EXPECT_FALSE(r.exact);
}

TEST(RunExperiment, ExactHadamardStageOne) {
  const auto r = run_experiment(parse({"--family", "hadamard", "--mode", "exact", "--eve-stages", "1",
                                       "--blocks", "2000", "--seed", "3"}));
  ASSERT_TRUE(r.exact);
  EXPECT_NEAR(r.exact->bit_error_rate, 0.25, 1e-12);
  EXPECT_NEAR(*r.eve_guess_success_rate, 0.75, 1e-12);
  ASSERT_TRUE(r.exact_vs_empirical);
  EXPECT_NEAR(r.exact_vs_empirical->bit_error_rate, r.bit_error_rate_mean - 0.25, 1e-15);
  EXPECT_LT(std::abs(r.exact_vs_empirical->bit_error_rate), 3 * std::sqrt(0.25 * 0.75 / 2000));
  // 2000 bits with ~500 errors and 20 parity rounds: detection is certain in practice.
  EXPECT_TRUE(r.trials[0].parity_detected);
}

TEST(RunExperiment, ExactWithoutEve) {
  const auto r = run_experiment(parse({"--family", "quaternion", "--mode", "exact"}));
  ASSERT_TRUE(r.exact);
  EXPECT_EQ(r.exact->bit_error_rate, 0.0);
  EXPECT_FALSE(r.exact->eve_guess_success_rate);
  EXPECT_FALSE(r.eve_guess_success_rate);
}

TEST(RunExperiment, MultipleTrialsHaveSpread) {
  const auto r = run_experiment(
      parse({"--family", "hadamard", "--eve-stages", "2", "--blocks", "200", "--trials", "6", "--seed", "5"}));
  ASSERT_EQ(r.trials.size(), 6u);
  EXPECT_GT(r.bit_error_rate_stderr, 0.0);
  ASSERT_TRUE(r.eve_guess_success_rate);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(r.trials[t].trial, t);
}

TEST(Report, JsonRoundTrip) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--family", "pauli", "--blocks", "30"},
           {"--family", "dft", "--eve-stages", "1,2", "--mode", "exact", "--blocks", "40"},
           {"--family", "hadamard", "--eve-stages", "3", "--eve-basis", "L", "--noise", "0.1", "--trials", "3"}}) {
    const auto r = run_experiment(parse(args));
    EXPECT_EQ(report_from_json_string(to_json_string(r)), r);
  }
}

TEST(Report, CsvRoundTrip) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--family", "quaternion", "--blocks", "30", "--trials", "4", "--output", "csv"},
           {"--family", "hadamard", "--eve-stages", "1", "--mode", "exact", "--output", "csv"},
           {"--family", "controlled-pair", "--eve-stages", "1,3", "--eve-basis", "F", "--noise", "0.3", "--output",
            "csv", "--trials", "2"}}) {
    const auto r = run_experiment(parse(args));
    const auto text = to_csv_string(r);
    EXPECT_EQ(report_from_csv_string(text), r);
  }
}

TEST(Report, JsonSchemaFields) {
  const auto r = run_experiment(parse({"--family", "hadamard", "--eve-stages", "1", "--mode", "exact"}));
  const auto j = nlohmann::ordered_json::parse(to_json_string(r));
  EXPECT_EQ(j.at("schema_version"), 1);
  for (const char* key : {"config", "trials", "bit_error_rate_mean", "bit_error_rate_stderr", "eve_guess_success_rate",
                          "exact", "exact_vs_empirical", "wall_time_seconds"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("config").at("mode"), "exact");
  EXPECT_EQ(j.at("trials").at(0).size(), 5u);
}

TEST(Report, DeterministicAcrossRuns) {
  const auto cfg = parse({"--family", "controlled-pair", "--eve-stages", "2", "--noise", "0.05", "--trials", "3"});
  EXPECT_EQ(without_wall_time(to_json_string(run_experiment(cfg))),
            without_wall_time(to_json_string(run_experiment(cfg))));
}

TEST(RunCli, ExitStatusesAndOutput) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"list-families"}, out, err), 0);
  EXPECT_EQ(out.str(),
            "pauli dim=2 members=I,X,Y,Z\n"
            "hadamard dim=2 members=K,L\n"
            "controlled-pair dim=4 members=I4,UA,UB,UAUB\n"
            "dft dim=4 members=I4,F,F2,F3\n"
            "quaternion dim=4 members=Qi,Qj,Qk,Q1\n");

  std::ostringstream vout, verr;
  EXPECT_EQ(run_cli({"verify-families"}, vout, verr), 0);
  const auto v = nlohmann::json::parse(vout.str());
  ASSERT_EQ(v.size(), 5u);
  for (const auto& f : v) EXPECT_TRUE(f.at("passed").get<bool>());

  std::ostringstream bad_out, bad_err;
  EXPECT_NE(run_cli({"--family", "pauli", "--noise", "1.5"}, bad_out, bad_err), 0);
  EXPECT_TRUE(bad_out.str().empty());
  EXPECT_NE(bad_err.str().find("--noise"), std::string::npos);
}
