#pragma once

// Experiment runner behind the `threestage` command-line tool: flag parsing,
// orchestration of sessions / exact analysis / parity checks, and the JSON
// and CSV report schemas (schema_version 1).

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "threestage/adversary.hpp"
#include "threestage/errors.hpp"
#include "threestage/opsets.hpp"
#include "threestage/session.hpp"
#include "threestage/sift.hpp"

namespace threestage {

inline constexpr int kSchemaVersion = 1;

enum class Mode { MonteCarlo, Exact };
enum class OutputFormat { Json, Csv };

inline const char* to_string(Mode m) { return m == Mode::Exact ? "exact" : "monte-carlo"; }
inline const char* to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

inline Mode mode_from_string(std::string_view s) {
  if (s == "monte-carlo") return Mode::MonteCarlo;
  if (s == "exact") return Mode::Exact;
  throw UsageError("--mode", "expected monte-carlo or exact, got '" + std::string(s) + "'");
}

inline OutputFormat output_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw UsageError("--output", "expected json or csv, got '" + std::string(s) + "'");
}

struct ExperimentConfig {
  std::string family;
  std::size_t blocks = 100;
  std::size_t trials = 1;
  std::vector<int> eve_stages;  // sorted, 1-based
  std::optional<std::string> eve_basis;
  double noise_p = 0.0;
  std::size_t parity_rounds = 20;
  std::uint64_t seed = 0;
  Mode mode = Mode::MonteCarlo;
  OutputFormat output = OutputFormat::Json;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct TrialResult {
  std::size_t trial = 0;
  double bit_error_rate = 0.0;
  std::optional<double> eve_guess_success_rate;
  bool parity_detected = false;
  std::size_t disclosed_bits = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct ExactSummary {
  double bit_error_rate = 0.0;
  double detection_relevant_disturbance = 0.0;
  std::optional<double> eve_guess_success_rate;
  std::size_t branch_count = 0;

  friend bool operator==(const ExactSummary&, const ExactSummary&) = default;
};

struct ExactDeltas {
  double bit_error_rate = 0.0;
  std::optional<double> eve_guess_success_rate;

  friend bool operator==(const ExactDeltas&, const ExactDeltas&) = default;
};

struct ExperimentReport {
  int schema_version = kSchemaVersion;
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  double bit_error_rate_mean = 0.0;
  double bit_error_rate_stderr = 0.0;
  std::optional<double> eve_guess_success_rate;
  std::optional<ExactSummary> exact;
  std::optional<ExactDeltas> exact_vs_empirical;
  double wall_time_seconds = 0.0;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// ---------------------------------------------------------------------------
// Argument parsing

enum class Command { Run, ListFamilies, VerifyFamilies, Help };

struct ParsedCommand {
  Command command = Command::Run;
  ExperimentConfig config;
  std::string help_text;
};

inline void validate(ExperimentConfig& config) {
  const OperatorFamily* family = nullptr;
  try {
    family = &family_by_name(config.family);
  } catch (const ConfigError& e) {
    throw UsageError("--family", e.what());
  }
  if (config.blocks < 1) throw UsageError("--blocks", "must be at least 1");
  if (config.trials < 1) throw UsageError("--trials", "must be at least 1");
  if (config.parity_rounds < 1) throw UsageError("--parity-rounds", "must be at least 1");
  if (!(config.noise_p >= 0.0 && config.noise_p <= 1.0)) {
    throw UsageError("--noise", "probability must lie in [0, 1]");
  }
  for (int s : config.eve_stages) {
    if (s < 1 || s > 3) throw UsageError("--eve-stages", "stages are 1, 2 or 3");
  }
  std::sort(config.eve_stages.begin(), config.eve_stages.end());
  config.eve_stages.erase(std::unique(config.eve_stages.begin(), config.eve_stages.end()), config.eve_stages.end());
  if (config.eve_basis) {
    if (config.eve_stages.empty()) throw UsageError("--eve-basis", "requires --eve-stages");
    try {
      catalog_operator(*config.eve_basis, family->dim());
    } catch (const ConfigError& e) {
      throw UsageError("--eve-basis", e.what());
    }
  }
  if (config.mode == Mode::Exact) {
    if (config.noise_p != 0.0) throw UsageError("--noise", "exact mode is noise-free");
    config.trials = 1;
  }
}

inline ParsedCommand parse_arguments(std::vector<std::string> args) {
  ParsedCommand parsed;
  if (!args.empty()) {
    if (args.front() == "list-families") parsed.command = Command::ListFamilies;
    if (args.front() == "verify-families") parsed.command = Command::VerifyFamilies;
    if (args.front() == "run" || parsed.command != Command::Run) args.erase(args.begin());
  }
  if (parsed.command != Command::Run) {
    if (!args.empty()) throw UsageError(args.front(), "unexpected argument");
    return parsed;
  }

  auto& cfg = parsed.config;
  std::string mode = "monte-carlo";
  std::string output = "json";
  std::string eve_basis;
  CLI::App app{"Three-stage protocol experiment runner", "threestage"};
  app.add_option("--family", cfg.family, "Operator family (see list-families)")->required();
  app.add_option("--blocks", cfg.blocks, "Protocol runs per session");
  app.add_option("--trials", cfg.trials, "Independent sessions");
  app.add_option("--eve-stages", cfg.eve_stages, "Stages Eve intercepts, e.g. 1,3")->delimiter(',');
  app.add_option("--eve-basis", eve_basis, "Operator label Eve rotates by before measuring");
  app.add_option("--noise", cfg.noise_p, "Per-qubit bit-flip probability per transmission");
  app.add_option("--parity-rounds", cfg.parity_rounds, "Parity comparisons per session");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--mode", mode, "monte-carlo or exact");
  app.add_option("--output", output, "json or csv");

  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    parsed.command = Command::Help;
    parsed.help_text = app.help();
    return parsed;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    const auto flag_end = what.find(':');
    const auto flag_start = what.find("--");
    std::string flag = "arguments";
    if (flag_start != std::string::npos) {
      const auto stop = what.find_first_of(" :", flag_start);
      flag = what.substr(flag_start, stop == std::string::npos ? std::string::npos : stop - flag_start);
    } else if (flag_end != std::string::npos) {
      flag = what.substr(0, flag_end);
    }
    throw UsageError(flag, what);
  }
  cfg.mode = mode_from_string(mode);
  cfg.output = output_from_string(output);
  if (!eve_basis.empty()) cfg.eve_basis = eve_basis;
  validate(cfg);
  return parsed;
}

// ---------------------------------------------------------------------------
// Running

inline std::optional<EveStrategy> eve_strategy_for(const ExperimentConfig& config, const OperatorFamily& family) {
  if (config.eve_stages.empty()) return std::nullopt;
  std::vector<StageLabel> stages;
  for (int s : config.eve_stages) stages.push_back(stage_from_number(s));
  std::optional<UnitaryOperator> rotation;
  if (config.eve_basis) rotation = catalog_operator(*config.eve_basis, family.dim());
  return EveStrategy(stages, rotation);
}

// Exact values averaged over a uniformly random basis secret.
inline ExactSummary exact_summary(const OperatorFamily& family, const std::optional<EveStrategy>& eve) {
  ExactSummary summary;
  const double weight = 1.0 / static_cast<double>(family.dim());
  double eve_total = 0.0;
  for (std::size_t s = 0; s < family.dim(); ++s) {
    const auto a = exact_analysis(family, eve, basis_state(s, family.num_qubits()));
    summary.bit_error_rate += weight * a.bit_error_rate;
    summary.detection_relevant_disturbance += weight * a.detection_relevant_disturbance;
    summary.branch_count += a.branch_count;
    if (a.eve_guess_success_rate) eve_total += weight * *a.eve_guess_success_rate;
  }
  if (eve) summary.eve_guess_success_rate = eve_total;
  return summary;
}

inline ExperimentReport run_experiment(ExperimentConfig config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  const OperatorFamily& family = family_by_name(config.family);
  const auto eve = eve_strategy_for(config, family);

  ExperimentReport report;
  report.config = config;
  double ber_sum = 0.0, ber_sq = 0.0, eve_sum = 0.0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    SessionConfig session;
    session.family_name = config.family;
    session.blocks = config.blocks;
    session.eve_strategy = eve;
    if (config.noise_p > 0.0) session.noise = NoiseModel(config.noise_p);
    session.seed = derive_seed(config.seed, StreamDomain::kTrial, t);
    session.keep_transcripts = false;
    const auto result = run_key_session(session);

    RandomStream parity_rng(derive_seed(session.seed, StreamDomain::kParity, 0));
    const auto sift = parity_check(result.alice_bits, result.bob_bits, config.parity_rounds, parity_rng);

    report.trials.push_back(TrialResult{t, result.bit_error_rate, result.eve_guess_success_rate, sift.detected,
                                        sift.disclosed_indices.size()});
    ber_sum += result.bit_error_rate;
    ber_sq += result.bit_error_rate * result.bit_error_rate;
    if (result.eve_guess_success_rate) eve_sum += *result.eve_guess_success_rate;
  }
  const double n = static_cast<double>(config.trials);
  report.bit_error_rate_mean = ber_sum / n;
  report.bit_error_rate_stderr = detail::standard_error(ber_sum, ber_sq, config.trials);
  if (eve) report.eve_guess_success_rate = eve_sum / n;

  if (config.mode == Mode::Exact) {
    report.exact = exact_summary(family, eve);
    report.eve_guess_success_rate = report.exact->eve_guess_success_rate;
    ExactDeltas deltas{report.bit_error_rate_mean - report.exact->bit_error_rate, std::nullopt};
    if (eve) deltas.eve_guess_success_rate = eve_sum / n - *report.exact->eve_guess_success_rate;
    report.exact_vs_empirical = deltas;
  }
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using ojson = nlohmann::ordered_json;

template <typename T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <typename T>
std::optional<T> optional_from(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  return {{"family", c.family},
          {"blocks", c.blocks},
          {"trials", c.trials},
          {"eve_stages", c.eve_stages},
          {"eve_basis", detail::optional_json(c.eve_basis)},
          {"noise_p", c.noise_p},
          {"parity_rounds", c.parity_rounds},
          {"seed", c.seed},
          {"mode", to_string(c.mode)},
          {"output_format", to_string(c.output)}};
}

inline nlohmann::ordered_json to_json(const ExperimentReport& r) {
  using detail::ojson;
  using detail::optional_json;
  ojson trials = ojson::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"trial", t.trial},
                      {"bit_error_rate", t.bit_error_rate},
                      {"eve_guess_success_rate", optional_json(t.eve_guess_success_rate)},
                      {"parity_detected", t.parity_detected},
                      {"disclosed_bits", t.disclosed_bits}});
  }
  ojson exact = nullptr;
  if (r.exact) {
    exact = {{"bit_error_rate", r.exact->bit_error_rate},
             {"detection_relevant_disturbance", r.exact->detection_relevant_disturbance},
             {"eve_guess_success_rate", optional_json(r.exact->eve_guess_success_rate)},
             {"branch_count", r.exact->branch_count}};
  }
  ojson deltas = nullptr;
  if (r.exact_vs_empirical) {
    deltas = {{"bit_error_rate", r.exact_vs_empirical->bit_error_rate},
              {"eve_guess_success_rate", optional_json(r.exact_vs_empirical->eve_guess_success_rate)}};
  }
  return {{"schema_version", r.schema_version},
          {"config", to_json(r.config)},
          {"trials", trials},
          {"bit_error_rate_mean", r.bit_error_rate_mean},
          {"bit_error_rate_stderr", r.bit_error_rate_stderr},
          {"eve_guess_success_rate", optional_json(r.eve_guess_success_rate)},
          {"exact", exact},
          {"exact_vs_empirical", deltas},
          {"wall_time_seconds", r.wall_time_seconds}};
}

inline ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  ExperimentConfig c;
  c.family = j.at("family").get<std::string>();
  c.blocks = j.at("blocks").get<std::size_t>();
  c.trials = j.at("trials").get<std::size_t>();
  c.eve_stages = j.at("eve_stages").get<std::vector<int>>();
  c.eve_basis = detail::optional_from<std::string>(j.at("eve_basis"));
  c.noise_p = j.at("noise_p").get<double>();
  c.parity_rounds = j.at("parity_rounds").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.mode = mode_from_string(j.at("mode").get<std::string>());
  c.output = output_from_string(j.at("output_format").get<std::string>());
  return c;
}

inline ExperimentReport report_from_json(const nlohmann::ordered_json& j) {
  using detail::optional_from;
  ExperimentReport r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kSchemaVersion) {
    throw std::runtime_error("unsupported report schema_version " + std::to_string(r.schema_version));
  }
  r.config = config_from_json(j.at("config"));
  for (const auto& t : j.at("trials")) {
    r.trials.push_back(TrialResult{t.at("trial").get<std::size_t>(), t.at("bit_error_rate").get<double>(),
                                   optional_from<double>(t.at("eve_guess_success_rate")),
                                   t.at("parity_detected").get<bool>(), t.at("disclosed_bits").get<std::size_t>()});
  }
  r.bit_error_rate_mean = j.at("bit_error_rate_mean").get<double>();
  r.bit_error_rate_stderr = j.at("bit_error_rate_stderr").get<double>();
  r.eve_guess_success_rate = optional_from<double>(j.at("eve_guess_success_rate"));
  if (const auto& e = j.at("exact"); !e.is_null()) {
    r.exact = ExactSummary{e.at("bit_error_rate").get<double>(), e.at("detection_relevant_disturbance").get<double>(),
                           optional_from<double>(e.at("eve_guess_success_rate")),
                           e.at("branch_count").get<std::size_t>()};
  }
  if (const auto& d = j.at("exact_vs_empirical"); !d.is_null()) {
    r.exact_vs_empirical =
        ExactDeltas{d.at("bit_error_rate").get<double>(), optional_from<double>(d.at("eve_guess_success_rate"))};
  }
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return r;
}

inline std::string to_json_string(const ExperimentReport& r) { return to_json(r).dump(2) + "\n"; }

inline ExperimentReport report_from_json_string(std::string_view text) {
  return report_from_json(nlohmann::ordered_json::parse(text));
}

// ---------------------------------------------------------------------------
// CSV: one row per trial; every row repeats the config and summary columns.

namespace detail {

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "schema_version", "family", "blocks", "trials", "eve_stages", "eve_basis", "noise_p", "parity_rounds", "seed",
      "mode", "output_format", "bit_error_rate_mean", "bit_error_rate_stderr", "eve_guess_success_rate",
      "exact_bit_error_rate", "exact_detection_relevant_disturbance", "exact_eve_guess_success_rate",
      "exact_branch_count", "delta_bit_error_rate", "delta_eve_guess_success_rate", "wall_time_seconds", "trial",
      "trial_bit_error_rate", "trial_eve_guess_success_rate", "trial_parity_detected", "trial_disclosed_bits"};
  return cols;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

inline std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

template <typename Int>
Int parse_integer(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

inline std::string to_csv_string(const ExperimentReport& r) {
  using namespace detail;
  std::ostringstream out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  std::string stages;
  for (std::size_t i = 0; i < r.config.eve_stages.size(); ++i) {
    stages += (i ? ";" : "") + std::to_string(r.config.eve_stages[i]);
  }
  const auto& c = r.config;
  for (const auto& t : r.trials) {
    const std::vector<std::string> row = {
        std::to_string(r.schema_version), c.family, std::to_string(c.blocks), std::to_string(c.trials), stages,
        c.eve_basis.value_or(""), format_double(c.noise_p), std::to_string(c.parity_rounds), std::to_string(c.seed),
        to_string(c.mode), to_string(c.output), format_double(r.bit_error_rate_mean),
        format_double(r.bit_error_rate_stderr), format_optional(r.eve_guess_success_rate),
        r.exact ? format_double(r.exact->bit_error_rate) : "",
        r.exact ? format_double(r.exact->detection_relevant_disturbance) : "",
        r.exact ? format_optional(r.exact->eve_guess_success_rate) : "",
        r.exact ? std::to_string(r.exact->branch_count) : "",
        r.exact_vs_empirical ? format_double(r.exact_vs_empirical->bit_error_rate) : "",
        r.exact_vs_empirical ? format_optional(r.exact_vs_empirical->eve_guess_success_rate) : "",
        format_double(r.wall_time_seconds), std::to_string(t.trial), format_double(t.bit_error_rate),
        format_optional(t.eve_guess_success_rate), t.parity_detected ? "true" : "false",
        std::to_string(t.disclosed_bits)};
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

inline ExperimentReport report_from_csv_string(std::string_view text) {
  using namespace detail;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != csv_columns()) throw std::runtime_error("unexpected CSV header");
  ExperimentReport r;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != csv_columns().size()) throw std::runtime_error("CSV row has the wrong number of fields");
    if (first) {
      first = false;
      r.schema_version = parse_integer<int>(f[0]);
      if (r.schema_version != kSchemaVersion) throw std::runtime_error("unsupported report schema_version");
      auto& c = r.config;
      c.family = f[1];
      c.blocks = parse_integer<std::size_t>(f[2]);
      c.trials = parse_integer<std::size_t>(f[3]);
      if (!f[4].empty()) {
        for (const auto& s : split(f[4], ';')) c.eve_stages.push_back(parse_integer<int>(s));
      }
      if (!f[5].empty()) c.eve_basis = f[5];
      c.noise_p = parse_double(f[6]);
      c.parity_rounds = parse_integer<std::size_t>(f[7]);
      c.seed = parse_integer<std::uint64_t>(f[8]);
      c.mode = mode_from_string(f[9]);
      c.output = output_from_string(f[10]);
      r.bit_error_rate_mean = parse_double(f[11]);
      r.bit_error_rate_stderr = parse_double(f[12]);
      r.eve_guess_success_rate = parse_optional(f[13]);
      if (!f[14].empty()) {
        r.exact = ExactSummary{parse_double(f[14]), parse_double(f[15]), parse_optional(f[16]),
                               parse_integer<std::size_t>(f[17])};
      }
      if (!f[18].empty()) r.exact_vs_empirical = ExactDeltas{parse_double(f[18]), parse_optional(f[19])};
      r.wall_time_seconds = parse_double(f[20]);
    }
    r.trials.push_back(TrialResult{parse_integer<std::size_t>(f[21]), parse_double(f[22]), parse_optional(f[23]),
                                   f[24] == "true", parse_integer<std::size_t>(f[25])});
  }
  if (first) throw std::runtime_error("CSV report has no trial rows");
  return r;
}

inline std::string serialize(const ExperimentReport& r) {
  return r.config.output == OutputFormat::Csv ? to_csv_string(r) : to_json_string(r);
}

// ---------------------------------------------------------------------------
// Subcommands

inline std::string list_families_text() {
  std::ostringstream out;
  for (const auto& f : family_catalog()) {
    out << f.name() << " dim=" << f.dim() << " members=";
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i].label();
    out << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const FamilyReport& report, const OperatorFamily& family) {
  using detail::ojson;
  auto phase = [](const Complex& c) { return ojson::array({c.real(), c.imag()}); };
  ojson pairs = ojson::array();
  for (const auto& p : report.pairs) {
    ojson entry = {{"left", family[p.left].label()}, {"right", family[p.right].label()}};
    entry["commutation_phase"] = p.commutation ? phase(*p.commutation) : ojson(nullptr);
    if (p.closure) {
      entry["closure"] = {{"member", family[p.closure->member].label()}, {"phase", phase(p.closure->phase)}};
    } else {
      entry["closure"] = nullptr;
    }
    pairs.push_back(std::move(entry));
  }
  return {{"family", report.family},
          {"dim", family.dim()},
          {"passed", report.passed},
          {"contains_identity", report.contains_identity},
          {"pairs", pairs}};
}

// Phases are printed rounded to 12 decimals so -0 / 1e-17 noise does not leak
// into the output.
inline std::string verify_families_json(double tol = kDerivedTolerance, bool* all_passed = nullptr) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  bool ok = true;
  for (const auto& f : family_catalog()) {
    const auto report = verify_family(f, tol);
    ok = ok && report.passed;
    auto j = to_json(report, f);
    for (auto& p : j["pairs"]) {
      auto clean = [](nlohmann::ordered_json& arr) {
        for (auto& x : arr) {
          const double v = std::round(x.get<double>() * 1e12) / 1e12;
          x = v == 0.0 ? 0.0 : v;
        }
      };
      if (!p["commutation_phase"].is_null()) clean(p["commutation_phase"]);
      if (!p["closure"].is_null()) clean(p["closure"]["phase"]);
    }
    out.push_back(std::move(j));
  }
  if (all_passed) *all_passed = ok;
  return out.dump(2) + "\n";
}

// Entry point shared by the executable and the tests. Returns the exit status.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParsedCommand parsed;
  try {
    parsed = parse_arguments(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    switch (parsed.command) {
      case Command::Help:
        out << parsed.help_text;
        return 0;
      case Command::ListFamilies:
        out << list_families_text();
        return 0;
      case Command::VerifyFamilies: {
        bool ok = false;
        out << verify_families_json(kDerivedTolerance, &ok);
        return ok ? 0 : 1;
      }
      case Command::Run: {
        // Serialize fully before writing so a failure leaves no partial output.
        const std::string text = serialize(run_experiment(parsed.config));
        out << text;
        return 0;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace threestage
