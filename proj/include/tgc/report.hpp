#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgc/gauduchon.hpp"
#include "tgc/models.hpp"

namespace tgc {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "1";

// One executed verification check.
struct CheckResult {
  std::string id;           // unique within a report
  std::string suite;        // owning suite
  std::string description;  // what was verified, in words
  std::string identity;     // the identity or property, as a formula
  double residual = 0.0;    // worst observed deviation
  double tolerance = 0.0;
  std::string status;  // "pass" | "fail" | "skipped"
  double seconds = 0.0;
  std::string note;  // failure context, skip reason, or extra detail
};

// Configuration of a verification run.
struct VerifyConfig {
  std::vector<std::string> suites = {"all"};
  std::uint64_t seed = 1;
  // When > 0, replaces every check's default tolerance.
  double tolerance_override = 0.0;
  // Excludes timing from serialized output so reruns are byte-identical.
  bool stable_output = false;
  // Negative-control hook threaded into the closed-form curvature route;
  // nonzero values must make the dual-route checks fail.
  double formula_perturbation = 0.0;
  long mc_samples = 100000;
};

struct VerificationReport {
  std::string version = kToolVersion;
  VerifyConfig config;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  double max_residual() const;
};

// Suite names accepted by run_verification_suite, excluding "all".
std::vector<std::string> known_suites();

// Execute the requested suites. Individual check failures are recorded in
// the report; ConfigError is thrown for unknown suite names or bad config.
VerificationReport run_verification_suite(const VerifyConfig& cfg);

// Sweep of a scalar quantity over a t grid.
struct SweepTable {
  std::string model;
  std::string quantity;
  std::vector<double> t_grid;
  std::vector<double> values;                   // mean over points
  std::vector<std::vector<double>> per_point;   // [point][t index]
  std::vector<ChartPoint> points;
};

// Quantities: ric1_norm, scal, scal_tilde, hsc_min, hsc_max, torsion_norm.
// The range is the inclusive grid a, a+step, ..., <= b + step/2.
SweepTable sweep(const ModelSpec& spec, const std::string& quantity,
                 double t_begin, double t_end, double t_step, int points,
                 std::uint64_t seed);

// Parses "a:b:step". Throws ConfigError on malformed input, step <= 0, or
// b < a.
void parse_t_range(const std::string& text, double& a, double& b,
                   double& step);

// Serializations. Deterministic field order; timing omitted when stable.
std::string report_json(const VerificationReport& report);
std::string report_text(const VerificationReport& report);
std::string sweep_json(const SweepTable& table);
std::string sweep_csv(const SweepTable& table);
std::string sweep_text(const SweepTable& table);

// Writes content to the path, or to stdout when destination is empty or
// "-". Throws IoError when the file cannot be written.
void emit(const std::string& content, const std::string& destination);

}  // namespace tgc
