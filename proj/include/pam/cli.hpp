#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pam {

/// Spectral measure as written in a config file.
struct MeasureConfig {
  std::string kind = "white_noise";  // white_noise | riesz | fractional | power_band
  double eta = 0.5;
  double hurst = 0.5;
  double coef = 1.0;
  double exponent = 0.0;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  bool h2_attested = false;
};

struct InitialConfig {
  std::string kind = "constant_one";  // constant_one | compact_indicator | exponential
  double radius = 1.0;
  double beta = 1.0;
  double scale = 1.0;
};

struct RunConfig {
  std::string command;
  MeasureConfig measure;
  int n = 2;
  int ell = 1;
  double lambda = 1.0;
  double eps = 0.0;
  double t = 1.0;
  std::vector<double> times;
  std::vector<double> x;
  InitialConfig u0;
  // solve-en
  std::vector<double> half_widths;
  std::vector<double> spacings;
  std::vector<double> eps_schedule;
  double tol = 1e-9;
  // solve-eh
  double eh_half_width = 20.0;
  int eh_points = 1601;
  // mc-moment, chaos-moment, diagnostics
  long samples = 100000;
  int K = 256;
  int d_max = 4;
  std::string chaos_mode = "quadrature";
  std::optional<std::uint64_t> seed;
  // growth-index, diagnostics
  double En = 0.0;
  double En_err = 0.0;
  std::string regime = "compact";
  std::vector<double> betas;
  // phase-diagram
  std::vector<double> etas;
  // ldev-check
  double alpha = 1.0;
  double beta = 1.0;
  double M = 1.0;
  // output
  std::string output;
  std::string format = "json";
};

struct ConfigError {
  std::string path;  // field path such as "measure.eta", or "line 3, column 5"
  std::string message;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<ConfigError> errors;
};

/// Parses and validates a JSON run configuration; unknown keys are errors.
ParseResult parse_config(std::string_view text);

/// The validated config as JSON text, defaults filled in; parses back to itself.
std::string config_to_json(const RunConfig& config);

struct RunOptions {
  int threads = 0;
  bool verbose = false;
};

struct RunOutcome {
  int exit_code = 0;    // 0 success, 1 computational failure, 2 configuration error
  std::string summary;  // one line
  std::string document; // JSON or CSV result
  std::vector<std::string> log;
};

RunOutcome run(const RunConfig& config, const RunOptions& options = {});

}  // namespace pam
