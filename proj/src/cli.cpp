#include "pam/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "pam/asymptotics.hpp"
#include "pam/chaos_oracle.hpp"
#include "pam/error.hpp"
#include "pam/feynman_kac.hpp"
#include "pam/spectral_models.hpp"
#include "pam/variational_solver.hpp"

namespace pam {

namespace {

using json = nlohmann::ordered_json;
constexpr double kInf = std::numeric_limits<double>::infinity();

const std::set<std::string> kCommands{"solve-en",     "solve-eh",      "mc-moment",  "chaos-moment",
                                      "growth-index", "phase-diagram", "ldev-check", "diagnostics"};

// Reads the keys of one JSON object and remembers which ones were consumed.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<ConfigError>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

  bool has(const std::string& key) {
    known_.insert(key);
    return obj_.contains(key);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      error(key, "wrong type");
    }
  }

  // null stands for +infinity
  void get_extended(const std::string& key, double& out) {
    if (!has(key)) return;
    if (obj_.at(key).is_null()) {
      out = kInf;
      return;
    }
    get(key, out);
  }

  void get_seed(const std::string& key, std::optional<std::uint64_t>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      error(key, "seed must be a nonnegative 64-bit integer");
    }
  }

  const json* object(const std::string& key) {
    if (!has(key)) return nullptr;
    if (!obj_.at(key).is_object()) {
      error(key, "expected an object");
      return nullptr;
    }
    return &obj_.at(key);
  }

  void finish() {
    for (const auto& item : obj_.items())
      if (!known_.count(item.key())) error(item.key(), "unknown key");
  }

  void error(const std::string& key, const std::string& msg) { errors_.push_back({prefix_ + key, msg}); }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<ConfigError>& errors_;
  std::set<std::string> known_;
};

SpectralMeasure build_measure(const MeasureConfig& m, int ell) {
  if (m.kind == "white_noise") {
    if (ell != 1) throw Error(ErrorCode::dimension_mismatch, "white noise is one-dimensional here");
    return SpectralMeasure::white_noise();
  }
  if (m.kind == "riesz") return SpectralMeasure::riesz(m.eta, ell);
  if (m.kind == "fractional") {
    if (ell != 1) throw Error(ErrorCode::dimension_mismatch, "fractional noise is one-dimensional");
    return SpectralMeasure::fractional(m.hurst);
  }
  if (m.kind == "power_band") return SpectralMeasure::power_band({m.coef, m.exponent, m.r_min, m.r_max}, ell, m.h2_attested);
  throw Error(ErrorCode::parameter_out_of_range, "unknown measure kind " + m.kind);
}

bool stochastic(const RunConfig& c) {
  return c.command == "mc-moment" || c.command == "diagnostics" ||
         (c.command == "chaos-moment" && c.chaos_mode == "monte_carlo");
}

void validate(RunConfig& c, std::vector<ConfigError>& errs) {
  auto fail = [&](const std::string& path, const std::string& msg) { errs.push_back({path, msg}); };
  if (!kCommands.count(c.command)) {
    fail("command", "unknown or missing command");
    return;
  }
  if (c.format != "json" && c.format != "csv") fail("format", "must be json or csv");
  if (c.ell < 1 || c.ell > 3) fail("ell", "must be 1, 2 or 3");
  if (c.n < 1) fail("n", "must be positive");
  if (!std::isfinite(c.lambda)) fail("lambda", "must be finite");
  if (!(c.eps >= 0.0)) fail("eps", "must be nonnegative");
  if (stochastic(c) && !c.seed) fail("seed", "seed required");
  if (c.command != "phase-diagram" || c.etas.empty()) {
    try {
      build_measure(c.measure, c.ell);
    } catch (const Error& e) {
      fail("measure", e.what());
    }
  }
  if (c.command == "solve-en") {
    if (c.n < 2) fail("n", "must be at least 2");
    if ((c.n - 1) * c.ell > 2) fail("n", "instance-too-large: (n - 1) * ell must be at most 2");
    if (c.half_widths.empty()) fail("grid.half_widths", "schedule must be nonempty");
    if (c.spacings.empty()) fail("grid.spacings", "schedule must be nonempty");
    if (c.eps_schedule.empty()) {
      if (c.eps > 0.0) c.eps_schedule = {c.eps};
      else if (c.measure.kind == "white_noise") c.eps_schedule = {0.0};
      else fail("eps_schedule", "needs positive values for this measure");
    }
  } else if (c.command == "solve-eh") {
    if (c.ell != 1) fail("ell", "solve-eh is one-dimensional");
    if (c.eh_points < 16) fail("eh_grid.points", "must be at least 16");
    if (!(c.eh_half_width > 0.0)) fail("eh_grid.half_width", "must be positive");
  } else if (c.command == "mc-moment" || c.command == "diagnostics") {
    if (!(c.eps > 0.0)) fail("eps", "must be positive for path integrals");
    if (c.samples < 100) fail("samples", "must be at least 100");
    if (c.K < 2) fail("K", "must be at least 2");
    if (c.command == "mc-moment") {
      if (!(c.t > 0.0)) fail("t", "must be positive");
      if (!c.x.empty() && c.x.size() != static_cast<std::size_t>(c.n * c.ell)) fail("x", "must hold n * ell values");
      if (c.u0.kind != "constant_one" && c.u0.kind != "compact_indicator" && c.u0.kind != "exponential")
        fail("u0.kind", "unsupported initial data");
      if (c.u0.kind == "exponential" && !(c.u0.beta > 0.0)) fail("u0.beta", "must be positive");
    } else {
      if (c.times.empty()) fail("times", "must be nonempty");
      for (std::size_t i = 0; i < c.times.size(); ++i)
        if (!(c.times[i] > 0.0) || (i > 0 && !(c.times[i] > c.times[i - 1])))
          fail("times", "must be positive and increasing");
      if (!(c.En >= 0.0)) fail("En", "must be nonnegative");
    }
  } else if (c.command == "chaos-moment") {
    if (!(c.t > 0.0)) fail("t", "must be positive");
    if (!(c.eps > 0.0)) fail("eps", "must be positive");
    if (c.d_max < 1) fail("D_max", "must be at least 1");
    if (c.chaos_mode != "quadrature" && c.chaos_mode != "monte_carlo") fail("chaos_mode", "quadrature or monte_carlo");
    if (!(c.lambda >= 0.0)) fail("lambda", "must be nonnegative");
  } else if (c.command == "growth-index") {
    if (!(c.En >= 0.0)) fail("En", "negative-En");
    if (c.regime != "compact" && c.regime != "exponential" && c.regime != "generic")
      fail("regime", "compact, exponential or generic");
    if (c.regime == "exponential" && c.betas.size() != 1) fail("betas", "exponential regime takes one value");
    if (c.regime == "generic" && c.betas.empty()) fail("betas", "must be nonempty");
    for (double b : c.betas)
      if (!(b > 0.0)) fail("betas", "must be positive");
  } else if (c.command == "phase-diagram") {
    for (double e : c.etas)
      if (!(e > 0.0 && e < 2.0)) fail("etas", "riesz exponents must lie in (0, 2)");
  } else if (c.command == "ldev-check") {
    if (!(c.alpha > 0.0) || !(c.beta > 0.0)) fail("alpha", "alpha and beta must be positive");
    if (c.n > 3) fail("n", "instance-too-large: at most 3");
    if (c.ell != 1) fail("ell", "ldev-check is one-dimensional");
    if (!(c.M > 0.0)) fail("M", "must be positive");
    if (c.times.empty()) c.times = {50.0, 100.0, 200.0};
    for (double t : c.times)
      if (!(t >= 50.0)) fail("times", "must be at least 50");
  }
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  json m;
  m["kind"] = c.measure.kind;
  m["eta"] = c.measure.eta;
  m["hurst"] = c.measure.hurst;
  m["coef"] = c.measure.coef;
  m["exponent"] = c.measure.exponent;
  m["r_min"] = c.measure.r_min;
  m["r_max"] = finite_or_null(c.measure.r_max);
  m["h2_attested"] = c.measure.h2_attested;
  j["measure"] = m;
  j["n"] = c.n;
  j["ell"] = c.ell;
  j["lambda"] = c.lambda;
  j["eps"] = c.eps;
  j["t"] = c.t;
  j["times"] = c.times;
  j["x"] = c.x;
  j["u0"] = json{{"kind", c.u0.kind}, {"radius", c.u0.radius}, {"beta", c.u0.beta}, {"scale", c.u0.scale}};
  j["grid"] = json{{"half_widths", c.half_widths}, {"spacings", c.spacings}};
  j["eps_schedule"] = c.eps_schedule;
  j["tol"] = c.tol;
  j["eh_grid"] = json{{"half_width", c.eh_half_width}, {"points", c.eh_points}};
  j["samples"] = c.samples;
  j["K"] = c.K;
  j["D_max"] = c.d_max;
  j["chaos_mode"] = c.chaos_mode;
  if (c.seed) j["seed"] = *c.seed;
  j["En"] = c.En;
  j["En_err"] = c.En_err;
  j["regime"] = c.regime;
  j["betas"] = c.betas;
  j["etas"] = c.etas;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["M"] = c.M;
  j["output"] = c.output;
  j["format"] = c.format;
  return j;
}

struct Csv {
  std::ostringstream out;
  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << "\n";
  }
  template <class... Ts>
  void row(const Ts&... vals) {
    bool first = true;
    ((out << (first ? "" : ",") << cell(vals), first = false), ...);
    out << "\n";
  }
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
};

json mc_json(const MCEstimate& e) {
  return json{{"log_mean", e.log_mean}, {"std_err", e.std_err}, {"samples", e.samples},
              {"saturated", e.saturated}, {"t", e.t}, {"n", e.n},
              {"eps", e.eps}, {"seed", e.seed}, {"warnings", e.warnings}};
}

InitialDataSpec build_u0(const InitialConfig& u) {
  InitialDataSpec s;
  if (u.kind == "compact_indicator") s.kind = InitialKind::compact_indicator;
  else if (u.kind == "exponential") s.kind = InitialKind::exponential;
  s.radius = u.radius;
  s.beta = u.beta;
  s.scale = u.scale;
  return s;
}

struct Produced {
  json result;
  std::string csv;
  std::string summary;
};

Produced dispatch(const RunConfig& c, const RunOptions& opt, std::vector<std::string>& log) {
  Produced p;
  Csv csv;
  const std::string& cmd = c.command;
  if (cmd == "solve-en") {
    const auto m = build_measure(c.measure, c.ell);
    VariationalProblem vp{c.n, c.ell, m, c.lambda, c.eps_schedule.front()};
    const auto est = solve_En(vp, GridSchedule{c.half_widths, c.spacings}, c.eps_schedule,
                              SolverOptions{c.tol, 500, c.seed.value_or(1)});
    json raw = json::array();
    csv.header({"half_width", "spacing", "eps", "eigenvalue"});
    for (const auto& r : est.raw_values) {
      raw.push_back(json{{"half_width", r.half_width}, {"spacing", r.spacing}, {"eps", r.eps}, {"eigenvalue", r.eigenvalue}});
      csv.row(r.half_width, r.spacing, r.eps, r.eigenvalue);
    }
    p.result = json{{"value", est.value}, {"error_bar", est.error_bar}, {"verdict", est.verdict},
                    {"boundary_mass", est.boundary_mass}, {"maximizer_norm_check", est.maximizer_norm_check},
                    {"warnings", est.warnings}, {"raw_values", raw}};
    for (const auto& w : est.warnings) log.push_back(w);
    p.summary = "solve-en value=" + num(est.value) + " err=" + num(est.error_bar) + " " + est.verdict;
  } else if (cmd == "solve-eh") {
    const auto m = build_measure(c.measure, c.ell);
    const GridSpec g{c.eh_half_width, c.eh_points};
    const auto r = solve_EH(m, c.lambda, c.eps, g);
    csv.header({"x", "profile"});
    for (std::size_t i = 0; i < r.profile.size(); ++i) csv.row(g.coordinate(static_cast<int>(i) + 1), r.profile[i]);
    p.result = json{{"value", r.value}, {"iterations", r.iterations}, {"residual", r.residual}};
    p.summary = "solve-eh value=" + num(r.value) + " residual=" + num(r.residual);
  } else if (cmd == "mc-moment") {
    const auto m = build_measure(c.measure, c.ell);
    MCOptions mo{c.samples, c.K, *c.seed, opt.threads};
    const auto e = moment_fk_bridge(c.n, c.t, c.x, build_u0(c.u0), m, c.eps, c.lambda, mo);
    for (const auto& w : e.warnings) log.push_back(w);
    p.result = mc_json(e);
    csv.header({"t", "n", "eps", "lambda", "samples", "log_mean", "std_err"});
    csv.row(e.t, e.n, e.eps, c.lambda, e.samples, e.log_mean, e.std_err);
    p.summary = "mc-moment log_mean=" + num(e.log_mean) + " err=" + num(e.std_err);
  } else if (cmd == "chaos-moment") {
    const auto m = build_measure(c.measure, c.ell);
    ChaosOptions co;
    co.mode = c.chaos_mode == "monte_carlo" ? ChaosMode::monte_carlo : ChaosMode::quadrature;
    co.samples = c.samples;
    co.seed = c.seed.value_or(1);
    co.threads = opt.threads;
    const auto r = second_moment_chaos(c.t, m, c.eps, c.lambda, c.d_max, co);
    p.result = json{{"t", r.t}, {"eps", r.eps}, {"lambda", r.lambda}, {"terms", r.terms},
                    {"term_errors", r.term_errors}, {"partial_sum", r.partial_sum},
                    {"partial_sum_err", r.partial_sum_err}, {"tail_bound", r.tail_bound},
                    {"tail_bound_kind", "heuristic"}, {"ratio", r.ratio}, {"converged", r.converged}};
    csv.header({"d", "term", "term_err"});
    for (std::size_t d = 0; d < r.terms.size(); ++d) csv.row(static_cast<int>(d), r.terms[d], r.term_errors[d]);
    p.summary = "chaos-moment partial_sum=" + num(r.partial_sum) + " tail=" + num(r.tail_bound);
  } else if (cmd == "growth-index") {
    const GrowthRegime reg = c.regime == "exponential" ? GrowthRegime::exponential
                             : c.regime == "generic"   ? GrowthRegime::generic
                                                       : GrowthRegime::compact;
    const auto r = growth_index(c.n, c.En, c.En_err, reg, c.betas);
    p.result = json{{"n", r.n}, {"En", r.En}, {"En_err", r.En_err}, {"lower_star", r.lower_star},
                    {"upper_star", r.upper_star}, {"regime", c.regime}, {"betas", r.betas}, {"equal", r.equal}};
    csv.header({"beta", "upper_bound"});
    if (c.betas.empty()) csv.row(kInf, growth_upper(c.n, c.En, kInf));
    for (double b : c.betas) csv.row(b, growth_upper(c.n, c.En, b));
    p.summary = "growth-index lower=" + num(r.lower_star) + " upper=" + num(r.upper_star);
  } else if (cmd == "phase-diagram") {
    json rows = json::array();
    csv.header({"eta", "ell", "occurs", "criterion_value", "lambdanc_upper", "lambda2c_upper"});
    auto add = [&](double eta, const SpectralMeasure& m) {
      const auto r = phase_predicate(m);
      json row{{"eta", finite_or_null(eta)}, {"ell", c.ell}, {"occurs", to_string(r.occurs)},
               {"hypothesis", r.hypothesis}, {"criterion_value", finite_or_null(r.criterion_value)},
               {"lambdanc_upper", finite_or_null(r.lambdanc_upper)},
               {"lambda2c_upper", finite_or_null(r.lambda2c_upper)}};
      if (r.h1_criterion_value) row["h1_criterion_value"] = finite_or_null(*r.h1_criterion_value);
      rows.push_back(row);
      csv.row(eta, c.ell, to_string(r.occurs), r.criterion_value, r.lambdanc_upper, r.lambda2c_upper);
    };
    if (c.etas.empty()) {
      add(c.measure.kind == "riesz" ? c.measure.eta : std::nan(""), build_measure(c.measure, c.ell));
    } else {
      for (double eta : c.etas) add(eta, SpectralMeasure::riesz(eta, c.ell));
    }
    p.result = json{{"rows", rows}};
    p.summary = "phase-diagram rows=" + std::to_string(rows.size()) + " first=" + rows[0]["occurs"].get<std::string>();
  } else if (cmd == "ldev-check") {
    const double rate = ldev_rate(c.alpha, c.beta, c.n);
    json rows = json::array();
    csv.header({"t", "rate", "numeric", "rel_diff"});
    double last = 0.0;
    for (double t : c.times) {
      const double v = ldev_numeric(c.alpha, c.beta, c.n, c.M, t);
      last = std::abs(v - rate) / std::abs(rate);
      rows.push_back(json{{"t", t}, {"numeric", v}, {"rel_diff", last}});
      csv.row(t, rate, v, last);
    }
    p.result = json{{"alpha", c.alpha}, {"beta", c.beta}, {"n", c.n}, {"M", c.M}, {"rate", rate}, {"rows", rows}};
    p.summary = "ldev-check rate=" + num(rate) + " rel_diff=" + num(last);
  } else if (cmd == "diagnostics") {
    const auto m = build_measure(c.measure, c.ell);
    std::vector<DiagnosticInput> in;
    for (double t : c.times) {
      MCOptions mo{c.samples, c.K, *c.seed, opt.threads};
      DiagnosticInput d;
      d.estimate = moment_fk_bm(c.n, t, {}, m, c.eps, c.lambda, mo);
      // u0 = 1: the heat factor is 1; the strip mass is known in closed form for a pair on the line
      d.log_strip = (c.n == 2 && c.ell == 1) ? log_strip_mass_pair(t, c.M) : 0.0;
      for (const auto& w : d.estimate.warnings) log.push_back(w);
      in.push_back(d);
    }
    const auto r = finite_t_diagnostics(c.n, c.En, c.En_err, in);
    std::vector<MomentPoint> pts;
    for (const auto& d : in) pts.push_back({d.estimate.t, d.estimate.log_mean, d.estimate.std_err});
    json rows = json::array();
    csv.header({"t", "log_mean", "std_err", "upper_lhs", "upper_bound", "upper_violation", "lower_lhs",
                "lower_bound", "lower_violation"});
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto& row = r.rows[i];
      rows.push_back(json{{"t", row.t}, {"log_mean", in[i].estimate.log_mean}, {"std_err", in[i].estimate.std_err},
                          {"upper_lhs", row.upper_lhs}, {"upper_bound", row.upper_bound},
                          {"upper_violation", row.upper_violation}, {"lower_lhs", row.lower_lhs},
                          {"lower_bound", row.lower_bound}, {"lower_violation", row.lower_violation}});
      csv.row(row.t, in[i].estimate.log_mean, in[i].estimate.std_err, row.upper_lhs, row.upper_bound,
              row.upper_violation, row.lower_lhs, row.lower_bound, row.lower_violation);
    }
    p.result = json{{"En", r.En}, {"En_err", r.En_err}, {"slack_upper", r.slack_upper},
                    {"slack_lower", r.slack_lower}, {"any_violation", r.any_violation}, {"rows", rows}};
    if (pts.size() >= 3) {
      const auto [slope, err] = lyapunov_slope(pts);
      p.result["slope"] = slope;
      p.result["slope_err"] = err;
    }
    p.summary = std::string("diagnostics violations=") + (r.any_violation ? "yes" : "no");
  }
  p.csv = csv.out.str();
  return p;
}

std::string line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ParseResult parse_config(std::string_view text) {
  ParseResult res;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    res.errors.push_back({line_column(text, e.byte), std::string("parse error: ") + e.what()});
    return res;
  }
  if (!doc.is_object()) {
    res.errors.push_back({"", "top level must be an object"});
    return res;
  }
  RunConfig c;
  auto& errs = res.errors;
  Reader r(doc, "", errs);
  r.get("command", c.command);
  if (const json* m = r.object("measure")) {
    Reader mr(*m, "measure.", errs);
    mr.get("kind", c.measure.kind);
    mr.get("eta", c.measure.eta);
    mr.get("hurst", c.measure.hurst);
    mr.get("coef", c.measure.coef);
    mr.get("exponent", c.measure.exponent);
    mr.get("r_min", c.measure.r_min);
    mr.get_extended("r_max", c.measure.r_max);
    mr.get("h2_attested", c.measure.h2_attested);
    mr.finish();
  }
  r.get("n", c.n);
  r.get("ell", c.ell);
  r.get("lambda", c.lambda);
  r.get("eps", c.eps);
  r.get("t", c.t);
  r.get("times", c.times);
  r.get("x", c.x);
  if (const json* u = r.object("u0")) {
    Reader ur(*u, "u0.", errs);
    ur.get("kind", c.u0.kind);
    ur.get("radius", c.u0.radius);
    ur.get("beta", c.u0.beta);
    ur.get("scale", c.u0.scale);
    ur.finish();
  }
  if (const json* g = r.object("grid")) {
    Reader gr(*g, "grid.", errs);
    gr.get("half_widths", c.half_widths);
    gr.get("spacings", c.spacings);
    gr.finish();
  }
  r.get("eps_schedule", c.eps_schedule);
  r.get("tol", c.tol);
  if (const json* g = r.object("eh_grid")) {
    Reader gr(*g, "eh_grid.", errs);
    gr.get("half_width", c.eh_half_width);
    gr.get("points", c.eh_points);
    gr.finish();
  }
  r.get("samples", c.samples);
  r.get("K", c.K);
  r.get("D_max", c.d_max);
  r.get("chaos_mode", c.chaos_mode);
  r.get_seed("seed", c.seed);
  r.get("En", c.En);
  r.get("En_err", c.En_err);
  r.get("regime", c.regime);
  r.get("betas", c.betas);
  r.get("etas", c.etas);
  r.get("alpha", c.alpha);
  r.get("beta", c.beta);
  r.get("M", c.M);
  r.get("output", c.output);
  r.get("format", c.format);
  r.finish();
  if (errs.empty()) validate(c, errs);
  if (errs.empty()) res.config = std::move(c);
  return res;
}

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

RunOutcome run(const RunConfig& c, const RunOptions& options) {
  RunOutcome out;
  json doc;
  doc["command"] = c.command;
  doc["config"] = config_json(c);
  try {
    Produced p = dispatch(c, options, out.log);
    doc["result"] = p.result;
    out.summary = p.summary;
    out.document = c.format == "csv" ? p.csv : doc.dump(2) + "\n";
    out.exit_code = 0;
  } catch (const Error& e) {
    doc["error"] = json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    out.summary = c.command + " failed: " + e.what();
    out.document = doc.dump(2) + "\n";
    out.exit_code = 1;
  }
  return out;
}

}  // namespace pam
