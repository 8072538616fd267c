#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <cmath>
#include <string>

#include "pam/cli.hpp"

using namespace pam;
using Catch::Matchers::WithinAbs;
using json = nlohmann::ordered_json;

namespace {

RunConfig parse_ok(const std::string& text) {
  auto r = parse_config(text);
  for (const auto& e : r.errors) UNSCOPED_INFO(e.path << ": " << e.message);
  REQUIRE(r.config.has_value());
  return *r.config;
}

bool has_error(const ParseResult& r, const std::string& path, const std::string& fragment) {
  for (const auto& e : r.errors)
    if (e.path == path && e.message.find(fragment) != std::string::npos) return true;
  return false;
}

const char* kSolveEn = R"({
  "command": "solve-en",
  "measure": {"kind": "white_noise"},
  "n": 2,
  "grid": {"half_widths": [10, 15, 20], "spacings": [0.1, 0.05, 0.025]}
})";

}  // namespace

TEST_CASE("minimal solve-en config runs") {
  const auto c = parse_ok(kSolveEn);
  REQUIRE(c.eps_schedule == std::vector<double>{0.0});
  const auto out = run(c);
  REQUIRE(out.exit_code == 0);
  const auto doc = json::parse(out.document);
  REQUIRE_THAT(doc["result"]["value"].get<double>(), WithinAbs(0.25, 1e-6));
  REQUIRE(out.summary.rfind("solve-en value=", 0) == 0);
}

TEST_CASE("config validation") {
  auto missing_seed = parse_config(R"({"command": "mc-moment", "eps": 0.1, "t": 0.5})");
  REQUIRE(has_error(missing_seed, "seed", "seed required"));

  auto big = parse_config(R"({"command": "solve-en", "n": 5, "grid": {"half_widths": [1], "spacings": [0.1]}})");
  REQUIRE(has_error(big, "n", "instance-too-large"));

  auto unknown = parse_config(R"({"command": "growth-index", "En": 0.25, "colour": 3})");
  REQUIRE(has_error(unknown, "colour", "unknown key"));
  auto nested = parse_config(R"({"command": "growth-index", "measure": {"kind": "riesz", "etta": 1}})");
  REQUIRE(has_error(nested, "measure.etta", "unknown key"));

  auto syntax = parse_config("{\n  \"command\": \"solve-en\",\n  \"n\": ,\n}");
  REQUIRE_FALSE(syntax.errors.empty());
  REQUIRE(syntax.errors[0].path.find("line 3") != std::string::npos);

  auto type = parse_config(R"({"command": "growth-index", "En": "a quarter"})");
  REQUIRE(has_error(type, "En", "wrong type"));

  auto bad_cmd = parse_config(R"({"command": "solve"})");
  REQUIRE(has_error(bad_cmd, "command", "unknown"));

  auto eps0 = parse_config(R"({"command": "mc-moment", "seed": 3, "eps": 0})");
  REQUIRE(has_error(eps0, "eps", "positive"));

  auto neg_seed = parse_config(R"({"command": "mc-moment", "seed": -1, "eps": 0.1})");
  REQUIRE(has_error(neg_seed, "seed", "nonnegative"));
}

TEST_CASE("zero coupling moment") {
  const auto c = parse_ok(R"({"command": "mc-moment", "seed": 7, "lambda": 0, "eps": 0.1, "t": 1,
                              "samples": 500, "K": 16})");
  const auto out = run(c);
  REQUIRE(out.exit_code == 0);
  const auto doc = json::parse(out.document);
  REQUIRE(doc["result"]["log_mean"].get<double>() == 0.0);
}

TEST_CASE("identical config and seed give identical documents") {
  const std::string text = R"({"command": "mc-moment", "seed": 99, "lambda": 1, "eps": 0.2, "t": 0.5,
                                "samples": 2000, "K": 32, "measure": {"kind": "riesz", "eta": 0.5}})";
  const auto c = parse_ok(text);
  const auto a = run(c, {1, false});
  const auto b = run(c, {3, false});
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.document == b.document);
  auto csv = c;
  csv.format = "csv";
  const auto x = run(csv, {1, false});
  const auto y = run(csv, {2, false});
  REQUIRE(x.document == y.document);
  REQUIRE(x.document.rfind("t,n,eps,lambda,samples,log_mean,std_err\n", 0) == 0);
}

TEST_CASE("emitted json parses back") {
  const auto c = parse_ok(R"({"command": "chaos-moment", "t": 0.25, "eps": 0.1, "lambda": 1, "D_max": 4,
                              "measure": {"kind": "power_band", "coef": 1, "exponent": 0, "r_min": 1, "r_max": null}})");
  // the config echo is itself a valid config that reproduces the same echo
  const std::string echo = config_to_json(c);
  const auto again = parse_ok(echo);
  REQUIRE(config_to_json(again) == echo);
  REQUIRE(std::isinf(again.measure.r_max));

  const auto white = parse_ok(R"({"command": "chaos-moment", "t": 0.25, "eps": 0.1, "lambda": 1, "D_max": 4})");
  const auto out = run(white);
  REQUIRE(out.exit_code == 0);
  const auto doc = json::parse(out.document);
  REQUIRE(doc.dump(2) + "\n" == out.document);
  const auto cfg = parse_ok(doc["config"].dump());
  REQUIRE(run(cfg).document == out.document);
  REQUIRE(doc["result"]["terms"].size() == 5);
  REQUIRE(doc["result"]["converged"].get<bool>());
}

TEST_CASE("phase diagram over riesz exponents") {
  auto c = parse_ok(R"({"command": "phase-diagram", "etas": [0.25, 0.5, 1.0, 1.5], "format": "csv"})");
  const auto out = run(c);
  REQUIRE(out.exit_code == 0);
  std::istringstream lines(out.document);
  std::string line;
  std::getline(lines, line);
  REQUIRE(line == "eta,ell,occurs,criterion_value,lambdanc_upper,lambda2c_upper");
  int rows = 0;
  while (std::getline(lines, line)) {
    REQUIRE(line.find(",no,") != std::string::npos);
    ++rows;
  }
  REQUIRE(rows == 4);
}

TEST_CASE("computational failures exit with 1") {
  const auto c = parse_ok(R"({"command": "chaos-moment", "t": 200, "eps": 0.01, "lambda": 3, "D_max": 3})");
  const auto out = run(c);
  REQUIRE(out.exit_code == 1);
  const auto doc = json::parse(out.document);
  REQUIRE(doc["error"]["code"] == "series-not-converging");
}

TEST_CASE("remaining commands") {
  auto g = run(parse_ok(R"({"command": "growth-index", "n": 2, "En": 0.25})"));
  REQUIRE(json::parse(g.document)["result"]["lower_star"].get<double>() == 0.5);
  auto l = run(parse_ok(R"({"command": "ldev-check", "alpha": 2, "beta": 1, "n": 2, "M": 1})"));
  REQUIRE(l.exit_code == 0);
  REQUIRE(json::parse(l.document)["result"]["rows"].size() == 3);
  auto h = run(parse_ok(R"({"command": "solve-eh", "lambda": 1, "eh_grid": {"half_width": 20, "points": 801}})"));
  REQUIRE_THAT(json::parse(h.document)["result"]["value"].get<double>(), WithinAbs(1.0 / 12.0, 1e-3));
  auto d = run(parse_ok(R"({"command": "diagnostics", "seed": 5, "eps": 0.1, "times": [1, 2, 4],
                            "samples": 2000, "K": 64, "En": 0.25})"));
  REQUIRE(d.exit_code == 0);
  REQUIRE(json::parse(d.document)["result"]["rows"].size() == 3);
}
