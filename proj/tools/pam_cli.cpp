#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pam/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Moment asymptotics of the parabolic Anderson model"};
  std::string config_path, out_path, format;
  std::uint64_t seed = 0;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_path, "result document path (stdout when absent)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed, overrides the config");
  app.add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "log warnings to stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot read " << config_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (*seed_opt) {
    // the flag wins over the file
    try {
      auto j = nlohmann::ordered_json::parse(text);
      if (j.is_object()) {
        j["seed"] = seed;
        text = j.dump();
      }
    } catch (const nlohmann::json::parse_error&) {
      // reported with position by parse_config below
    }
  }

  const pam::ParseResult parsed = pam::parse_config(text);
  if (!parsed.config) {
    for (const auto& e : parsed.errors) std::cerr << "config error: " << (e.path.empty() ? "" : e.path + ": ") << e.message << "\n";
    return 2;
  }
  pam::RunConfig config = *parsed.config;
  if (!format.empty()) config.format = format;
  if (out_path.empty()) out_path = config.output;

  const pam::RunOutcome outcome = pam::run(config, {threads, verbose});
  if (verbose)
    for (const auto& line : outcome.log) std::cerr << "warning: " << line << "\n";
  if (out_path.empty()) {
    std::cout << outcome.document;
    std::cerr << outcome.summary << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    out << outcome.document;
    std::cout << outcome.summary << "\n";
  }
  return outcome.exit_code;
}
