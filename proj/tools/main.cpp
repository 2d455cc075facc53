#include <fftw3.h>
#include <openssl/opensslv.h>

#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "wgnls/error.hpp"

using namespace wgnls::cli;

namespace {

struct Request {
  std::string scenario;
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
};

Json resolve_request(const Request& rq) {
  std::string preset = rq.preset;
  if (preset.empty())
    if (const char* s = std::getenv("WGNLS_PRESET"); s && *s) preset = s;
  if (!rq.config.empty() && !rq.preset.empty()) throw wgnls::ConfigError("--config and --preset are exclusive");
  std::filesystem::path path = rq.config;
  if (path.empty()) {
    if (rq.scenario.empty()) throw wgnls::ConfigError("give --config PATH or a scenario name with --preset");
    path = preset_path(rq.scenario, preset.empty() ? "smoke" : preset);
  }
  Json cfg = load_config(path);
  if (!rq.scenario.empty() && cfg["scenario"].get<std::string>() != rq.scenario)
    throw wgnls::ConfigError("scenario: config is for " + cfg["scenario"].get<std::string>() + ", not " + rq.scenario);
  Overrides ov;
  ov.seed = rq.seed;
  if (!rq.out.empty()) ov.out = rq.out;
  return apply_overrides(std::move(cfg), ov);
}

void add_common(CLI::App* cmd, Request& rq) {
  cmd->add_option("scenario", rq.scenario, "scenario name (with --preset)");
  cmd->add_option("--config", rq.config, "config file");
  cmd->add_option("--preset", rq.preset, "shipped preset")->check(CLI::IsMember({"smoke", "paper"}));
  cmd->add_option("--out", rq.out, "output directory");
  cmd->add_option("--seed", rq.seed, "seed override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wgnls: fractional NLS on waveguides, experiment runner"};
  app.require_subcommand(1);
  Request rq;
  auto* run = app.add_subcommand("run", "run a scenario and write artifacts");
  add_common(run, rq);
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  add_common(validate, rq);
  auto* list = app.add_subcommand("list", "list scenarios");
  auto* info = app.add_subcommand("info", "build and version information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      std::cout << std::left << std::setw(14) << "scenario" << std::setw(20) << "topic" << "required keys\n";
      for (const auto& s : registry()) {
        std::string keys;
        for (const auto& k : s.required_keys()) keys += (keys.empty() ? "" : " ") + k;
        std::cout << std::setw(14) << s.name << std::setw(20) << s.topic << keys << '\n';
      }
      return kExitOk;
    }
    if (*info) {
      std::cout << "wgnls " << version() << '\n'
                << "fftw " << fftw_version << '\n'
                << "openssl " << OPENSSL_VERSION_TEXT << '\n'
                << "compiler " << __VERSION__ << '\n'
                << "config dir " << config_dir().string() << '\n';
      return kExitOk;
    }
    const Json cfg = resolve_request(rq);
    if (*validate) {
      std::cout << cfg.dump(2) << '\n';
      return kExitOk;
    }
    const std::filesystem::path out =
        cfg.contains("output") ? cfg["output"].get<std::string>() : "out/" + cfg["scenario"].get<std::string>();
    const int code = run_config(cfg, out);
    std::cout << "wrote " << out.string() << (code == kExitNumerical ? " (numerical abort)" : "") << '\n';
    return code;
  } catch (const wgnls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
