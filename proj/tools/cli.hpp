#pragma once

// Scenario runner behind the wgnls executable: config schema, scenario
// registry, artifact writing and manifests.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace wgnls::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

enum class KeyKind { integer, number, extended_number, string, boolean, number_list };

struct KeySpec {
  std::string name;
  KeyKind kind = KeyKind::number;
  bool required = false;
  Json fallback;
  std::string help;
};

using BlockSchema = std::vector<KeySpec>;

/// Outcome of a scenario run. Files are relative to the output directory.
struct RunOutcome {
  Json summary;
  std::vector<std::string> files;
  /// Set when the run hit the blow-up guard or a leak breach.
  std::optional<std::string> numerical_abort;
};

struct Scenario {
  std::string name;
  /// Topic label shown by `wgnls list`.
  std::string topic;
  std::string description;
  /// Shared blocks the scenario reads, in {grid, model, evolve, data}.
  std::vector<std::string> blocks;
  BlockSchema experiment;
  std::function<RunOutcome(const Json& cfg, const std::filesystem::path& out)> run;

  /// Dotted paths of every required key.
  std::vector<std::string> required_keys() const;
};

const std::vector<Scenario>& registry();
const Scenario& find_scenario(const std::string& name);
/// Schema of a shared block.
const BlockSchema& block_schema(const std::string& block);

/// Validates a parsed config against the scenario schema and fills defaults.
/// Throws ConfigError naming the offending dotted path.
Json resolve_config(const Json& raw);
/// Reads and resolves a config file.
Json load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// WGNLS_SEED and WGNLS_OUT from the environment; flags take precedence.
Overrides env_overrides();
Json apply_overrides(Json cfg, const Overrides& flags);

/// Directory holding <scenario>.<preset>.json files: WGNLS_CONFIG_DIR or the
/// configs/ directory of the source tree.
std::filesystem::path config_dir();
std::filesystem::path preset_path(const std::string& scenario, const std::string& preset);

/// Runs a resolved config into `out`, writes summary.json and manifest.json
/// and returns the exit code. Numerical aborts still write artifacts.
int run_config(const Json& cfg, const std::filesystem::path& out);

std::string sha256_file(const std::filesystem::path& path);
std::string version();

}  // namespace wgnls::cli
