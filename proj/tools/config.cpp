#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "cli.hpp"
#include "wgnls/error.hpp"

#ifndef WGNLS_SOURCE_CONFIG_DIR
#define WGNLS_SOURCE_CONFIG_DIR "configs"
#endif
#ifndef WGNLS_VERSION
#define WGNLS_VERSION "0.0.0"
#endif

namespace wgnls::cli {

namespace {

const std::vector<std::string> kBlocks{"grid", "model", "evolve", "data"};

const char* kind_name(KeyKind k) {
  switch (k) {
    case KeyKind::integer: return "integer";
    case KeyKind::number: return "number";
    case KeyKind::extended_number: return "number or \"inf\"";
    case KeyKind::string: return "string";
    case KeyKind::boolean: return "boolean";
    case KeyKind::number_list: return "non-empty list of numbers";
  }
  return "?";
}

bool matches(const Json& v, KeyKind k) {
  switch (k) {
    case KeyKind::integer: return v.is_number_integer();
    case KeyKind::number: return v.is_number();
    case KeyKind::extended_number: return v.is_number() || (v.is_string() && v.get<std::string>() == "inf");
    case KeyKind::string: return v.is_string();
    case KeyKind::boolean: return v.is_boolean();
    case KeyKind::number_list:
      if (!v.is_array() || v.empty()) return false;
      for (const auto& e : v)
        if (!e.is_number()) return false;
      return true;
  }
  return false;
}

Json resolve_block(const Json* raw, const BlockSchema& schema, const std::string& prefix) {
  Json out = Json::object();
  if (raw && !raw->is_object()) throw ConfigError(prefix + ": expected an object");
  if (raw) {
    for (const auto& [k, v] : raw->items()) {
      bool known = false;
      for (const auto& s : schema) known |= s.name == k;
      if (!known) throw ConfigError("unknown key: " + prefix + "." + k);
    }
  }
  for (const auto& s : schema) {
    const std::string path = prefix + "." + s.name;
    if (raw && raw->contains(s.name)) {
      const Json& v = (*raw)[s.name];
      if (!matches(v, s.kind)) throw ConfigError(path + ": expected " + kind_name(s.kind));
      out[s.name] = v;
    } else if (s.required) {
      throw ConfigError("missing required key: " + path);
    } else if (!s.fallback.is_null()) {
      out[s.name] = s.fallback;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> Scenario::required_keys() const {
  std::vector<std::string> keys{"scenario"};
  for (const auto& b : blocks)
    for (const auto& s : block_schema(b))
      if (s.required) keys.push_back(b + "." + s.name);
  for (const auto& s : experiment)
    if (s.required) keys.push_back("experiment." + s.name);
  return keys;
}

const BlockSchema& block_schema(const std::string& block) {
  static const BlockSchema grid{
      {"d", KeyKind::integer, true, {}, "Euclidean dimension"},
      {"n", KeyKind::integer, true, {}, "torus dimension"},
      {"L", KeyKind::number, true, {}, "Euclidean half-length"},
      {"nx", KeyKind::integer, true, {}, "points per Euclidean axis"},
      {"ny", KeyKind::integer, true, {}, "points per torus axis"},
  };
  static const BlockSchema model{
      {"sigma", KeyKind::number, true, {}, "dispersion order"},
      {"mu", KeyKind::integer, false, -1, "-1 defocusing, 0 linear, 1 focusing"},
      {"p", KeyKind::number, true, {}, "nonlinearity power"},
  };
  static const BlockSchema evolve{
      {"T", KeyKind::number, true, {}, "final time"},
      {"dt", KeyKind::number, true, {}, "time step"},
      {"stride", KeyKind::integer, false, 1, "steps per record"},
      {"integrator", KeyKind::string, false, "strang", "strang, triple_jump or linear_exact"},
      {"dealias", KeyKind::boolean, false, false, "2/3-rule dealiasing"},
      {"leak_threshold", KeyKind::number, false, 1e-5, "boundary leak warning level"},
      {"abort_on_leak", KeyKind::boolean, false, false, "treat a leak warning as a numerical abort"},
  };
  static const BlockSchema data{
      {"kind", KeyKind::string, false, "gaussian", "initial data family"},
      {"amplitude", KeyKind::number, false, 1.0, "peak amplitude"},
      {"width", KeyKind::number, false, 1.0, "Gaussian width in x"},
      {"ymod", KeyKind::number, false, 0.0, "relative cos(y_1) modulation"},
  };
  if (block == "grid") return grid;
  if (block == "model") return model;
  if (block == "evolve") return evolve;
  if (block == "data") return data;
  throw ConfigError("unknown block: " + block);
}

Json resolve_config(const Json& raw) {
  if (!raw.is_object()) throw ConfigError("config: expected an object");
  if (!raw.contains("scenario")) throw ConfigError("missing required key: scenario");
  if (!raw["scenario"].is_string()) throw ConfigError("scenario: expected string");
  const Scenario& sc = find_scenario(raw["scenario"].get<std::string>());
  static const std::set<std::string> top{"scenario", "seed", "output", "grid", "model", "evolve", "data", "experiment"};
  for (const auto& [k, v] : raw.items()) {
    if (!top.contains(k)) throw ConfigError("unknown key: " + k);
    const bool block = std::find(kBlocks.begin(), kBlocks.end(), k) != kBlocks.end();
    if (block && std::find(sc.blocks.begin(), sc.blocks.end(), k) == sc.blocks.end())
      throw ConfigError("unknown key: " + k + " (not read by scenario " + sc.name + ")");
  }
  Json out;
  out["scenario"] = sc.name;
  if (raw.contains("seed")) {
    if (!raw["seed"].is_number_unsigned()) throw ConfigError("seed: expected non-negative integer");
    out["seed"] = raw["seed"];
  } else {
    out["seed"] = 1;
  }
  if (raw.contains("output")) {
    if (!raw["output"].is_string()) throw ConfigError("output: expected string");
    out["output"] = raw["output"];
  }
  for (const auto& b : sc.blocks) out[b] = resolve_block(raw.contains(b) ? &raw[b] : nullptr, block_schema(b), b);
  out["experiment"] = resolve_block(raw.contains("experiment") ? &raw["experiment"] : nullptr, sc.experiment, "experiment");
  return out;
}

Json load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  Json raw;
  try {
    raw = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return resolve_config(raw);
}

Overrides env_overrides() {
  Overrides o;
  if (const char* s = std::getenv("WGNLS_SEED"); s && *s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0' || *s == '-') throw ConfigError(std::string("WGNLS_SEED: not an unsigned integer: ") + s);
    o.seed = v;
  }
  if (const char* s = std::getenv("WGNLS_OUT"); s && *s) o.out = s;
  return o;
}

Json apply_overrides(Json cfg, const Overrides& flags) {
  const Overrides env = env_overrides();
  if (const auto seed = flags.seed ? flags.seed : env.seed) cfg["seed"] = *seed;
  if (const auto out = flags.out ? flags.out : env.out) cfg["output"] = out->string();
  return cfg;
}

std::filesystem::path config_dir() {
  if (const char* s = std::getenv("WGNLS_CONFIG_DIR"); s && *s) return s;
  return WGNLS_SOURCE_CONFIG_DIR;
}

std::filesystem::path preset_path(const std::string& scenario, const std::string& preset) {
  if (preset != "smoke" && preset != "paper") throw ConfigError("unknown preset: " + preset);
  find_scenario(scenario);
  return config_dir() / (scenario + "." + preset + ".json");
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  std::vector<char> buf(1 << 16);
  while (is) {
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

std::string version() { return WGNLS_VERSION; }

}  // namespace wgnls::cli
