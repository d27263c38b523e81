#pragma once

// Scenario configuration documents (JSON).
//
//   {
//     "K": 100, "N": 2, "alpha": 0.8, "q": 0.9, "seed": 7,
//     "s": 0.7                          or  "p0": [...],
//     "C": 2  or  "cache_fraction": 0.02  or  "c": [...],
//     "v": "uniform"  or  [0.8, 0.2]  or  {"zipf": 1.0},
//     "graph": {"type": "poisson", "mean_degree": 8}
//           or {"type": "edgelist", "path": "g.txt", "threshold": 0.1,
//               "component_first": false}
//           or {"type": "dense", "U": [[...], ...]}
//   }
//
// Relative edge-list paths resolve against the config file's directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "nfr/data.hpp"
#include "nfr/model.hpp"

namespace nfr {

struct GraphSpec {
  enum class Type { Poisson, EdgeList, Dense };
  Type type = Type::Poisson;
  double mean_degree = 8.0;
  std::filesystem::path path;
  EdgeListOptions edgelist;
  Matrix similarity;  ///< Dense only
};

struct ClickSpec {
  enum class Kind { Uniform, Explicit, Zipf };
  Kind kind = Kind::Uniform;
  Vector values;         ///< Explicit only
  double exponent = 0.0; ///< Zipf only
};

struct ScenarioConfig {
  std::optional<int> items;
  int slots = 2;
  double alpha = 0.8;
  double quality = 0.0;
  double zipf_exponent = 0.7;
  Vector popularity;  ///< explicit p0; empty means Zipf with zipf_exponent
  std::optional<int> cached;
  double cache_fraction = 0.02;
  Vector cost;        ///< explicit c; overrides C and cache_fraction
  ClickSpec clicks;
  GraphSpec graph;
  std::uint64_t seed = 1;
};

/// Throws InvalidArgument on malformed or unknown keys.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Throws IoError when the file cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Serializes a config; the output parses back to an equivalent config.
std::string dump_config(const ScenarioConfig& config);

/// Fully explicit config (dense U, p0, c, v) describing `scenario`.
ScenarioConfig explicit_config(const Scenario& scenario, std::uint64_t seed);

struct Instance {
  Scenario scenario;
  GraphStats stats;
};

/// Materializes the graph, popularity, costs and clicks.
Instance build_instance(const ScenarioConfig& config);

/// Resolves the click spec for N slots (empty vector for uniform).
Vector resolve_clicks(const ClickSpec& spec, int slots);

}  // namespace nfr
