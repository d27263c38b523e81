#include "nfr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nfr/error.hpp"

namespace nfr {
namespace {

using nlohmann::json;

Vector to_vector(const json& j, const char* key) {
  if (!j.is_array()) throw InvalidArgument(std::string("config: '") + key + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument(std::string("config: '") + key + "' must hold numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json from_vector(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("config: bad value for '") + key + "'");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw InvalidArgument("config: unknown key '" + item.key() + "' in " + where);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  reject_unknown(j, {"K", "N", "alpha", "q", "s", "p0", "C", "cache_fraction", "c", "v", "graph", "seed"},
                 "scenario");

  ScenarioConfig c;
  if (j.contains("K")) c.items = get<int>(j, "K");
  if (j.contains("N")) c.slots = get<int>(j, "N");
  if (j.contains("alpha")) c.alpha = get<double>(j, "alpha");
  if (j.contains("q")) c.quality = get<double>(j, "q");
  if (j.contains("s")) c.zipf_exponent = get<double>(j, "s");
  if (j.contains("p0")) c.popularity = to_vector(j["p0"], "p0");
  if (j.contains("C")) c.cached = get<int>(j, "C");
  if (j.contains("cache_fraction")) c.cache_fraction = get<double>(j, "cache_fraction");
  if (j.contains("c")) c.cost = to_vector(j["c"], "c");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");

  if (j.contains("v")) {
    const json& v = j["v"];
    if (v.is_string()) {
      if (v.get<std::string>() != "uniform") throw InvalidArgument("config: 'v' must be \"uniform\", an array or {\"zipf\": s}");
      c.clicks.kind = ClickSpec::Kind::Uniform;
    } else if (v.is_array()) {
      c.clicks.kind = ClickSpec::Kind::Explicit;
      c.clicks.values = to_vector(v, "v");
    } else if (v.is_object()) {
      reject_unknown(v, {"zipf"}, "v");
      c.clicks.kind = ClickSpec::Kind::Zipf;
      c.clicks.exponent = get<double>(v, "zipf");
    } else {
      throw InvalidArgument("config: 'v' must be \"uniform\", an array or {\"zipf\": s}");
    }
  }

  if (j.contains("graph")) {
    const json& g = j["graph"];
    if (!g.is_object()) throw InvalidArgument("config: 'graph' must be an object");
    const auto type = g.contains("type") ? get<std::string>(g, "type") : std::string("poisson");
    if (type == "poisson") {
      reject_unknown(g, {"type", "mean_degree"}, "graph");
      c.graph.type = GraphSpec::Type::Poisson;
      if (g.contains("mean_degree")) c.graph.mean_degree = get<double>(g, "mean_degree");
    } else if (type == "edgelist") {
      reject_unknown(g, {"type", "path", "threshold", "component_first"}, "graph");
      c.graph.type = GraphSpec::Type::EdgeList;
      std::filesystem::path p = get<std::string>(g, "path");
      c.graph.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      if (g.contains("threshold")) c.graph.edgelist.threshold = get<double>(g, "threshold");
      if (g.contains("component_first")) c.graph.edgelist.component_first = get<bool>(g, "component_first");
    } else if (type == "dense") {
      reject_unknown(g, {"type", "U"}, "graph");
      c.graph.type = GraphSpec::Type::Dense;
      const json& u = g.at("U");
      if (!u.is_array()) throw InvalidArgument("config: 'U' must be an array of rows");
      const auto k = static_cast<Eigen::Index>(u.size());
      c.graph.similarity = Matrix::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        const Vector row = to_vector(u[static_cast<std::size_t>(i)], "U");
        if (row.size() != k) throw InvalidArgument("config: 'U' must be square");
        c.graph.similarity.row(i) = row.transpose();
      }
    } else {
      throw InvalidArgument("config: unknown graph type '" + type + "'");
    }
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string dump_config(const ScenarioConfig& c) {
  json j;
  if (c.items) j["K"] = *c.items;
  j["N"] = c.slots;
  j["alpha"] = c.alpha;
  j["q"] = c.quality;
  j["seed"] = c.seed;
  if (c.popularity.size() > 0)
    j["p0"] = from_vector(c.popularity);
  else
    j["s"] = c.zipf_exponent;
  if (c.cost.size() > 0)
    j["c"] = from_vector(c.cost);
  else if (c.cached)
    j["C"] = *c.cached;
  else
    j["cache_fraction"] = c.cache_fraction;
  switch (c.clicks.kind) {
    case ClickSpec::Kind::Uniform: j["v"] = "uniform"; break;
    case ClickSpec::Kind::Explicit: j["v"] = from_vector(c.clicks.values); break;
    case ClickSpec::Kind::Zipf: j["v"] = json{{"zipf", c.clicks.exponent}}; break;
  }
  json g;
  switch (c.graph.type) {
    case GraphSpec::Type::Poisson:
      g = {{"type", "poisson"}, {"mean_degree", c.graph.mean_degree}};
      break;
    case GraphSpec::Type::EdgeList:
      g = {{"type", "edgelist"},
           {"path", c.graph.path.string()},
           {"threshold", c.graph.edgelist.threshold},
           {"component_first", c.graph.edgelist.component_first}};
      break;
    case GraphSpec::Type::Dense: {
      json rows = json::array();
      for (Eigen::Index i = 0; i < c.graph.similarity.rows(); ++i)
        rows.push_back(from_vector(c.graph.similarity.row(i).transpose()));
      g = {{"type", "dense"}, {"U", rows}};
      break;
    }
  }
  j["graph"] = g;
  return j.dump(2) + "\n";
}

ScenarioConfig explicit_config(const Scenario& s, std::uint64_t seed) {
  ScenarioConfig c;
  c.items = s.size();
  c.slots = s.slots();
  c.alpha = s.alpha();
  c.quality = s.quality();
  c.popularity = s.popularity();
  c.cost = s.cost();
  if (s.uniform_clicks()) {
    c.clicks.kind = ClickSpec::Kind::Uniform;
  } else {
    c.clicks.kind = ClickSpec::Kind::Explicit;
    c.clicks.values = s.clicks();
  }
  c.graph.type = GraphSpec::Type::Dense;
  c.graph.similarity = s.similarity();
  c.seed = seed;
  return c;
}

Vector resolve_clicks(const ClickSpec& spec, int slots) {
  switch (spec.kind) {
    case ClickSpec::Kind::Uniform: return {};
    case ClickSpec::Kind::Explicit:
      if (spec.values.size() != slots) throw InvalidArgument("config: 'v' must have N entries");
      return spec.values;
    case ClickSpec::Kind::Zipf: return zipf_clicks(slots, spec.exponent);
  }
  return {};
}

Instance build_instance(const ScenarioConfig& c) {
  Graph g;
  switch (c.graph.type) {
    case GraphSpec::Type::Poisson:
      if (!c.items) throw InvalidArgument("config: 'K' is required for a poisson graph");
      g = gen_poisson_graph(*c.items, c.graph.mean_degree, c.seed);
      break;
    case GraphSpec::Type::EdgeList:
      g = load_edgelist(c.graph.path, c.graph.edgelist);
      if (c.items && *c.items != g.stats.nodes)
        throw InvalidArgument("config: K=" + std::to_string(*c.items) + " but the edge list component has " +
                              std::to_string(g.stats.nodes) + " nodes");
      break;
    case GraphSpec::Type::Dense:
      g.similarity = c.graph.similarity;
      if (c.items && *c.items != g.similarity.rows()) throw InvalidArgument("config: K does not match 'U'");
      g.stats = graph_stats(g.similarity);
      break;
  }
  const int k = static_cast<int>(g.similarity.rows());

  Vector p0 = c.popularity.size() > 0 ? c.popularity : zipf_popularity(k, c.zipf_exponent);
  if (p0.size() != k) throw InvalidArgument("config: 'p0' must have K entries");
  Vector cost;
  if (c.cost.size() > 0) {
    cost = c.cost;
    if (cost.size() != k) throw InvalidArgument("config: 'c' must have K entries");
  } else {
    const int cached = c.cached ? *c.cached : static_cast<int>(std::lround(c.cache_fraction * k));
    cost = place_cache(p0, cached);
  }

  Scenario::Params params;
  params.similarity = std::move(g.similarity);
  params.cost = std::move(cost);
  params.popularity = std::move(p0);
  params.alpha = c.alpha;
  params.slots = c.slots;
  params.clicks = resolve_clicks(c.clicks, c.slots);
  params.quality = c.quality;
  return Instance{Scenario(std::move(params)), g.stats};
}

}  // namespace nfr
