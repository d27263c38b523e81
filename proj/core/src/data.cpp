#include "nfr/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "nfr/error.hpp"
#include "nfr/rng.hpp"

namespace nfr {
namespace {

// Largest connected component of the nonzero pattern; ties go to the
// component containing the lowest index. Returns sorted member indices.
std::vector<int> largest_component(const Matrix& w) {
  const int k = static_cast<int>(w.rows());
  std::vector<int> comp(static_cast<std::size_t>(k), -1);
  std::vector<int> best;
  std::vector<int> stack;
  for (int start = 0; start < k; ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    std::vector<int> members;
    stack.assign(1, start);
    comp[static_cast<std::size_t>(start)] = start;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      members.push_back(a);
      for (int b = 0; b < k; ++b)
        if (comp[static_cast<std::size_t>(b)] < 0 && w(a, b) != 0.0) {
          comp[static_cast<std::size_t>(b)] = start;
          stack.push_back(b);
        }
    }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  return best;
}

Matrix restrict(const Matrix& w, const std::vector<int>& keep) {
  const int m = static_cast<int>(keep.size());
  Matrix out(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out(a, b) = w(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  return out;
}

void saturate(Matrix& w, double threshold) {
  if (threshold < 0.0) return;
  w = (w.array() > threshold).cast<double>();
}

}  // namespace

GraphStats graph_stats(const Matrix& u) {
  GraphStats st;
  st.nodes = static_cast<int>(u.rows());
  if (st.nodes == 0) return st;
  std::vector<double> deg(static_cast<std::size_t>(st.nodes), 0.0);
  for (int i = 0; i < st.nodes; ++i)
    for (int j = 0; j < st.nodes; ++j)
      if (i != j && u(i, j) != 0.0) deg[static_cast<std::size_t>(i)] += 1.0;
  st.arcs = static_cast<std::int64_t>(std::accumulate(deg.begin(), deg.end(), 0.0));
  st.mean_neighbors = static_cast<double>(st.arcs) / st.nodes;
  double ss = 0.0;
  for (double d : deg) ss += (d - st.mean_neighbors) * (d - st.mean_neighbors);
  st.std_neighbors = std::sqrt(ss / st.nodes);
  return st;
}

Graph load_edgelist(const std::filesystem::path& path, const EdgeListOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path.string());

  struct Edge {
    std::int64_t a, b;
    double w;
  };
  std::vector<Edge> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string ta, tb, tw, extra;
    if (!(ss >> ta)) continue;
    Edge e{0, 0, 1.0};
    try {
      std::size_t pos = 0;
      e.a = std::stoll(ta, &pos);
      if (pos != ta.size() || !(ss >> tb)) throw std::invalid_argument("");
      e.b = std::stoll(tb, &pos);
      if (pos != tb.size()) throw std::invalid_argument("");
      if (ss >> tw) {
        e.w = std::stod(tw, &pos);
        if (pos != tw.size() || !std::isfinite(e.w)) throw std::invalid_argument("");
      }
      if (ss >> extra) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected \"i j [w]\"");
    }
    if (e.w < 0.0) throw IoError(path.string() + ":" + std::to_string(lineno) + ": negative weight");
    edges.push_back(e);
  }
  if (edges.empty()) throw IoError("edge list " + path.string() + " has no edges");

  std::map<std::int64_t, int> ids;
  for (const auto& e : edges) {
    ids.emplace(e.a, 0);
    ids.emplace(e.b, 0);
  }
  std::vector<std::int64_t> labels;
  for (auto& [label, idx] : ids) {
    idx = static_cast<int>(labels.size());
    labels.push_back(label);
  }
  const int k = static_cast<int>(labels.size());
  Matrix w = Matrix::Zero(k, k);
  for (const auto& e : edges) {
    const int a = ids[e.a];
    const int b = ids[e.b];
    if (a == b) continue;
    const double v = std::max({w(a, b), w(b, a), e.w});
    w(a, b) = v;
    w(b, a) = v;
  }

  if (!opts.component_first) saturate(w, opts.threshold);
  const auto keep = largest_component(w);
  Graph g;
  g.similarity = restrict(w, keep);
  if (opts.component_first) saturate(g.similarity, opts.threshold);
  g.similarity.diagonal().setZero();
  if (opts.threshold < 0.0 && g.similarity.maxCoeff() > 1.0)
    throw IoError("edge list " + path.string() + ": raw weights must lie in [0,1]");
  for (int idx : keep) g.labels.push_back(labels[static_cast<std::size_t>(idx)]);
  g.stats = graph_stats(g.similarity);
  if (g.stats.arcs == 0) throw IoError("edge list " + path.string() + " has no edge above the threshold");
  return g;
}

Graph gen_poisson_graph(int items, double mean_degree, std::uint64_t seed) {
  if (items < 2) throw InvalidArgument("gen_poisson_graph: K must be >= 2");
  if (!(mean_degree >= 0.0) || !(mean_degree < items - 1))
    throw InvalidArgument("gen_poisson_graph: mean degree must lie in [0, K-1)");
  const double p = mean_degree / (items - 1);
  Rng rng(seed);
  Graph g;
  g.similarity = Matrix::Zero(items, items);
  for (int i = 0; i < items; ++i)
    for (int j = i + 1; j < items; ++j)
      if (rng.uniform() < p) {
        g.similarity(i, j) = 1.0;
        g.similarity(j, i) = 1.0;
      }
  g.stats = graph_stats(g.similarity);
  return g;
}

Vector zipf_popularity(int items, double exponent, const std::vector<int>& ranks) {
  if (items < 1) throw InvalidArgument("zipf_popularity: K must be >= 1");
  if (!(exponent >= 0.0)) throw InvalidArgument("zipf_popularity: exponent must be >= 0");
  if (!ranks.empty()) {
    if (static_cast<int>(ranks.size()) != items) throw InvalidArgument("zipf_popularity: rank permutation size");
    std::vector<int> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < items; ++i)
      if (sorted[static_cast<std::size_t>(i)] != i) throw InvalidArgument("zipf_popularity: ranks must permute 0..K-1");
  }
  Vector p(items);
  for (int i = 0; i < items; ++i) {
    const int rank = ranks.empty() ? i : ranks[static_cast<std::size_t>(i)];
    p(i) = std::pow(static_cast<double>(rank + 1), -exponent);
  }
  // Summing smallest terms first keeps the normalization tight.
  std::vector<double> terms(p.data(), p.data() + items);
  std::sort(terms.begin(), terms.end());
  const double total = std::accumulate(terms.begin(), terms.end(), 0.0);
  return p / total;
}

Vector place_cache(const Vector& popularity, int cached) {
  const int k = static_cast<int>(popularity.size());
  if (cached < 0 || cached > k) throw InvalidArgument("place_cache: C must lie in [0, K]");
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return popularity(a) > popularity(b); });
  Vector c = Vector::Ones(k);
  for (int t = 0; t < cached; ++t) c(order[static_cast<std::size_t>(t)]) = 0.0;
  return c;
}

}  // namespace nfr
