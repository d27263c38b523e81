#pragma once

// Scenario ingredients: similarity graphs (from edge lists or synthetic),
// Zipf popularity and most-popular cache placement.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nfr/model.hpp"

namespace nfr {

struct GraphStats {
  int nodes = 0;
  std::int64_t arcs = 0;  ///< directed neighbor count, sum_i |Neighb(i)|
  double mean_neighbors = 0.0;
  double std_neighbors = 0.0;
};

/// Statistics of the nonzero pattern of a similarity matrix.
GraphStats graph_stats(const Matrix& similarity);

struct Graph {
  Matrix similarity;
  GraphStats stats;
  std::vector<std::int64_t> labels;  ///< original node id of each row (edge lists only)
};

struct EdgeListOptions {
  double threshold = 0.1;        ///< u = 1 iff w > threshold; negative keeps raw weights
  bool component_first = false;  ///< extract the largest component before saturating
};

/// Reads whitespace-separated "i j [w]" lines ('#' starts a comment; w
/// defaults to 1). Node ids are arbitrary integers, remapped to 0..K-1 in
/// increasing order. The result is symmetric (max of both directions), has a
/// zero diagonal and keeps only the largest connected component (lowest
/// labels win ties). Throws IoError for unreadable or malformed input.
Graph load_edgelist(const std::filesystem::path& path, const EdgeListOptions& opts = {});

/// Erdos-Renyi G(K, p) with p = mean_degree / (K - 1) as a binary U.
Graph gen_poisson_graph(int items, double mean_degree, std::uint64_t seed);

/// p0_i proportional to rank_i^-s, where rank_i = i + 1 by default or
/// ranks[i] + 1 when a permutation of 0..K-1 is given.
Vector zipf_popularity(int items, double exponent, const std::vector<int>& ranks = {});

/// c_i = 0 for the C most popular items (lowest index wins ties), else 1.
Vector place_cache(const Vector& popularity, int cached);

}  // namespace nfr
