#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "smhgc/numcore/matrix.hpp"

namespace smhgc {

using Labels = std::vector<int>;
using Edge = std::pair<int, int>;

// One graph plus its node features. The adjacency is symmetric, binary and
// carries a self-loop on every node.
struct GraphView {
  DenseMatrix adjacency;
  DenseMatrix features;

  Eigen::Index num_nodes() const { return adjacency.rows(); }
  Eigen::Index feature_dim() const { return features.cols(); }

  // Throws ContractError when an invariant does not hold.
  void validate() const;

  bool operator==(const GraphView& other) const {
    return adjacency == other.adjacency && features == other.features;
  }
};

struct MultiViewDataset {
  std::vector<GraphView> views;
  std::optional<Labels> labels;
  int num_clusters = 0;

  Eigen::Index num_nodes() const { return views.empty() ? 0 : views.front().num_nodes(); }
  std::size_t num_views() const { return views.size(); }

  void validate() const;
  // Labels or a ContractError naming `what` needs them.
  const Labels& require_labels(const char* what) const;

  bool operator==(const MultiViewDataset& other) const = default;
};

// Symmetric binary adjacency with unit diagonal built from an undirected
// edge list. Throws ContractError on out-of-range node ids.
DenseMatrix adjacency_from_edges(Eigen::Index num_nodes, std::span<const Edge> edges);

// Undirected off-diagonal edges (i < j) of a binary matrix.
std::vector<Edge> edge_list(const DenseMatrix& adjacency);
std::size_t edge_count(const DenseMatrix& adjacency);

// Fraction of off-diagonal edges whose endpoints share a label. Self-loops
// are ignored. Throws UndefinedRatioError when there are no such edges.
double homophily_ratio(const DenseMatrix& edges, std::span<const int> labels);

// Two identical copies of `view`, for single-view sources.
MultiViewDataset duplicate_single_view(const GraphView& view, std::optional<Labels> labels = {},
                                       int num_clusters = 0);

}  // namespace smhgc
