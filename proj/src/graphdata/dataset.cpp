#include "smhgc/graphdata/dataset.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace smhgc {

void GraphView::validate() const {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) {
    throw ContractError("graph view: adjacency is not square (" + shape_string(adjacency) + ")");
  }
  if (features.rows() != n) {
    throw ContractError("graph view: node count mismatch between adjacency (" + std::to_string(n) +
                        ") and features (" + std::to_string(features.rows()) + ")");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 1.0) {
      throw ContractError("graph view: missing self-loop on node " + std::to_string(i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0 && a != 1.0) {
        throw ContractError("graph view: non-binary adjacency entry at (" + std::to_string(i) +
                            "," + std::to_string(j) + ")");
      }
      if (a != adjacency(j, i)) {
        throw ContractError("graph view: adjacency not symmetric at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
      }
    }
  }
  if (!features.allFinite()) throw ContractError("graph view: non-finite feature value");
}

void MultiViewDataset::validate() const {
  if (views.empty()) throw ContractError("dataset: no views");
  const Eigen::Index n = views.front().num_nodes();
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].num_nodes() != n) {
      throw ContractError("dataset: node count mismatch: view 0 has " + std::to_string(n) +
                          " nodes, view " + std::to_string(v) + " has " +
                          std::to_string(views[v].num_nodes()));
    }
    views[v].validate();
  }
  if (num_clusters < 2) {
    throw ContractError("dataset: num_clusters must be at least 2, got " +
                        std::to_string(num_clusters));
  }
  if (labels) {
    if (static_cast<Eigen::Index>(labels->size()) != n) {
      throw ContractError("dataset: node count mismatch: " + std::to_string(labels->size()) +
                          " labels for " + std::to_string(n) + " nodes");
    }
    for (std::size_t i = 0; i < labels->size(); ++i) {
      const int y = (*labels)[i];
      if (y < 0 || y >= num_clusters) {
        throw ContractError("dataset: label " + std::to_string(y) + " of node " +
                            std::to_string(i) + " outside [0, " + std::to_string(num_clusters) +
                            ")");
      }
    }
  }
}

const Labels& MultiViewDataset::require_labels(const char* what) const {
  if (!labels) throw ContractError(std::string(what) + " requires ground-truth labels");
  return *labels;
}

DenseMatrix adjacency_from_edges(Eigen::Index num_nodes, std::span<const Edge> edges) {
  DenseMatrix a = DenseMatrix::Identity(num_nodes, num_nodes);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw ContractError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                          ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

std::vector<Edge> edge_list(const DenseMatrix& adjacency) {
  std::vector<Edge> out;
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < adjacency.cols(); ++j) {
      if (adjacency(i, j) != 0.0) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

std::size_t edge_count(const DenseMatrix& adjacency) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < adjacency.cols(); ++j) {
      if (adjacency(i, j) != 0.0) ++count;
    }
  }
  return count;
}

double homophily_ratio(const DenseMatrix& edges, std::span<const int> labels) {
  if (edges.rows() != edges.cols() || static_cast<std::size_t>(edges.rows()) != labels.size()) {
    throw DimensionError("homophily_ratio: matrix " + shape_string(edges) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  std::size_t total = 0;
  std::size_t same = 0;
  for (Eigen::Index i = 0; i < edges.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < edges.cols(); ++j) {
      if (edges(i, j) == 0.0) continue;
      ++total;
      if (labels[i] == labels[j]) ++same;
    }
  }
  if (total == 0) throw UndefinedRatioError("homophily_ratio: graph has no off-diagonal edges");
  return static_cast<double>(same) / static_cast<double>(total);
}

MultiViewDataset duplicate_single_view(const GraphView& view, std::optional<Labels> labels,
                                       int num_clusters) {
  MultiViewDataset out;
  out.views = {view, view};
  out.labels = std::move(labels);
  if (num_clusters == 0 && out.labels) {
    for (int y : *out.labels) num_clusters = std::max(num_clusters, y + 1);
  }
  out.num_clusters = num_clusters;
  return out;
}

}  // namespace smhgc
