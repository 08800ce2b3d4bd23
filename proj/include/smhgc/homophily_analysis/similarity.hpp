#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smhgc/cluster_eval/kmeans.hpp"
#include "smhgc/cluster_eval/metrics.hpp"
#include "smhgc/graphdata/dataset.hpp"

namespace smhgc {

// Label-free N x N similarity matrices of one view.
struct SimilarityBundle {
  DenseMatrix neighbor_gram;  // A~ A~^T with A~ = D^-1 A
  DenseMatrix feature_gram;   // X^ X^^T with X^ the L2-row-normalized features
};

// A~ A~^T for the row-normalized adjacency (self-loops keep every row
// nonempty).
DenseMatrix neighbor_pattern_similarity(const GraphView& view);

// Cosine similarity of feature rows. An all-zero row maps to a zero row and
// column (logged).
DenseMatrix feature_similarity(const GraphView& view);

SimilarityBundle similarity_bundle(const GraphView& view);

struct SimEnhancedGraph {
  double omega_x = 0.5;
  double omega_a = 0.5;
  double feature_hr = 0.0;   // hr of the top-k feature gram
  double neighbor_hr = 0.0;  // hr of the top-k neighbor gram
  DenseMatrix graph;         // balanced_sum(omega_x, feature_gram, omega_a, neighbor_gram)
};

// Weights the two grams by the homophily of their top-k discretizations,
// normalized to sum one (0.5 each when both are zero). Needs labels: this
// is a diagnostic, not part of the unsupervised model.
SimEnhancedGraph sim_enhanced_graph(const SimilarityBundle& bundle, std::span<const int> labels,
                                    int k);

// Default neighborhood size: round(0.1 N), at least 1.
int default_topk(Eigen::Index num_nodes);

enum class GraphChoice { raw, sim_enhanced };

const char* to_string(GraphChoice choice);
GraphChoice parse_graph_choice(const std::string& text);

struct BaselineConfig {
  GraphChoice graph = GraphChoice::raw;
  int orders = 2;
  int k = 0;  // top-k for the sim-enhanced graph; 0 picks default_topk
  KMeansConfig kmeans;
  std::uint64_t seed = 0;
};

struct BaselineResult {
  // K-means on the column-wise concatenation of every view's embedding.
  ClusterReport combined;
  std::vector<ClusterReport> per_view;
};

// P^orders X per view, where P is the row-normalized self-looped adjacency
// (raw) or the row-normalized top-k discretization of the sim-enhanced
// graph; then K-means and, when labels exist, metrics.
DenseMatrix propagate_features(const GraphView& view, GraphChoice graph, int orders, int k,
                               std::span<const int> labels);
BaselineResult message_passing_baseline(const MultiViewDataset& dataset,
                                        const BaselineConfig& config);

struct HomophilyRow {
  std::size_t view = 0;
  std::string transform;  // adjacency | neighbor_topk | feature_topk | sim_enhanced_topk
  double hr = 0.0;
  int k = 0;  // 0 for the adjacency row
};

// Per view: hr of the adjacency and of the top-k discretizations of the
// neighbor gram, feature gram and sim-enhanced graph.
std::vector<HomophilyRow> analyze_homophily(const MultiViewDataset& dataset, int k);

}  // namespace smhgc
