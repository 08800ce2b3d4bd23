#include "smhgc/homophily_analysis/similarity.hpp"

#include <cmath>
#include <string>

#include "smhgc/log.hpp"
#include "smhgc/model/fusion.hpp"

namespace smhgc {

DenseMatrix neighbor_pattern_similarity(const GraphView& view) {
  const DenseMatrix a = row_normalize(view.adjacency);
  return a * a.transpose();
}

DenseMatrix feature_similarity(const GraphView& view) {
  const DenseVector norms = view.features.rowwise().norm();
  const Eigen::Index zero_rows = (norms.array() == 0.0).count();
  if (zero_rows > 0) {
    log().info("feature_similarity: {} all-zero feature row(s) map to zero similarity", zero_rows);
  }
  const DenseMatrix x = l2_row_normalize(view.features);
  return x * x.transpose();
}

SimilarityBundle similarity_bundle(const GraphView& view) {
  return SimilarityBundle{neighbor_pattern_similarity(view), feature_similarity(view)};
}

int default_topk(Eigen::Index num_nodes) {
  return std::max(1, static_cast<int>(std::lround(0.1 * static_cast<double>(num_nodes))));
}

SimEnhancedGraph sim_enhanced_graph(const SimilarityBundle& bundle, std::span<const int> labels,
                                    int k) {
  if (bundle.feature_gram.rows() != bundle.neighbor_gram.rows() ||
      bundle.feature_gram.cols() != bundle.neighbor_gram.cols()) {
    throw DimensionError("sim_enhanced_graph: feature gram " + shape_string(bundle.feature_gram) +
                         " vs neighbor gram " + shape_string(bundle.neighbor_gram));
  }
  SimEnhancedGraph out;
  out.feature_hr = homophily_ratio(discretize_topk(bundle.feature_gram, k), labels);
  out.neighbor_hr = homophily_ratio(discretize_topk(bundle.neighbor_gram, k), labels);
  const double total = out.feature_hr + out.neighbor_hr;
  if (total > 0.0) {
    out.omega_x = out.feature_hr / total;
    out.omega_a = out.neighbor_hr / total;
  }
  out.graph = balanced_sum(out.omega_x, bundle.feature_gram, out.omega_a, bundle.neighbor_gram);
  return out;
}

const char* to_string(GraphChoice choice) {
  return choice == GraphChoice::raw ? "raw" : "sim_enhanced";
}

GraphChoice parse_graph_choice(const std::string& text) {
  if (text == "raw") return GraphChoice::raw;
  if (text == "sim_enhanced") return GraphChoice::sim_enhanced;
  throw ContractError("unknown graph choice '" + text + "' (expected raw or sim_enhanced)");
}

DenseMatrix propagate_features(const GraphView& view, GraphChoice graph, int orders, int k,
                               std::span<const int> labels) {
  if (orders < 0) throw ContractError("baseline: orders must be non-negative");
  DenseMatrix propagation;
  if (graph == GraphChoice::raw) {
    propagation = row_normalize(view.adjacency);
  } else {
    const SimEnhancedGraph s = sim_enhanced_graph(similarity_bundle(view), labels, k);
    propagation = row_normalize(discretize_topk(s.graph, k));
  }
  DenseMatrix h = view.features;
  for (int t = 0; t < orders; ++t) h = propagation * h;
  return h;
}

namespace {

ClusterReport cluster(const DenseMatrix& embedding, const MultiViewDataset& dataset,
                      const BaselineConfig& config) {
  ClusterReport report;
  report.seed = config.seed;
  report.restarts = config.kmeans.restarts;
  report.assignment =
      kmeans(embedding, dataset.num_clusters, config.kmeans, Rng(config.seed)).assignment;
  if (dataset.labels) report.metrics = evaluate(report.assignment, *dataset.labels);
  return report;
}

}  // namespace

BaselineResult message_passing_baseline(const MultiViewDataset& dataset,
                                        const BaselineConfig& config) {
  dataset.validate();
  const int k = config.k > 0 ? config.k : default_topk(dataset.num_nodes());
  std::span<const int> labels;
  if (config.graph == GraphChoice::sim_enhanced) {
    labels = dataset.require_labels("sim-enhanced baseline");
  }
  std::vector<DenseMatrix> embeddings;
  Eigen::Index width = 0;
  for (const GraphView& view : dataset.views) {
    embeddings.push_back(propagate_features(view, config.graph, config.orders, k, labels));
    width += embeddings.back().cols();
  }
  BaselineResult result;
  DenseMatrix combined(dataset.num_nodes(), width);
  Eigen::Index offset = 0;
  for (const DenseMatrix& e : embeddings) {
    combined.middleCols(offset, e.cols()) = e;
    offset += e.cols();
    result.per_view.push_back(cluster(e, dataset, config));
  }
  result.combined = cluster(combined, dataset, config);
  return result;
}

std::vector<HomophilyRow> analyze_homophily(const MultiViewDataset& dataset, int k) {
  dataset.validate();
  const Labels& labels = dataset.require_labels("homophily analysis");
  std::vector<HomophilyRow> rows;
  for (std::size_t v = 0; v < dataset.num_views(); ++v) {
    const GraphView& view = dataset.views[v];
    const SimilarityBundle bundle = similarity_bundle(view);
    const SimEnhancedGraph s = sim_enhanced_graph(bundle, labels, k);
    rows.push_back({v, "adjacency", homophily_ratio(view.adjacency, labels), 0});
    rows.push_back({v, "neighbor_topk", s.neighbor_hr, k});
    rows.push_back({v, "feature_topk", s.feature_hr, k});
    rows.push_back({v, "sim_enhanced_topk", homophily_ratio(discretize_topk(s.graph, k), labels), k});
  }
  return rows;
}

}  // namespace smhgc
