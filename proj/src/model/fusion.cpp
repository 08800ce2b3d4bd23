#include "smhgc/model/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smhgc/log.hpp"

namespace smhgc {

DenseMatrix topk_mask(const DenseMatrix& dense, int k) {
  const Eigen::Index n = dense.rows();
  if (dense.cols() != n) throw DimensionError("topk: matrix must be square, got " + shape_string(dense));
  if (k < 1 || k > n) {
    throw ContractError("topk: need 1 <= k <= N, got k=" + std::to_string(k) + " for N=" +
                        std::to_string(n));
  }
  DenseMatrix mask = DenseMatrix::Zero(n, n);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    const auto row = dense.row(i);
    auto before = [&row](Eigen::Index a, Eigen::Index b) {
      return row(a) > row(b) || (row(a) == row(b) && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), before);
    for (int t = 0; t < k; ++t) mask(i, idx[t]) = 1.0;
  }
  return mask;
}

DenseMatrix discretize_topk(const DenseMatrix& dense, int k) {
  DenseMatrix mask = topk_mask(dense, k);
  DenseMatrix sym = mask.cwiseMax(mask.transpose());
  sym.diagonal().setOnes();
  return sym;
}

DenseMatrix aggregate(const DenseMatrix& graph, const DenseMatrix& z, int order) {
  if (order < 0) throw ContractError("aggregate: order must be non-negative");
  if (graph.rows() != graph.cols() || graph.cols() != z.rows()) {
    throw DimensionError("aggregate: graph " + shape_string(graph) + " vs embedding " +
                         shape_string(z));
  }
  const DenseMatrix normalized = row_normalize(graph);
  DenseMatrix h = z;
  DenseMatrix total = z;
  for (int t = 0; t < order; ++t) {
    h = normalized * h;
    total += h;
  }
  return total;
}

ad::Var aggregate(ad::Var z, const DenseMatrix& normalized_graph, int order) {
  if (order < 0) throw ContractError("aggregate: order must be non-negative");
  if (order == 0) return z;
  ad::Var graph = z.tape->constant(normalized_graph, "propagation graph");
  ad::Var h = z;
  ad::Var total = z;
  for (int t = 0; t < order; ++t) {
    h = ad::matmul(graph, h);
    total = ad::add(total, h);
  }
  return total;
}

DenseMatrix balanced_sum(double w_a, const DenseMatrix& a, double w_b, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("balanced_sum: " + shape_string(a) + " vs " + shape_string(b));
  }
  const double na = a.norm();
  const double nb = b.norm();
  const double target = w_a * na + w_b * nb;
  const double sa = na > 0.0 ? target / na : 1.0;
  const double sb = nb > 0.0 ? target / nb : 1.0;
  return (w_a * sa) * a + (w_b * sb) * b;
}

double global_similarity_agreement(const DenseMatrix& a, const DenseMatrix& consensus) {
  if (a.rows() != a.cols() || a.rows() != consensus.rows()) {
    throw DimensionError("global similarity: " + shape_string(a) + " vs consensus " +
                         shape_string(consensus));
  }
  // <A, H H^T>_F = sum_ij a_ij (H H^T)_ij = trace(H^T A H); ||H H^T||_F = ||H^T H||_F.
  const DenseMatrix ah = a * consensus;
  const double inner = consensus.cwiseProduct(ah).sum();
  const double na = a.norm();
  const double nh = (consensus.transpose() * consensus).norm();
  if (na == 0.0 || nh == 0.0) return 0.0;
  return inner / (na * nh);
}

IntraViewFusion intra_view_fuse(const DenseMatrix& a_x, const DenseMatrix& a_a,
                                const DenseMatrix& consensus) {
  if (a_x.rows() != a_a.rows() || a_x.cols() != a_a.cols()) {
    throw DimensionError("intra_view_fuse: A_x " + shape_string(a_x) + " vs A_a " +
                         shape_string(a_a));
  }
  const double cx = std::max(0.0, global_similarity_agreement(a_x, consensus));
  const double ca = std::max(0.0, global_similarity_agreement(a_a, consensus));
  IntraViewFusion out;
  if (cx + ca > 0.0) {
    out.omega_x = cx / (cx + ca);
    out.omega_a = ca / (cx + ca);
  } else {
    log().info("intra_view_fuse: both similarities disagree with the consensus; using 0.5/0.5");
  }
  out.fused = balanced_sum(out.omega_x, a_x, out.omega_a, a_a);
  return out;
}

std::vector<double> inter_view_weights(std::span<const DenseMatrix> views,
                                       const DenseMatrix& previous, double rho,
                                       std::vector<double>* scores) {
  if (views.empty()) throw ContractError("inter_view_fuse: no views");
  if (!(rho > 0.0)) throw ContractError("inter_view_fuse: rho must be positive");
  std::vector<double> s;
  for (const DenseMatrix& h : views) {
    if (h.rows() != previous.rows() || h.cols() != previous.cols()) {
      throw DimensionError("inter_view_fuse: view " + shape_string(h) + " vs consensus " +
                           shape_string(previous));
    }
    s.push_back(std::max(kMinViewScore, frobenius_cosine(h, previous)));
  }
  const double best = *std::max_element(s.begin(), s.end());
  std::vector<double> w;
  for (double score : s) w.push_back(std::pow(score / best, rho));
  if (scores) *scores = std::move(s);
  return w;
}

InterViewFusion inter_view_fuse(std::span<const DenseMatrix> views, const DenseMatrix& previous,
                                double rho) {
  InterViewFusion out;
  out.weights = inter_view_weights(views, previous, rho, &out.scores);
  out.consensus = DenseMatrix::Zero(previous.rows(), previous.cols());
  for (std::size_t v = 0; v < views.size(); ++v) out.consensus += out.weights[v] * views[v];
  return out;
}

DenseMatrix soft_assign(const DenseMatrix& h, const DenseMatrix& centroids) {
  if (h.cols() != centroids.cols()) {
    throw DimensionError("soft_assign: embedding " + shape_string(h) + " vs centroids " +
                         shape_string(centroids));
  }
  DenseMatrix q(h.rows(), centroids.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
      q(i, j) = 1.0 / (1.0 + (h.row(i) - centroids.row(j)).squaredNorm());
    }
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

DenseMatrix target_distribution(const DenseMatrix& q) {
  const DenseVector f = q.colwise().sum().transpose();
  DenseMatrix p = DenseMatrix::Zero(q.rows(), q.cols());
  bool empty = false;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (f(j) > 0.0) {
      p.col(j) = q.col(j).cwiseProduct(q.col(j)) / f(j);
    } else {
      empty = true;
    }
  }
  if (empty) log().info("target_distribution: empty cluster column ignored");
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double s = p.row(i).sum();
    if (s > 0.0) p.row(i) /= s;
  }
  return p;
}

}  // namespace smhgc
