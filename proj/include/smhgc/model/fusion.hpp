#pragma once

#include <span>
#include <vector>

#include "smhgc/numcore/matrix.hpp"
#include "smhgc/numcore/tape.hpp"

namespace smhgc {

// Per row, ones at the k largest entries (ties to the lower column index),
// zeros elsewhere. No self-loops, no symmetrization.
DenseMatrix topk_mask(const DenseMatrix& dense, int k);

// topk_mask, then the diagonal forced to one and the result symmetrized by
// logical OR. Requires 1 <= k <= N.
DenseMatrix discretize_topk(const DenseMatrix& dense, int k);

// H = sum_{t=0}^{order} S~^t Z with S~ the row-normalized `graph`, computed
// by repeated propagation.
DenseMatrix aggregate(const DenseMatrix& graph, const DenseMatrix& z, int order);
// Same on the tape, given an already row-normalized graph.
ad::Var aggregate(ad::Var z, const DenseMatrix& normalized_graph, int order);

// w_a * A + w_b * B after rescaling A and B to the common Frobenius norm
// w_a |A| + w_b |B|, so neither matrix wins the top-k selection by scale
// alone. Equal inputs return that input; a zero weight returns the other
// matrix unchanged.
DenseMatrix balanced_sum(double w_a, const DenseMatrix& a, double w_b, const DenseMatrix& b);

struct IntraViewFusion {
  double omega_x = 0.5;
  double omega_a = 0.5;
  DenseMatrix fused;  // balanced_sum(omega_x, A_x, omega_a, A_a)
};

// Weights the feature similarity A_x and neighbor-pattern similarity A_a by
// their cosine agreement with the global similarity H H^T, clamped at zero
// and normalized to sum one (0.5 each when both clamp to zero).
IntraViewFusion intra_view_fuse(const DenseMatrix& a_x, const DenseMatrix& a_a,
                                const DenseMatrix& consensus);

// Cosine of vec(A) with vec(H H^T), computed as <A, H H^T> without forming
// the N x N product.
double global_similarity_agreement(const DenseMatrix& a, const DenseMatrix& consensus);

struct InterViewFusion {
  DenseMatrix consensus;
  std::vector<double> weights;
  std::vector<double> scores;
};

inline constexpr double kMinViewScore = 1e-8;

// score_v = cosine(vec H_v, vec H_prev) clamped to >= 1e-8;
// w_v = (score_v / max score)^rho; H_new = sum_v w_v H_v.
std::vector<double> inter_view_weights(std::span<const DenseMatrix> views,
                                       const DenseMatrix& previous, double rho,
                                       std::vector<double>* scores = nullptr);
InterViewFusion inter_view_fuse(std::span<const DenseMatrix> views, const DenseMatrix& previous,
                                double rho);

// Student-t (alpha = 1) soft assignment; rows sum to one.
DenseMatrix soft_assign(const DenseMatrix& h, const DenseMatrix& centroids);

// DEC sharpening p_ij ~ q_ij^2 / f_j with f_j = sum_i q_ij. Columns with
// f_j = 0 contribute nothing (logged).
DenseMatrix target_distribution(const DenseMatrix& q);

}  // namespace smhgc
