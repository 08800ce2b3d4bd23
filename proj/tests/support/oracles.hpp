#pragma once

#include <vector>

#include "smhgc/numcore/matrix.hpp"
#include "smhgc/numcore/rng.hpp"

// Slow reference implementations written independently of the library.
namespace smhgc::oracle {

// Same-label share over unordered pairs i != j with a nonzero entry in
// either direction.
double homophily(const DenseMatrix& adjacency, const std::vector<int>& labels);

// Pair-counting forms over all N(N-1)/2 pairs.
double ari(const std::vector<int>& pred, const std::vector<int>& truth);
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

// Exhaustive search over every injective cluster-to-class mapping (padded
// to the larger side). Returns best accuracy; `f1s` receives the macro-F1
// of every mapping that reaches it.
double acc(const std::vector<int>& pred, const std::vector<int>& truth, std::vector<double>* f1s);

// Minimum assignment cost by enumerating permutations.
double min_assignment_cost(const DenseMatrix& cost);

// sum_{t=0}^{order} P^t Z with P^t formed as an explicit matrix power.
DenseMatrix aggregate_by_powers(const DenseMatrix& graph, const DenseMatrix& z, int order);

// Lowest within-cluster sum of squares over every 2-partition.
double best_two_partition_inertia(const DenseMatrix& points);

std::vector<int> random_labels(std::size_t n, int k, Rng& rng);
DenseMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0,
                          double hi = 1.0);
// Symmetric 0/1 matrix with unit diagonal and edge probability p.
DenseMatrix random_graph(Eigen::Index n, double p, Rng& rng);

}  // namespace smhgc::oracle
