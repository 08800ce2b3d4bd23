#pragma once

#include <vector>

#include "smhgc/graphdata/dataset.hpp"
#include "smhgc/numcore/matrix.hpp"
#include "smhgc/numcore/rng.hpp"

namespace smhgc {

struct KMeansConfig {
  int restarts = 10;
  int max_iterations = 300;
  double tolerance = 1e-6;  // max centroid shift that counts as converged
};

struct KMeansResult {
  Labels assignment;
  DenseMatrix centroids;
  double inertia = 0.0;
  int iterations = 0;
  // Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_trace;
};

// k-means++ seeding followed by Lloyd iterations, best of `restarts` by
// inertia. Restart r draws from rng.derive(r), so the result depends only
// on the rng seed. Throws ContractError when k > N or k < 1.
KMeansResult kmeans(const DenseMatrix& points, int k, const KMeansConfig& config, const Rng& rng);

}  // namespace smhgc
