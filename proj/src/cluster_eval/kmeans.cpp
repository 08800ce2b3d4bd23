#include "smhgc/cluster_eval/kmeans.hpp"

#include <limits>
#include <string>

namespace smhgc {

namespace {

DenseMatrix seed_plus_plus(const DenseMatrix& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  DenseMatrix centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.uniform_int(n)));
  DenseVector dist(n);
  for (Eigen::Index i = 0; i < n; ++i) dist(i) = (x.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_int(n));
    }
    centroids.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      dist(i) = std::min(dist(i), (x.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

// Nearest centroid per point (ties to the lower index); returns inertia.
double assign(const DenseMatrix& x, const DenseMatrix& centroids, Labels& out,
              DenseVector& best_dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    out[i] = arg;
    best_dist(i) = best;
    inertia += best;
  }
  return inertia;
}

KMeansResult lloyd(const DenseMatrix& x, int k, const KMeansConfig& config, Rng& rng) {
  const Eigen::Index n = x.rows();
  KMeansResult r;
  r.centroids = seed_plus_plus(x, k, rng);
  r.assignment.assign(n, 0);
  DenseVector best_dist(n);
  r.inertia = assign(x, r.centroids, r.assignment, best_dist);
  r.inertia_trace.push_back(r.inertia);

  for (r.iterations = 1; r.iterations <= config.max_iterations; ++r.iterations) {
    DenseMatrix next = DenseMatrix::Zero(k, x.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.row(r.assignment[i]) += x.row(i);
      ++counts[r.assignment[i]];
    }
    std::vector<bool> taken(n, false);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        next.row(c) /= counts[c];
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!taken[i] && best_dist(i) > far_d) {
          far_d = best_dist(i);
          far = i;
        }
      }
      taken[far] = true;
      next.row(c) = x.row(far);
    }
    const double shift = (next - r.centroids).rowwise().norm().maxCoeff();
    r.centroids = std::move(next);
    r.inertia = assign(x, r.centroids, r.assignment, best_dist);
    r.inertia_trace.push_back(r.inertia);
    if (shift < config.tolerance) break;
  }
  r.iterations = std::min(r.iterations, config.max_iterations);
  return r;
}

}  // namespace

KMeansResult kmeans(const DenseMatrix& points, int k, const KMeansConfig& config, const Rng& rng) {
  if (k < 1 || k > points.rows()) {
    throw ContractError("kmeans: need 1 <= K <= N, got K=" + std::to_string(k) +
                        " for N=" + std::to_string(points.rows()));
  }
  if (!points.allFinite()) throw ContractError("kmeans: non-finite input");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, config.restarts);
  for (int r = 0; r < restarts; ++r) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(r));
    KMeansResult candidate = lloyd(points, k, config, stream);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

}  // namespace smhgc
