#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "smhgc/graphdata/dataset.hpp"

namespace smhgc {

// Dense contingency table: rows are predicted clusters, columns true
// classes, both relabeled to 0..R-1 / 0..C-1 in order of first appearance.
Matrix<long long> contingency(std::span<const int> pred, std::span<const int> truth);

// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
// potentials). Returns column assigned to each row.
std::vector<int> hungarian_min_cost(const DenseMatrix& cost);

// Mutual information over the geometric mean of the two entropies.
double nmi(std::span<const int> pred, std::span<const int> truth);
double ari(std::span<const int> pred, std::span<const int> truth);

struct AccF1 {
  double acc = 0.0;
  double f1 = 0.0;  // macro over true classes
};

// Best one-to-one cluster-to-class mapping (Hungarian on the padded
// contingency matrix), then accuracy and macro-F1 under that mapping.
AccF1 acc_f1(std::span<const int> pred, std::span<const int> truth);

struct Metrics {
  double nmi = 0.0;
  double ari = 0.0;
  double acc = 0.0;
  double f1 = 0.0;
};

Metrics evaluate(std::span<const int> pred, std::span<const int> truth);

struct ClusterReport {
  Labels assignment;
  std::optional<Metrics> metrics;  // only when labels were supplied
  std::uint64_t seed = 0;
  int restarts = 0;
};

// {"nmi", "ari", "acc", "f1", "seed", "restarts", "assignment_file"}; the
// metric keys are null when no labels were supplied.
nlohmann::json report_to_json(const ClusterReport& report, const std::string& assignment_file);

}  // namespace smhgc
