#include "smhgc/cluster_eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace smhgc {

namespace {

void require_equal_lengths(const char* what, std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw ContractError(std::string(what) + ": length mismatch (" + std::to_string(pred.size()) +
                        " predictions vs " + std::to_string(truth.size()) + " labels)");
  }
  if (pred.empty()) throw ContractError(std::string(what) + ": empty input");
}

std::vector<int> compact(std::span<const int> ids, int& count) {
  std::map<int, int> index;
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) {
    const auto [it, inserted] = index.emplace(id, static_cast<int>(index.size()));
    out.push_back(it->second);
  }
  count = static_cast<int>(index.size());
  return out;
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

double entropy(const Eigen::Matrix<long long, Eigen::Dynamic, 1>& counts, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0) {
      const double p = static_cast<double>(counts(i)) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

Matrix<long long> contingency(std::span<const int> pred, std::span<const int> truth) {
  require_equal_lengths("contingency", pred, truth);
  int rows = 0;
  int cols = 0;
  const std::vector<int> p = compact(pred, rows);
  const std::vector<int> t = compact(truth, cols);
  Matrix<long long> table = Matrix<long long>::Zero(rows, cols);
  for (std::size_t i = 0; i < p.size(); ++i) ++table(p[i], t[i]);
  return table;
}

std::vector<int> hungarian_min_cost(const DenseMatrix& cost) {
  const auto n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionError("hungarian: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials u (rows), v (cols); way/p track the augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  const Matrix<long long> table = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  const Eigen::Matrix<long long, Eigen::Dynamic, 1> rows = table.rowwise().sum();
  const Eigen::Matrix<long long, Eigen::Dynamic, 1> cols = table.colwise().sum().transpose();
  const double hp = entropy(rows, n);
  const double ht = entropy(cols, n);
  if (hp == 0.0 && ht == 0.0) return 1.0;  // both single-cluster: identical
  if (hp == 0.0 || ht == 0.0) return 0.0;
  double mi = 0.0;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      const double nij = static_cast<double>(table(i, j));
      if (nij == 0.0) continue;
      mi += nij / n *
            std::log(n * nij / (static_cast<double>(rows(i)) * static_cast<double>(cols(j))));
    }
  }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
  const Matrix<long long> table = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  double index = 0.0;
  for (Eigen::Index i = 0; i < table.size(); ++i) index += choose2(static_cast<double>(table.data()[i]));
  double a = 0.0;
  double b = 0.0;
  for (Eigen::Index i = 0; i < table.rows(); ++i) a += choose2(static_cast<double>(table.row(i).sum()));
  for (Eigen::Index j = 0; j < table.cols(); ++j) b += choose2(static_cast<double>(table.col(j).sum()));
  const double total = choose2(n);
  const double expected = total > 0.0 ? a * b / total : 0.0;
  const double max_index = 0.5 * (a + b);
  // A zero denominator only happens when both partitions coincide.
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

AccF1 acc_f1(std::span<const int> pred, std::span<const int> truth) {
  const Matrix<long long> table = contingency(pred, truth);
  const Eigen::Index r = table.rows();
  const Eigen::Index c = table.cols();
  const Eigen::Index size = std::max(r, c);
  DenseMatrix cost = DenseMatrix::Zero(size, size);
  cost.topLeftCorner(r, c) = -table.cast<double>();
  const std::vector<int> match = hungarian_min_cost(cost);

  double matched = 0.0;
  std::vector<int> cluster_of_class(c, -1);
  for (Eigen::Index i = 0; i < r; ++i) {
    const int j = match[i];
    if (j < c) {
      matched += static_cast<double>(table(i, j));
      cluster_of_class[j] = static_cast<int>(i);
    }
  }
  double f1_sum = 0.0;
  for (Eigen::Index j = 0; j < c; ++j) {
    const int i = cluster_of_class[j];
    if (i < 0) continue;
    const double tp = static_cast<double>(table(i, j));
    if (tp == 0.0) continue;
    const double precision = tp / static_cast<double>(table.row(i).sum());
    const double recall = tp / static_cast<double>(table.col(j).sum());
    f1_sum += 2.0 * precision * recall / (precision + recall);
  }
  return AccF1{matched / static_cast<double>(pred.size()), f1_sum / static_cast<double>(c)};
}

Metrics evaluate(std::span<const int> pred, std::span<const int> truth) {
  const AccF1 af = acc_f1(pred, truth);
  return Metrics{nmi(pred, truth), ari(pred, truth), af.acc, af.f1};
}

nlohmann::json report_to_json(const ClusterReport& report, const std::string& assignment_file) {
  nlohmann::json j;
  if (report.metrics) {
    j["nmi"] = report.metrics->nmi;
    j["ari"] = report.metrics->ari;
    j["acc"] = report.metrics->acc;
    j["f1"] = report.metrics->f1;
  } else {
    j["nmi"] = nullptr;
    j["ari"] = nullptr;
    j["acc"] = nullptr;
    j["f1"] = nullptr;
  }
  j["seed"] = report.seed;
  j["restarts"] = report.restarts;
  j["assignment_file"] = assignment_file;
  return j;
}

}  // namespace smhgc
