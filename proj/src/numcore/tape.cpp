#include "smhgc/numcore/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

namespace smhgc::ad {

namespace {

constexpr double kKlFloor = 1e-12;

DenseMatrix scalar_matrix(double v) {
  DenseMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 ||
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void require_same_shape(const char* op, Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shapes " + shape_string(a.value()) + " and " +
                         shape_string(b.value()));
  }
}

}  // namespace

const DenseMatrix& Var::value() const { return tape->value(*this); }
const DenseMatrix& Var::grad() const { return tape->grad(*this); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::parameter(DenseMatrix value, std::string name) {
  Node n;
  n.op = "parameter";
  n.name = std::move(name);
  n.value = std::move(value);
  n.requires_grad = true;
  n.trainable = true;
  return push(std::move(n));
}

Var Tape::constant(DenseMatrix value, std::string name) {
  Node n;
  n.op = "constant";
  n.name = std::move(name);
  n.value = std::move(value);
  return push(std::move(n));
}

Inputs Tape::gather(const Node& node) const {
  Inputs in;
  in.reserve(node.inputs.size());
  for (std::size_t id : node.inputs) in.push_back(&nodes_[id].value);
  return in;
}

Var Tape::record(std::string op, std::vector<Var> inputs, ForwardFn forward, BackwardFn backward) {
  Node n;
  n.op = std::move(op);
  for (const Var& v : inputs) {
    if (v.tape != this) throw ContractError(n.op + ": input belongs to a different tape");
    n.inputs.push_back(v.id);
    n.requires_grad = n.requires_grad || nodes_[v.id].requires_grad;
  }
  n.value = forward(gather(n));
  n.forward = std::move(forward);
  n.backward = std::move(backward);
  return push(std::move(n));
}

const DenseMatrix& Tape::value(Var v) const { return nodes_.at(v.id).value; }
const DenseMatrix& Tape::grad(Var v) const { return nodes_.at(v.id).grad; }
bool Tape::requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
const std::string& Tape::name(Var v) const { return nodes_.at(v.id).name; }

void Tape::backward(Var loss) {
  const Node& root = nodes_.at(loss.id);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw ContractError("backward: loss must be scalar, got " + shape_string(root.value));
  }
  for (Node& n : nodes_) {
    if (n.requires_grad) {
      n.grad = DenseMatrix::Zero(n.value.rows(), n.value.cols());
    } else {
      n.grad.resize(0, 0);
    }
  }
  if (!root.requires_grad) return;
  nodes_[loss.id].grad(0, 0) = 1.0;

  for (std::size_t k = loss.id + 1; k-- > 0;) {
    Node& n = nodes_[k];
    if (!n.requires_grad || !n.backward) continue;
    std::vector<DenseMatrix*> input_grads;
    input_grads.reserve(n.inputs.size());
    for (std::size_t id : n.inputs) {
      input_grads.push_back(nodes_[id].requires_grad ? &nodes_[id].grad : nullptr);
    }
    n.backward(n.grad, n.value, gather(n), input_grads);
  }
}

bool Tape::replay_matches() const {
  std::vector<DenseMatrix> replayed(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& n = nodes_[k];
    if (!n.forward) {
      replayed[k] = n.value;
      continue;
    }
    Inputs in;
    for (std::size_t id : n.inputs) in.push_back(&replayed[id]);
    replayed[k] = n.forward(in);
    if (!bit_equal(replayed[k], n.value)) return false;
  }
  return true;
}

std::optional<std::string> Tape::first_non_finite() const {
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!nodes_[k].value.allFinite()) {
      const Node& n = nodes_[k];
      return "node " + std::to_string(k) + " (" + n.op + (n.name.empty() ? "" : ", " + n.name) +
             ", " + shape_string(n.value) + ")";
    }
  }
  return std::nullopt;
}

double scalar(Var v) {
  const DenseMatrix& m = v.value();
  if (m.rows() != 1 || m.cols() != 1) {
    throw ContractError("scalar: expected 1x1, got " + shape_string(m));
  }
  return m(0, 0);
}

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a.value()) + " by " +
                         shape_string(b.value()));
  }
  return a.tape->record(
      "matmul", {a, b},
      [](const Inputs& in) -> DenseMatrix { return (*in[0]) * (*in[1]); },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) gi[0]->noalias() += g * in[1]->transpose();
        if (gi[1]) gi[1]->noalias() += in[0]->transpose() * g;
      });
}

Var transpose(Var a) {
  return a.tape->record(
      "transpose", {a},
      [](const Inputs& in) -> DenseMatrix { return in[0]->transpose(); },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs&,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += g.transpose();
      });
}

Var add(Var a, Var b) {
  require_same_shape("add", a, b);
  return a.tape->record(
      "add", {a, b},
      [](const Inputs& in) -> DenseMatrix { return *in[0] + *in[1]; },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs&,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += g;
        if (gi[1]) *gi[1] += g;
      });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a, b);
  return a.tape->record(
      "sub", {a, b},
      [](const Inputs& in) -> DenseMatrix { return *in[0] - *in[1]; },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs&,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += g;
        if (gi[1]) *gi[1] -= g;
      });
}

Var scale(Var a, double factor) {
  return a.tape->record(
      "scale", {a},
      [factor](const Inputs& in) -> DenseMatrix { return *in[0] * factor; },
      [factor](const DenseMatrix& g, const DenseMatrix&, const Inputs&,
               const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += g * factor;
      });
}

Var add_row(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw DimensionError("add_row: row " + shape_string(row.value()) + " does not fit " +
                         shape_string(a.value()));
  }
  return a.tape->record(
      "add_row", {a, row},
      [](const Inputs& in) -> DenseMatrix {
        DenseMatrix out = *in[0];
        out.rowwise() += in[1]->row(0);
        return out;
      },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs&,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += g;
        if (gi[1]) *gi[1] += g.colwise().sum();
      });
}

Var relu(Var a) {
  return a.tape->record(
      "relu", {a},
      [](const Inputs& in) -> DenseMatrix { return in[0]->cwiseMax(0.0); },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += (in[0]->array() > 0.0).select(g, 0.0).matrix();
      });
}

Var sigmoid(Var a) {
  return a.tape->record(
      "sigmoid", {a},
      [](const Inputs& in) -> DenseMatrix {
        return in[0]->unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
      },
      [](const DenseMatrix& g, const DenseMatrix& out, const Inputs&,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += (g.array() * out.array() * (1.0 - out.array())).matrix();
      });
}

Var row_normalize(Var a) {
  if ((a.value().array() < 0.0).any()) {
    throw ContractError("row_normalize: matrix has negative entries");
  }
  return a.tape->record(
      "row_normalize", {a},
      [](const Inputs& in) -> DenseMatrix { return smhgc::row_normalize(*in[0]); },
      [](const DenseMatrix& g, const DenseMatrix& out, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        if (!gi[0]) return;
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
          const double s = in[0]->row(i).sum();
          if (s <= 0.0) continue;
          const double inner = g.row(i).dot(out.row(i));
          gi[0]->row(i).array() += (g.row(i).array() - inner) / s;
        }
      });
}

Var sum(Var a) {
  return a.tape->record(
      "sum", {a},
      [](const Inputs& in) -> DenseMatrix { return scalar_matrix(in[0]->sum()); },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs&,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) gi[0]->array() += g(0, 0);
      });
}

Var squared_norm(Var a) {
  return a.tape->record(
      "squared_norm", {a},
      [](const Inputs& in) -> DenseMatrix { return scalar_matrix(in[0]->squaredNorm()); },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        if (gi[0]) *gi[0] += 2.0 * g(0, 0) * (*in[0]);
      });
}

Var mean_squared_error(Var a, Var b) {
  require_same_shape("mean_squared_error", a, b);
  return a.tape->record(
      "mse", {a, b},
      [](const Inputs& in) -> DenseMatrix {
        return scalar_matrix((*in[0] - *in[1]).squaredNorm() / static_cast<double>(in[0]->size()));
      },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        const double c = 2.0 * g(0, 0) / static_cast<double>(in[0]->size());
        if (gi[0]) *gi[0] += c * (*in[0] - *in[1]);
        if (gi[1]) *gi[1] -= c * (*in[0] - *in[1]);
      });
}

Var mse_gram(Var z, Var target) {
  if (target.rows() != z.rows() || target.cols() != z.rows()) {
    throw DimensionError("mse_gram: target " + shape_string(target.value()) + " does not match " +
                         shape_string(z.value()) + " embedding");
  }
  return z.tape->record(
      "mse_gram", {z, target},
      [](const Inputs& in) -> DenseMatrix {
        const DenseMatrix& zz = *in[0];
        DenseMatrix residual = zz * zz.transpose() - *in[1];
        return scalar_matrix(residual.squaredNorm() / static_cast<double>(residual.size()));
      },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        const DenseMatrix& zz = *in[0];
        DenseMatrix residual = zz * zz.transpose() - *in[1];
        const double c = 2.0 * g(0, 0) / static_cast<double>(residual.size());
        if (gi[0]) {
          DenseMatrix sym = residual + residual.transpose();
          gi[0]->noalias() += c * (sym * zz);
        }
        if (gi[1]) *gi[1] -= c * residual;
      });
}

Var sigmoid_cross_entropy(Var logits, Var target) {
  require_same_shape("sigmoid_cross_entropy", logits, target);
  return logits.tape->record(
      "sigmoid_cross_entropy", {logits, target},
      [](const Inputs& in) -> DenseMatrix {
        const auto x = in[0]->array();
        const auto t = in[1]->array();
        // Stable form of -(t ln s(x) + (1 - t) ln(1 - s(x))).
        const double total =
            (x.max(0.0) - x * t + (1.0 + (-x.abs()).exp()).log()).sum();
        return scalar_matrix(total / static_cast<double>(in[0]->size()));
      },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        const double c = g(0, 0) / static_cast<double>(in[0]->size());
        if (gi[0]) {
          const auto s = in[0]->unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
          *gi[0] += c * (s - *in[1]);
        }
        if (gi[1]) *gi[1] -= c * (*in[0]);
      });
}

Var kl_divergence(Var p, Var q) {
  require_same_shape("kl_divergence", p, q);
  return p.tape->record(
      "kl_divergence", {p, q},
      [](const Inputs& in) -> DenseMatrix {
        const DenseMatrix& pp = *in[0];
        const DenseMatrix& qq = *in[1];
        double total = 0.0;
        for (Eigen::Index i = 0; i < pp.rows(); ++i) {
          for (Eigen::Index j = 0; j < pp.cols(); ++j) {
            const double pij = pp(i, j);
            if (pij <= 0.0) continue;
            total += pij * (std::log(pij) - std::log(std::max(qq(i, j), kKlFloor)));
          }
        }
        return scalar_matrix(total / static_cast<double>(pp.rows()));
      },
      [](const DenseMatrix& g, const DenseMatrix&, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        // The target p is held constant: no gradient flows into it.
        if (!gi[1]) return;
        const DenseMatrix& pp = *in[0];
        const DenseMatrix& qq = *in[1];
        const double c = g(0, 0) / static_cast<double>(pp.rows());
        for (Eigen::Index i = 0; i < pp.rows(); ++i) {
          for (Eigen::Index j = 0; j < pp.cols(); ++j) {
            if (pp(i, j) > 0.0 && qq(i, j) > kKlFloor) (*gi[1])(i, j) -= c * pp(i, j) / qq(i, j);
          }
        }
      });
}

Var student_t_assign(Var h, Var centroids) {
  if (h.cols() != centroids.cols()) {
    throw DimensionError("student_t_assign: embedding " + shape_string(h.value()) +
                         " vs centroids " + shape_string(centroids.value()));
  }
  return h.tape->record(
      "student_t_assign", {h, centroids},
      [](const Inputs& in) -> DenseMatrix {
        const DenseMatrix& hh = *in[0];
        const DenseMatrix& mu = *in[1];
        DenseMatrix q(hh.rows(), mu.rows());
        for (Eigen::Index i = 0; i < hh.rows(); ++i) {
          for (Eigen::Index j = 0; j < mu.rows(); ++j) {
            q(i, j) = 1.0 / (1.0 + (hh.row(i) - mu.row(j)).squaredNorm());
          }
          q.row(i) /= q.row(i).sum();
        }
        return q;
      },
      [](const DenseMatrix& g, const DenseMatrix& q, const Inputs& in,
         const std::vector<DenseMatrix*>& gi) {
        const DenseMatrix& hh = *in[0];
        const DenseMatrix& mu = *in[1];
        for (Eigen::Index i = 0; i < hh.rows(); ++i) {
          double row_sum = 0.0;
          DenseVector w(mu.rows());
          for (Eigen::Index j = 0; j < mu.rows(); ++j) {
            w(j) = 1.0 / (1.0 + (hh.row(i) - mu.row(j)).squaredNorm());
            row_sum += w(j);
          }
          const double inner = g.row(i).dot(q.row(i));
          for (Eigen::Index j = 0; j < mu.rows(); ++j) {
            // dL/dd_ij where d_ij is the squared distance.
            const double dd = -(g(i, j) - inner) / row_sum * w(j) * w(j);
            const auto diff = (hh.row(i) - mu.row(j)) * (2.0 * dd);
            if (gi[0]) gi[0]->row(i) += diff;
            if (gi[1]) gi[1]->row(j) -= diff;
          }
        }
      });
}

}  // namespace smhgc::ad
