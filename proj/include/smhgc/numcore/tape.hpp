#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smhgc/numcore/matrix.hpp"

namespace smhgc::ad {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives and
// has not been cleared.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const DenseMatrix& value() const;
  const DenseMatrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

using Inputs = std::vector<const DenseMatrix*>;
using ForwardFn = std::function<DenseMatrix(const Inputs&)>;
// Accumulates into the non-null entries of `input_grads`; an entry is null
// when that input does not need a gradient.
using BackwardFn = std::function<void(const DenseMatrix& out_grad, const DenseMatrix& out,
                                      const Inputs& in, const std::vector<DenseMatrix*>& input_grads)>;

// Reverse-mode record of dense-matrix primitives. Single writer: one
// training step owns the tape, records a forward pass, and calls backward().
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Trainable leaf; always receives a gradient (zeros when disconnected).
  Var parameter(DenseMatrix value, std::string name = {});
  // Non-trainable leaf; never receives a gradient.
  Var constant(DenseMatrix value, std::string name = {});

  Var record(std::string op, std::vector<Var> inputs, ForwardFn forward, BackwardFn backward);

  const DenseMatrix& value(Var v) const;
  // Gradient after backward(); empty (0x0) when the node has none.
  const DenseMatrix& grad(Var v) const;
  bool requires_grad(Var v) const;
  const std::string& name(Var v) const;

  // Throws ContractError unless `loss` is 1x1.
  void backward(Var loss);

  // Recomputes every recorded node from its inputs and reports whether all
  // values are bit-identical to the recorded ones.
  bool replay_matches() const;

  // Name and op of the earliest node holding a NaN/Inf, if any.
  std::optional<std::string> first_non_finite() const;

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    std::string op;
    std::string name;
    std::vector<std::size_t> inputs;
    DenseMatrix value;
    DenseMatrix grad;
    bool requires_grad = false;
    bool trainable = false;
    ForwardFn forward;
    BackwardFn backward;
  };

  Var push(Node node);
  Inputs gather(const Node& node) const;

  std::vector<Node> nodes_;
};

double scalar(Var v);

// Primitives. Every op records onto the tape of its first argument.
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double factor);
// Adds a 1xC row to every row of a (bias).
Var add_row(Var a, Var row);
Var relu(Var a);
Var sigmoid(Var a);
Var row_normalize(Var a);
Var sum(Var a);
Var squared_norm(Var a);
// mean((a - b)^2) over all entries.
Var mean_squared_error(Var a, Var b);
// mean over N^2 entries of (Z Z^T - target)^2.
Var mse_gram(Var z, Var target);
// Mean elementwise binary cross-entropy between sigmoid(logits) and target.
Var sigmoid_cross_entropy(Var logits, Var target);
// sum_ij p_ij ln(p_ij / q_ij) / N. p is a constant target; q is clamped at
// 1e-12 before the log.
Var kl_divergence(Var p, Var q);
// Student-t (one degree of freedom) soft assignment of rows of h to the
// rows of centroids.
Var student_t_assign(Var h, Var centroids);

}  // namespace smhgc::ad
