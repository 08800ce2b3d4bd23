#include "smhgc/numcore/adam.hpp"

#include <cmath>
#include <string>

namespace smhgc {

void AdamState::apply(std::span<DenseMatrix* const> params,
                      std::span<const DenseMatrix* const> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam: " + std::to_string(params.size()) + " params but " +
                         std::to_string(grads.size()) + " grads");
  }
  if (step_ > 0 && m_.size() != params.size()) {
    throw DimensionError("adam: parameter count changed between steps");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const DenseMatrix& p = *params[i];
    const DenseMatrix& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw DimensionError("adam: param " + std::to_string(i) + " is " + shape_string(p) +
                           " but grad is " + shape_string(g));
    }
    if (step_ > 0 && (m_[i].rows() != p.rows() || m_[i].cols() != p.cols())) {
      throw DimensionError("adam: param " + std::to_string(i) + " changed shape");
    }
  }
  if (step_ == 0) {
    m_.clear();
    v_.clear();
    for (DenseMatrix* p : params) {
      m_.push_back(DenseMatrix::Zero(p->rows(), p->cols()));
      v_.push_back(DenseMatrix::Zero(p->rows(), p->cols()));
    }
  }

  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const DenseMatrix& g = *grads[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    params[i]->array() -= config_.learning_rate * (m_[i].array() / c1) /
                          ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

std::vector<DenseMatrix> adam_step(AdamState& state, std::span<const DenseMatrix> params,
                                   std::span<const DenseMatrix> grads) {
  std::vector<DenseMatrix> out(params.begin(), params.end());
  std::vector<DenseMatrix*> ptrs;
  std::vector<const DenseMatrix*> gptrs;
  for (auto& p : out) ptrs.push_back(&p);
  for (const auto& g : grads) gptrs.push_back(&g);
  state.apply(ptrs, gptrs);
  return out;
}

}  // namespace smhgc
