#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smhgc/numcore/matrix.hpp"

namespace smhgc {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments are allocated on the first step from
// the parameter shapes and must keep matching them afterwards.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(AdamConfig config) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  std::uint64_t step() const { return step_; }
  const std::vector<DenseMatrix>& first_moment() const { return m_; }
  const std::vector<DenseMatrix>& second_moment() const { return v_; }

  // Updates params in place. Throws DimensionError on any count or shape
  // mismatch, before touching anything.
  void apply(std::span<DenseMatrix* const> params, std::span<const DenseMatrix* const> grads);

 private:
  AdamConfig config_;
  std::uint64_t step_ = 0;
  std::vector<DenseMatrix> m_;
  std::vector<DenseMatrix> v_;
};

// Value-returning form: copies params, applies one step, returns them.
std::vector<DenseMatrix> adam_step(AdamState& state, std::span<const DenseMatrix> params,
                                   std::span<const DenseMatrix> grads);

}  // namespace smhgc
