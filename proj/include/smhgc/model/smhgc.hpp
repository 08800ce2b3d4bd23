#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "smhgc/cluster_eval/kmeans.hpp"
#include "smhgc/graphdata/dataset.hpp"
#include "smhgc/model/fusion.hpp"
#include "smhgc/numcore/adam.hpp"
#include "smhgc/numcore/rng.hpp"
#include "smhgc/numcore/tape.hpp"

namespace smhgc {

// Two-layer perceptron: relu(x W1 + b1) W2 + b2.
struct Mlp {
  DenseMatrix w1, b1, w2, b2;

  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index output_dim() const { return w2.cols(); }
};

// Glorot-uniform weights, zero biases.
Mlp make_mlp(Eigen::Index input, Eigen::Index hidden, Eigen::Index output, Rng& rng);

// The MLP's parameters bound as leaves of one tape.
struct MlpVars {
  ad::Var w1, b1, w2, b2;
};

MlpVars bind_mlp(ad::Tape& tape, const Mlp& mlp, const std::string& prefix);
ad::Var forward(const MlpVars& mlp, ad::Var x);

struct ViewEncoders {
  Mlp f_a;  // adjacency rows -> Z_a
  Mlp f_x;  // features -> Z_x
  Mlp phi;  // features -> Z_f
  Mlp xi;   // Z_f -> reconstructed features (logits)
};

struct SmhgcConfig {
  int embed_dim = 64;  // d_z = d_f
  int hidden_dim = 256;
  int epochs = 400;
  int k = 0;  // top-k; 0 picks round(0.1 N)
  int order = 4;
  double rho = 2.0;
  double gamma_sim = 1.0;
  double gamma_r = 1.0;
  double lr = 1e-3;
  double warmup_fraction = 0.2;
  std::uint64_t seed = 0;
  KMeansConfig kmeans;
  // Compare each view's assignment against its own centroids instead of
  // the global ones.
  bool per_view_centroids = false;

  // Ablation switches.
  bool use_sim_loss = true;
  bool use_recon_loss = true;
  bool use_kl_loss = true;
  bool use_ax = true;
  bool use_aa = true;
  bool uniform_fusion_weights = false;

  // Throws ContractError on out-of-range values.
  void validate() const;
  int resolved_k(Eigen::Index num_nodes) const;
  int warmup_epoch() const;
};

nlohmann::json to_json(const SmhgcConfig& config);
// Keys missing from `j` keep their defaults; unknown keys are rejected.
SmhgcConfig config_from_json(const nlohmann::json& j);

struct SmhgcModel {
  SmhgcConfig config;
  std::vector<ViewEncoders> encoders;
  DenseMatrix centroids;                   // global K x d_f
  std::vector<DenseMatrix> view_centroids; // per view, used when enabled
  bool centroids_ready = false;
  int num_clusters = 0;
  int epoch = 0;
};

SmhgcModel make_model(const MultiViewDataset& dataset, const SmhgcConfig& config);

// Constant per-view inputs derived once from the data.
struct ViewInputs {
  DenseMatrix adjacency_rows;  // A~ = D^-1 A, input of f_a
  DenseMatrix features;        // X^, input of f_x and phi
  DenseMatrix neighbor_gram;   // target of Z_a Z_a^T
  DenseMatrix feature_gram;    // target of Z_x Z_x^T
  DenseMatrix recon_target;    // X^ min-max scaled per column to [0, 1]
};

ViewInputs prepare_view(const GraphView& view);

// Per-column min-max scaling; a constant column becomes 0.5 (logged).
DenseMatrix minmax_columns(const DenseMatrix& x);

// mean((Z_a Z_a^T - A~A~^T)^2) + mean((Z_x Z_x^T - X^X^^T)^2).
ad::Var similarity_loss(ad::Var z_a, ad::Var z_x, const DenseMatrix& neighbor_gram,
                        const DenseMatrix& feature_gram);
// Sigmoid cross-entropy of decoder logits against the scaled features.
ad::Var reconstruction_loss(ad::Var logits, const DenseMatrix& target);
// KL(P || Q) + sum_v KL(P || Q_v); P is a constant.
ad::Var kl_loss(const DenseMatrix& p, ad::Var q, const std::vector<ad::Var>& view_q);

struct FusionState {
  std::vector<double> omega_x, omega_a, omega_h;
  std::vector<DenseMatrix> graphs;  // binary S^v
  DenseMatrix consensus;
};

struct EpochRecord {
  int epoch = 0;
  double l_sim = 0.0;
  double l_r = 0.0;
  double l_kl = 0.0;
  double total = 0.0;
  std::vector<double> omega_x, omega_a, omega_h;
};

struct TrainResult {
  DenseMatrix consensus;  // final H-bar
  FusionState fusion;     // state of the last epoch
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Full-batch training. Throws NumericError naming the first non-finite
// tensor when a loss or gradient stops being finite.
TrainResult train(const MultiViewDataset& dataset, SmhgcModel& model,
                  const EpochCallback& on_epoch = {});

// Single-file container: magic, JSON header (config, shapes, seed, epoch),
// then little-endian float64 blocks in header order.
void save_checkpoint(const SmhgcModel& model, const DenseMatrix& consensus,
                     const std::filesystem::path& path);

struct Checkpoint {
  nlohmann::json header;
  std::vector<std::string> names;
  std::vector<DenseMatrix> blocks;

  const DenseMatrix& block(const std::string& name) const;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace smhgc
