#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "smhgc/graphdata/synth.hpp"
#include "smhgc/model/fusion.hpp"
#include "smhgc/model/smhgc.hpp"

namespace smhgc {
namespace {

namespace fs = std::filesystem;

TEST(Topk, TiesGoToLowerIndex) {
  DenseMatrix s(4, 4);
  s << 1, 2, 2, 0,
       5, 5, 5, 5,
       0, 0, 0, 1,
       3, 1, 2, 3;
  const DenseMatrix m = topk_mask(s, 2);
  EXPECT_EQ(m.row(0), (DenseMatrix(1, 4) << 0, 1, 1, 0).finished());
  EXPECT_EQ(m.row(1), (DenseMatrix(1, 4) << 1, 1, 0, 0).finished());
  EXPECT_EQ(m.row(2), (DenseMatrix(1, 4) << 1, 0, 0, 1).finished());
  EXPECT_EQ(m.row(3), (DenseMatrix(1, 4) << 1, 0, 0, 1).finished());
  EXPECT_THROW(topk_mask(DenseMatrix::Ones(3, 3), 0), ContractError);
  EXPECT_THROW(topk_mask(DenseMatrix::Ones(3, 3), 4), ContractError);
  EXPECT_THROW(topk_mask(DenseMatrix::Ones(3, 2), 1), DimensionError);
}

TEST(Topk, DiscretizeIsSymmetricBinaryWithLoops) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.uniform_int(10));
    const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const DenseMatrix s = oracle::random_matrix(n, n, rng);
    const DenseMatrix g = discretize_topk(s, k);
    EXPECT_EQ(g, g.transpose());
    EXPECT_EQ(g.diagonal(), DenseVector::Ones(n));
    EXPECT_TRUE(((g.array() == 0) || (g.array() == 1)).all());
    const DenseMatrix mask = topk_mask(s, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      EXPECT_EQ(mask.row(i).sum(), k);
      EXPECT_GE(g.row(i).sum(), std::min<double>(k, n));
    }
  }
}

TEST(Aggregate, MatchesExplicitPowersAndTape) {
  Rng rng(2);
  for (int order = 0; order <= 4; ++order) {
    const DenseMatrix g = oracle::random_graph(7, 0.4, rng);
    const DenseMatrix z = oracle::random_matrix(7, 3, rng);
    const DenseMatrix expected = oracle::aggregate_by_powers(g, z, order);
    EXPECT_TRUE(aggregate(g, z, order).isApprox(expected, 1e-12));
    ad::Tape tape;
    EXPECT_TRUE(aggregate(tape.constant(z), row_normalize(g), order).value().isApprox(expected, 1e-12));
  }
  EXPECT_THROW(aggregate(DenseMatrix::Ones(3, 3), DenseMatrix::Ones(2, 1), 1), DimensionError);
}

TEST(BalancedSum, IdentityAndZeroWeight) {
  Rng rng(1);
  const DenseMatrix a = oracle::random_matrix(4, 4, rng);
  const DenseMatrix b = 0.01 * oracle::random_matrix(4, 4, rng);
  EXPECT_TRUE(balanced_sum(0.3, a, 0.7, a).isApprox(a, 1e-14));
  EXPECT_TRUE(balanced_sum(0.0, a, 1.0, b).isApprox(b, 1e-14));
  EXPECT_TRUE(balanced_sum(1.0, a, 0.0, b).isApprox(a, 1e-14));
  // Each part is rescaled to the common norm before weighting.
  const double t = 0.25 * a.norm() + 0.75 * b.norm();
  const DenseMatrix expected = t * (0.25 * a / a.norm() + 0.75 * b / b.norm());
  EXPECT_TRUE(balanced_sum(0.25, a, 0.75, b).isApprox(expected, 1e-12));
}

TEST(IntraView, WeightsAreConvexAndFollowAgreement) {
  Rng rng(3);
  const DenseMatrix h = oracle::random_matrix(8, 3, rng);
  const DenseMatrix hh = h * h.transpose();
  const DenseMatrix noise = oracle::random_matrix(8, 8, rng);
  const IntraViewFusion f = intra_view_fuse(hh, noise + noise.transpose(), h);
  EXPECT_NEAR(f.omega_x + f.omega_a, 1.0, 1e-12);
  EXPECT_GE(f.omega_x, 0.0);
  EXPECT_GT(f.omega_x, f.omega_a);
  EXPECT_NEAR(global_similarity_agreement(hh, h), 1.0, 1e-12);

  // Both clamp to zero: fallback to equal weights.
  const IntraViewFusion g = intra_view_fuse(-hh, -hh, h);
  EXPECT_DOUBLE_EQ(g.omega_x, 0.5);
  EXPECT_DOUBLE_EQ(g.omega_a, 0.5);
}

TEST(InterView, BestViewGetsWeightOne) {
  Rng rng(5);
  const DenseMatrix prev = oracle::random_matrix(6, 3, rng);
  const std::vector<DenseMatrix> views{prev, oracle::random_matrix(6, 3, rng), -prev};
  std::vector<double> scores;
  const auto w = inter_view_weights(views, prev, 2.0, &scores);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_LE(w[1], 1.0);
  EXPECT_DOUBLE_EQ(scores[2], kMinViewScore);
  EXPECT_NEAR(w[2], std::pow(kMinViewScore, 2.0), 1e-30);
  const InterViewFusion f = inter_view_fuse(views, prev, 2.0);
  DenseMatrix expected = DenseMatrix::Zero(6, 3);
  for (std::size_t v = 0; v < 3; ++v) expected += f.weights[v] * views[v];
  EXPECT_TRUE(f.consensus.isApprox(expected));
  EXPECT_THROW(inter_view_weights({}, prev, 2.0), ContractError);
  EXPECT_THROW(inter_view_weights(views, prev, 0.0), ContractError);
}

TEST(SoftAssign, RowStochasticAndDecTarget) {
  Rng rng(6);
  const DenseMatrix h = oracle::random_matrix(10, 3, rng);
  const DenseMatrix mu = oracle::random_matrix(4, 3, rng);
  const DenseMatrix q = soft_assign(h, mu);
  const DenseMatrix p = target_distribution(q);
  for (Eigen::Index i = 0; i < 10; ++i) {
    EXPECT_NEAR(q.row(i).sum(), 1.0, 1e-12);
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
  }
  const DenseVector f = q.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double unnormalized = q(3, j) * q(3, j) / f(j);
    double row = 0.0;
    for (Eigen::Index c = 0; c < 4; ++c) row += q(3, c) * q(3, c) / f(c);
    EXPECT_NEAR(p(3, j), unnormalized / row, 1e-12);
  }
  ad::Tape tape;
  EXPECT_TRUE(ad::student_t_assign(tape.constant(h), tape.constant(mu)).value().isApprox(q));
}

TEST(TargetDistribution, EmptyColumnIgnored) {
  DenseMatrix q(2, 3);
  q << 0.5, 0.5, 0.0,
       0.2, 0.8, 0.0;
  const DenseMatrix p = target_distribution(q);
  EXPECT_EQ(p.col(2), DenseVector::Zero(2));
  EXPECT_NEAR(p.row(0).sum(), 1.0, 1e-12);
}

MultiViewDataset tiny_dataset(std::uint64_t seed = 1) {
  PlantedSpec spec;
  spec.num_nodes = 36;
  spec.num_clusters = 3;
  spec.block_width = 3;
  spec.avg_degree = 6;
  spec.hr = 0.4;
  spec.seed = seed;
  return planted_dataset(spec);
}

SmhgcConfig tiny_config() {
  SmhgcConfig c;
  c.embed_dim = 6;
  c.hidden_dim = 12;
  c.epochs = 8;
  c.order = 2;
  c.lr = 1e-2;
  c.seed = 3;
  c.kmeans.restarts = 3;
  return c;
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  SmhgcConfig c = tiny_config();
  c.use_ax = false;
  c.gamma_r = 0.25;
  const SmhgcConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_THROW(config_from_json({{"gamma", 1.0}}), ContractError);
  EXPECT_EQ(config_from_json(nlohmann::json::object()).epochs, SmhgcConfig{}.epochs);
}

TEST(Config, ValidationAndDerivedValues) {
  SmhgcConfig c;
  EXPECT_EQ(c.resolved_k(300), 30);
  EXPECT_EQ(c.warmup_epoch(), 80);
  c.k = 400;
  EXPECT_THROW(c.resolved_k(300), ContractError);
  c = SmhgcConfig{};
  c.use_ax = c.use_aa = false;
  EXPECT_THROW(c.validate(), ContractError);
  c = SmhgcConfig{};
  c.rho = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(Model, MinmaxColumns) {
  DenseMatrix x(3, 2);
  x << 1, 7, 3, 7, 2, 7;
  const DenseMatrix m = minmax_columns(x);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(m(2, 0), 0.5);
  EXPECT_EQ(m.col(1), DenseVector::Constant(3, 0.5));
}

TEST(Model, ShapesFollowDataset) {
  const MultiViewDataset ds = tiny_dataset();
  const SmhgcModel m = make_model(ds, tiny_config());
  ASSERT_EQ(m.encoders.size(), 2u);
  EXPECT_EQ(m.encoders[0].f_a.input_dim(), 36);
  EXPECT_EQ(m.encoders[0].f_x.input_dim(), ds.views[0].feature_dim());
  EXPECT_EQ(m.encoders[0].xi.output_dim(), ds.views[0].feature_dim());
  EXPECT_EQ(m.encoders[0].phi.output_dim(), 6);
}

TEST(Train, DeterministicAndFinite) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcModel a = make_model(ds, tiny_config());
  SmhgcModel b = make_model(ds, tiny_config());
  const TrainResult ra = train(ds, a);
  const TrainResult rb = train(ds, b);
  EXPECT_EQ(ra.consensus, rb.consensus);
  ASSERT_EQ(ra.history.size(), 8u);
  for (const EpochRecord& r : ra.history) {
    EXPECT_TRUE(std::isfinite(r.total));
    for (std::size_t v = 0; v < 2; ++v) {
      EXPECT_NEAR(r.omega_x[v] + r.omega_a[v], 1.0, 1e-12);
      EXPECT_LE(r.omega_h[v], 1.0);
    }
    EXPECT_DOUBLE_EQ(*std::max_element(r.omega_h.begin(), r.omega_h.end()), 1.0);
  }
  EXPECT_DOUBLE_EQ(ra.history[0].omega_x[0], 0.5);
  EXPECT_EQ(ra.history[0].l_kl, 0.0);  // before warmup
  EXPECT_GT(ra.history.back().l_kl, 0.0);
  EXPECT_TRUE(a.centroids_ready);
  EXPECT_EQ(a.epoch, 8);
}

TEST(Train, ZeroEpochsReturnsInitialMean) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcConfig c = tiny_config();
  c.epochs = 0;
  SmhgcModel m = make_model(ds, c);
  const TrainResult r = train(ds, m);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.consensus.rows(), 36);
  EXPECT_EQ(r.consensus.cols(), 6);
  EXPECT_TRUE(r.consensus.allFinite());
}

bool same_mlp(const Mlp& a, const Mlp& b) {
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
}

// The similarity encoders only learn from L_sim, the decoder only from
// L_r, and phi only from L_r and L_kl.
TEST(Train, StopGradientContract) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcConfig c = tiny_config();
  const SmhgcModel initial = make_model(ds, c);

  c.use_sim_loss = false;
  SmhgcModel no_sim = make_model(ds, c);
  train(ds, no_sim);
  for (std::size_t v = 0; v < 2; ++v) {
    EXPECT_TRUE(same_mlp(no_sim.encoders[v].f_a, initial.encoders[v].f_a));
    EXPECT_TRUE(same_mlp(no_sim.encoders[v].f_x, initial.encoders[v].f_x));
    EXPECT_FALSE(same_mlp(no_sim.encoders[v].phi, initial.encoders[v].phi));
  }

  c = tiny_config();
  c.use_recon_loss = false;
  SmhgcModel no_recon = make_model(ds, c);
  train(ds, no_recon);
  for (std::size_t v = 0; v < 2; ++v) {
    EXPECT_TRUE(same_mlp(no_recon.encoders[v].xi, initial.encoders[v].xi));
    EXPECT_FALSE(same_mlp(no_recon.encoders[v].f_a, initial.encoders[v].f_a));
  }

  c = tiny_config();
  c.use_recon_loss = false;
  c.use_kl_loss = false;
  SmhgcModel only_sim = make_model(ds, c);
  train(ds, only_sim);
  EXPECT_TRUE(same_mlp(only_sim.encoders[0].phi, initial.encoders[0].phi));
  EXPECT_FALSE(only_sim.centroids_ready);
}

TEST(Train, AblationSwitchesFixWeights) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcConfig c = tiny_config();
  c.use_ax = false;
  SmhgcModel m = make_model(ds, c);
  for (const EpochRecord& r : train(ds, m).history) EXPECT_EQ(r.omega_a[0], 1.0);
  c = tiny_config();
  c.uniform_fusion_weights = true;
  m = make_model(ds, c);
  for (const EpochRecord& r : train(ds, m).history) EXPECT_EQ(r.omega_x[1], 0.5);
}

TEST(Train, PerViewCentroids) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcConfig c = tiny_config();
  c.per_view_centroids = true;
  SmhgcModel m = make_model(ds, c);
  train(ds, m);
  ASSERT_EQ(m.view_centroids.size(), 2u);
  EXPECT_NE(m.view_centroids[0], m.view_centroids[1]);
}

TEST(Train, NonFiniteInputRaisesNumericError) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcConfig c = tiny_config();
  c.lr = 1e300;
  c.epochs = 6;
  SmhgcModel m = make_model(ds, c);
  EXPECT_THROW(train(ds, m), NumericError);
}

TEST(Checkpoint, RoundTripRestoresBlocks) {
  const MultiViewDataset ds = tiny_dataset();
  SmhgcModel m = make_model(ds, tiny_config());
  const TrainResult r = train(ds, m);
  const fs::path path = fs::temp_directory_path() / "smhgc_unit_checkpoint.bin";
  save_checkpoint(m, r.consensus, path);
  const Checkpoint ck = load_checkpoint(path);
  EXPECT_EQ(ck.block("consensus"), r.consensus);
  EXPECT_EQ(ck.block("view1.xi.w2"), m.encoders[1].xi.w2);
  EXPECT_EQ(ck.block("centroids"), m.centroids);
  EXPECT_EQ(ck.header["num_clusters"], 3);
  EXPECT_EQ(config_from_json(ck.header["config"]).epochs, 8);
  EXPECT_THROW(ck.block("nope"), LoadError);

  // Truncation and bad magic.
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 8);
  EXPECT_THROW(load_checkpoint(path), LoadError);
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTACKPT";
  }
  EXPECT_THROW(load_checkpoint(path), LoadError);
  fs::remove(path);
}

}  // namespace
}  // namespace smhgc
