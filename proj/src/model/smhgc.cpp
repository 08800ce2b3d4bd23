#include "smhgc/model/smhgc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "smhgc/homophily_analysis/similarity.hpp"
#include "smhgc/log.hpp"

namespace smhgc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError("smhgc config: " + what);
}

}  // namespace

Mlp make_mlp(Eigen::Index input, Eigen::Index hidden, Eigen::Index output, Rng& rng) {
  auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    DenseMatrix w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = rng.uniform(-bound, bound);
    }
    return w;
  };
  Mlp mlp;
  mlp.w1 = glorot(input, hidden);
  mlp.b1 = DenseMatrix::Zero(1, hidden);
  mlp.w2 = glorot(hidden, output);
  mlp.b2 = DenseMatrix::Zero(1, output);
  return mlp;
}

MlpVars bind_mlp(ad::Tape& tape, const Mlp& mlp, const std::string& prefix) {
  return MlpVars{tape.parameter(mlp.w1, prefix + ".w1"), tape.parameter(mlp.b1, prefix + ".b1"),
                 tape.parameter(mlp.w2, prefix + ".w2"), tape.parameter(mlp.b2, prefix + ".b2")};
}

ad::Var forward(const MlpVars& mlp, ad::Var x) {
  const ad::Var hidden = ad::relu(ad::add_row(ad::matmul(x, mlp.w1), mlp.b1));
  return ad::add_row(ad::matmul(hidden, mlp.w2), mlp.b2);
}

void SmhgcConfig::validate() const {
  require(embed_dim >= 1, "embed_dim must be positive");
  require(hidden_dim >= 1, "hidden_dim must be positive");
  require(epochs >= 0, "epochs must be non-negative");
  require(k >= 0, "k must be non-negative (0 selects the default)");
  require(order >= 0, "order must be non-negative");
  require(rho > 0.0, "rho must be positive");
  require(gamma_sim >= 0.0 && gamma_r >= 0.0, "loss weights must be non-negative");
  require(lr > 0.0, "lr must be positive");
  require(warmup_fraction >= 0.0 && warmup_fraction <= 1.0, "warmup_fraction must be in [0, 1]");
  require(kmeans.restarts >= 1, "restarts must be positive");
  require(use_ax || use_aa, "at least one of the similarity branches must stay enabled");
}

int SmhgcConfig::resolved_k(Eigen::Index num_nodes) const {
  const int resolved = k > 0 ? k : default_topk(num_nodes);
  if (resolved > num_nodes) {
    throw ContractError("smhgc config: k=" + std::to_string(resolved) + " exceeds N=" +
                        std::to_string(num_nodes));
  }
  return resolved;
}

int SmhgcConfig::warmup_epoch() const {
  return static_cast<int>(std::lround(warmup_fraction * static_cast<double>(epochs)));
}

nlohmann::json to_json(const SmhgcConfig& c) {
  return nlohmann::json{{"embed_dim", c.embed_dim},
                        {"hidden_dim", c.hidden_dim},
                        {"epochs", c.epochs},
                        {"k", c.k},
                        {"order", c.order},
                        {"rho", c.rho},
                        {"gamma_sim", c.gamma_sim},
                        {"gamma_r", c.gamma_r},
                        {"lr", c.lr},
                        {"warmup_fraction", c.warmup_fraction},
                        {"seed", c.seed},
                        {"restarts", c.kmeans.restarts},
                        {"kmeans_max_iterations", c.kmeans.max_iterations},
                        {"kmeans_tolerance", c.kmeans.tolerance},
                        {"per_view_centroids", c.per_view_centroids},
                        {"use_sim_loss", c.use_sim_loss},
                        {"use_recon_loss", c.use_recon_loss},
                        {"use_kl_loss", c.use_kl_loss},
                        {"use_ax", c.use_ax},
                        {"use_aa", c.use_aa},
                        {"uniform_fusion_weights", c.uniform_fusion_weights}};
}

SmhgcConfig config_from_json(const nlohmann::json& j) {
  SmhgcConfig c;
  const nlohmann::json defaults = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ContractError("smhgc config: unknown key '" + key + "'");
  }
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("embed_dim", c.embed_dim);
  get("hidden_dim", c.hidden_dim);
  get("epochs", c.epochs);
  get("k", c.k);
  get("order", c.order);
  get("rho", c.rho);
  get("gamma_sim", c.gamma_sim);
  get("gamma_r", c.gamma_r);
  get("lr", c.lr);
  get("warmup_fraction", c.warmup_fraction);
  get("seed", c.seed);
  get("restarts", c.kmeans.restarts);
  get("kmeans_max_iterations", c.kmeans.max_iterations);
  get("kmeans_tolerance", c.kmeans.tolerance);
  get("per_view_centroids", c.per_view_centroids);
  get("use_sim_loss", c.use_sim_loss);
  get("use_recon_loss", c.use_recon_loss);
  get("use_kl_loss", c.use_kl_loss);
  get("use_ax", c.use_ax);
  get("use_aa", c.use_aa);
  get("uniform_fusion_weights", c.uniform_fusion_weights);
  return c;
}

SmhgcModel make_model(const MultiViewDataset& dataset, const SmhgcConfig& config) {
  dataset.validate();
  config.validate();
  if (dataset.num_clusters < 2) throw ContractError("smhgc: need at least 2 clusters");
  const Eigen::Index n = dataset.num_nodes();
  config.resolved_k(n);
  SmhgcModel model;
  model.config = config;
  model.num_clusters = dataset.num_clusters;
  Rng rng = Rng(config.seed).derive(0x5eed);
  for (std::size_t v = 0; v < dataset.num_views(); ++v) {
    Rng view_rng = rng.derive(v);
    const Eigen::Index d = dataset.views[v].feature_dim();
    ViewEncoders enc;
    enc.f_a = make_mlp(n, config.hidden_dim, config.embed_dim, view_rng);
    enc.f_x = make_mlp(d, config.hidden_dim, config.embed_dim, view_rng);
    enc.phi = make_mlp(d, config.hidden_dim, config.embed_dim, view_rng);
    enc.xi = make_mlp(config.embed_dim, config.hidden_dim, d, view_rng);
    model.encoders.push_back(std::move(enc));
  }
  return model;
}

DenseMatrix minmax_columns(const DenseMatrix& x) {
  DenseMatrix out(x.rows(), x.cols());
  Eigen::Index constant = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double lo = x.col(j).minCoeff();
    const double hi = x.col(j).maxCoeff();
    if (hi > lo) {
      out.col(j) = (x.col(j).array() - lo) / (hi - lo);
    } else {
      out.col(j).setConstant(0.5);
      ++constant;
    }
  }
  if (constant > 0) log().info("reconstruction target: {} constant column(s) set to 0.5", constant);
  return out;
}

ViewInputs prepare_view(const GraphView& view) {
  ViewInputs in;
  in.adjacency_rows = row_normalize(view.adjacency);
  in.features = l2_row_normalize(view.features);
  in.neighbor_gram = in.adjacency_rows * in.adjacency_rows.transpose();
  in.feature_gram = feature_similarity(view);
  in.recon_target = minmax_columns(in.features);
  return in;
}

ad::Var similarity_loss(ad::Var z_a, ad::Var z_x, const DenseMatrix& neighbor_gram,
                        const DenseMatrix& feature_gram) {
  ad::Tape& tape = *z_a.tape;
  const ad::Var la = ad::mse_gram(z_a, tape.constant(neighbor_gram, "neighbor gram"));
  const ad::Var lx = ad::mse_gram(z_x, tape.constant(feature_gram, "feature gram"));
  return ad::add(la, lx);
}

ad::Var reconstruction_loss(ad::Var logits, const DenseMatrix& target) {
  return ad::sigmoid_cross_entropy(logits, logits.tape->constant(target, "reconstruction target"));
}

ad::Var kl_loss(const DenseMatrix& p, ad::Var q, const std::vector<ad::Var>& view_q) {
  const ad::Var target = q.tape->constant(p, "target distribution");
  ad::Var total = ad::kl_divergence(target, q);
  for (const ad::Var& qv : view_q) total = ad::add(total, ad::kl_divergence(target, qv));
  return total;
}

namespace {

struct BoundEncoders {
  MlpVars f_a, f_x, phi, xi;
};

void append(std::vector<DenseMatrix*>& out, Mlp& mlp) {
  out.insert(out.end(), {&mlp.w1, &mlp.b1, &mlp.w2, &mlp.b2});
}

void append(std::vector<ad::Var>& out, const MlpVars& mlp) {
  out.insert(out.end(), {mlp.w1, mlp.b1, mlp.w2, mlp.b2});
}

DenseMatrix mean_of(const std::vector<DenseMatrix>& hs) {
  DenseMatrix m = DenseMatrix::Zero(hs.front().rows(), hs.front().cols());
  for (const DenseMatrix& h : hs) m += h;
  return m / static_cast<double>(hs.size());
}

// H^v with untrained-epoch fusion (0.5/0.5 unless a branch is disabled).
DenseMatrix initial_view_embedding(const ViewEncoders& enc, const ViewInputs& in,
                                   const SmhgcConfig& cfg, int k) {
  ad::Tape t;
  const ad::Var x = t.constant(in.features);
  const DenseMatrix z_a = forward(bind_mlp(t, enc.f_a, "f_a"), t.constant(in.adjacency_rows)).value();
  const DenseMatrix z_x = forward(bind_mlp(t, enc.f_x, "f_x"), x).value();
  const DenseMatrix z_f = forward(bind_mlp(t, enc.phi, "phi"), x).value();
  const DenseMatrix a_x = z_x * z_x.transpose();
  const DenseMatrix a_a = z_a * z_a.transpose();
  DenseMatrix fused;
  if (!cfg.use_ax) {
    fused = a_a;
  } else if (!cfg.use_aa) {
    fused = a_x;
  } else {
    fused = balanced_sum(0.5, a_x, 0.5, a_a);
  }
  return aggregate(discretize_topk(fused, k), z_f, cfg.order);
}

void check_finite(const ad::Tape& tape, int epoch) {
  if (auto bad = tape.first_non_finite()) {
    throw NumericError("non-finite value at epoch " + std::to_string(epoch) + ": " + *bad);
  }
}

}  // namespace

TrainResult train(const MultiViewDataset& dataset, SmhgcModel& model,
                  const EpochCallback& on_epoch) {
  dataset.validate();
  const SmhgcConfig& cfg = model.config;
  cfg.validate();
  if (model.encoders.size() != dataset.num_views()) {
    throw ContractError("train: model has " + std::to_string(model.encoders.size()) +
                        " view encoders but the dataset has " +
                        std::to_string(dataset.num_views()) + " views");
  }
  const Eigen::Index n = dataset.num_nodes();
  const std::size_t num_views = dataset.num_views();
  const int k = cfg.resolved_k(n);
  const int warmup = cfg.warmup_epoch();

  std::vector<ViewInputs> inputs;
  for (const GraphView& view : dataset.views) inputs.push_back(prepare_view(view));

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.lr;
  AdamState encoder_opt(adam_cfg);
  AdamState centroid_opt(adam_cfg);

  TrainResult result;
  bool have_previous = false;
  DenseMatrix previous;  // H-bar of the last epoch

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.use_kl_loss && !model.centroids_ready && epoch >= warmup && have_previous) {
      const Rng km_rng = Rng(cfg.seed).derive(0xce27);
      model.centroids = kmeans(previous, model.num_clusters, cfg.kmeans, km_rng).centroids;
      model.view_centroids.assign(num_views, model.centroids);
      model.centroids_ready = true;
      log().debug("epoch {}: centroids initialized by k-means", epoch);
    }

    ad::Tape tape;
    std::vector<BoundEncoders> bound;
    std::vector<ad::Var> h_vars;
    std::vector<DenseMatrix> h_values;
    ad::Var l_sim = tape.constant(DenseMatrix::Zero(1, 1), "zero");
    ad::Var l_r = l_sim;
    FusionState fusion;

    for (std::size_t v = 0; v < num_views; ++v) {
      const std::string prefix = "view" + std::to_string(v);
      const ViewEncoders& enc = model.encoders[v];
      BoundEncoders b{bind_mlp(tape, enc.f_a, prefix + ".f_a"), bind_mlp(tape, enc.f_x, prefix + ".f_x"),
                      bind_mlp(tape, enc.phi, prefix + ".phi"), bind_mlp(tape, enc.xi, prefix + ".xi")};
      const ViewInputs& in = inputs[v];
      const ad::Var x = tape.constant(in.features, prefix + ".features");
      const ad::Var z_a = forward(b.f_a, tape.constant(in.adjacency_rows, prefix + ".adjacency"));
      const ad::Var z_x = forward(b.f_x, x);
      const ad::Var z_f = forward(b.phi, x);
      const ad::Var logits = forward(b.xi, z_f);

      if (cfg.use_sim_loss) {
        l_sim = ad::add(l_sim, similarity_loss(z_a, z_x, in.neighbor_gram, in.feature_gram));
      }
      if (cfg.use_recon_loss) l_r = ad::add(l_r, reconstruction_loss(logits, in.recon_target));

      // Similarity graphs are built from detached values.
      const DenseMatrix a_x = z_x.value() * z_x.value().transpose();
      const DenseMatrix a_a = z_a.value() * z_a.value().transpose();
      IntraViewFusion intra;
      if (!cfg.use_ax) {
        intra.omega_x = 0.0;
        intra.omega_a = 1.0;
        intra.fused = a_a;
      } else if (!cfg.use_aa) {
        intra.omega_x = 1.0;
        intra.omega_a = 0.0;
        intra.fused = a_x;
      } else if (cfg.uniform_fusion_weights || !have_previous) {
        intra.fused = balanced_sum(0.5, a_x, 0.5, a_a);
      } else {
        intra = intra_view_fuse(a_x, a_a, previous);
      }
      DenseMatrix graph = discretize_topk(intra.fused, k);
      const ad::Var h = aggregate(z_f, row_normalize(graph), cfg.order);

      fusion.omega_x.push_back(intra.omega_x);
      fusion.omega_a.push_back(intra.omega_a);
      fusion.graphs.push_back(std::move(graph));
      bound.push_back(b);
      h_vars.push_back(h);
      h_values.push_back(h.value());
    }

    const DenseMatrix reference = have_previous ? previous : mean_of(h_values);
    if (!have_previous) {
      // Before the first update the consensus is the plain mean.
      previous = reference;
      have_previous = true;
    }
    fusion.omega_h = inter_view_weights(h_values, reference, cfg.rho);
    ad::Var consensus = ad::scale(h_vars[0], fusion.omega_h[0]);
    for (std::size_t v = 1; v < num_views; ++v) {
      consensus = ad::add(consensus, ad::scale(h_vars[v], fusion.omega_h[v]));
    }
    fusion.consensus = consensus.value();

    ad::Var l_kl = tape.constant(DenseMatrix::Zero(1, 1), "zero");
    ad::Var mu;
    std::vector<ad::Var> view_mu;
    const bool kl_active = cfg.use_kl_loss && model.centroids_ready;
    if (kl_active) {
      mu = tape.parameter(model.centroids, "centroids");
      const ad::Var q = ad::student_t_assign(consensus, mu);
      std::vector<ad::Var> view_q;
      for (std::size_t v = 0; v < num_views; ++v) {
        ad::Var centers = mu;
        if (cfg.per_view_centroids) {
          view_mu.push_back(tape.parameter(model.view_centroids[v], "centroids.view" + std::to_string(v)));
          centers = view_mu.back();
        }
        view_q.push_back(ad::student_t_assign(h_vars[v], centers));
      }
      l_kl = kl_loss(target_distribution(q.value()), q, view_q);
    }

    const ad::Var total = ad::add(
        ad::add(ad::scale(l_sim, cfg.gamma_sim), ad::scale(l_r, cfg.gamma_r)), l_kl);
    check_finite(tape, epoch);
    tape.backward(total);
    check_finite(tape, epoch);

    std::vector<DenseMatrix*> params;
    std::vector<ad::Var> vars;
    for (std::size_t v = 0; v < num_views; ++v) {
      ViewEncoders& enc = model.encoders[v];
      append(params, enc.f_a);
      append(params, enc.f_x);
      append(params, enc.phi);
      append(params, enc.xi);
      append(vars, bound[v].f_a);
      append(vars, bound[v].f_x);
      append(vars, bound[v].phi);
      append(vars, bound[v].xi);
    }
    std::vector<const DenseMatrix*> grads;
    for (const ad::Var& var : vars) grads.push_back(&var.grad());
    encoder_opt.apply(params, grads);

    if (kl_active) {
      std::vector<DenseMatrix*> cparams{&model.centroids};
      std::vector<const DenseMatrix*> cgrads{&mu.grad()};
      for (std::size_t v = 0; v < view_mu.size(); ++v) {
        cparams.push_back(&model.view_centroids[v]);
        cgrads.push_back(&view_mu[v].grad());
      }
      centroid_opt.apply(cparams, cgrads);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.l_sim = ad::scalar(l_sim);
    record.l_r = ad::scalar(l_r);
    record.l_kl = ad::scalar(l_kl);
    record.total = ad::scalar(total);
    record.omega_x = fusion.omega_x;
    record.omega_a = fusion.omega_a;
    record.omega_h = fusion.omega_h;
    log().debug("epoch {}: total {:.6f} (sim {:.6f}, recon {:.6f}, kl {:.6f})", epoch,
                record.total, record.l_sim, record.l_r, record.l_kl);
    if (on_epoch) on_epoch(record);
    result.history.push_back(std::move(record));

    previous = fusion.consensus;
    result.fusion = std::move(fusion);
    model.epoch = epoch + 1;
  }

  if (!have_previous) {
    // No epochs: the consensus is the unweighted mean of the initial views.
    std::vector<DenseMatrix> hs;
    for (std::size_t v = 0; v < num_views; ++v) {
      hs.push_back(initial_view_embedding(model.encoders[v], inputs[v], cfg, k));
    }
    previous = mean_of(hs);
  }
  result.consensus = previous;
  return result;
}

namespace {

constexpr char kMagic[8] = {'S', 'M', 'H', 'G', 'C', 'C', 'K', '1'};

void write_u64(std::ostream& os, std::uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void save_checkpoint(const SmhgcModel& model, const DenseMatrix& consensus,
                     const std::filesystem::path& path) {
  std::vector<std::pair<std::string, const DenseMatrix*>> blocks;
  for (std::size_t v = 0; v < model.encoders.size(); ++v) {
    const ViewEncoders& enc = model.encoders[v];
    const std::string prefix = "view" + std::to_string(v);
    for (const auto& [name, mlp] : {std::pair{".f_a", &enc.f_a}, std::pair{".f_x", &enc.f_x},
                                    std::pair{".phi", &enc.phi}, std::pair{".xi", &enc.xi}}) {
      blocks.emplace_back(prefix + name + ".w1", &mlp->w1);
      blocks.emplace_back(prefix + name + ".b1", &mlp->b1);
      blocks.emplace_back(prefix + name + ".w2", &mlp->w2);
      blocks.emplace_back(prefix + name + ".b2", &mlp->b2);
    }
  }
  if (model.centroids_ready) {
    blocks.emplace_back("centroids", &model.centroids);
    for (std::size_t v = 0; v < model.view_centroids.size(); ++v) {
      blocks.emplace_back("centroids.view" + std::to_string(v), &model.view_centroids[v]);
    }
  }
  blocks.emplace_back("consensus", &consensus);

  nlohmann::json header;
  header["config"] = to_json(model.config);
  header["seed"] = model.config.seed;
  header["epoch"] = model.epoch;
  header["num_clusters"] = model.num_clusters;
  header["num_views"] = model.encoders.size();
  header["blocks"] = nlohmann::json::array();
  for (const auto& [name, m] : blocks) {
    header["blocks"].push_back({{"name", name}, {"rows", m->rows()}, {"cols", m->cols()}});
  }
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write checkpoint " + path.string());
  os.write(kMagic, sizeof kMagic);
  write_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, m] : blocks) {
    for (Eigen::Index i = 0; i < m->size(); ++i) write_u64(os, std::bit_cast<std::uint64_t>(m->data()[i]));
  }
  if (!os) throw IoError("failed while writing checkpoint " + path.string());
}

const DenseMatrix& Checkpoint::block(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return blocks[i];
  }
  throw LoadError("checkpoint has no block '" + name + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError("cannot open checkpoint " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw LoadError(path.string() + ": not a checkpoint (bad magic)");
  }
  const std::uint64_t length = read_u64(is);
  std::string text(length, '\0');
  is.read(text.data(), static_cast<std::streamsize>(length));
  if (!is) throw LoadError(path.string() + ": truncated header");
  Checkpoint ck;
  try {
    ck.header = nlohmann::json::parse(text);
    for (const auto& b : ck.header.at("blocks")) {
      const auto rows = b.at("rows").get<Eigen::Index>();
      const auto cols = b.at("cols").get<Eigen::Index>();
      DenseMatrix m(rows, cols);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<double>(read_u64(is));
      if (!is) throw LoadError(path.string() + ": truncated block " + b.at("name").get<std::string>());
      ck.names.push_back(b.at("name").get<std::string>());
      ck.blocks.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": malformed header: " + e.what());
  }
  return ck;
}

}  // namespace smhgc
