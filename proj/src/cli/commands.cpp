#include "smhgc/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <spdlog/fmt/fmt.h>

#include "CLI11.hpp"
#include "smhgc/cluster_eval/metrics.hpp"
#include "smhgc/graphdata/io.hpp"
#include "smhgc/homophily_analysis/similarity.hpp"
#include "smhgc/log.hpp"

namespace smhgc::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("failed while writing " + path.string());
}

void write_run_json(const RunConfig& config, const std::string& command,
                    const nlohmann::json& options) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = to_json(config);
  j["options"] = options;
  write_json(config.out / "run.json", j);
}

MultiViewDataset load(const RunConfig& config) {
  if (config.dataset.empty()) throw ContractError("--dataset is required");
  return load_dataset(config.dataset);
}

// Shortest round-trip representation, so CSVs are stable byte for byte.
std::string num(double x) { return fmt::format("{}", x); }

std::string csv_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

nlohmann::json metrics_json(const std::optional<Metrics>& m) {
  if (!m) return nullptr;
  return {{"nmi", m->nmi}, {"ari", m->ari}, {"acc", m->acc}, {"f1", m->f1}};
}

std::string metrics_csv(const std::optional<Metrics>& m) {
  if (!m) return ",,,";
  return num(m->nmi) + "," + num(m->ari) + "," + num(m->acc) + "," + num(m->f1);
}

ClusterReport cluster_embedding(const DenseMatrix& embedding, int num_clusters,
                                const std::optional<Labels>& labels, const KMeansConfig& kmeans_cfg,
                                std::uint64_t seed) {
  ClusterReport report;
  report.seed = seed;
  report.restarts = kmeans_cfg.restarts;
  report.assignment = kmeans(embedding, num_clusters, kmeans_cfg, Rng(seed)).assignment;
  if (labels) report.metrics = evaluate(report.assignment, *labels);
  return report;
}

SmhgcConfig model_config(const RunConfig& config) {
  SmhgcConfig c = config.model;
  c.seed = config.seed;
  return c;
}

MultiViewDataset synthesize_at(const MultiViewDataset& source, double hr, std::uint64_t seed) {
  const double grid[] = {hr};
  return sweep_synthesize(source, grid, seed).front();
}

}  // namespace

std::string hr_directory_name(double hr) { return "hr_" + num(hr); }

nlohmann::json to_json(const RunConfig& config) {
  return {{"dataset", config.dataset.string()},
          {"seed", config.seed},
          {"out", config.out.string()},
          {"threads", config.threads},
          {"model", to_json(model_config(config))}};
}

void write_assignment(const Labels& assignment, const fs::path& path) {
  std::ofstream os = open_out(path);
  os << "node,cluster\n";
  for (std::size_t i = 0; i < assignment.size(); ++i) os << i << ',' << assignment[i] << '\n';
  if (!os) throw IoError("failed while writing " + path.string());
}

Labels read_assignment(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw LoadError("cannot open assignment file " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "node,cluster") throw LoadError(path.string() + ":1: expected header 'node,cluster'");
  Labels out;
  for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long node = -1;
    char comma = 0;
    int cluster = 0;
    if (!(row >> node >> comma >> cluster) || comma != ',' ||
        node != static_cast<long>(out.size())) {
      throw LoadError(path.string() + ":" + std::to_string(lineno) +
                      ": expected '<node>,<cluster>' with consecutive node ids");
    }
    out.push_back(cluster);
  }
  return out;
}

int cmd_synth(const RunConfig& config, const SynthOptions& options) {
  if (options.hr_grid.empty()) {
    log().info("synth: empty hr grid, nothing written");
    return kExitOk;
  }
  MultiViewDataset source;
  if (options.planted) {
    PlantedSpec spec = options.planted_spec;
    spec.seed = config.seed;
    source = planted_dataset(spec);
  } else {
    source = load(config);
  }
  source.require_labels("synth");
  ensure_dir(config.out);
  write_run_json(config, "synth",
                 {{"hr_grid", options.hr_grid}, {"planted", options.planted}});
  int failures = 0;
  for (double hr : options.hr_grid) {
    try {
      const MultiViewDataset ds = synthesize_at(source, hr, config.seed);
      const fs::path dir = config.out / hr_directory_name(hr);
      save_dataset(ds, dir);
      log().info("synth: wrote {}", dir.string());
    } catch (const ContractError& e) {
      log().error("synth: hr {}: {}", hr, e.what());
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitContract;
}

int cmd_analyze(const RunConfig& config) {
  const MultiViewDataset ds = load(config);
  ds.require_labels("analyze");
  const int k = config.model.resolved_k(ds.num_nodes());
  const std::vector<HomophilyRow> rows = analyze_homophily(ds, k);
  ensure_dir(config.out);
  write_run_json(config, "analyze", nlohmann::json::object());
  std::ofstream os = open_out(config.out / "homophily.csv");
  os << "view,transform,hr,k\n";
  for (const HomophilyRow& r : rows) {
    os << r.view << ',' << r.transform << ',' << num(r.hr) << ',' << r.k << '\n';
  }
  return kExitOk;
}

int cmd_baseline(const RunConfig& config, const BaselineOptions& options) {
  std::vector<GraphChoice> choices;
  if (options.graph == "both") {
    choices = {GraphChoice::raw, GraphChoice::sim_enhanced};
  } else {
    choices = {parse_graph_choice(options.graph)};
  }
  const MultiViewDataset ds = load(config);
  ensure_dir(config.out);
  write_run_json(config, "baseline",
                 {{"orders", options.orders}, {"graph", options.graph}, {"hr_grid", options.hr_grid}});

  auto baseline_config = [&](GraphChoice choice) {
    BaselineConfig bc;
    bc.graph = choice;
    bc.orders = options.orders;
    bc.k = config.model.k;
    bc.kmeans = config.model.kmeans;
    bc.seed = config.seed;
    return bc;
  };

  if (options.hr_grid.empty()) {
    for (GraphChoice choice : choices) {
      const BaselineResult result = message_passing_baseline(ds, baseline_config(choice));
      const std::string name = std::string("baseline_") + to_string(choice);
      write_assignment(result.combined.assignment, config.out / (name + "_assignment.csv"));
      nlohmann::json j = report_to_json(result.combined, name + "_assignment.csv");
      j["graph"] = to_string(choice);
      j["orders"] = options.orders;
      j["views"] = nlohmann::json::array();
      for (const ClusterReport& r : result.per_view) j["views"].push_back(metrics_json(r.metrics));
      write_json(config.out / (name + ".json"), j);
    }
    return kExitOk;
  }

  ds.require_labels("baseline hr sweep");
  std::ofstream os = open_out(config.out / "baseline_sweep.csv");
  os << "hr,variant,nmi,ari,acc,f1\n";
  int failures = 0;
  for (double hr : options.hr_grid) {
    try {
      const MultiViewDataset point = synthesize_at(ds, hr, config.seed);
      for (GraphChoice choice : choices) {
        const BaselineResult result = message_passing_baseline(point, baseline_config(choice));
        os << num(hr) << ',' << to_string(choice) << ',' << metrics_csv(result.combined.metrics)
           << '\n';
      }
    } catch (const ContractError& e) {
      log().error("baseline: hr {}: {}", hr, e.what());
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitContract;
}

int cmd_train(const RunConfig& config) {
  const MultiViewDataset ds = load(config);
  const SmhgcConfig cfg = model_config(config);
  SmhgcModel model = make_model(ds, cfg);
  ensure_dir(config.out);
  write_run_json(config, "train", nlohmann::json::object());

  // Streamed so a numeric abort still leaves the curve up to the failure.
  std::ofstream losses = open_out(config.out / "losses.csv");
  std::ofstream weights = open_out(config.out / "weights.csv");
  losses << "epoch,l_sim,l_r,l_kl,total\n";
  weights << "epoch,view,omega_x,omega_a,omega_h\n";
  const TrainResult result = train(ds, model, [&](const EpochRecord& r) {
    losses << r.epoch << ',' << num(r.l_sim) << ',' << num(r.l_r) << ',' << num(r.l_kl) << ','
           << num(r.total) << '\n';
    for (std::size_t v = 0; v < r.omega_h.size(); ++v) {
      weights << r.epoch << ',' << v << ',' << num(r.omega_x[v]) << ',' << num(r.omega_a[v]) << ','
              << num(r.omega_h[v]) << '\n';
    }
  });

  save_checkpoint(model, result.consensus, config.out / "checkpoint.bin");
  const ClusterReport report =
      cluster_embedding(result.consensus, ds.num_clusters, ds.labels, cfg.kmeans, config.seed);
  write_assignment(report.assignment, config.out / "assignment.csv");
  write_json(config.out / "report.json", report_to_json(report, "assignment.csv"));
  return kExitOk;
}

int cmd_eval(const RunConfig& config, const EvalOptions& options) {
  if (options.assignment.empty() == options.checkpoint.empty()) {
    throw ContractError("eval: give exactly one of --assignment or --checkpoint");
  }
  std::optional<MultiViewDataset> ds;
  if (!config.dataset.empty()) ds = load_dataset(config.dataset);

  ClusterReport report;
  report.seed = config.seed;
  report.restarts = config.model.kmeans.restarts;
  std::string assignment_file;
  if (!options.checkpoint.empty()) {
    const Checkpoint ck = load_checkpoint(options.checkpoint);
    const DenseMatrix& consensus = ck.block("consensus");
    const int k = ck.header.at("num_clusters").get<int>();
    report = cluster_embedding(consensus, k, ds ? ds->labels : std::nullopt, config.model.kmeans,
                               config.seed);
    assignment_file = "assignment.csv";
  } else {
    if (!ds) throw ContractError("eval --assignment needs --dataset for the labels");
    report.assignment = read_assignment(options.assignment);
    if (ds->labels) report.metrics = evaluate(report.assignment, *ds->labels);
    assignment_file = options.assignment.string();
  }
  if (ds && !ds->labels) log().info("eval: dataset has no labels, metrics are null");

  ensure_dir(config.out);
  write_run_json(config, "eval",
                 {{"assignment", options.assignment.string()},
                  {"checkpoint", options.checkpoint.string()}});
  if (!options.checkpoint.empty()) write_assignment(report.assignment, config.out / assignment_file);
  write_json(config.out / "report.json", report_to_json(report, assignment_file));
  return kExitOk;
}

namespace {

struct SweepPoint {
  std::optional<double> hr;
  int k = 0;
  int order = 0;
  double gamma_sim = 0.0;
  double gamma_r = 0.0;
};

struct SweepRow {
  std::uint64_t seed = 0;
  std::optional<Metrics> metrics;
  double seconds = 0.0;
  std::string error;
};

template <typename T>
std::vector<T> or_default(const std::vector<T>& grid, T fallback) {
  return grid.empty() ? std::vector<T>{fallback} : grid;
}

}  // namespace

int cmd_sweep(const RunConfig& config, const SweepOptions& options) {
  const MultiViewDataset base = load(config);
  const SmhgcConfig defaults = model_config(config);

  std::vector<std::optional<double>> hrs;
  if (options.hr_grid.empty()) {
    hrs.push_back(std::nullopt);
  } else {
    for (double hr : options.hr_grid) hrs.emplace_back(hr);
  }
  std::vector<SweepPoint> points;
  for (const auto& hr : hrs) {
    for (int k : or_default(options.k_grid, defaults.k)) {
      for (int order : or_default(options.order_grid, defaults.order)) {
        for (double gs : or_default(options.gamma_sim_grid, defaults.gamma_sim)) {
          for (double gr : or_default(options.gamma_r_grid, defaults.gamma_r)) {
            points.push_back({hr, k, order, gs, gr});
          }
        }
      }
    }
  }

  // Synthesized datasets depend only on (seed, hr), so every run at one
  // ratio sees the same graph.
  std::vector<std::optional<MultiViewDataset>> data(hrs.size());
  std::vector<std::string> data_error(hrs.size());
  for (std::size_t h = 0; h < hrs.size(); ++h) {
    if (!hrs[h]) {
      data[h] = base;
      continue;
    }
    try {
      data[h] = synthesize_at(base, *hrs[h], config.seed);
    } catch (const Error& e) {
      data_error[h] = e.what();
    }
  }
  auto data_index = [&](const SweepPoint& p) {
    for (std::size_t h = 0; h < hrs.size(); ++h) {
      if (hrs[h] == p.hr) return h;
    }
    return std::size_t{0};
  };

  ensure_dir(config.out);
  write_run_json(config, "sweep",
                 {{"k_grid", options.k_grid},
                  {"order_grid", options.order_grid},
                  {"gamma_sim_grid", options.gamma_sim_grid},
                  {"gamma_r_grid", options.gamma_r_grid},
                  {"hr_grid", options.hr_grid}});

  std::vector<SweepRow> rows(points.size());
  auto run_one = [&](std::size_t index) {
    const SweepPoint& p = points[index];
    SweepRow& row = rows[index];
    row.seed = derive_seed(config.seed, index);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t h = data_index(p);
    try {
      if (!data[h]) throw ContractError(data_error[h]);
      const MultiViewDataset& ds = *data[h];
      SmhgcConfig cfg = defaults;
      cfg.seed = row.seed;
      cfg.k = p.k;
      cfg.order = p.order;
      cfg.gamma_sim = p.gamma_sim;
      cfg.gamma_r = p.gamma_r;
      SmhgcModel model = make_model(ds, cfg);
      const TrainResult result = train(ds, model);
      row.metrics =
          cluster_embedding(result.consensus, ds.num_clusters, ds.labels, cfg.kmeans, row.seed)
              .metrics;
    } catch (const Error& e) {
      row.error = e.what();
      log().error("sweep run {}: {}", index, e.what());
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const auto workers = static_cast<std::size_t>(std::max(1, config.threads));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, points.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) run_one(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  std::ofstream os = open_out(config.out / "sweep.csv");
  os << "run,seed,hr,k,order,gamma_sim,gamma_r,nmi,ari,acc,f1,seconds,status,error\n";
  std::size_t failed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    const SweepRow& r = rows[i];
    failed += r.error.empty() ? 0 : 1;
    os << i << ',' << r.seed << ',' << (p.hr ? num(*p.hr) : "") << ',' << p.k << ',' << p.order
       << ',' << num(p.gamma_sim) << ',' << num(p.gamma_r) << ',' << metrics_csv(r.metrics) << ','
       << num(r.seconds) << ',' << (r.error.empty() ? "ok" : "failed") << ','
       << (r.error.empty() ? "" : csv_quote(r.error)) << '\n';
  }
  if (failed > 0) log().warn("sweep: {} of {} runs failed (see sweep.csv)", failed, points.size());
  return kExitOk;
}

namespace {

bool mentions_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Expands `--config FILE` in place. The file is flat "key = value" lines
// keyed by long flag names; each entry becomes "--key=value" right after the
// subcommand unless the command line already sets that flag. CLI11 only
// reads config files on the root app, hence the expansion.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty() || args.empty()) return args;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  std::vector<std::string> expanded;
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) {
      throw ContractError("config " + path + ": sections are not supported (key '" + item.fullname() + "')");
    }
    const std::string flag = "--" + item.name;
    if (mentions_flag(args, flag)) continue;
    std::string value;
    for (const std::string& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    expanded.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + 1, expanded.begin(), expanded.end());
  return args;
}

}  // namespace

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const IoError& e) {
    log().error("{}", e.what());
    return kExitIo;
  } catch (const ContractError& e) {
    log().error("{}", e.what());
    return kExitContract;
  }

  CLI::App app{"Multi-view heterophilous graph clustering"};
  app.require_subcommand(1);
  std::string config_file;  // consumed by expand_config; declared for --help

  RunConfig config;
  SynthOptions synth;
  BaselineOptions baseline;
  EvalOptions eval;
  SweepOptions sweep;
  bool no_sim = false, no_recon = false, no_kl = false, no_ax = false, no_aa = false;
  bool uniform = false;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "Flat key = value file (keys are long flag names)");
    sub->add_option("--dataset", config.dataset, "Dataset directory");
    sub->add_option("--seed", config.seed, "Base seed");
    sub->add_option("--out", config.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--k", config.model.k, "Top-k neighbors (0: round(0.1 N))");
    sub->add_option("--restarts", config.model.kmeans.restarts, "K-means restarts")
        ->check(CLI::PositiveNumber);
  };
  auto add_model = [&](CLI::App* sub) {
    SmhgcConfig& m = config.model;
    sub->add_option("--order", m.order, "Aggregation order");
    sub->add_option("--rho", m.rho, "Inter-view sharpening exponent");
    sub->add_option("--gamma-sim", m.gamma_sim, "Weight of the similarity loss");
    sub->add_option("--gamma-r", m.gamma_r, "Weight of the reconstruction loss");
    sub->add_option("--epochs", m.epochs, "Training epochs");
    sub->add_option("--lr", m.lr, "Adam learning rate");
    sub->add_option("--embed-dim", m.embed_dim, "Embedding width");
    sub->add_option("--hidden-dim", m.hidden_dim, "Hidden layer width");
    sub->add_option("--warmup-fraction", m.warmup_fraction, "Share of epochs before clustering");
    sub->add_flag("--per-view-centroids", m.per_view_centroids, "Separate centroids per view");
    sub->add_flag("--no-sim-loss", no_sim, "Drop the similarity loss");
    sub->add_flag("--no-recon-loss", no_recon, "Drop the reconstruction loss");
    sub->add_flag("--no-kl", no_kl, "Drop the clustering loss");
    sub->add_flag("--no-ax", no_ax, "Drop the feature similarity branch");
    sub->add_flag("--no-aa", no_aa, "Drop the neighbor-pattern branch");
    sub->add_flag("--uniform-fusion-weights", uniform, "Fix intra-view weights at 0.5");
  };

  CLI::App* synth_cmd = app.add_subcommand("synth", "Resynthesize views over an hr grid");
  add_shared(synth_cmd);
  synth_cmd->add_option("--hr-grid", synth.hr_grid, "Target homophily ratios")->delimiter(',');
  synth_cmd->add_flag("--planted", synth.planted, "Use a generated planted-partition source");
  synth_cmd->add_option("--nodes", synth.planted_spec.num_nodes, "Planted: nodes");
  synth_cmd->add_option("--clusters", synth.planted_spec.num_clusters, "Planted: clusters");
  synth_cmd->add_option("--views", synth.planted_spec.num_views, "Planted: views");
  synth_cmd->add_option("--block-width", synth.planted_spec.block_width, "Planted: feature block");
  synth_cmd->add_option("--noise", synth.planted_spec.noise, "Planted: feature noise");
  synth_cmd->add_option("--avg-degree", synth.planted_spec.avg_degree, "Planted: mean degree");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Homophily of graph transforms");
  add_shared(analyze_cmd);

  CLI::App* baseline_cmd = app.add_subcommand("baseline", "Parameter-free message passing");
  add_shared(baseline_cmd);
  baseline_cmd->add_option("--orders", baseline.orders, "Propagation steps");
  baseline_cmd->add_option("--graph", baseline.graph, "raw, sim_enhanced or both")
      ->check(CLI::IsMember({"raw", "sim_enhanced", "both"}));
  baseline_cmd->add_option("--hr-grid", baseline.hr_grid, "Sweep synthesized ratios")
      ->delimiter(',');

  CLI::App* train_cmd = app.add_subcommand("train", "Train and cluster");
  add_shared(train_cmd);
  add_model(train_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score an assignment or a checkpoint");
  add_shared(eval_cmd);
  eval_cmd->add_option("--assignment", eval.assignment, "node,cluster CSV");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint from train");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Grid of training runs");
  add_shared(sweep_cmd);
  add_model(sweep_cmd);
  sweep_cmd->add_option("--k-grid", sweep.k_grid, "Top-k values")->delimiter(',');
  sweep_cmd->add_option("--order-grid", sweep.order_grid, "Order values")->delimiter(',');
  sweep_cmd->add_option("--gamma-sim-grid", sweep.gamma_sim_grid, "gamma_sim values")->delimiter(',');
  sweep_cmd->add_option("--gamma-r-grid", sweep.gamma_r_grid, "gamma_r values")->delimiter(',');
  sweep_cmd->add_option("--hr-grid", sweep.hr_grid, "Synthesized ratios")->delimiter(',');

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitContract;
  }

  config.model.use_sim_loss = !no_sim;
  config.model.use_recon_loss = !no_recon;
  config.model.use_kl_loss = !no_kl;
  config.model.use_ax = !no_ax;
  config.model.use_aa = !no_aa;
  config.model.uniform_fusion_weights = uniform;

  try {
    if (synth_cmd->parsed()) return cmd_synth(config, synth);
    if (analyze_cmd->parsed()) return cmd_analyze(config);
    if (baseline_cmd->parsed()) return cmd_baseline(config, baseline);
    if (train_cmd->parsed()) return cmd_train(config);
    if (eval_cmd->parsed()) return cmd_eval(config, eval);
    if (sweep_cmd->parsed()) return cmd_sweep(config, sweep);
  } catch (const NumericError& e) {
    log().error("{}", e.what());
    return kExitNumeric;
  } catch (const IoError& e) {
    log().error("{}", e.what());
    return kExitIo;
  } catch (const ContractError& e) {
    log().error("{}", e.what());
    return kExitContract;
  } catch (const fs::filesystem_error& e) {
    log().error("{}", e.what());
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    log().error("{}", e.what());
    return kExitContract;
  }
  return kExitContract;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("smhgc");  // program name slot
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace smhgc::cli
