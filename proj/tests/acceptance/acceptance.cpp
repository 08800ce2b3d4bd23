// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1
// when any criterion fails. Pass criterion names as arguments to run a
// subset (e.g. `smhgc_acceptance gradient oracle`).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/fmt/fmt.h>

#include "grad_cases.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "smhgc/cluster_eval/metrics.hpp"
#include "smhgc/graphdata/io.hpp"
#include "smhgc/graphdata/synth.hpp"
#include "smhgc/homophily_analysis/similarity.hpp"
#include "smhgc/log.hpp"
#include "smhgc/model/fusion.hpp"
#include "smhgc/model/smhgc.hpp"

namespace fs = std::filesystem;
using namespace smhgc;

namespace {

struct Outcome {
  enum Status { pass, fail, skip } status = fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string join(const std::vector<double>& xs, int precision = 3) {
  std::string out;
  for (double x : xs) out += (out.empty() ? "" : " ") + fmt::format("{:.{}f}", x, precision);
  return out;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double range(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double ma = mean(ra), mb = mean(rb);
  double s = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += (ra[i] - ma) * (rb[i] - mb);
    sa += (ra[i] - ma) * (ra[i] - ma);
    sb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sa == 0 || sb == 0 ? 0.0 : s / std::sqrt(sa * sb);
}

std::vector<double> hr_grid_01_09() {
  std::vector<double> g;
  for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
  return g;
}

// Synthetic regime shared by the trained experiments and the
// observation-1 baseline.
PlantedSpec sweep_spec(double hr, std::uint64_t seed) {
  PlantedSpec s;
  s.num_nodes = 300;
  s.num_clusters = 3;
  s.num_views = 2;
  s.block_width = 5;
  s.noise = 1.0;
  s.avg_degree = 10.0;
  s.hr = hr;
  s.seed = seed;
  return s;
}

double raw_baseline_nmi(const MultiViewDataset& ds, std::uint64_t seed, int orders) {
  BaselineConfig bc;
  bc.orders = orders;
  bc.seed = seed;
  return message_passing_baseline(ds, bc).combined.metrics->nmi;
}

double smhgc_nmi(const MultiViewDataset& ds, SmhgcConfig cfg) {
  SmhgcModel model = make_model(ds, cfg);
  const TrainResult r = train(ds, model);
  const Labels a = kmeans(r.consensus, ds.num_clusters, cfg.kmeans, Rng(cfg.seed)).assignment;
  return evaluate(a, *ds.labels).nmi;
}

// ---------------------------------------------------------------- criteria

Outcome gradient_suite() {
  const auto start = Clock::now();
  constexpr int kInstances = 25;
  double worst = 0.0;
  std::string worst_case;
  std::size_t checks = 0;
  std::map<std::string, int> per_case;
  for (int s = 0; s < kInstances; ++s) {
    Rng rng(Rng(0x9a4d).derive(static_cast<std::uint64_t>(s)).seed());
    for (const auto& c : testing::gradient_cases(rng)) {
      const auto r = testing::gradcheck(c.inputs, c.build, 1e-5);
      ++per_case[c.name];
      checks += r.entries;
      if (r.max_rel_error > worst) {
        worst = r.max_rel_error;
        worst_case = c.name;
      }
    }
  }
  const double secs = seconds_since(start);
  const int min_instances =
      std::min_element(per_case.begin(), per_case.end(), [](auto& a, auto& b) {
        return a.second < b.second;
      })->second;
  const bool ok = worst < 1e-4 && min_instances >= 20 && secs < 60.0;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("{} ops/losses x {} instances (N<=8), {} entries, max rel err {:.2e} ({}), {:.1f}s",
                      per_case.size(), min_instances, checks, worst, worst_case, secs)};
}

Outcome oracle_suite() {
  const auto start = Clock::now();
  constexpr int kInstances = 120;
  Rng rng(0x04ac1e);
  int bad_hr = 0, bad_nmi = 0, bad_ari = 0, bad_acc = 0, bad_f1 = 0, bad_hung = 0, bad_agg = 0;
  for (int t = 0; t < kInstances; ++t) {
    // Homophily ratio by edge enumeration.
    const auto n = static_cast<Eigen::Index>(3 + rng.uniform_int(30));
    DenseMatrix g = oracle::random_graph(n, 0.05 + 0.5 * rng.uniform(), rng);
    if (edge_count(g) == 0) g(0, 1) = g(1, 0) = 1.0;
    const auto labels = oracle::random_labels(static_cast<std::size_t>(n),
                                              2 + static_cast<int>(rng.uniform_int(4)), rng);
    bad_hr += std::abs(homophily_ratio(g, labels) - oracle::homophily(g, labels)) > 1e-12;

    // Clustering metrics by pair counting and exhaustive K! mapping.
    const std::size_t m = 5 + rng.uniform_int(60);
    const auto pred = oracle::random_labels(m, 1 + static_cast<int>(rng.uniform_int(6)), rng);
    auto truth = pred;
    for (int& y : truth) {
      if (rng.uniform() < 0.5) y = static_cast<int>(rng.uniform_int(6));
    }
    bad_nmi += std::abs(nmi(pred, truth) - oracle::nmi(pred, truth)) > 1e-10;
    bad_ari += std::abs(ari(pred, truth) - oracle::ari(pred, truth)) > 1e-10;
    std::vector<double> f1s;
    const double best = oracle::acc(pred, truth, &f1s);
    const AccF1 af = acc_f1(pred, truth);
    bad_acc += std::abs(af.acc - best) > 1e-12;
    bad_f1 += std::none_of(f1s.begin(), f1s.end(), [&](double f) { return std::abs(f - af.f1) < 1e-12; });

    const auto k = static_cast<Eigen::Index>(1 + rng.uniform_int(6));
    const DenseMatrix cost = oracle::random_matrix(k, k, rng, -3.0, 3.0);
    const std::vector<int> match = hungarian_min_cost(cost);
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) total += cost(i, match[static_cast<std::size_t>(i)]);
    bad_hung += std::abs(total - oracle::min_assignment_cost(cost)) > 1e-9;

    // Aggregation against explicit matrix powers.
    const int order = static_cast<int>(rng.uniform_int(6));
    const DenseMatrix z = oracle::random_matrix(n, 3, rng);
    const DenseMatrix expected = oracle::aggregate_by_powers(g, z, order);
    bad_agg += (aggregate(g, z, order) - expected).cwiseAbs().maxCoeff() > 1e-10;
  }
  const double secs = seconds_since(start);
  const int bad = bad_hr + bad_nmi + bad_ari + bad_acc + bad_f1 + bad_hung + bad_agg;
  return {bad == 0 && secs < 60.0 ? Outcome::pass : Outcome::fail,
          fmt::format("{} instances each; mismatches hr {} nmi {} ari {} acc {} f1 {} hungarian {} "
                      "aggregate {}; {:.1f}s",
                      kInstances, bad_hr, bad_nmi, bad_ari, bad_acc, bad_f1, bad_hung, bad_agg, secs)};
}

Outcome generator_suite() {
  const auto start = Clock::now();
  PlantedSpec toy;
  toy.num_nodes = 200;
  toy.num_clusters = 3;
  toy.seed = 2024;
  const MultiViewDataset source = planted_dataset(toy);
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  int bad = 0;
  double worst = 0.0;
  std::size_t e = 0;
  const auto sets = sweep_synthesize(source, grid, 7);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t v = 0; v < source.num_views(); ++v) {
      e = edge_count(source.views[v].adjacency);
      const DenseMatrix& a = sets[g].views[v].adjacency;
      const double err = std::abs(homophily_ratio(a, *source.labels) - grid[g]);
      worst = std::max(worst, err);
      bad += edge_count(a) != e || err > 1.0 / static_cast<double>(e);
    }
  }
  const double secs = seconds_since(start);
  return {bad == 0 && secs < 60.0 ? Outcome::pass : Outcome::fail,
          fmt::format("11 targets x 2 views, E={}, max |hr-target| {:.2e} (bound {:.2e}), {} violations, {:.1f}s",
                      e, worst, 1.0 / static_cast<double>(e), bad, secs)};
}

Outcome observation_one() {
  const auto start = Clock::now();
  const std::vector<double> grid = hr_grid_01_09();
  std::vector<double> rhos;
  std::vector<double> avg(grid.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<double> nmis;
    for (double hr : grid) nmis.push_back(raw_baseline_nmi(planted_dataset(sweep_spec(hr, seed)), seed, 2));
    rhos.push_back(spearman(grid, nmis));
    for (std::size_t i = 0; i < grid.size(); ++i) avg[i] += nmis[i] / 5.0;
  }
  const double rho = mean(rhos);
  const double secs = seconds_since(start);
  return {rho >= 0.7 && secs < 300.0 ? Outcome::pass : Outcome::fail,
          fmt::format("mean Spearman {:.3f} (per seed {}); raw NMI by hr: {}; {:.1f}s", rho,
                      join(rhos), join(avg), secs)};
}

Outcome observation_two() {
  const auto start = Clock::now();
  const std::vector<double> strengths{0.0, 0.25, 0.5, 0.75, 1.0};
  constexpr int kSeeds = 3;
  constexpr int kTopk = 30;
  std::vector<double> sim(strengths.size(), 0.0), raw(strengths.size(), 0.0);
  std::vector<double> direct(strengths.size(), 0.0), pattern(strengths.size(), 0.0);
  double max_direct = 0.0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    for (std::size_t s = 0; s < strengths.size(); ++s) {
      PlantedSpec ps;
      ps.num_nodes = 300;
      ps.num_clusters = 4;
      ps.block_width = 5;
      ps.noise = 1.0;
      ps.seed = seed;
      MultiViewDataset ds = planted_dataset(ps);
      const Rng base = Rng(seed).derive(300);
      for (std::size_t v = 0; v < ds.num_views(); ++v) {
        PatternSpec pat;
        pat.pattern_strength = strengths[s];
        pat.hub_fraction = 0.4;
        pat.num_edges = 1500;
        Rng vr = base.derive(v);
        ds.views[v].adjacency = pattern_heterophily_graph(*ds.labels, 4, pat, vr);
        const double hr = homophily_ratio(ds.views[v].adjacency, *ds.labels);
        max_direct = std::max(max_direct, hr);
        direct[s] += hr / (kSeeds * ds.num_views());
      }
      for (const HomophilyRow& row : analyze_homophily(ds, kTopk)) {
        if (row.transform == "neighbor_topk") pattern[s] += row.hr / (kSeeds * ds.num_views());
      }
      BaselineConfig bc;
      bc.orders = 1;
      bc.k = kTopk;
      bc.seed = seed;
      raw[s] += message_passing_baseline(ds, bc).combined.metrics->nmi / kSeeds;
      bc.graph = GraphChoice::sim_enhanced;
      sim[s] += message_passing_baseline(ds, bc).combined.metrics->nmi / kSeeds;
    }
  }
  bool monotone = true;
  for (std::size_t s = 1; s < sim.size(); ++s) monotone = monotone && sim[s] >= sim[s - 1] - 0.02;
  const double raw_mean = mean(raw);
  double raw_dev = 0.0;
  for (double r : raw) raw_dev = std::max(raw_dev, std::abs(r - raw_mean));
  bool pattern_rises = true;
  for (std::size_t s = 1; s < pattern.size(); ++s) pattern_rises = pattern_rises && pattern[s] > pattern[s - 1];
  const double secs = seconds_since(start);
  const bool ok = monotone && raw_dev <= 0.05 && max_direct <= 0.3 && pattern_rises && secs < 300.0;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("levels {}: direct hr {} (max {:.3f}), neighbor-pattern hr {}; sim NMI {}; "
                      "raw NMI {} (max dev {:.3f}); {:.1f}s",
                      strengths.size(), join(direct), max_direct, join(pattern), join(sim), join(raw),
                      raw_dev, secs)};
}

// Full-model results on the hr sweep are shared with the ablation.
struct SweepCache {
  bool done = false;
  std::vector<double> smhgc;  // mean over seeds per hr
  std::vector<double> raw;
  std::map<std::uint64_t, double> full_at_03;  // per seed
  double seconds = 0.0;
};

SweepCache& sweep_cache() {
  static SweepCache cache;
  return cache;
}

constexpr std::uint64_t kTrainSeeds = 3;

void run_sweep() {
  SweepCache& c = sweep_cache();
  if (c.done) return;
  const auto start = Clock::now();
  const std::vector<double> grid = hr_grid_01_09();
  c.smhgc.assign(grid.size(), 0.0);
  c.raw.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::uint64_t seed = 0; seed < kTrainSeeds; ++seed) {
      const MultiViewDataset ds = planted_dataset(sweep_spec(grid[i], seed));
      SmhgcConfig cfg;
      cfg.seed = seed;
      const double full = smhgc_nmi(ds, cfg);
      c.smhgc[i] += full / kTrainSeeds;
      c.raw[i] += raw_baseline_nmi(ds, seed, 2) / kTrainSeeds;
      if (std::abs(grid[i] - 0.3) < 1e-9) c.full_at_03[seed] = full;
      std::fprintf(stderr, "  sweep hr %.1f seed %llu: smhgc %.3f\n", grid[i],
                   static_cast<unsigned long long>(seed), full);
    }
  }
  c.seconds = seconds_since(start);
  c.done = true;
}

Outcome robustness() {
  run_sweep();
  const SweepCache& c = sweep_cache();
  const double r_model = range(c.smhgc);
  const double r_raw = range(c.raw);
  const bool ok = r_model <= 0.15 && r_raw >= 0.30 && c.seconds < 1800.0;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("SMHGC NMI by hr {} (range {:.3f}, need <= 0.15); raw NMI {} (range {:.3f}, "
                      "need >= 0.30); {} seeds; {:.0f}s",
                      join(c.smhgc), r_model, join(c.raw), r_raw, kTrainSeeds, c.seconds)};
}

Outcome ablation() {
  run_sweep();
  const auto start = Clock::now();
  const SweepCache& c = sweep_cache();
  double full = 0.0, no_sim = 0.0, no_ax = 0.0;
  for (std::uint64_t seed = 0; seed < kTrainSeeds; ++seed) {
    const MultiViewDataset ds = planted_dataset(sweep_spec(0.3, seed));
    full += c.full_at_03.at(seed) / kTrainSeeds;
    SmhgcConfig cfg;
    cfg.seed = seed;
    cfg.use_sim_loss = false;
    no_sim += smhgc_nmi(ds, cfg) / kTrainSeeds;
    cfg.use_sim_loss = true;
    cfg.use_ax = false;
    no_ax += smhgc_nmi(ds, cfg) / kTrainSeeds;
  }
  // The full runs are reused from the sweep; count their share of its time.
  const double secs = seconds_since(start) + c.seconds / 9.0;
  const bool ok = full - no_sim >= 0.05 && full - no_ax >= 0.05 && secs < 900.0;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("hr 0.3, {} seeds: full {:.3f}, w/o L_sim {:.3f} (margin {:+.3f}), w/o A_x {:.3f} "
                      "(margin {:+.3f}), need >= 0.05; {:.0f}s",
                      kTrainSeeds, full, no_sim, full - no_sim, no_ax, full - no_ax, secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Drops the timing column, the only field of sweep.csv expected to vary.
std::string without_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() > 11) cells[11].clear();
    for (const auto& c : cells) out += c + ",";
    out += "\n";
  }
  return out;
}

Outcome determinism(const std::string& cli) {
  const auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / "smhgc_acceptance_determinism";
  fs::remove_all(root);
  auto sh = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string data = (root / "data" / "hr_0.3").string();
  if (sh(fmt::format("synth --planted --nodes 150 --block-width 5 --hr-grid 0.3 --seed 5 --out {}",
                     (root / "data").string())) != 0) {
    return {Outcome::fail, "synth failed"};
  }
  const std::vector<std::string> commands{
      "synth --planted --nodes 150 --block-width 5 --hr-grid 0.3,0.6 --seed 5",
      "analyze --dataset " + data,
      "baseline --dataset " + data + " --seed 3",
      "train --dataset " + data + " --epochs 60 --seed 3",
      "eval --dataset " + data + " --seed 3 --checkpoint " + (root / "train_a" / "checkpoint.bin").string(),
      "sweep --dataset " + data + " --epochs 20 --seed 3 --k-grid 10,15",
  };
  const std::vector<std::string> names{"synth", "analyze", "baseline", "train", "eval", "sweep"};
  int compared = 0;
  std::vector<std::string> diffs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    for (const char* side : {"_a", "_b"}) {
      const int rc = sh(commands[i] + " --out " + (root / (names[i] + side)).string());
      if (rc != 0) return {Outcome::fail, fmt::format("{} exited with status {}", names[i], rc)};
    }
    for (const auto& entry : fs::recursive_directory_iterator(root / (names[i] + "_a"))) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), root / (names[i] + "_a"));
      const fs::path other = root / (names[i] + "_b") / rel;
      std::string a = slurp(entry.path()), b = slurp(other);
      if (rel.filename() == "run.json") {
        auto ja = nlohmann::json::parse(a), jb = nlohmann::json::parse(b);
        ja["config"].erase("out");
        jb["config"].erase("out");
        a = ja.dump();
        b = jb.dump();
      } else if (rel.filename() == "sweep.csv") {
        a = without_seconds(a);
        b = without_seconds(b);
      }
      ++compared;
      if (a != b) diffs.push_back(names[i] + "/" + rel.string());
    }
  }
  fs::remove_all(root);
  const double secs = seconds_since(start);
  return {diffs.empty() && compared > 0 && secs < 300.0 ? Outcome::pass : Outcome::fail,
          fmt::format("{} commands x 2 runs, {} output files compared, {} differ{}; {:.1f}s",
                      commands.size(), compared, diffs.size(),
                      diffs.empty() ? "" : " (" + diffs.front() + ")", secs)};
}

Outcome real_data() {
  const char* dir = std::getenv("SMHGC_ACM_DIR");
  if (!dir || !*dir) return {Outcome::skip, "set SMHGC_ACM_DIR to a converted ACM dataset to run"};
  const MultiViewDataset ds = load_dataset(dir);
  SmhgcConfig cfg;
  const double v = smhgc_nmi(ds, cfg);
  return {v >= 0.70 ? Outcome::pass : Outcome::fail,
          fmt::format("NMI {:.3f} with defaults (need >= 0.70)", v)};
}

}  // namespace

int main(int argc, char** argv) {
  log().set_level(spdlog::level::warn);
  const std::string cli = SMHGC_CLI_PATH;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient", gradient_suite},
      {"oracle", oracle_suite},
      {"generator", generator_suite},
      {"observation1", observation_one},
      {"observation2", observation_two},
      {"robustness", robustness},
      {"ablation", ablation},
      {"determinism", [&] { return determinism(cli); }},
      {"real_data", real_data},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("error: ") + e.what()};
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    failures += o.status == Outcome::fail;
    std::printf("%s %s: %s\n", tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
