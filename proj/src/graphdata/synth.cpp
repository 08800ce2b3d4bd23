#include "smhgc/graphdata/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>

namespace smhgc {

namespace {

// Enumerates same-label and cross-label node pairs without materializing
// them, so sampling indices can be decoded in O(1) or O(log K).
class PairSpace {
 public:
  explicit PairSpace(std::span<const int> labels) {
    int k = 0;
    for (int y : labels) {
      if (y < 0) throw ContractError("edge sampling: negative label");
      k = std::max(k, y + 1);
    }
    members_.resize(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      members_[labels[i]].push_back(static_cast<int>(i));
    }
    same_offsets_.push_back(0);
    for (const auto& m : members_) {
      const std::uint64_t n = m.size();
      same_offsets_.push_back(same_offsets_.back() + n * (n - (n > 0 ? 1 : 0)) / 2);
    }
    cross_offsets_.push_back(0);
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        blocks_.emplace_back(a, b);
        cross_offsets_.push_back(cross_offsets_.back() +
                                 static_cast<std::uint64_t>(members_[a].size()) * members_[b].size());
      }
    }
  }

  std::uint64_t same_pairs() const { return same_offsets_.back(); }
  std::uint64_t cross_pairs() const { return cross_offsets_.back(); }

  Edge decode_same(std::uint64_t index) const {
    const auto it = std::upper_bound(same_offsets_.begin(), same_offsets_.end(), index);
    const std::size_t c = static_cast<std::size_t>(it - same_offsets_.begin()) - 1;
    const std::uint64_t t = index - same_offsets_[c];
    // Column-major strict upper triangle: t = b(b-1)/2 + a with a < b.
    auto b = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
    while (b * (b - 1) / 2 > t) --b;
    while ((b + 1) * b / 2 <= t) ++b;
    const std::uint64_t a = t - b * (b - 1) / 2;
    return ordered(members_[c][a], members_[c][b]);
  }

  Edge decode_cross(std::uint64_t index) const {
    const auto it = std::upper_bound(cross_offsets_.begin(), cross_offsets_.end(), index);
    const std::size_t block = static_cast<std::size_t>(it - cross_offsets_.begin()) - 1;
    const std::uint64_t t = index - cross_offsets_[block];
    const auto [a, b] = blocks_[block];
    const std::uint64_t width = members_[b].size();
    return ordered(members_[a][t / width], members_[b][t % width]);
  }

 private:
  static Edge ordered(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

  std::vector<std::vector<int>> members_;
  std::vector<std::uint64_t> same_offsets_;
  std::vector<std::uint64_t> cross_offsets_;
  std::vector<std::pair<int, int>> blocks_;
};

std::string format_ratio(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

}  // namespace

std::vector<Edge> sample_labeled_edges(std::span<const int> labels, std::size_t num_edges,
                                       std::size_t num_same, Rng& rng) {
  if (num_same > num_edges) throw ContractError("edge sampling: num_same exceeds num_edges");
  const PairSpace space(labels);
  const std::uint64_t same_avail = space.same_pairs();
  const std::uint64_t cross_avail = space.cross_pairs();
  const std::size_t num_cross = num_edges - num_same;
  if (num_same > same_avail || num_cross > cross_avail) {
    const double e = static_cast<double>(std::max<std::size_t>(num_edges, 1));
    const double lo = num_edges > cross_avail ? static_cast<double>(num_edges - cross_avail) / e : 0.0;
    const double hi = std::min<double>(static_cast<double>(same_avail), e) / e;
    throw FeasibilityError(
        "infeasible homophily target: need " + std::to_string(num_same) + " same-label and " +
            std::to_string(num_cross) + " cross-label edges but only " +
            std::to_string(same_avail) + " and " + std::to_string(cross_avail) +
            " pairs exist; achievable hr range is [" + format_ratio(lo) + ", " +
            format_ratio(hi) + "]",
        lo, hi);
  }
  std::vector<Edge> edges;
  edges.reserve(num_edges);
  for (std::uint64_t idx : rng.sample_without_replacement(same_avail, num_same)) {
    edges.push_back(space.decode_same(idx));
  }
  for (std::uint64_t idx : rng.sample_without_replacement(cross_avail, num_cross)) {
    edges.push_back(space.decode_cross(idx));
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

GraphView synthesize_view(const GraphView& source, std::span<const int> labels,
                          const SynthSpec& spec) {
  Rng rng(spec.seed);
  return synthesize_view(source, labels, spec, rng);
}

GraphView synthesize_view(const GraphView& source, std::span<const int> labels,
                          const SynthSpec& spec, Rng& rng) {
  if (static_cast<Eigen::Index>(labels.size()) != source.num_nodes()) {
    throw DimensionError("synthesize_view: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(source.num_nodes()) + " nodes");
  }
  if (!(spec.target_hr >= 0.0 && spec.target_hr <= 1.0)) {
    throw ContractError("synthesize_view: target_hr must lie in [0, 1]");
  }
  const std::size_t e = edge_count(source.adjacency);
  const auto same = static_cast<std::size_t>(std::llround(spec.target_hr * static_cast<double>(e)));
  const std::vector<Edge> edges = sample_labeled_edges(labels, e, same, rng);
  GraphView out;
  out.adjacency = adjacency_from_edges(source.num_nodes(), edges);
  out.features = source.features;
  return out;
}

std::uint64_t synth_seed(std::uint64_t seed, double hr, std::size_t view) {
  const auto hr_key = static_cast<std::uint64_t>(std::llround(hr * 1e6));
  return Rng(seed).derive(hr_key).derive(view).seed();
}

std::vector<MultiViewDataset> sweep_synthesize(const MultiViewDataset& source,
                                               std::span<const double> hr_grid,
                                               std::uint64_t seed) {
  const Labels& labels = source.require_labels("sweep_synthesize");
  std::vector<MultiViewDataset> out;
  out.reserve(hr_grid.size());
  for (double hr : hr_grid) {
    MultiViewDataset ds;
    ds.labels = source.labels;
    ds.num_clusters = source.num_clusters;
    for (std::size_t v = 0; v < source.views.size(); ++v) {
      SynthSpec spec{.target_hr = hr, .seed = synth_seed(seed, hr, v)};
      ds.views.push_back(synthesize_view(source.views[v], labels, spec));
    }
    out.push_back(std::move(ds));
  }
  return out;
}

MultiViewDataset planted_dataset(const PlantedSpec& spec) {
  if (spec.num_clusters < 2 || spec.num_nodes < spec.num_clusters || spec.num_views < 1 ||
      spec.block_width < 1) {
    throw ContractError("planted_dataset: invalid sizes");
  }
  Rng rng(spec.seed);
  Rng label_rng = rng.derive(1);
  Labels labels(spec.num_nodes);
  for (int i = 0; i < spec.num_nodes; ++i) labels[i] = i % spec.num_clusters;
  label_rng.shuffle(std::span<int>(labels));

  const auto num_edges = static_cast<std::size_t>(
      std::llround(spec.avg_degree * static_cast<double>(spec.num_nodes) / 2.0));
  const auto num_same =
      static_cast<std::size_t>(std::llround(spec.hr * static_cast<double>(num_edges)));

  MultiViewDataset ds;
  ds.num_clusters = spec.num_clusters;
  for (int v = 0; v < spec.num_views; ++v) {
    Rng feature_rng = rng.derive(100 + v);
    DenseMatrix x(spec.num_nodes, spec.num_clusters * spec.block_width);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const bool in_block = j / spec.block_width == labels[i];
        x(i, j) = (in_block ? spec.signal : 0.0) + spec.noise * feature_rng.normal();
      }
    }
    Rng edge_rng = rng.derive(200 + v);
    const std::vector<Edge> edges = sample_labeled_edges(labels, num_edges, num_same, edge_rng);
    ds.views.push_back(GraphView{adjacency_from_edges(spec.num_nodes, edges), std::move(x)});
  }
  ds.labels = std::move(labels);
  return ds;
}

DenseMatrix pattern_heterophily_graph(std::span<const int> labels, int num_clusters,
                                      const PatternSpec& spec, Rng& rng) {
  const auto n = static_cast<int>(labels.size());
  if (num_clusters < 2 || n < 2 * num_clusters) {
    throw ContractError("pattern_heterophily_graph: too few nodes");
  }
  if (spec.pattern_strength < 0.0 || spec.pattern_strength > 1.0) {
    throw ContractError("pattern_heterophily_graph: pattern_strength must lie in [0, 1]");
  }
  const std::uint64_t max_edges = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (spec.num_edges > max_edges / 2) {
    throw ContractError("pattern_heterophily_graph: too many edges for rejection sampling");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  const auto num_hubs = std::max<int>(
      num_clusters, static_cast<int>(std::lround(spec.hub_fraction * static_cast<double>(n))));
  std::vector<std::vector<int>> pools(num_clusters);
  std::vector<bool> is_hub(n, false);
  for (int h = 0; h < num_hubs; ++h) {
    pools[h % num_clusters].push_back(order[h]);
    is_hub[order[h]] = true;
  }
  std::vector<std::vector<int>> plain_members(num_clusters);
  std::vector<int> plain;
  for (int i = 0; i < n; ++i) {
    if (is_hub[i]) continue;
    plain_members[labels[i]].push_back(i);
    plain.push_back(i);
  }
  for (const auto& m : plain_members) {
    if (m.empty()) throw ContractError("pattern_heterophily_graph: a class has only hubs");
  }

  std::set<Edge> edges;
  auto insert = [&edges](int u, int v) {
    if (u == v) return false;
    return edges.insert(u < v ? Edge{u, v} : Edge{v, u}).second;
  };
  const auto structured = static_cast<std::size_t>(
      std::llround(spec.pattern_strength * static_cast<double>(spec.num_edges)));
  std::size_t pool_capacity = 0;
  for (int c = 0; c < num_clusters; ++c) pool_capacity += plain_members[c].size() * pools[c].size();
  if (structured > pool_capacity / 2) {
    throw ContractError("pattern_heterophily_graph: hub pools too small for the requested edges");
  }
  while (edges.size() < structured) {
    const int u = plain[rng.uniform_int(plain.size())];
    const int c = labels[u];
    const int hub = pools[c][rng.uniform_int(pools[c].size())];
    insert(u, hub);
  }
  while (edges.size() < spec.num_edges) {
    insert(static_cast<int>(rng.uniform_int(n)), static_cast<int>(rng.uniform_int(n)));
  }
  const std::vector<Edge> list(edges.begin(), edges.end());
  return adjacency_from_edges(n, list);
}

}  // namespace smhgc
