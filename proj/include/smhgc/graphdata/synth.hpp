#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smhgc/graphdata/dataset.hpp"
#include "smhgc/numcore/rng.hpp"

namespace smhgc {

struct SynthSpec {
  double target_hr = 0.0;
  // Synthesis always keeps the source's undirected edge count.
  static constexpr bool preserve_edge_count = true;
  std::uint64_t seed = 0;
};

// Draws `num_edges` distinct undirected pairs, exactly `num_same` of them
// between equal labels, each group uniformly without replacement. Returns
// pairs with u < v in ascending order. Throws FeasibilityError when either
// group has too few candidate pairs.
std::vector<Edge> sample_labeled_edges(std::span<const int> labels, std::size_t num_edges,
                                       std::size_t num_same, Rng& rng);

// Redraws every edge of `source` so the result has the same edge count and
// round(target_hr * E) homophilous edges. Features are copied unchanged.
GraphView synthesize_view(const GraphView& source, std::span<const int> labels,
                          const SynthSpec& spec);
GraphView synthesize_view(const GraphView& source, std::span<const int> labels,
                          const SynthSpec& spec, Rng& rng);

// One dataset per grid point, every view regenerated at that ratio. Each
// view's stream depends only on (seed, hr, view index).
std::vector<MultiViewDataset> sweep_synthesize(const MultiViewDataset& source,
                                               std::span<const double> hr_grid,
                                               std::uint64_t seed);

// Seed used by sweep_synthesize for a (hr, view) pair.
std::uint64_t synth_seed(std::uint64_t seed, double hr, std::size_t view);

// Planted-partition generator for desk-scale experiments: balanced shuffled
// labels, block features (class c lights up its own block of
// `block_width` columns with `signal`) plus Gaussian noise drawn
// independently per view, and a random graph per view with
// avg_degree * N / 2 edges at homophily ratio `hr`.
struct PlantedSpec {
  int num_nodes = 300;
  int num_clusters = 3;
  int num_views = 2;
  int block_width = 10;
  double signal = 1.0;
  double noise = 1.0;
  double avg_degree = 10.0;
  double hr = 0.5;
  std::uint64_t seed = 0;
};

MultiViewDataset planted_dataset(const PlantedSpec& spec);

// Heterophilous graph whose neighbor patterns carry the class. Each class c
// owns a hub pool drawn uniformly from all nodes (so hubs carry no label
// bias); a `pattern_strength` share of the edges join a non-hub node of
// class c to a hub of pool c, the remaining edges join uniformly random
// pairs. Increasing the strength raises the homophily of A A^T while the
// class mix of every node's neighborhood stays uniform in expectation.
struct PatternSpec {
  double pattern_strength = 0.0;
  double hub_fraction = 0.2;
  std::size_t num_edges = 1500;
};

DenseMatrix pattern_heterophily_graph(std::span<const int> labels, int num_clusters,
                                      const PatternSpec& spec, Rng& rng);

}  // namespace smhgc
