#pragma once

#include <filesystem>

#include "smhgc/graphdata/dataset.hpp"

namespace smhgc {

// Dataset directory layout:
//   metadata.json        {"n_nodes", "n_views", "n_clusters",
//                         "views": [{"edges", "features"}...], "labels": file | null}
//   viewK.edges.tsv      "u<TAB>v" per line, 0-based, undirected
//   viewK.features.csv   N rows of comma-separated floats, no header
//   labels.csv           N lines, one integer each
//
// Loading symmetrizes the edges and re-adds self-loops. Throws LoadError
// naming the offending file (and line, where there is one).
MultiViewDataset load_dataset(const std::filesystem::path& dir);

// Writes the layout above. Edges are written once each (u < v) without
// self-loops; floats use round-trip precision so loading restores the
// in-memory model exactly.
void save_dataset(const MultiViewDataset& dataset, const std::filesystem::path& dir);

}  // namespace smhgc
