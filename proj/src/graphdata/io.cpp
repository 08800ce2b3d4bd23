#include "smhgc/graphdata/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "smhgc/log.hpp"

namespace smhgc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string where(const fs::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line);
}

std::ifstream open_input(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open " + file.string());
  return in;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

DenseMatrix read_features(const fs::path& file, Eigen::Index expected_rows) {
  std::ifstream in = open_input(file);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw LoadError(where(file, line_no) + ": malformed feature value '" + trim(cell) + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw LoadError(where(file, line_no) + ": expected " + std::to_string(rows.front().size()) +
                      " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (static_cast<Eigen::Index>(rows.size()) != expected_rows) {
    throw LoadError(file.string() + ": node count mismatch: " + std::to_string(rows.size()) +
                    " feature rows, metadata says " + std::to_string(expected_rows));
  }
  const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  DenseMatrix x(expected_rows, cols);
  for (Eigen::Index i = 0; i < expected_rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = rows[i][j];
  }
  return x;
}

DenseMatrix read_edges(const fs::path& file, Eigen::Index n) {
  std::ifstream in = open_input(file);
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    long long u = 0;
    long long v = 0;
    if (tab == std::string::npos || !parse_int(line.substr(0, tab), u) ||
        !parse_int(line.substr(tab + 1), v)) {
      throw LoadError(where(file, line_no) + ": expected 'u<TAB>v'");
    }
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw LoadError(where(file, line_no) + ": node count mismatch: edge (" + std::to_string(u) +
                      "," + std::to_string(v) + ") outside " + std::to_string(n) + " nodes");
    }
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }

  std::size_t loops = 0;
  for (const auto& [u, v] : edges) loops += (u == v);
  DenseMatrix directed = DenseMatrix::Zero(n, n);
  for (const auto& [u, v] : edges) directed(u, v) = 1.0;
  std::size_t one_sided = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) one_sided += (directed(i, j) != directed(j, i));
  }
  if (one_sided > 0) {
    log().info("{}: symmetrized {} single-direction edges", file.string(), one_sided);
  }
  if (loops < static_cast<std::size_t>(n)) {
    log().info("{}: added self-loops to {} nodes", file.string(),
                static_cast<std::size_t>(n) - loops);
  }
  return adjacency_from_edges(n, edges);
}

Labels read_labels(const fs::path& file, Eigen::Index n) {
  std::ifstream in = open_input(file);
  Labels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    long long y = 0;
    if (!parse_int(line, y) || y < 0 || y > std::numeric_limits<int>::max()) {
      throw LoadError(where(file, line_no) + ": non-integer label '" + trim(line) + "'");
    }
    labels.push_back(static_cast<int>(y));
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw LoadError(file.string() + ": node count mismatch: " + std::to_string(labels.size()) +
                    " labels, metadata says " + std::to_string(n));
  }
  return labels;
}

template <typename T>
T meta_field(const json& meta, const char* key, const fs::path& file) {
  if (!meta.contains(key)) throw LoadError(file.string() + ": missing field '" + key + "'");
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception& e) {
    throw LoadError(file.string() + ": field '" + key + "': " + e.what());
  }
}

}  // namespace

MultiViewDataset load_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "metadata.json";
  std::ifstream meta_in = open_input(meta_path);
  json meta;
  try {
    meta_in >> meta;
  } catch (const json::exception& e) {
    throw LoadError(meta_path.string() + ": " + e.what());
  }

  const auto n = meta_field<long long>(meta, "n_nodes", meta_path);
  const auto n_views = meta_field<long long>(meta, "n_views", meta_path);
  const auto k = meta_field<int>(meta, "n_clusters", meta_path);
  const auto views = meta_field<json>(meta, "views", meta_path);
  if (n <= 0) throw LoadError(meta_path.string() + ": n_nodes must be positive");
  if (!views.is_array() || static_cast<long long>(views.size()) != n_views || n_views < 1) {
    throw LoadError(meta_path.string() + ": 'views' must list n_views entries");
  }

  MultiViewDataset ds;
  ds.num_clusters = k;
  for (const json& entry : views) {
    const auto edges_file = meta_field<std::string>(entry, "edges", meta_path);
    const auto features_file = meta_field<std::string>(entry, "features", meta_path);
    GraphView view;
    view.features = read_features(dir / features_file, n);
    view.adjacency = read_edges(dir / edges_file, n);
    ds.views.push_back(std::move(view));
  }
  if (meta.contains("labels") && !meta.at("labels").is_null()) {
    ds.labels = read_labels(dir / meta_field<std::string>(meta, "labels", meta_path), n);
  }
  try {
    ds.validate();
  } catch (const ContractError& e) {
    throw LoadError(dir.string() + ": " + e.what());
  }
  return ds;
}

void save_dataset(const MultiViewDataset& dataset, const fs::path& dir) {
  dataset.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto open_output = [](const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    return out;
  };

  json meta;
  meta["n_nodes"] = dataset.num_nodes();
  meta["n_views"] = dataset.num_views();
  meta["n_clusters"] = dataset.num_clusters;
  meta["views"] = json::array();
  for (std::size_t v = 0; v < dataset.views.size(); ++v) {
    const std::string stem = "view" + std::to_string(v + 1);
    const std::string edges_name = stem + ".edges.tsv";
    const std::string features_name = stem + ".features.csv";
    meta["views"].push_back({{"edges", edges_name}, {"features", features_name}});

    std::ofstream edges = open_output(dir / edges_name);
    for (const auto& [u, w] : edge_list(dataset.views[v].adjacency)) edges << u << '\t' << w << '\n';

    std::ofstream features = open_output(dir / features_name);
    const DenseMatrix& x = dataset.views[v].features;
    char buf[32];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), x(i, j));
        if (j > 0) features << ',';
        features.write(buf, res.ptr - buf);
      }
      features << '\n';
    }
    if (!edges || !features) throw IoError("write failed under " + dir.string());
  }
  if (dataset.labels) {
    meta["labels"] = "labels.csv";
    std::ofstream labels = open_output(dir / "labels.csv");
    for (int y : *dataset.labels) labels << y << '\n';
  } else {
    meta["labels"] = nullptr;
  }
  std::ofstream meta_out = open_output(dir / "metadata.json");
  meta_out << meta.dump(2) << '\n';
  if (!meta_out) throw IoError("write failed: " + (dir / "metadata.json").string());
}

}  // namespace smhgc
