#include "dataset_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace heterolp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return in;
}

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::size_t count_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(ErrorCode::kParse, std::string("manifest: '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Manifest read_manifest(const fs::path& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": invalid JSON: " + e.what());
  }
  const fs::path base = path.parent_path();
  Manifest m;
  try {
    m.name = j.value("name", path.stem().string());
    m.num_nodes = count_field(j, "num_nodes");
    m.num_classes = static_cast<int>(count_field(j, "num_classes"));
    if (j.contains("num_edges")) m.num_edges = count_field(j, "num_edges");
    if (j.contains("num_features")) m.num_features = count_field(j, "num_features");
    m.edges = base / j.at("edges").get<std::string>();
    m.labels = base / j.at("labels").get<std::string>();
    m.features = base / j.at("features").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  require(m.num_classes >= 1, "manifest: num_classes must be at least 1");
  return m;
}

Graph read_edge_list(const fs::path& path, std::size_t num_nodes) {
  std::ifstream in = open_input(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    const auto tab = s.find_first_of("\t ");
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (tab == std::string_view::npos || !parse_number(s.substr(0, tab), u) ||
        !parse_number(s.substr(tab + 1), v)) {
      parse_error(path, lineno, "expected 'u<TAB>v', got '" + std::string(s) + "'");
    }
    if (u >= num_nodes || v >= num_nodes) {
      parse_error(path, lineno, "node id outside [0, " + std::to_string(num_nodes) + ")");
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  return Graph::from_edges(num_nodes, edges);
}

Labels read_labels(const fs::path& path, std::size_t num_nodes, int classes) {
  std::ifstream in = open_input(path);
  Labels labels;
  labels.reserve(num_nodes);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    std::int32_t y = 0;
    if (!parse_number(s, y)) parse_error(path, lineno, "expected an integer class, got '" + std::string(s) + "'");
    if (y < 0 || y >= classes) {
      parse_error(path, lineno, "class " + std::to_string(y) + " outside [0, " + std::to_string(classes) + ")");
    }
    labels.push_back(y);
  }
  if (labels.size() != num_nodes) {
    fail(ErrorCode::kParse, path.string() + ": declared " + std::to_string(num_nodes) +
                                " nodes, parsed " + std::to_string(labels.size()) + " labels");
  }
  return labels;
}

Mat read_features(const fs::path& path, std::size_t num_nodes) {
  std::ifstream in = open_input(path);
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      const auto field = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      double x = 0.0;
      if (!parse_number(field, x)) {
        parse_error(path, lineno, "field " + std::to_string(count + 1) + " is not a number");
      }
      values.push_back(x);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      parse_error(path, lineno, "expected " + std::to_string(cols) + " columns, got " + std::to_string(count));
    }
    ++rows;
  }
  if (rows != num_nodes) {
    fail(ErrorCode::kParse, path.string() + ": declared " + std::to_string(num_nodes) +
                                " nodes, parsed " + std::to_string(rows) + " feature rows");
  }
  Mat x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), x.data());
  return x;
}

Dataset load_dataset(const fs::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  Dataset d;
  d.name = m.name;
  d.classes = m.num_classes;
  d.graph = read_edge_list(m.edges, m.num_nodes);
  d.labels = read_labels(m.labels, m.num_nodes, m.num_classes);
  d.features = read_features(m.features, m.num_nodes);
  if (m.num_edges && *m.num_edges != d.graph.num_edges()) {
    fail(ErrorCode::kParse, manifest_path.string() + ": declared " + std::to_string(*m.num_edges) +
                                " edges, parsed " + std::to_string(d.graph.num_edges()) +
                                " undirected edges");
  }
  if (m.num_features && *m.num_features != static_cast<std::size_t>(d.features.cols())) {
    fail(ErrorCode::kParse, manifest_path.string() + ": declared " + std::to_string(*m.num_features) +
                                " features, parsed " + std::to_string(d.features.cols()));
  }
  return d;
}

fs::path save_dataset(const Dataset& d, const fs::path& dir, const std::string& stem) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  auto open = [](const fs::path& p) {
    std::ofstream out(p);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + p.string() + "'");
    return out;
  };

  {
    std::ofstream out = open(dir / "edges.tsv");
    for (const Edge& e : d.graph.edge_list()) out << e.u << '\t' << e.v << '\n';
  }
  {
    std::ofstream out = open(dir / "labels.txt");
    for (std::int32_t y : d.labels) out << y << '\n';
  }
  {
    std::ofstream out = open(dir / "features.csv");
    char buf[32];
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
        const auto r = std::to_chars(buf, buf + sizeof buf, d.features(i, j));
        if (j > 0) out << ',';
        out.write(buf, r.ptr - buf);
      }
      out << '\n';
    }
  }
  json j = {{"name", d.name},
            {"num_nodes", d.graph.num_nodes()},
            {"num_edges", d.graph.num_edges()},
            {"num_classes", d.classes},
            {"num_features", d.features.cols()},
            {"edges", "edges.tsv"},
            {"labels", "labels.txt"},
            {"features", "features.csv"}};
  const fs::path manifest = dir / (stem + ".json");
  std::ofstream out = open(manifest);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "failed writing '" + manifest.string() + "'");
  return manifest;
}

}  // namespace heterolp
