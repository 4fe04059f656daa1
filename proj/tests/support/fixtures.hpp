// Glue between oracle-side instances (plain edge lists, Eigen dense) and the
// library types.
#pragma once

#include "oracles.hpp"

#include "graph.hpp"

#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

namespace fixture {

using namespace heterolp;

inline Graph graph_of(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<Edge> e;
  for (auto [u, v] : edges) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  return Graph::from_edges(static_cast<std::size_t>(n), e);
}

inline Mat to_mat(const oracle::Dense& d) { return Mat(d); }
inline oracle::Dense to_dense(const Mat& m) { return oracle::Dense(m); }

inline std::shared_ptr<const HopOperator> hop_of(const Graph& g, std::vector<double> lambda) {
  return std::make_shared<const HopOperator>(normalize(g, Normalization::kSymmetricSelfLoops), std::move(lambda));
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("heterolp-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
