#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace heterolp {

// Node-indexed matrices are row-major so that one node's row is contiguous;
// the CSR kernels stream whole rows.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Every stochastic operation takes an explicitly seeded engine.
using Rng = std::mt19937_64;

using NodeId = std::uint32_t;
using NodeList = std::vector<NodeId>;

// Hard labels, one per node. kUnlabeled marks nodes outside the owning set.
using Labels = std::vector<std::int32_t>;
inline constexpr std::int32_t kUnlabeled = -1;

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kNumeric = 4,
  kCapacity = 5,
  kState = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::kInvalidArgument, what);
}

// Non-fatal diagnostics (dropped columns, absent classes, isolated nodes).
// The default sink writes to stderr; the C API and tests replace it.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

// One-hot encoding of `labels` into an n x c matrix; unlabeled rows stay zero.
Mat one_hot(const Labels& labels, int classes);

// Row-wise argmax, ties to the smallest index; all-zero rows give kUnlabeled.
Labels argmax_rows(const Mat& m);

}  // namespace heterolp
