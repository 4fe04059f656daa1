#include "common.hpp"

#include <iostream>
#include <mutex>

namespace heterolp {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink() {
  static WarningSink s = [](const std::string& msg) {
    std::cerr << "heterolp: warning: " << msg << '\n';
  };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  sink() = std::move(s);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink()) sink()(message);
}

Mat one_hot(const Labels& labels, int classes) {
  require(classes >= 1, "one_hot: class count must be positive");
  Mat out = Mat::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = labels[i];
    if (y == kUnlabeled) continue;
    if (y < 0 || y >= classes) {
      fail(ErrorCode::kInvalidArgument,
           "one_hot: label " + std::to_string(y) + " at node " +
               std::to_string(i) + " outside [0, " + std::to_string(classes) + ")");
    }
    out(static_cast<Eigen::Index>(i), y) = 1.0;
  }
  return out;
}

Labels argmax_rows(const Mat& m) {
  Labels out(static_cast<std::size_t>(m.rows()), kUnlabeled);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    bool any = false;
    Eigen::Index best = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) any = true;
      if (m(i, j) > m(i, best)) best = j;
    }
    if (any) out[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(best);
  }
  return out;
}

}  // namespace heterolp
