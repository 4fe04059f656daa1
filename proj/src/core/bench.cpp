#include "bench.hpp"

#include "embeddings.hpp"
#include "labelprop.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

namespace heterolp {

std::vector<ScalingPoint> bench_lp_fast(const ScalingBench& bench) {
  require(!bench.sizes.empty(), "bench_lp_fast: no sizes given");
  require(bench.repeats >= 1, "bench_lp_fast: repeats must be at least 1");
  SBMSpec base = bench.base;
  base.num_nodes = bench.sizes.front();
  const std::vector<SBMSample> series = generate_scaling_series(base, bench.sizes);

  ReconstructionParams params;
  EncoderConfig enc;
  enc.feat_dim = bench.feat_dim;
  enc.seed = base.seed;

  struct Prepared {
    SimilarityOperator s;
    Mat f0;
  };
  std::vector<Prepared> prepared;
  std::vector<ScalingPoint> points;
  for (const SBMSample& sample : series) {
    const Dataset& d = sample.dataset;
    auto adjacency = normalize(d.graph, Normalization::kSymmetricSelfLoops);
    auto hop = std::make_shared<const HopOperator>(adjacency, params.lambda);
    const Mat h0 = encode_initial(d.features, adjacency, enc);
    Mat hl = h0;
    hl.rowwise() -= hl.colwise().mean();
    prepared.push_back({SimilarityOperator::factored(reconstruct_woodbury(hl, h0, hop, params), params.normalize),
                        one_hot(d.labels, d.classes)});
    points.push_back({d.graph.num_nodes(), d.graph.num_edges(), std::numeric_limits<double>::infinity()});
  }

  // Repeats cycle over the sizes so that drifting machine load hits every
  // size alike instead of skewing the slope.
  for (std::size_t r = 0; r < bench.repeats; ++r) {
    for (std::size_t k = 0; k < prepared.size(); ++k) {
      // Calls are repeated until the sample is long enough to time reliably.
      std::size_t calls = 0;
      double sec = 0.0;
      const auto t0 = std::chrono::steady_clock::now();
      do {
        const PropagationResult out = lp_fast(prepared[k].s, prepared[k].f0, 0.6);
        require(out.f.rows() == prepared[k].f0.rows(), "bench_lp_fast: unexpected output shape");
        ++calls;
        sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } while (sec < bench.min_sample_seconds);
      points[k].seconds = std::min(points[k].seconds, sec / static_cast<double>(calls));
    }
  }
  return points;
}

double loglog_slope(const std::vector<ScalingPoint>& points) {
  require(points.size() >= 2, "loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const ScalingPoint& p : points) {
    require(p.num_nodes > 0 && p.seconds > 0.0, "loglog_slope: sizes and times must be positive");
    const double x = std::log(static_cast<double>(p.num_nodes));
    const double y = std::log(p.seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  require(den > 0.0, "loglog_slope: sizes must not all be equal");
  return (n * sxy - sx * sy) / den;
}

}  // namespace heterolp
