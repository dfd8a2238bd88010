#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "bitscreen/design.hpp"

namespace bitscreen {

struct StopRule {
  enum class Kind { FixedSize, PosteriorProb, LargestDrop, Ebic } kind = Kind::FixedSize;
  Eigen::Index size = 0;          // FixedSize target
  Eigen::Index cap = -1;          // optional path cap for PP variants / EBIC (-1: use max_steps)
  bool ebic_include_null = false;

  static StopRule fixed(Eigen::Index m) { return {Kind::FixedSize, m, -1, false}; }
  static StopRule pp(Eigen::Index cap = -1) { return {Kind::PosteriorProb, 0, cap, false}; }
  static StopRule largest_drop(Eigen::Index cap = -1) { return {Kind::LargestDrop, 0, cap, false}; }
  static StopRule ebic(Eigen::Index cap = -1, bool include_null = false) {
    return {Kind::Ebic, 0, cap, include_null};
  }
};

// First-drop rule on a log-posterior trace: returns the size of the prefix
// before the first strict decrease. pi_trace[0] is compared against the null
// model's value; an immediate drop selects the empty model. A trace with no
// drop selects the full trace length.
Eigen::Index pp_decide(std::span<const double> pi_trace, double null_log_posterior);

// Size with the largest drop pi_m - pi_{m+1} over 1 <= m < cap (ties to the
// smallest m). Requires at least two trace entries.
Eigen::Index pp_largest_drop_decide(std::span<const double> pi_trace, Eigen::Index cap);

struct EbicResult {
  Eigen::Index size = 0;
  std::vector<double> ebic;           // ebic[k-1] = EBIC(k)
  std::vector<std::uint8_t> skipped;  // path entries treated as collinear (zero RSS drop)
  std::vector<std::uint8_t> floored;  // RSS underflowed the perfect-fit floor at this k
  double null_ebic = 0.0;
};

// EBIC(k) = log(rss_k / n) + k (log n + 2 log p) / n along the fixed path
// order, with rss_k the unpenalized least-squares residual of the first k
// entries. Collinear entries (pivot^2 below 1e-10 * n in the lambda = 0
// factor) contribute no RSS drop but still count in the penalty. Returns the
// argmin over 1 <= k <= max_k (0 allowed when include_null). Sizes whose RSS
// underflowed the perfect-fit floor (an interpolating model is a numerical
// breakdown, not a candidate) report a floored EBIC value but are excluded
// from the argmin.
EbicResult ebic_decide(const StandardizedDesign& d, const CenteredResponse& y,
                       std::span<const Eigen::Index> path, Eigen::Index max_k,
                       bool include_null = false);

Eigen::Index fixed_size_decide(std::span<const Eigen::Index> path, Eigen::Index m);

}  // namespace bitscreen
