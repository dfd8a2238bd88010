#include "bitscreen/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "bitscreen/errors.hpp"
#include "bitscreen/parallel.hpp"
#include "bitscreen/screen.hpp"

namespace bitscreen {

namespace {

void rank_by_score(const StandardizedDesign& d, const Eigen::VectorXd& score,
                   BaselineResult& res) {
  res.order.reserve(static_cast<std::size_t>(d.n_admissible));
  for (Eigen::Index j = 0; j < d.p; ++j)
    if (d.admissible[static_cast<std::size_t>(j)]) res.order.push_back(j);
  std::stable_sort(res.order.begin(), res.order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b]; });
  res.scores.reserve(res.order.size());
  for (Eigen::Index j : res.order) res.scores.push_back(score[j]);
}

}  // namespace

BaselineResult sis_rank(const StandardizedDesign& d, const CenteredResponse& y) {
  BaselineResult res;
  res.method = "sis";
  Eigen::VectorXd r = xt_v(d, y.y_tilde);
  // |correlation| = |X_j^T y| / (||X_j|| ||y||) = |r_j| / n
  Eigen::VectorXd score = r.array().abs() / static_cast<double>(d.n);
  rank_by_score(d, score, res);
  return res;
}

BaselineResult holp_rank(const StandardizedDesign& d, const CenteredResponse& y) {
  BaselineResult res;
  res.method = "holp";
  Eigen::VectorXd beta = holp_coefficients(d, y, &res.jitter_applied);
  Eigen::VectorXd score = beta.array().abs();
  rank_by_score(d, score, res);
  return res;
}

Eigen::VectorXd holp_coefficients(const StandardizedDesign& d, const CenteredResponse& y,
                                  bool* jitter_applied) {
  const Eigen::Index n = d.n;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);

  // K = sum_j X_j X_j^T via gemm over 512-column blocks. The decomposition
  // into a fixed number of stripes (independent of the worker count) keeps
  // the accumulation order, and hence the result, bit-identical across thread
  // settings while bounding extra memory at kStripes * n^2.
  constexpr std::int64_t kBlock = 512;
  constexpr std::int64_t kStripes = 8;
  auto stripes = chunk_grid(0, d.p, std::max<std::int64_t>(kBlock, (d.p + kStripes - 1) / kStripes));
  std::vector<Eigen::MatrixXd> partial(stripes.size());
  parallel_for_grid(stripes, [&](std::size_t c, std::int64_t lo, std::int64_t hi) {
    partial[c] = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd w(n, std::min<std::int64_t>(kBlock, hi - lo));
    for (std::int64_t b = lo; b < hi; b += kBlock) {
      Eigen::Index cols = 0;
      for (std::int64_t j = b; j < std::min(b + kBlock, hi); ++j) {
        if (!d.admissible[static_cast<std::size_t>(j)]) continue;
        w.col(cols++) = x_col(d, j);
      }
      partial[c].noalias() += w.leftCols(cols) * w.leftCols(cols).transpose();
    }
  });
  for (const auto& kpart : partial) gram += kpart;

  // Centered columns make X X^T rank deficient in the ones direction by
  // construction. Completing that direction with a rank-one term restores
  // definiteness without changing beta: X^T (t * 1_n) = 0 for any t.
  const double trace = gram.trace();
  gram.array() += trace / static_cast<double>(n * n);

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (jitter_applied) *jitter_applied = false;
  if (llt.info() != Eigen::Success) {
    double jitter = 1e-8 * trace / static_cast<double>(n);
    gram.diagonal().array() += jitter;
    llt.compute(gram);
    if (jitter_applied) *jitter_applied = true;
    if (llt.info() != Eigen::Success)
      throw numerical_error("holp: X X^T not positive definite even after jitter");
  }
  Eigen::VectorXd alpha = llt.solve(y.y_tilde);
  return xt_v(d, alpha);
}

BaselineResult fr_screen(const StandardizedDesign& d, const CenteredResponse& y,
                         Eigen::Index max_steps) {
  if (max_steps >= d.n) throw config_error("fr_screen: max_steps must be < n");
  BaselineResult res;
  res.method = "fr";
  ScreeningState s(d, y, 0.0, 0.0, false);
  const double resid_floor = 1e-12 * y.norm2;
  while (s.order() < max_steps) {
    if (!s.step(Selection::RssGain)) break;
    res.scores.push_back(s.residual2());  // per-step RSS
    if (s.residual2() <= resid_floor) break;
  }
  res.order = s.path();
  return res;
}

}  // namespace bitscreen
