#include "bitscreen/posterior.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "bitscreen/errors.hpp"

namespace bitscreen {

void Hyperparams::validate() const {
  if (!(lambda > 0.0)) throw config_error("lambda must be > 0, got " + std::to_string(lambda));
  if (!(w > 0.0 && w < 1.0)) throw config_error("w must be in (0, 1), got " + std::to_string(w));
}

double Hyperparams::log_prior_odds() const { return std::log(w) - std::log1p(-w); }

namespace {

void validate_model(const StandardizedDesign& d, const ModelIndex& gamma) {
  Eigen::Index prev = -1;
  for (Eigen::Index j : gamma) {
    if (j < 0 || j >= d.p) throw input_error("model index out of range");
    if (j <= prev) throw input_error("model indices must be sorted and unique");
    if (!d.admissible[static_cast<std::size_t>(j)])
      throw input_error("model contains inadmissible column " + std::to_string(j + 1));
    prev = j;
  }
  if (static_cast<Eigen::Index>(gamma.size()) >= d.n)
    throw input_error("model size must be < n");
}

struct ExactFit {
  double log_det = 0.0;  // log |X_g^T X_g + lambda I|
  double rss = 0.0;      // RSS_lambda(gamma)
  Eigen::MatrixXd cols;  // materialized X_gamma, reused by ridge_partials
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd q;     // L^{-1} X_g^T y_tilde
};

ExactFit exact_fit(const StandardizedDesign& d, const CenteredResponse& y,
                   const ModelIndex& gamma, double lambda) {
  validate_model(d, gamma);
  ExactFit f;
  const Eigen::Index k = static_cast<Eigen::Index>(gamma.size());
  if (k == 0) {
    f.rss = y.norm2;
    return f;
  }
  f.cols.resize(d.n, k);
  for (Eigen::Index c = 0; c < k; ++c) f.cols.col(c) = x_col(d, gamma[static_cast<std::size_t>(c)]);
  Eigen::MatrixXd gram = f.cols.transpose() * f.cols;
  gram.diagonal().array() += lambda;
  f.llt.compute(gram);
  if (f.llt.info() != Eigen::Success)
    throw numerical_error("log_posterior_exact: Gram factorization failed");
  const Eigen::MatrixXd& l = f.llt.matrixLLT();
  for (Eigen::Index c = 0; c < k; ++c) f.log_det += 2.0 * std::log(l(c, c));
  f.q = f.cols.transpose() * y.y_tilde;
  f.llt.matrixL().solveInPlace(f.q);
  f.rss = y.norm2 - f.q.squaredNorm();
  if (!(f.rss > 0.0))
    throw numerical_error("log_posterior_exact: non-positive ridge residual sum of squares");
  return f;
}

}  // namespace

double null_log_posterior(const CenteredResponse& y, Eigen::Index n) {
  return -0.5 * static_cast<double>(n - 1) * std::log(y.norm2);
}

double log_posterior_exact(const StandardizedDesign& d, const CenteredResponse& y,
                           const ModelIndex& gamma, const Hyperparams& h) {
  h.validate();
  ExactFit f = exact_fit(d, y, gamma, h.lambda);
  const double k = static_cast<double>(gamma.size());
  return 0.5 * k * std::log(h.lambda) - 0.5 * f.log_det -
         0.5 * static_cast<double>(d.n - 1) * std::log(f.rss) + k * h.log_prior_odds();
}

RidgePartials ridge_partials(const StandardizedDesign& d, const CenteredResponse& y,
                             const ModelIndex& gamma, Eigen::Index i, const Hyperparams& h) {
  h.validate();
  if (std::binary_search(gamma.begin(), gamma.end(), i))
    throw input_error("ridge_partials: candidate already in the model");
  ExactFit f = exact_fit(d, y, gamma, h.lambda);
  const double n = static_cast<double>(d.n);
  Eigen::VectorXd xi = x_col(d, i);
  RidgePartials rp;
  rp.v_resid = f.rss / n;
  if (gamma.empty()) {
    rp.v_cond = (xi.squaredNorm() + h.lambda) / n;
    rp.v_xy = xi.dot(y.y_tilde) / n;
  } else {
    Eigen::VectorXd s = f.cols.transpose() * xi;
    f.llt.matrixL().solveInPlace(s);
    rp.v_cond = (xi.squaredNorm() + h.lambda - s.squaredNorm()) / n;
    rp.v_xy = (xi.dot(y.y_tilde) - f.q.dot(s)) / n;
  }
  if (!(rp.v_cond > 0.0))
    throw numerical_error("ridge_partials: non-positive ridge partial variance");
  rp.r = -rp.v_xy / std::sqrt(rp.v_cond * rp.v_resid);
  return rp;
}

double log_posterior_ratio_via_partials(const StandardizedDesign& d, const CenteredResponse& y,
                                        const ModelIndex& gamma, Eigen::Index i,
                                        const Hyperparams& h) {
  RidgePartials rp = ridge_partials(d, y, gamma, i, h);
  const double r2 = rp.r2();
  if (r2 >= 1.0)
    throw numerical_error("posterior ratio: ridge partial correlation reached 1");
  return h.log_prior_odds() + 0.5 * (std::log(h.lambda) - std::log(static_cast<double>(d.n))) -
         0.5 * std::log(rp.v_cond) - 0.5 * static_cast<double>(d.n - 1) * std::log1p(-r2);
}

OracleResult oracle_greedy_path(const StandardizedDesign& d, const CenteredResponse& y,
                                const Hyperparams& h, Eigen::Index steps, Eigen::Index max_p) {
  h.validate();
  if (d.p > max_p)
    throw config_error("oracle_greedy_path: p = " + std::to_string(d.p) +
                       " exceeds the oracle cap " + std::to_string(max_p) +
                       " (raise the cap only for small problems; cost is O(steps * p * k^3))");
  if (steps >= d.n) throw input_error("oracle_greedy_path: steps must be < n");

  OracleResult res;
  res.trace.push_back(null_log_posterior(y, d.n));
  ModelIndex gamma;
  std::vector<std::uint8_t> in_model(static_cast<std::size_t>(d.p), 0);
  for (Eigen::Index step = 0; step < steps; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index best_j = -1;
    for (Eigen::Index j = 0; j < d.p; ++j) {
      if (in_model[static_cast<std::size_t>(j)] || !d.admissible[static_cast<std::size_t>(j)])
        continue;
      ModelIndex cand = gamma;
      cand.insert(std::upper_bound(cand.begin(), cand.end(), j), j);
      double lp = log_posterior_exact(d, y, cand, h);
      if (lp > best) {
        best = lp;
        best_j = j;
      }
    }
    if (best_j < 0) break;  // admissible columns exhausted
    gamma.insert(std::upper_bound(gamma.begin(), gamma.end(), best_j), best_j);
    in_model[static_cast<std::size_t>(best_j)] = 1;
    res.path.push_back(best_j);
    res.trace.push_back(best);
  }
  return res;
}

}  // namespace bitscreen
