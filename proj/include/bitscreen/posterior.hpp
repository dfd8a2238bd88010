#pragma once

#include <vector>

#include <Eigen/Core>

#include "bitscreen/design.hpp"

namespace bitscreen {

struct Hyperparams {
  double lambda = 1.0;  // ridge precision, > 0
  double w = 0.1;       // prior inclusion probability, in (0, 1)

  void validate() const;
  double log_prior_odds() const;  // log(w / (1 - w))
};

// Sorted set of selected column indices, |gamma| < n.
using ModelIndex = std::vector<Eigen::Index>;

// Ridge partial quantities of candidate i given the columns in gamma.
// r carries the leading minus sign of the defining expression
// -v_xy / sqrt(v_cond * v_resid); every downstream use depends only on r^2.
struct RidgePartials {
  double v_cond = 0.0;   // ridge partial variance of X_i given X_gamma
  double v_xy = 0.0;     // ridge partial covariance of y and X_i given X_gamma
  double v_resid = 0.0;  // ridge partial variance of y given X_gamma (= RSS_lambda / n)
  double r = 0.0;        // ridge partial correlation, signed as defined
  double r2() const { return r * r; }
};

// Marginal log posterior log f(gamma | y) up to the shared additive constant,
// which is fixed to 0: (|g|/2)log(lambda) - (1/2)log|X_g^T X_g + lambda I|
// - ((n-1)/2)log RSS_lambda(g) + |g| log(w/(1-w)). Fresh dense factorization
// on every call; this is the reference path, independent of the fast engine.
double log_posterior_exact(const StandardizedDesign& d, const CenteredResponse& y,
                           const ModelIndex& gamma, const Hyperparams& h);

// log f(empty | y) in the same convention.
double null_log_posterior(const CenteredResponse& y, Eigen::Index n);

RidgePartials ridge_partials(const StandardizedDesign& d, const CenteredResponse& y,
                             const ModelIndex& gamma, Eigen::Index i, const Hyperparams& h);

// log [ f(gamma + e_i | y) / f(gamma | y) ] evaluated through the ridge
// partial quantities: log(w/(1-w)) + (1/2)log(lambda/n) - (1/2)log v_cond
// - ((n-1)/2) log(1 - R^2). Computed entirely in log space.
double log_posterior_ratio_via_partials(const StandardizedDesign& d, const CenteredResponse& y,
                                        const ModelIndex& gamma, Eigen::Index i,
                                        const Hyperparams& h);

struct OracleResult {
  std::vector<Eigen::Index> path;
  std::vector<double> trace;  // trace[0] = null model, trace[k] = after k inclusions
};

// Greedy reference path: at every step evaluates log_posterior_exact for every
// admissible candidate and takes the argmax (ties to the lowest index).
// Cost O(steps * p * k^3); guarded by max_p.
OracleResult oracle_greedy_path(const StandardizedDesign& d, const CenteredResponse& y,
                                const Hyperparams& h, Eigen::Index steps,
                                Eigen::Index max_p = 5000);

}  // namespace bitscreen
