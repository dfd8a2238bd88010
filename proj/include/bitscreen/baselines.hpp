#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bitscreen/design.hpp"

namespace bitscreen {

// Ranking (SIS, HOLP) or greedy path (FR) of a reference screening method.
// scores align with order: |marginal correlation| for SIS, |projection
// coefficient| for HOLP, residual sum of squares after each step for FR.
struct BaselineResult {
  std::string method;
  std::vector<Eigen::Index> order;
  std::vector<double> scores;
  bool jitter_applied = false;  // HOLP only: Gram was singular, ridge jitter added

  std::vector<Eigen::Index> top(Eigen::Index m) const {
    m = std::min<Eigen::Index>(m, static_cast<Eigen::Index>(order.size()));
    return {order.begin(), order.begin() + m};
  }
};

// Ranks admissible columns by absolute marginal correlation, descending,
// ties broken by the lower index.
BaselineResult sis_rank(const StandardizedDesign& d, const CenteredResponse& y);

// High-dimensional least-squares projection: beta = X^T (X X^T)^{-1} y_tilde,
// ranked by |beta_j|. The n x n Gram is formed blockwise over columns with
// algebraic centering, so sparse designs are never densified. A singular Gram
// gets jitter 1e-8 * trace/n and sets jitter_applied.
BaselineResult holp_rank(const StandardizedDesign& d, const CenteredResponse& y);

// The signed projection coefficients behind holp_rank. Inadmissible entries
// are 0; *jitter_applied reports the singular-Gram fallback when non-null.
Eigen::VectorXd holp_coefficients(const StandardizedDesign& d, const CenteredResponse& y,
                                  bool* jitter_applied = nullptr);

// Forward regression: greedy maximization of the RSS drop (equivalently the
// absolute partial correlation), run on the delayed-update machinery with
// lambda = 0. Candidates with partial variance below 1e-10 * n are skipped.
BaselineResult fr_screen(const StandardizedDesign& d, const CenteredResponse& y,
                         Eigen::Index max_steps);

}  // namespace bitscreen
