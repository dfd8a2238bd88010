#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace bitscreen {

// Raw covariate matrix plus per-column centering/scaling statistics. The
// standardized matrix X with columns X_j = (Z_j - mean_j)/sd_j is never
// materialized; every operation applies the centering algebraically. The SD
// convention is the population one (divide by n), so ||X_j||^2 = n for every
// admissible column. Immutable after construction and shareable across threads.
struct StandardizedDesign {
  bool is_sparse = false;
  Eigen::MatrixXd dense;                    // n x p when dense
  Eigen::SparseMatrix<double> sparse;       // CSC when sparse
  Eigen::VectorXd col_means;
  Eigen::VectorXd col_sds;                  // population SD; 0 for constant columns
  std::vector<std::uint8_t> admissible;     // 0 for zero-SD columns
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index n_admissible = 0;
  std::vector<std::string> col_names;       // optional, from CSV headers
};

// Centered response, rescaled so ||y_tilde||^2 = n. `scale` records the factor
// applied to y - ybar; selection paths and stop decisions are invariant to it.
struct CenteredResponse {
  Eigen::VectorXd y_tilde;
  double ybar = 0.0;
  double scale = 1.0;
  double norm2 = 0.0;  // computed ||y_tilde||^2, equals n up to rounding
};

StandardizedDesign standardize(const Eigen::MatrixXd& z);
StandardizedDesign standardize(const Eigen::SparseMatrix<double>& z);

CenteredResponse center_response(const Eigen::VectorXd& y);

// X^T v without materializing X; inadmissible entries are 0. Parallel over a
// fixed column-chunk grid, so results are bit-identical across thread counts.
Eigen::VectorXd xt_v(const StandardizedDesign& d, const Eigen::Ref<const Eigen::VectorXd>& v);

// Single standardized column (dense) and its dot with an arbitrary vector.
Eigen::VectorXd x_col(const StandardizedDesign& d, Eigen::Index j);
double x_col_dot(const StandardizedDesign& d, Eigen::Index j,
                 const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace bitscreen
