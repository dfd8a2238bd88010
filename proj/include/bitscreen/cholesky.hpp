#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace bitscreen {

// Append-only upper-triangular Cholesky factor of X_gamma^T X_gamma + lambda*I
// in screening-path order, stored packed by columns. log_det accumulates
// log(diagonal); no downdating, the screening path only grows.
class TriangularFactor {
 public:
  Eigen::Index order() const { return order_; }
  double log_det() const { return log_det_; }
  const std::vector<Eigen::Index>& path_order() const { return path_; }

  // Appends column (alpha, b); alpha must have size order(). b <= 0 signals
  // numerical breakdown and throws.
  void append(std::span<const double> alpha, double b, Eigen::Index column_index);

  double diag(Eigen::Index k) const { return data_[offset(k) + static_cast<std::size_t>(k)]; }

  // In-place solves against the packed factor.
  void solve_transposed_in_place(std::span<double> x) const;  // R^T x = rhs
  void solve_in_place(std::span<double> x) const;             // R  x = rhs

  Eigen::MatrixXd dense() const;

 private:
  std::size_t offset(Eigen::Index col) const {
    return static_cast<std::size_t>(col) * static_cast<std::size_t>(col + 1) / 2;
  }
  std::vector<double> data_;  // column j occupies entries [offset(j), offset(j)+j]
  std::vector<Eigen::Index> path_;
  Eigen::Index order_ = 0;
  double log_det_ = 0.0;
};

TriangularFactor& cholesky_append(TriangularFactor& f, std::span<const double> alpha, double b,
                                  Eigen::Index column_index);
Eigen::VectorXd tri_solve_lower(const TriangularFactor& f, Eigen::VectorXd rhs);  // R^T x = rhs
Eigen::VectorXd tri_solve_upper(const TriangularFactor& f, Eigen::VectorXd rhs);  // R x = rhs

}  // namespace bitscreen
