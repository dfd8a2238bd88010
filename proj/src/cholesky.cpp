#include "bitscreen/cholesky.hpp"

#include <cmath>

#include "bitscreen/errors.hpp"

namespace bitscreen {

void TriangularFactor::append(std::span<const double> alpha, double b,
                              Eigen::Index column_index) {
  if (static_cast<Eigen::Index>(alpha.size()) != order_)
    throw input_error("cholesky_append: alpha has size " + std::to_string(alpha.size()) +
                      ", expected " + std::to_string(order_));
  if (!(b > 0.0)) throw numerical_error("cholesky_append: non-positive pivot b = " + std::to_string(b));
  data_.insert(data_.end(), alpha.begin(), alpha.end());
  data_.push_back(b);
  path_.push_back(column_index);
  log_det_ += std::log(b);
  ++order_;
}

void TriangularFactor::solve_transposed_in_place(std::span<double> x) const {
  // forward substitution: row i of R^T is column i of R
  const Eigen::Index k = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    const double* col = data_.data() + offset(i);
    double s = x[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < i; ++j) s -= col[j] * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / col[i];
  }
}

void TriangularFactor::solve_in_place(std::span<double> x) const {
  const Eigen::Index k = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j)
      s -= data_[offset(j) + static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / data_[offset(i) + static_cast<std::size_t>(i)];
  }
}

Eigen::MatrixXd TriangularFactor::dense() const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(order_, order_);
  for (Eigen::Index j = 0; j < order_; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) r(i, j) = data_[offset(j) + static_cast<std::size_t>(i)];
  return r;
}

TriangularFactor& cholesky_append(TriangularFactor& f, std::span<const double> alpha, double b,
                                  Eigen::Index column_index) {
  f.append(alpha, b, column_index);
  return f;
}

Eigen::VectorXd tri_solve_lower(const TriangularFactor& f, Eigen::VectorXd rhs) {
  if (rhs.size() != f.order()) throw input_error("tri_solve_lower: size mismatch");
  f.solve_transposed_in_place({rhs.data(), static_cast<std::size_t>(rhs.size())});
  return rhs;
}

Eigen::VectorXd tri_solve_upper(const TriangularFactor& f, Eigen::VectorXd rhs) {
  if (rhs.size() != f.order()) throw input_error("tri_solve_upper: size mismatch");
  f.solve_in_place({rhs.data(), static_cast<std::size_t>(rhs.size())});
  return rhs;
}

}  // namespace bitscreen
