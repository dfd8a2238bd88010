#include "bitscreen/design.hpp"

#include <cmath>

#include "bitscreen/errors.hpp"
#include "bitscreen/parallel.hpp"

namespace bitscreen {

namespace {

constexpr std::int64_t kColGrain = 256;

void finish(StandardizedDesign& d, const Eigen::VectorXd& sums, const Eigen::VectorXd& sumsq) {
  const double n = static_cast<double>(d.n);
  d.col_means = sums / n;
  d.col_sds.resize(d.p);
  d.admissible.assign(static_cast<std::size_t>(d.p), 1);
  d.n_admissible = 0;
  for (Eigen::Index j = 0; j < d.p; ++j) {
    double var = sumsq[j] / n - d.col_means[j] * d.col_means[j];
    if (var > 0.0) {
      d.col_sds[j] = std::sqrt(var);
      ++d.n_admissible;
    } else {
      d.col_sds[j] = 0.0;
      d.admissible[static_cast<std::size_t>(j)] = 0;
    }
  }
}

void check_dims(Eigen::Index n, Eigen::Index p) {
  if (n < 2) throw input_error("standardize: need at least 2 rows, got " + std::to_string(n));
  if (p < 1) throw input_error("standardize: need at least 1 column");
}

}  // namespace

StandardizedDesign standardize(const Eigen::MatrixXd& z) {
  check_dims(z.rows(), z.cols());
  if (!z.allFinite()) throw input_error("standardize: non-finite entry in design matrix");
  StandardizedDesign d;
  d.is_sparse = false;
  d.dense = z;
  d.n = z.rows();
  d.p = z.cols();
  const double n = static_cast<double>(d.n);
  d.col_means.resize(d.p);
  d.col_sds.resize(d.p);
  d.admissible.assign(static_cast<std::size_t>(d.p), 1);
  // centered second moment (two passes per column) so large offsets do not
  // cancel against the raw sum of squares
  parallel_for_chunks(0, d.p, kColGrain, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t j = lo; j < hi; ++j) {
      const double mean = d.dense.col(j).sum() / n;
      d.col_means[j] = mean;
      const double css = (d.dense.col(j).array() - mean).square().sum();
      d.col_sds[j] = css > 0.0 ? std::sqrt(css / n) : 0.0;
      if (css <= 0.0) d.admissible[static_cast<std::size_t>(j)] = 0;
    }
  });
  d.n_admissible = 0;
  for (Eigen::Index j = 0; j < d.p; ++j)
    if (d.admissible[static_cast<std::size_t>(j)]) ++d.n_admissible;
  return d;
}

StandardizedDesign standardize(const Eigen::SparseMatrix<double>& z) {
  check_dims(z.rows(), z.cols());
  StandardizedDesign d;
  d.is_sparse = true;
  d.sparse = z;
  d.sparse.makeCompressed();
  d.n = z.rows();
  d.p = z.cols();
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(d.p);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(d.p);
  for (Eigen::Index j = 0; j < d.p; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.sparse, j); it; ++it) {
      double v = it.value();
      if (!std::isfinite(v))
        throw input_error("standardize: non-finite entry at row " + std::to_string(it.row() + 1) +
                          ", column " + std::to_string(j + 1));
      sums[j] += v;
      sumsq[j] += v * v;
    }
  }
  finish(d, sums, sumsq);
  return d;
}

CenteredResponse center_response(const Eigen::VectorXd& y) {
  if (y.size() < 2) throw input_error("response: need at least 2 observations");
  if (!y.allFinite()) throw input_error("response: non-finite entry");
  CenteredResponse r;
  r.ybar = y.mean();
  r.y_tilde = y.array() - r.ybar;
  double ss = r.y_tilde.squaredNorm();
  if (ss <= 0.0) throw input_error("response: constant response, nothing to screen");
  r.scale = std::sqrt(static_cast<double>(y.size()) / ss);
  r.y_tilde *= r.scale;
  r.norm2 = r.y_tilde.squaredNorm();
  return r;
}

Eigen::VectorXd xt_v(const StandardizedDesign& d, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != d.n)
    throw input_error("xt_v: vector length " + std::to_string(v.size()) + " != n = " +
                      std::to_string(d.n));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d.p);
  const double vsum = v.sum();
  if (d.is_sparse) {
    parallel_for_chunks(0, d.p, kColGrain, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t j = lo; j < hi; ++j) {
        if (!d.admissible[static_cast<std::size_t>(j)]) continue;
        double dot = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(d.sparse, j); it; ++it)
          dot += it.value() * v[it.row()];
        out[j] = (dot - d.col_means[j] * vsum) / d.col_sds[j];
      }
    });
  } else {
    parallel_for_chunks(0, d.p, kColGrain, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t j = lo; j < hi; ++j) {
        if (!d.admissible[static_cast<std::size_t>(j)]) continue;
        out[j] = (d.dense.col(j).dot(v) - d.col_means[j] * vsum) / d.col_sds[j];
      }
    });
  }
  return out;
}

Eigen::VectorXd x_col(const StandardizedDesign& d, Eigen::Index j) {
  if (j < 0 || j >= d.p) throw input_error("x_col: column index out of range");
  if (!d.admissible[static_cast<std::size_t>(j)])
    throw input_error("x_col: column " + std::to_string(j + 1) + " is constant (inadmissible)");
  Eigen::VectorXd col;
  if (d.is_sparse) {
    col = Eigen::VectorXd::Constant(d.n, -d.col_means[j]);
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.sparse, j); it; ++it)
      col[it.row()] += it.value();
  } else {
    col = d.dense.col(j).array() - d.col_means[j];
  }
  col /= d.col_sds[j];
  return col;
}

double x_col_dot(const StandardizedDesign& d, Eigen::Index j,
                 const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (j < 0 || j >= d.p) throw input_error("x_col_dot: column index out of range");
  if (!d.admissible[static_cast<std::size_t>(j)])
    throw input_error("x_col_dot: column " + std::to_string(j + 1) + " is constant (inadmissible)");
  if (v.size() != d.n) throw input_error("x_col_dot: vector length != n");
  double dot;
  if (d.is_sparse) {
    dot = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.sparse, j); it; ++it)
      dot += it.value() * v[it.row()];
  } else {
    dot = d.dense.col(j).dot(v);
  }
  return (dot - d.col_means[j] * v.sum()) / d.col_sds[j];
}

}  // namespace bitscreen
