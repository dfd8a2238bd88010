#include "bitscreen/stopping.hpp"

#include <algorithm>
#include <cmath>

#include "bitscreen/errors.hpp"

namespace bitscreen {

Eigen::Index pp_decide(std::span<const double> pi_trace, double null_log_posterior) {
  if (pi_trace.empty()) throw input_error("pp_decide: empty trace");
  if (pi_trace[0] < null_log_posterior) return 0;
  for (std::size_t k = 1; k < pi_trace.size(); ++k) {
    // strict drop required: equal values continue
    if (pi_trace[k] < pi_trace[k - 1]) return static_cast<Eigen::Index>(k);
  }
  return static_cast<Eigen::Index>(pi_trace.size());
}

Eigen::Index pp_largest_drop_decide(std::span<const double> pi_trace, Eigen::Index cap) {
  if (pi_trace.size() < 2) throw input_error("pp_largest_drop_decide: need at least 2 trace entries");
  const Eigen::Index last =
      std::min<Eigen::Index>(cap - 1, static_cast<Eigen::Index>(pi_trace.size()) - 1);
  if (last < 1) throw input_error("pp_largest_drop_decide: cap too small");
  Eigen::Index best_m = 1;
  double best_drop = pi_trace[0] - pi_trace[1];
  for (Eigen::Index m = 2; m <= last; ++m) {
    double drop = pi_trace[static_cast<std::size_t>(m - 1)] - pi_trace[static_cast<std::size_t>(m)];
    if (drop > best_drop) {
      best_drop = drop;
      best_m = m;
    }
  }
  return best_m;
}

EbicResult ebic_decide(const StandardizedDesign& d, const CenteredResponse& y,
                       std::span<const Eigen::Index> path, Eigen::Index max_k,
                       bool include_null) {
  if (max_k >= d.n) throw input_error("ebic_decide: max_k must be < n");
  const Eigen::Index k_max = std::min<Eigen::Index>(max_k, static_cast<Eigen::Index>(path.size()));
  const double n = static_cast<double>(d.n);
  const double penalty = (std::log(n) + 2.0 * std::log(static_cast<double>(d.p))) / n;
  const double rss_floor = 1e-12 * y.norm2;
  const double pivot_floor = 1e-10 * n;

  EbicResult res;
  res.null_ebic = std::log(y.norm2 / n);
  res.ebic.reserve(static_cast<std::size_t>(k_max));
  res.skipped.assign(static_cast<std::size_t>(k_max), 0);
  res.floored.assign(static_cast<std::size_t>(k_max), 0);

  // Unpenalized (lambda = 0) incremental factorization along the fixed path
  // order. Collinear entries are left out of the factor; they change the
  // penalty but not the RSS.
  Eigen::MatrixXd cols(d.n, k_max);
  Eigen::Index rank = 0;
  std::vector<double> rfact;  // packed upper factor over the kept columns
  std::vector<double> vfit;
  double rss = y.norm2;
  for (Eigen::Index k = 0; k < k_max; ++k) {
    Eigen::VectorXd xk = x_col(d, path[static_cast<std::size_t>(k)]);
    Eigen::VectorXd alpha(rank);
    for (Eigen::Index j = 0; j < rank; ++j) alpha[j] = cols.col(j).dot(xk);
    // forward solve against the kept-column factor
    for (Eigen::Index i = 0; i < rank; ++i) {
      double s = alpha[i];
      const double* col = rfact.data() + static_cast<std::size_t>(i) * (i + 1) / 2;
      for (Eigen::Index j = 0; j < i; ++j) s -= col[j] * alpha[j];
      alpha[i] = s / col[i];
    }
    double b2 = xk.squaredNorm() - alpha.squaredNorm();
    if (b2 <= pivot_floor) {
      res.skipped[static_cast<std::size_t>(k)] = 1;  // no RSS contribution
    } else {
      double b = std::sqrt(b2);
      double dot_av = 0.0;
      for (Eigen::Index j = 0; j < rank; ++j) dot_av += alpha[j] * vfit[static_cast<std::size_t>(j)];
      double vk = (xk.dot(y.y_tilde) - dot_av) / b;
      for (Eigen::Index j = 0; j < rank; ++j) rfact.push_back(alpha[j]);
      rfact.push_back(b);
      vfit.push_back(vk);
      cols.col(rank) = xk;
      ++rank;
      rss -= vk * vk;
    }
    if (rss <= rss_floor) res.floored[static_cast<std::size_t>(k)] = 1;
    double rss_eff = std::max(rss, rss_floor);
    res.ebic.push_back(std::log(rss_eff / n) + static_cast<double>(k + 1) * penalty);
  }

  if (res.ebic.empty()) {
    res.size = 0;
    return res;
  }
  Eigen::Index best = -1;
  for (Eigen::Index k = 0; k < k_max; ++k) {
    if (res.floored[static_cast<std::size_t>(k)]) continue;
    if (best < 0 || res.ebic[static_cast<std::size_t>(k)] < res.ebic[static_cast<std::size_t>(best)])
      best = k;
  }
  if (best < 0) best = 0;  // everything underflowed; the one-variable model stands in
  res.size = best + 1;
  if (include_null && res.null_ebic < res.ebic[static_cast<std::size_t>(best)]) res.size = 0;
  return res;
}

Eigen::Index fixed_size_decide(std::span<const Eigen::Index> path, Eigen::Index m) {
  if (m < 0) throw config_error("fixed_size_decide: negative size");
  return std::min<Eigen::Index>(m, static_cast<Eigen::Index>(path.size()));
}

}  // namespace bitscreen
