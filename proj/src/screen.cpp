#include "bitscreen/screen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "bitscreen/errors.hpp"
#include "bitscreen/parallel.hpp"

namespace bitscreen {

namespace {
constexpr std::int64_t kScanGrain = 4096;
constexpr double kOmegaFloorRel = 1e-12;    // floor on omega^2, relative to lambda
constexpr double kResidFloorRel = 1e-12;    // floor on the residual, relative to ||y||^2
constexpr double kFrVarianceGuard = 1e-10;  // omega^2 < guard * n => candidate skipped
}  // namespace

ScreeningState::ScreeningState(const StandardizedDesign& d, const CenteredResponse& y,
                               double lambda, double prior_log_odds, bool track_posterior)
    : design_(&d),
      response_(&y),
      lambda_(lambda),
      log_odds_(prior_log_odds),
      track_posterior_(track_posterior) {
  if (lambda < 0.0) throw config_error("screening: lambda must be >= 0");
  if (track_posterior_ && lambda <= 0.0)
    throw config_error("screening: posterior tracking requires lambda > 0");
  if (y.y_tilde.size() != d.n) throw input_error("screening: response length != n");
  if (d.n_admissible == 0) throw input_error("screening: no admissible columns");
  nld_ = static_cast<double>(d.n) + lambda_;
  omega_floor_ = lambda_ * kOmegaFloorRel;
  resid_floor_ = kResidFloorRel * y.norm2;
  r_ = xt_v(d, y.y_tilde);
  selected_.assign(static_cast<std::size_t>(d.p), 0);
  resid_ = y.norm2;
  const Eigen::Index cap = std::min<Eigen::Index>(d.n - 1, d.n_admissible);
  xsel_.resize(d.n, cap);
}

double ScreeningState::omega2(Eigen::Index i) const {
  if (prepared_ == 0) return nld_;
  return nld_ - zeta_[i];
}

double ScreeningState::u_value(Eigen::Index i) const {
  if (prepared_ == 0) return r_[i] / std::sqrt(nld_);
  return u_[i];
}

void ScreeningState::absorb_pending() {
  if (prepared_ + 1 != order()) return;  // nothing pending
  if (prepared_ == 0)
    absorb_first();
  else
    absorb_general();
  ++prepared_;
}

// Folds the first selection into the candidate vectors: zeta/omega/u for the
// one-column model. s1 = R_1^{-T} X^T X_{i_1} so zeta is its elementwise
// square, matching zeta_i = ||R^{-T} X_sel^T X_i||^2.
void ScreeningState::absorb_first() {
  const double b1 = factor_.diag(0);
  Eigen::VectorXd s1 = xt_v(*design_, xsel_.col(0)) / b1;
  zeta_ = s1.array().square();
  omega_ = (nld_ - zeta_.array()).max(omega_floor_).sqrt();
  const double v1 = v_[0];
  u_.resize(design_->p);
  parallel_for_chunks(0, design_->p, kScanGrain, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const double om = omega_[i];
      u_[i] = (om > 0.0 && !selected_[static_cast<std::size_t>(i)] &&
               design_->admissible[static_cast<std::size_t>(i)])
                  ? (r_[i] - v1 * s1[i]) / om
                  : 0.0;
    }
  });
}

// Folds selection k-1 into the factor and candidate vectors (the delayed
// update). eta_i is the new entry of R^{-T} X_sel^T X_i for every candidate,
// obtained from one O(np) pass over X applied to an n-vector.
void ScreeningState::absorb_general() {
  const Eigen::Index m = prepared_;  // factor order; the new column is xsel_.col(m)
  const double b_new = pending_b_;

  Eigen::VectorXd g = xsel_.leftCols(m).transpose() * xsel_.col(m);
  Eigen::VectorXd alpha = tri_solve_lower(factor_, g);
  Eigen::VectorXd wv = tri_solve_upper(factor_, alpha);
  factor_.append({alpha.data(), static_cast<std::size_t>(alpha.size())}, b_new, path_[m]);

  Eigen::VectorXd q = xsel_.col(m) - xsel_.leftCols(m) * wv;
  Eigen::VectorXd eta = xt_v(*design_, q) / b_new;

  const double v_sel = v_last_;
  Eigen::VectorXd omega_old = std::move(omega_);
  zeta_.array() += eta.array().square();
  omega_ = (nld_ - zeta_.array()).max(omega_floor_).sqrt();
  parallel_for_chunks(0, design_->p, kScanGrain, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const double om = omega_[i];
      u_[i] = (om > 0.0 && !selected_[static_cast<std::size_t>(i)] &&
               design_->admissible[static_cast<std::size_t>(i)])
                  ? (u_[i] * omega_old[i] - v_sel * eta[i]) / om
                  : 0.0;
    }
  });
}

Eigen::Index ScreeningState::select(Selection sel) const {
  const Eigen::Index p = design_->p;
  const double hn = 0.5 * static_cast<double>(design_->n - 1);
  auto grid = chunk_grid(0, p, kScanGrain);
  std::vector<double> best(grid.size(), -std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> arg(grid.size(), -1);
  parallel_for_grid(grid, [&](std::size_t c, std::int64_t lo, std::int64_t hi) {
    double b = -std::numeric_limits<double>::infinity();
    Eigen::Index bi = -1;
    for (std::int64_t i = lo; i < hi; ++i) {
      if (selected_[static_cast<std::size_t>(i)] ||
          !design_->admissible[static_cast<std::size_t>(i)])
        continue;
      double score;
      if (prepared_ == 0) {
        // every candidate has the same omega^2 = n + lambda; rank by r_i^2
        score = r_[i] * r_[i];
      } else {
        const double om2 = nld_ - zeta_[i];
        if (om2 <= omega_floor_) continue;  // numerically in the selected span
        const double ui = u_[i];
        if (sel == Selection::RssGain) {
          if (om2 < kFrVarianceGuard * static_cast<double>(design_->n)) continue;
          score = ui * ui;
        } else {
          score = -std::log(omega_[i]) - hn * std::log(std::max(resid_ - ui * ui, resid_floor_));
        }
      }
      if (score > b) {
        b = score;
        bi = i;
      }
    }
    best[c] = b;
    arg[c] = bi;
  });
  double b = -std::numeric_limits<double>::infinity();
  Eigen::Index bi = -1;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (arg[c] >= 0 && best[c] > b) {
      b = best[c];
      bi = arg[c];
    }
  }
  return bi;
}

void ScreeningState::commit(Eigen::Index chosen) {
  const Eigen::Index m = order();
  double vnew;
  if (m == 0) {
    pending_b_ = std::sqrt(nld_);
    vnew = r_[chosen] / pending_b_;
  } else {
    vnew = u_[chosen];
    pending_b_ = omega_[chosen];
  }
  v_last_ = vnew;
  v_.push_back(vnew);
  vnorm2_ += vnew * vnew;
  resid_ -= vnew * vnew;
  if (resid_ <= resid_floor_) {
    resid_ = std::max(resid_, resid_floor_);
    perfect_fit_ = true;
  }
  selected_[static_cast<std::size_t>(chosen)] = 1;
  path_.push_back(chosen);
  xsel_.col(m) = x_col(*design_, chosen);
  if (m == 0) factor_.append({}, pending_b_, chosen);
}

void ScreeningState::record_pi() {
  if (!track_posterior_) return;
  const double k = static_cast<double>(order());
  // order-k log det; the delayed column's pivot is pending_b_
  const double log_det_k =
      factor_.log_det() + (factor_.order() < order() ? std::log(pending_b_) : 0.0);
  pi_.push_back(0.5 * k * std::log(lambda_) - log_det_k -
                0.5 * static_cast<double>(design_->n - 1) * std::log(resid_) + k * log_odds_);
}

bool ScreeningState::step(Selection sel) {
  if (order() >= std::min<Eigen::Index>(design_->n - 1, design_->n_admissible)) return false;
  absorb_pending();
  Eigen::Index chosen = select(sel);
  if (chosen < 0) return false;
  commit(chosen);
  record_pi();
  return true;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::FixedSize: return "fixed-size";
    case StopReason::PosteriorDrop: return "pp-drop";
    case StopReason::EbicMinimum: return "ebic-min";
    case StopReason::PerfectFit: return "perfect-fit";
    case StopReason::Exhausted: return "exhausted";
  }
  return "unknown";
}

ScreeningState bits_first_step(const StandardizedDesign& d, const CenteredResponse& y,
                               const Hyperparams& h) {
  h.validate();
  ScreeningState s(d, y, h.lambda, h.log_prior_odds(), true);
  if (!s.step(Selection::Posterior)) throw input_error("bits_first_step: no admissible candidate");
  return s;
}

ScreeningState& bits_second_step(ScreeningState& s) {
  if (s.order() != 1) throw input_error("bits_second_step: state must have order 1");
  if (!s.step(Selection::Posterior)) throw numerical_error("bits_second_step: no usable candidate");
  return s;
}

ScreeningState& bits_iterate(ScreeningState& s) {
  if (s.order() < 2) throw input_error("bits_iterate: state must have order >= 2");
  if (!s.step(Selection::Posterior)) throw numerical_error("bits_iterate: no usable candidate");
  return s;
}

ScreeningResult bits_screen(const StandardizedDesign& d, const CenteredResponse& y,
                            const Hyperparams& h, const StopRule& rule, Eigen::Index max_steps) {
  h.validate();
  if (max_steps < 0) throw config_error("bits_screen: max_steps must be >= 0");
  Eigen::Index limit =
      std::min<Eigen::Index>(max_steps, std::min<Eigen::Index>(d.n - 1, d.n_admissible));
  if (rule.kind == StopRule::Kind::FixedSize) limit = std::min(limit, rule.size);
  if (rule.cap >= 0) limit = std::min(limit, rule.cap);

  ScreeningResult res;
  if (limit <= 0) {
    res.stop_reason = StopReason::FixedSize;
    return res;
  }

  ScreeningState s(d, y, h.lambda, h.log_prior_odds(), true);
  const double null_lp = null_log_posterior(y, d.n);
  bool stopped = false;
  using clock = std::chrono::steady_clock;
  while (s.order() < limit) {
    auto t0 = clock::now();
    bool advanced = s.step(Selection::Posterior);
    auto t1 = clock::now();
    if (!advanced) {
      res.stop_reason = StopReason::Exhausted;
      res.selected_size = s.order();
      stopped = true;
      break;
    }
    res.step_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    const auto& pi = s.pi_trace();
    const Eigen::Index k = s.order();
    if (rule.kind == StopRule::Kind::PosteriorProb) {
      if (k == 1 && pi[0] < null_lp) {
        res.stop_reason = StopReason::PosteriorDrop;
        res.selected_size = 0;
        stopped = true;
        break;
      }
      if (k >= 2 && pi[static_cast<std::size_t>(k - 1)] < pi[static_cast<std::size_t>(k - 2)]) {
        res.stop_reason = StopReason::PosteriorDrop;
        res.selected_size = k - 1;
        stopped = true;
        break;
      }
    }
    if (s.hit_perfect_fit()) {
      res.stop_reason = StopReason::PerfectFit;
      res.selected_size = k;
      stopped = true;
      break;
    }
  }
  res.path = s.path();
  res.pi_trace = s.pi_trace();
  if (!stopped) {
    const Eigen::Index len = s.order();
    switch (rule.kind) {
      case StopRule::Kind::FixedSize:
        // exhausted when the data ran out of usable columns before the
        // requested size (not when the explicit caps were the binding limit)
        res.stop_reason = len < std::min(rule.size, max_steps) ? StopReason::Exhausted
                                                               : StopReason::FixedSize;
        res.selected_size = std::min(rule.size, len);
        break;
      case StopRule::Kind::PosteriorProb:
        res.stop_reason = StopReason::FixedSize;  // cap reached without a drop
        res.selected_size = len;
        break;
      case StopRule::Kind::LargestDrop:
        if (len < 2) {
          res.stop_reason = StopReason::FixedSize;
          res.selected_size = len;
        } else {
          res.stop_reason = StopReason::PosteriorDrop;
          res.selected_size = pp_largest_drop_decide(res.pi_trace, len);
        }
        break;
      case StopRule::Kind::Ebic:
        res.stop_reason = StopReason::EbicMinimum;
        res.selected_size = ebic_decide(d, y, res.path, len, rule.ebic_include_null).size;
        break;
    }
  }
  return res;
}

}  // namespace bitscreen
