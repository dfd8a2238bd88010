#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bitscreen/cholesky.hpp"
#include "bitscreen/design.hpp"
#include "bitscreen/posterior.hpp"
#include "bitscreen/stopping.hpp"

namespace bitscreen {

// Candidate selection criterion used by the greedy iterations.
//   Posterior: argmax of -log(omega_i) - ((n-1)/2) log(resid - u_i^2),
//              the marginal-posterior criterion.
//   RssGain:   argmax of u_i^2 (forward regression), with a partial-variance
//              guard against numerically in-span candidates.
enum class Selection { Posterior, RssGain };

// Incremental screening state maintaining the one-step delayed Cholesky
// factor together with the per-candidate score vectors:
//   zeta_i  accumulated squared entries of R^{-T} X_sel^T X_i,
//   omega_i sqrt(n + lambda - zeta_i)      (n * ridge partial variance of i),
//   u_i     transformed residual correlation; u_i^2 is the RSS_lambda drop
//           from including i.
// The factor trails the path by one column: the triangular solve extending it
// is only performed when the next iteration needs it. Per-iteration cost is
// O(k^2 + kn + np).
class ScreeningState {
 public:
  ScreeningState(const StandardizedDesign& d, const CenteredResponse& y, double lambda,
                 double prior_log_odds, bool track_posterior);

  // Advances one step; returns false when no usable candidate remains.
  bool step(Selection sel);

  // Folds the latest selection into the factor and candidate vectors so that
  // omega2()/u_value() reflect the full current path. step() calls this
  // lazily; tests call it to inspect the state mid-path. Idempotent.
  void absorb_pending();

  Eigen::Index order() const { return static_cast<Eigen::Index>(path_.size()); }
  const std::vector<Eigen::Index>& path() const { return path_; }
  const std::vector<double>& pi_trace() const { return pi_; }
  const std::vector<double>& v() const { return v_; }
  double vnorm2() const { return vnorm2_; }
  double residual2() const { return resid_; }
  const TriangularFactor& factor() const { return factor_; }
  bool hit_perfect_fit() const { return perfect_fit_; }
  bool is_selected(Eigen::Index i) const { return selected_[static_cast<std::size_t>(i)] != 0; }

  // Unfloored n + lambda - zeta_i; equals n * v_{i.gamma,lambda} for
  // unselected admissible i.
  double omega2(Eigen::Index i) const;
  double u_value(Eigen::Index i) const;

  const StandardizedDesign& design() const { return *design_; }
  double lambda() const { return lambda_; }

 private:
  void absorb_first();
  void absorb_general();
  Eigen::Index select(Selection sel) const;
  void commit(Eigen::Index chosen);
  void record_pi();

  const StandardizedDesign* design_;
  const CenteredResponse* response_;
  double lambda_;
  double log_odds_;
  bool track_posterior_;

  double nld_;          // n + lambda
  double omega_floor_;  // lambda * 1e-12, clamp for omega^2
  double resid_floor_;  // 1e-12 * ||y_tilde||^2

  Eigen::VectorXd r_;      // X^T y_tilde
  Eigen::VectorXd zeta_;
  Eigen::VectorXd omega_;  // sqrt of clamped omega^2
  Eigen::VectorXd u_;
  Eigen::MatrixXd xsel_;   // materialized selected columns in path order
  std::vector<std::uint8_t> selected_;
  std::vector<Eigen::Index> path_;
  std::vector<double> v_;
  std::vector<double> pi_;
  TriangularFactor factor_;
  double vnorm2_ = 0.0;
  double resid_;
  double pending_b_ = 0.0;  // omega at the latest selection; becomes the next pivot
  double v_last_ = 0.0;     // u at the latest selection
  Eigen::Index prepared_ = 0;  // path length the candidate vectors reflect
  bool perfect_fit_ = false;
};

enum class StopReason { FixedSize, PosteriorDrop, EbicMinimum, PerfectFit, Exhausted };

std::string to_string(StopReason r);

struct ScreeningResult {
  std::vector<Eigen::Index> path;
  std::vector<double> pi_trace;
  StopReason stop_reason = StopReason::FixedSize;
  Eigen::Index selected_size = 0;  // the selected model is path[0..selected_size)
  std::vector<double> step_seconds;

  std::vector<Eigen::Index> selected() const {
    return {path.begin(), path.begin() + selected_size};
  }
};

// Spec-surface steps of the algorithm. bits_first_step runs the marginal
// correlation step; bits_second_step and bits_iterate advance an existing
// state by one posterior-criterion selection.
ScreeningState bits_first_step(const StandardizedDesign& d, const CenteredResponse& y,
                               const Hyperparams& h);
ScreeningState& bits_second_step(ScreeningState& s);
ScreeningState& bits_iterate(ScreeningState& s);

// Full screening run under a stopping rule. max_steps is clamped to
// min(n - 1, #admissible).
ScreeningResult bits_screen(const StandardizedDesign& d, const CenteredResponse& y,
                            const Hyperparams& h, const StopRule& rule, Eigen::Index max_steps);

}  // namespace bitscreen
