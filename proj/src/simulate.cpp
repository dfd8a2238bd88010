#include "bitscreen/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "bitscreen/baselines.hpp"
#include "bitscreen/errors.hpp"
#include "bitscreen/parallel.hpp"
#include "bitscreen/rng.hpp"
#include "bitscreen/screen.hpp"
#include "bitscreen/stopping.hpp"

namespace bitscreen {

Setting parse_setting(const std::string& name) {
  if (name == "iid") return Setting::Iid;
  if (name == "compound") return Setting::CompoundSym;
  if (name == "ar1") return Setting::Ar1;
  if (name == "factor") return Setting::Factor;
  if (name == "group") return Setting::Group;
  if (name == "extreme") return Setting::ExtremeCor;
  if (name == "sparse_factor") return Setting::SparseFactor;
  throw config_error("unknown setting '" + name +
                     "' (valid: iid, compound, ar1, factor, group, extreme, sparse_factor)");
}

std::string setting_name(Setting s) {
  switch (s) {
    case Setting::Iid: return "iid";
    case Setting::CompoundSym: return "compound";
    case Setting::Ar1: return "ar1";
    case Setting::Factor: return "factor";
    case Setting::Group: return "group";
    case Setting::ExtremeCor: return "extreme";
    case Setting::SparseFactor: return "sparse_factor";
  }
  return "unknown";
}

int SimConfig::effective_k_factors() const {
  if (k_factors > 0) return k_factors;
  return setting == Setting::SparseFactor ? 5 : 10;
}

Eigen::Index SimConfig::effective_num_true() const {
  if (num_true >= 0) return num_true;
  switch (setting) {
    case Setting::Group: return 15;
    case Setting::SparseFactor: return 25;
    default: return 9;
  }
}

double SimConfig::effective_beta() const {
  if (beta_value != 0.0) return beta_value;
  return setting == Setting::SparseFactor ? 3.0 : 2.0;
}

std::vector<double> SimConfig::effective_lambdas() const {
  if (!lambdas.empty()) return lambdas;
  const double nn = static_cast<double>(n), pp = static_cast<double>(p);
  return {pp / nn, nn * std::log(nn) / pp, nn / pp};
}

std::vector<Eigen::Index> SimConfig::truth() const {
  std::vector<Eigen::Index> t(static_cast<std::size_t>(effective_num_true()));
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = static_cast<Eigen::Index>(j);
  return t;
}

void SimConfig::apply_defaults() {
  k_factors = effective_k_factors();
  num_true = effective_num_true();
  beta_value = effective_beta();
  lambdas = effective_lambdas();
}

void SimConfig::validate() const {
  if (n < 2 || p < 1) throw config_error("simulation: need n >= 2 and p >= 1");
  if (!(r_squared > 0.0 && r_squared < 1.0)) throw config_error("simulation: r_squared must be in (0, 1)");
  if (std::abs(rho) >= 1.0) throw config_error("simulation: |rho| must be < 1");
  if (effective_k_factors() < 1) throw config_error("simulation: k_factors must be >= 1");
  if (effective_num_true() > p) throw config_error("simulation: num_true exceeds p");
  if (effective_num_true() == 0) throw config_error("simulation: zero signal with r_squared > 0");
  if (replications < 1) throw config_error("simulation: replications must be >= 1");
  if (!(w > 0.0 && w < 1.0)) throw config_error("simulation: w must be in (0, 1)");
  for (double l : effective_lambdas())
    if (!(l > 0.0)) throw config_error("simulation: lambda values must be > 0");
  if (setting == Setting::Group && effective_num_true() != 15)
    throw config_error("simulation: group structure fixes 15 true variables");
  if (setting == Setting::ExtremeCor && effective_num_true() != 9)
    throw config_error("simulation: extreme correlation fixes 9 true variables");
}

namespace {

constexpr std::uint64_t kStreamDesign = 1;
constexpr std::uint64_t kStreamFactor = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamMc = 99;
constexpr int kMcRows = 100000;

double mc_signal_variance(const SimConfig& cfg) {
  const Eigen::Index m = cfg.effective_num_true();
  const double b = cfg.effective_beta();
  Rng rng(derive_seed(cfg.seed, kStreamMc));
  double sum = 0.0, sumsq = 0.0;
  for (int it = 0; it < kMcRows; ++it) {
    double s = 0.0;
    if (cfg.setting == Setting::Group) {
      double z[3] = {rng.normal(), rng.normal(), rng.normal()};
      for (Eigen::Index j = 0; j < m; ++j) s += b * (z[j / 5] + 0.1 * rng.normal());
    } else {  // ExtremeCor: truth columns are (Z_j + W_j) / sqrt(2)
      for (Eigen::Index j = 0; j < m; ++j)
        s += b * (rng.normal() + rng.normal()) * M_SQRT1_2;
    }
    sum += s;
    sumsq += s * s;
  }
  double mean = sum / kMcRows;
  return sumsq / kMcRows - mean * mean;
}

}  // namespace

SimDraw gen_design(const SimConfig& cfg, std::uint64_t rep_seed) {
  cfg.validate();
  const Eigen::Index n = cfg.n, p = cfg.p;
  const Eigen::Index m = cfg.effective_num_true();
  const double b = cfg.effective_beta();
  SimDraw draw;
  draw.z.resize(n, p);
  Rng rng(derive_seed(rep_seed, kStreamDesign));

  switch (cfg.setting) {
    case Setting::Iid: {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) draw.z(i, j) = rng.normal();
      draw.signal_var = b * b * static_cast<double>(m);
      break;
    }
    case Setting::CompoundSym: {
      const double sr = std::sqrt(cfg.rho), se = std::sqrt(1.0 - cfg.rho);
      for (Eigen::Index i = 0; i < n; ++i) {
        double shared = rng.normal();
        for (Eigen::Index j = 0; j < p; ++j) draw.z(i, j) = sr * shared + se * rng.normal();
      }
      const double sb = b * static_cast<double>(m);
      draw.signal_var = cfg.rho * sb * sb + (1.0 - cfg.rho) * b * b * static_cast<double>(m);
      break;
    }
    case Setting::Ar1: {
      const double c = std::sqrt(1.0 - cfg.rho * cfg.rho);
      for (Eigen::Index i = 0; i < n; ++i) {
        double prev = rng.normal();
        draw.z(i, 0) = prev;
        for (Eigen::Index j = 1; j < p; ++j) {
          prev = cfg.rho * prev + c * rng.normal();
          draw.z(i, j) = prev;
        }
      }
      double sv = static_cast<double>(m);
      for (Eigen::Index dlt = 1; dlt < m; ++dlt)
        sv += 2.0 * static_cast<double>(m - dlt) * std::pow(cfg.rho, static_cast<double>(dlt));
      draw.signal_var = b * b * sv;
      break;
    }
    case Setting::Factor: {
      const int k = cfg.effective_k_factors();
      Rng frng(derive_seed(rep_seed, kStreamFactor));
      Eigen::MatrixXd f(p, k);
      for (Eigen::Index i = 0; i < p; ++i)
        for (int j = 0; j < k; ++j) f(i, j) = frng.normal();
      Eigen::VectorXd z(k);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) z[j] = rng.normal();
        for (Eigen::Index col = 0; col < p; ++col)
          draw.z(i, col) = f.row(col).dot(z) + rng.normal();
      }
      Eigen::VectorXd fb = f.topRows(m).transpose() * Eigen::VectorXd::Constant(m, b);
      draw.signal_var = fb.squaredNorm() + b * b * static_cast<double>(m);
      break;
    }
    case Setting::Group: {
      // three latent variables, five nearly identical copies each
      for (Eigen::Index i = 0; i < n; ++i) {
        double z[3] = {rng.normal(), rng.normal(), rng.normal()};
        for (Eigen::Index j = 0; j < p; ++j)
          draw.z(i, j) = j < 15 ? z[j / 5] + 0.1 * rng.normal() : rng.normal();
      }
      draw.signal_var = mc_signal_variance(cfg);
      break;
    }
    case Setting::ExtremeCor: {
      // unimportant columns share the sum of the W vectors driving the truth
      for (Eigen::Index i = 0; i < n; ++i) {
        double wsum = 0.0, wj[9];
        for (int j = 0; j < 9; ++j) {
          wj[j] = rng.normal();
          wsum += wj[j];
        }
        for (Eigen::Index j = 0; j < p; ++j)
          draw.z(i, j) = j < 9 ? (rng.normal() + wj[j]) * M_SQRT1_2
                               : (rng.normal() + wsum) * 0.5;
      }
      draw.signal_var = mc_signal_variance(cfg);
      break;
    }
    case Setting::SparseFactor: {
      const int k = cfg.effective_k_factors();
      Rng frng(derive_seed(rep_seed, kStreamFactor));
      // variable i < 5k loads only on factor i/5
      Eigen::VectorXd load(std::min<Eigen::Index>(p, 5 * k));
      for (Eigen::Index i = 0; i < load.size(); ++i) load[i] = frng.normal();
      Eigen::VectorXd z(k);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) z[j] = rng.normal();
        for (Eigen::Index col = 0; col < p; ++col) {
          double base = col < load.size() ? load[col] * z[col / 5] : 0.0;
          draw.z(i, col) = base + 0.1 * rng.normal();
        }
      }
      double fb2 = 0.0;
      Eigen::VectorXd fb = Eigen::VectorXd::Zero(k);
      for (Eigen::Index i = 0; i < std::min<Eigen::Index>(m, load.size()); ++i)
        fb[i / 5] += b * load[i];
      fb2 = fb.squaredNorm();
      draw.signal_var = fb2 + 0.01 * b * b * static_cast<double>(m);
      break;
    }
  }
  return draw;
}

Eigen::VectorXd gen_response(const SimDraw& draw, const SimConfig& cfg, std::uint64_t rep_seed) {
  const Eigen::Index m = cfg.effective_num_true();
  const double b = cfg.effective_beta();
  if (!(draw.signal_var > 0.0)) throw config_error("gen_response: zero signal variance");
  const double sigma = std::sqrt(draw.signal_var * (1.0 - cfg.r_squared) / cfg.r_squared);
  Rng rng(derive_seed(rep_seed, kStreamNoise));
  Eigen::VectorXd y = draw.z.leftCols(m) * Eigen::VectorXd::Constant(m, b);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  return y;
}

SimMetrics evaluate(const std::vector<std::vector<Eigen::Index>>& selected,
                    const std::vector<Eigen::Index>& truth) {
  if (selected.empty()) throw input_error("evaluate: no replications");
  SimMetrics met;
  met.replications = static_cast<int>(selected.size());
  std::set<Eigen::Index> tset(truth.begin(), truth.end());
  std::vector<double> sizes;
  sizes.reserve(selected.size());
  for (const auto& sel : selected) {
    std::size_t hits = 0;
    for (Eigen::Index j : sel) hits += tset.count(j);
    if (!tset.empty()) met.tpr += static_cast<double>(hits) / static_cast<double>(tset.size());
    if (hits == tset.size()) met.cp += 1.0;
    sizes.push_back(static_cast<double>(sel.size()));
    met.mean_size += static_cast<double>(sel.size());
  }
  const double r = static_cast<double>(selected.size());
  met.tpr /= r;
  met.cp /= r;
  met.mean_size /= r;
  std::sort(sizes.begin(), sizes.end());
  const std::size_t h = sizes.size() / 2;
  met.median_size = sizes.size() % 2 ? sizes[h] : 0.5 * (sizes[h - 1] + sizes[h]);
  return met;
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto t1 = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

std::vector<Eigen::Index> prefix(const std::vector<Eigen::Index>& path, Eigen::Index m) {
  m = std::min<Eigen::Index>(m, static_cast<Eigen::Index>(path.size()));
  return {path.begin(), path.begin() + m};
}

std::vector<Eigen::Index> set_union_of(std::vector<std::vector<Eigen::Index>> parts) {
  std::set<Eigen::Index> u;
  for (auto& s : parts) u.insert(s.begin(), s.end());
  return {u.begin(), u.end()};
}

}  // namespace

SimReport run_experiment(const SimConfig& cfg_in) {
  SimConfig cfg = cfg_in;
  cfg.apply_defaults();
  cfg.validate();
  if (cfg.threads > 0) set_thread_count(cfg.threads);

  const std::vector<double> lambdas = cfg.effective_lambdas();
  const std::vector<Eigen::Index> truth = cfg.truth();
  const bool want_bits = std::count(cfg.methods.begin(), cfg.methods.end(), "bits") > 0;
  const bool want_all = std::count(cfg.methods.begin(), cfg.methods.end(), "bits_all") > 0;
  const bool want_sis = std::count(cfg.methods.begin(), cfg.methods.end(), "sis") > 0;
  const bool want_holp = std::count(cfg.methods.begin(), cfg.methods.end(), "holp") > 0;
  const bool want_fr = std::count(cfg.methods.begin(), cfg.methods.end(), "fr") > 0;
  for (const auto& mth : cfg.methods)
    if (mth != "bits" && mth != "bits_all" && mth != "sis" && mth != "holp" && mth != "fr")
      throw config_error("unknown method '" + mth + "' (valid: bits, bits_all, sis, holp, fr)");
  for (const auto& rl : cfg.rules)
    if (rl != "n" && rl != "pp" && rl != "ebic")
      throw config_error("unknown rule '" + rl + "' (valid: n, pp, ebic)");

  auto rule_on = [&](const char* r) {
    return std::count(cfg.rules.begin(), cfg.rules.end(), r) > 0;
  };

  // selected sets per (method-label, rule) across replications
  struct Cell {
    std::vector<std::vector<Eigen::Index>> sets;
    double seconds = 0.0;
    int failures = 0;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  auto put = [&](const std::string& method, const std::string& rule,
                 std::vector<Eigen::Index> sel, double secs) {
    auto& c = cells[{method, rule}];
    c.sets.push_back(std::move(sel));
    c.seconds += secs;
  };
  auto record_failure = [&](const std::string& method, const char* what) {
    for (const auto& rl : cfg.rules) {
      if (method == "sis" && rl != "n") continue;
      if ((method == "holp" || method == "fr") && rl == "pp") continue;
      ++cells[{method, rl}].failures;
    }
    std::fprintf(stderr, "replication failed for %s: %s\n", method.c_str(), what);
  };

  Hyperparams hp;
  hp.w = cfg.w;

  auto all_method_labels = [&] {
    std::vector<std::string> labels;
    if (want_bits)
      for (std::size_t li = 0; li < lambdas.size(); ++li)
        labels.push_back("bits" + std::to_string(li + 1));
    if (want_all) labels.push_back("bits_all");
    if (want_sis) labels.push_back("sis");
    if (want_holp) labels.push_back("holp");
    if (want_fr) labels.push_back("fr");
    return labels;
  }();

  for (int rep = 0; rep < cfg.replications; ++rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep) + 1);
    StandardizedDesign design;
    CenteredResponse resp;
    try {
      SimDraw draw = gen_design(cfg, rep_seed);
      Eigen::VectorXd y = gen_response(draw, cfg, rep_seed);
      design = standardize(draw.z);
      resp = center_response(y);
    } catch (const std::exception& e) {
      // partial failures are recorded per cell, never fatal to the run
      for (const auto& label : all_method_labels) record_failure(label, e.what());
      continue;
    }
    const Eigen::Index path_len = std::min<Eigen::Index>(design.n - 1, design.n_admissible);
    const double null_lp = null_log_posterior(resp, design.n);

    std::vector<std::vector<Eigen::Index>> bits_n_sets, bits_pp_sets;
    bool bits_failed = false;
    if (want_bits || want_all) {
      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const std::string label = "bits" + std::to_string(li + 1);
        try {
          hp.lambda = lambdas[li];
          Timer tm;
          ScreeningState s(design, resp, hp.lambda, hp.log_prior_odds(), true);
          while (s.order() < path_len && !s.hit_perfect_fit())
            if (!s.step(Selection::Posterior)) break;
          const double path_secs = tm.lap();
          std::vector<Eigen::Index> top_n = prefix(s.path(), cfg.n);
          std::vector<Eigen::Index> pp_sel =
              prefix(s.path(), pp_decide(s.pi_trace(), null_lp));
          if (want_all) {
            if (rule_on("n")) bits_n_sets.push_back(top_n);
            if (rule_on("pp")) bits_pp_sets.push_back(pp_sel);
          }
          if (!want_bits) continue;
          if (rule_on("n")) put(label, "n", top_n, path_secs);
          if (rule_on("pp")) put(label, "pp", std::move(pp_sel), path_secs + tm.lap());
          if (rule_on("ebic")) {
            Timer te;
            auto eb = ebic_decide(design, resp, s.path(),
                                  static_cast<Eigen::Index>(s.path().size()));
            put(label, "ebic", prefix(s.path(), eb.size), path_secs + te.lap());
          }
        } catch (const std::exception& e) {
          bits_failed = true;
          if (want_bits) record_failure(label, e.what());
        }
      }
      if (want_all) {
        if (bits_failed) {
          record_failure("bits_all", "component screening failed");
        } else {
          if (rule_on("n")) put("bits_all", "n", set_union_of(bits_n_sets), 0.0);
          if (rule_on("pp")) put("bits_all", "pp", set_union_of(bits_pp_sets), 0.0);
        }
      }
    }
    if (want_sis && rule_on("n")) {
      try {
        Timer tm;
        BaselineResult r = sis_rank(design, resp);
        put("sis", "n", r.top(cfg.n), tm.lap());
      } catch (const std::exception& e) {
        record_failure("sis", e.what());
      }
    }
    if (want_holp) {
      try {
        Timer tm;
        BaselineResult r = holp_rank(design, resp);
        const double rank_secs = tm.lap();
        if (rule_on("n")) put("holp", "n", r.top(cfg.n), rank_secs);
        if (rule_on("ebic")) {
          Timer te;
          auto path = r.top(path_len);
          auto eb = ebic_decide(design, resp, path, static_cast<Eigen::Index>(path.size()));
          put("holp", "ebic", prefix(path, eb.size), rank_secs + te.lap());
        }
      } catch (const std::exception& e) {
        record_failure("holp", e.what());
      }
    }
    if (want_fr) {
      try {
        Timer tm;
        BaselineResult r = fr_screen(design, resp, path_len);
        const double path_secs = tm.lap();
        if (rule_on("n")) put("fr", "n", prefix(r.order, cfg.n), path_secs);
        if (rule_on("ebic")) {
          Timer te;
          auto eb = ebic_decide(design, resp, r.order, static_cast<Eigen::Index>(r.order.size()));
          put("fr", "ebic", prefix(r.order, eb.size), path_secs + te.lap());
        }
      } catch (const std::exception& e) {
        record_failure("fr", e.what());
      }
    }
  }

  SimReport report;
  for (auto& [key, cell] : cells) {
    if (cell.sets.empty()) continue;  // every replication failed for this cell
    SimRow row;
    row.setting = setting_name(cfg.setting);
    row.method = key.first;
    row.rule = key.second;
    row.metrics = evaluate(cell.sets, truth);
    row.seconds = cell.seconds;
    row.failures = cell.failures;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace bitscreen
