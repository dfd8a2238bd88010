#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bitscreen/baselines.hpp"
#include "bitscreen/errors.hpp"
#include "bitscreen/io.hpp"
#include "bitscreen/parallel.hpp"
#include "bitscreen/posterior.hpp"
#include "bitscreen/screen.hpp"
#include "bitscreen/simulate.hpp"
#include "bitscreen/stopping.hpp"

namespace py = pybind11;
using namespace bitscreen;

namespace {

StopRule make_rule(const std::string& stop, Eigen::Index size, Eigen::Index cap) {
  if (stop == "pp") return StopRule::pp(cap);
  if (stop == "largest-drop") return StopRule::largest_drop(cap);
  if (stop == "ebic") return StopRule::ebic(cap);
  if (stop == "fixed") return StopRule::fixed(size);
  throw config_error("unknown stop rule '" + stop + "' (pp, largest-drop, ebic, fixed)");
}

SimConfig config_from_kwargs(const std::string& setting, Eigen::Index n, Eigen::Index p,
                             double rho, int k_factors, double r_squared, Eigen::Index num_true,
                             double beta_value, int replications, std::uint64_t seed,
                             const std::vector<double>& lambdas, double w,
                             const std::vector<std::string>& methods,
                             const std::vector<std::string>& rules, int threads) {
  SimConfig cfg;
  cfg.setting = parse_setting(setting);
  cfg.n = n;
  cfg.p = p;
  cfg.rho = rho;
  cfg.k_factors = k_factors;
  cfg.r_squared = r_squared;
  cfg.num_true = num_true;
  cfg.beta_value = beta_value;
  cfg.replications = replications;
  cfg.seed = seed;
  cfg.lambdas = lambdas;
  cfg.w = w;
  cfg.methods = methods;
  cfg.rules = rules;
  cfg.threads = threads;
  return cfg;
}

py::list report_rows(const SimReport& report) {
  py::list rows;
  for (const auto& r : report.rows) {
    py::dict d;
    d["setting"] = r.setting;
    d["method"] = r.method;
    d["rule"] = r.rule;
    d["tpr"] = r.metrics.tpr;
    d["cp"] = r.metrics.cp;
    d["mean_size"] = r.metrics.mean_size;
    d["median_size"] = r.metrics.median_size;
    d["replications"] = r.metrics.replications;
    d["failures"] = r.failures;
    d["seconds"] = r.seconds;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Greedy posterior-driven variable screening for high-dimensional regression "
            "with incremental Cholesky updates, plus SIS/HOLP/FR baselines.";

  py::register_exception<input_error>(m, "InputError", PyExc_ValueError);
  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<StandardizedDesign>(m, "Design",
                                 "Column-standardized design matrix (centered, scaled to "
                                 "squared norm n). Construct via design() or design_from_csc().")
      .def_property_readonly("n", [](const StandardizedDesign& d) { return d.n; })
      .def_property_readonly("p", [](const StandardizedDesign& d) { return d.p; })
      .def_property_readonly("n_admissible",
                             [](const StandardizedDesign& d) { return d.n_admissible; })
      .def_property_readonly("col_means", [](const StandardizedDesign& d) { return d.col_means; })
      .def_property_readonly("col_sds", [](const StandardizedDesign& d) { return d.col_sds; })
      .def("admissible",
           [](const StandardizedDesign& d, Eigen::Index j) {
             if (j < 0 || j >= d.p) throw input_error("column index out of range");
             return d.admissible[static_cast<std::size_t>(j)] != 0;
           },
           py::arg("j"));

  m.def("design", [](const Eigen::MatrixXd& z) { return standardize(z); }, py::arg("z"),
        "Standardize a dense design matrix (rows are samples).");
  m.def("design_from_csc",
        [](const Eigen::VectorXd& data, const std::vector<int>& indices,
           const std::vector<int>& indptr, Eigen::Index n, Eigen::Index p) {
          if (static_cast<Eigen::Index>(indptr.size()) != p + 1)
            throw input_error("indptr must have p + 1 entries");
          Eigen::SparseMatrix<double> z(n, p);
          std::vector<Eigen::Triplet<double>> trips;
          trips.reserve(static_cast<std::size_t>(data.size()));
          for (Eigen::Index j = 0; j < p; ++j)
            for (int k = indptr[static_cast<std::size_t>(j)];
                 k < indptr[static_cast<std::size_t>(j) + 1]; ++k)
              trips.emplace_back(indices[static_cast<std::size_t>(k)], static_cast<int>(j),
                                 data[k]);
          z.setFromTriplets(trips.begin(), trips.end());
          return standardize(z);
        },
        py::arg("data"), py::arg("indices"), py::arg("indptr"), py::arg("n"), py::arg("p"),
        "Standardize a compressed-sparse-column matrix (scipy.sparse.csc_matrix fields).");

  py::class_<ScreeningResult>(m, "ScreenResult")
      .def_property_readonly("path", [](const ScreeningResult& r) { return r.path; })
      .def_property_readonly("pi_trace", [](const ScreeningResult& r) { return r.pi_trace; })
      .def_property_readonly("selected", [](const ScreeningResult& r) { return r.selected(); })
      .def_property_readonly("selected_size",
                             [](const ScreeningResult& r) { return r.selected_size; })
      .def_property_readonly("stop_reason",
                             [](const ScreeningResult& r) { return to_string(r.stop_reason); })
      .def_property_readonly("step_seconds",
                             [](const ScreeningResult& r) { return r.step_seconds; })
      .def("__repr__", [](const ScreeningResult& r) {
        return "<ScreenResult path_length=" + std::to_string(r.path.size()) +
               " selected=" + std::to_string(r.selected_size) + " stop_reason='" +
               to_string(r.stop_reason) + "'>";
      });

  m.def("screen",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y, double lam, double w,
           const std::string& stop, Eigen::Index size, Eigen::Index max_steps) {
          Hyperparams h{lam > 0 ? lam : static_cast<double>(d.p) / d.n, w};
          CenteredResponse resp = center_response(y);
          const Eigen::Index cap = std::min<Eigen::Index>(d.n - 1, d.n_admissible);
          Eigen::Index steps = max_steps >= 0 ? std::min(max_steps, cap) : cap;
          return bits_screen(d, resp, h, make_rule(stop, size >= 0 ? size : steps, -1), steps);
        },
        py::arg("design"), py::arg("y"), py::arg("lam") = -1.0, py::arg("w") = 0.1,
        py::arg("stop") = "pp", py::arg("size") = -1, py::arg("max_steps") = -1,
        py::call_guard<py::gil_scoped_release>(),
        "Greedy posterior screening. lam defaults to p/n; stop is one of pp, "
        "largest-drop, ebic, fixed. Indices are 0-based.");

  m.def("oracle_greedy_path",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y, double lam, double w,
           Eigen::Index steps, Eigen::Index max_p) {
          auto res = oracle_greedy_path(d, center_response(y), Hyperparams{lam, w}, steps, max_p);
          return py::make_tuple(res.path, res.trace);
        },
        py::arg("design"), py::arg("y"), py::arg("lam"), py::arg("w"), py::arg("steps"),
        py::arg("max_p") = 5000,
        "Exhaustive greedy reference path; returns (path, trace) with trace[0] the "
        "null model log posterior.");

  m.def("log_posterior",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y,
           const std::vector<Eigen::Index>& gamma, double lam, double w) {
          ModelIndex g = gamma;
          std::sort(g.begin(), g.end());
          return log_posterior_exact(d, center_response(y), g, Hyperparams{lam, w});
        },
        py::arg("design"), py::arg("y"), py::arg("gamma"), py::arg("lam"), py::arg("w") = 0.1,
        "Marginal log posterior of a model, up to the shared additive constant.");

  m.def("ridge_partials",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y,
           const std::vector<Eigen::Index>& gamma, Eigen::Index i, double lam) {
          ModelIndex g = gamma;
          std::sort(g.begin(), g.end());
          auto rp = ridge_partials(d, center_response(y), g, i, Hyperparams{lam, 0.1});
          py::dict out;
          out["v_cond"] = rp.v_cond;
          out["v_xy"] = rp.v_xy;
          out["v_resid"] = rp.v_resid;
          out["r"] = rp.r;
          return out;
        },
        py::arg("design"), py::arg("y"), py::arg("gamma"), py::arg("i"), py::arg("lam"),
        "Ridge partial variance/covariance/correlation of candidate i given gamma.");

  py::class_<BaselineResult>(m, "BaselineResult")
      .def_readonly("method", &BaselineResult::method)
      .def_readonly("order", &BaselineResult::order)
      .def_readonly("scores", &BaselineResult::scores)
      .def_readonly("jitter_applied", &BaselineResult::jitter_applied)
      .def("top", &BaselineResult::top, py::arg("m"));

  m.def("sis_rank",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y) {
          return sis_rank(d, center_response(y));
        },
        py::arg("design"), py::arg("y"), py::call_guard<py::gil_scoped_release>(),
        "Rank admissible columns by absolute marginal correlation.");
  m.def("holp_rank",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y) {
          return holp_rank(d, center_response(y));
        },
        py::arg("design"), py::arg("y"), py::call_guard<py::gil_scoped_release>(),
        "Rank by |projection coefficient| of the minimum-norm interpolator.");
  m.def("holp_coefficients",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y) {
          return holp_coefficients(d, center_response(y));
        },
        py::arg("design"), py::arg("y"), py::call_guard<py::gil_scoped_release>());
  m.def("fr_screen",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y, Eigen::Index max_steps) {
          return fr_screen(d, center_response(y), max_steps);
        },
        py::arg("design"), py::arg("y"), py::arg("max_steps"),
        py::call_guard<py::gil_scoped_release>(),
        "Forward regression path (greedy RSS reduction).");

  m.def("ebic_size",
        [](const StandardizedDesign& d, const Eigen::VectorXd& y,
           const std::vector<Eigen::Index>& path, Eigen::Index max_k) {
          return ebic_decide(d, center_response(y), path, max_k).size;
        },
        py::arg("design"), py::arg("y"), py::arg("path"), py::arg("max_k"));

  m.def("run_experiment",
        [](const std::string& setting, Eigen::Index n, Eigen::Index p, double rho, int k_factors,
           double r_squared, Eigen::Index num_true, double beta_value, int replications,
           std::uint64_t seed, const std::vector<double>& lambdas, double w,
           const std::vector<std::string>& methods, const std::vector<std::string>& rules,
           int threads) {
          SimConfig cfg = config_from_kwargs(setting, n, p, rho, k_factors, r_squared, num_true,
                                             beta_value, replications, seed, lambdas, w, methods,
                                             rules, threads);
          SimReport report;
          {
            py::gil_scoped_release release;
            report = run_experiment(cfg);
          }
          return report_rows(report);
        },
        py::arg("setting"), py::arg("n"), py::arg("p"), py::arg("rho") = 0.5,
        py::arg("k_factors") = -1, py::arg("r_squared") = 0.7, py::arg("num_true") = -1,
        py::arg("beta_value") = 0.0, py::arg("replications") = 100,
        py::arg("seed") = 20240601, py::arg("lambdas") = std::vector<double>{},
        py::arg("w") = 0.1,
        py::arg("methods") = std::vector<std::string>{"bits", "bits_all", "sis", "holp", "fr"},
        py::arg("rules") = std::vector<std::string>{"n", "pp", "ebic"}, py::arg("threads") = 0,
        "Run a synthetic screening experiment; returns one dict per method/rule row.");

  m.def("gen_design",
        [](const std::string& setting, Eigen::Index n, Eigen::Index p, double rho, int k_factors,
           double r_squared, Eigen::Index num_true, double beta_value, std::uint64_t seed,
           std::uint64_t rep_seed) {
          SimConfig cfg = config_from_kwargs(setting, n, p, rho, k_factors, r_squared, num_true,
                                             beta_value, 1, seed, {}, 0.1, {"bits"}, {"n"}, 0);
          auto draw = gen_design(cfg, rep_seed);
          Eigen::VectorXd y = gen_response(draw, cfg, rep_seed);
          return py::make_tuple(draw.z, y, draw.signal_var);
        },
        py::arg("setting"), py::arg("n"), py::arg("p"), py::arg("rho") = 0.5,
        py::arg("k_factors") = -1, py::arg("r_squared") = 0.7, py::arg("num_true") = -1,
        py::arg("beta_value") = 0.0, py::arg("seed") = 20240601, py::arg("rep_seed") = 1,
        "Draw one synthetic (Z, y, signal_variance) replication.");

  m.def("set_threads", &set_thread_count, py::arg("n"),
        "Set the worker thread count (results are identical for any setting).");
  m.def("threads", &thread_count);
}
