#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bitscreen/baselines.hpp"
#include "bitscreen/screen.hpp"
#include "bitscreen/simulate.hpp"

namespace bitscreen {

// All floating output is serialized with 12 significant digits; this is the
// comparison precision for golden files.
std::string fmt12(double x);

struct DenseTable {
  Eigen::MatrixXd values;
  std::vector<std::string> col_names;  // empty when the file has no header row
};

// Delimited text, rows are samples; a header row of column names is detected
// when the first row does not parse as numbers. Comma or tab delimited.
DenseTable load_dense_table(const std::string& path);
// Matrix Market coordinate format, 1-based indices.
Eigen::SparseMatrix<double> load_matrix_market(const std::string& path);
// One value per line.
Eigen::VectorXd load_response(const std::string& path);

// Dispatch on extension: .mtx loads sparse, anything else dense text.
StandardizedDesign load_design(const std::string& path);

void write_dense_csv(const std::string& path, const Eigen::MatrixXd& m,
                     const std::vector<std::string>& col_names = {});
void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m);
void write_response(const std::string& path, const Eigen::VectorXd& v);

// Screening outputs. Column indices in files are 1-based (matching the
// Matrix Market input convention); the C++ and python APIs are 0-based.
struct ScreenOutput {
  std::string method;
  double lambda = 0.0;
  double w = 0.0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  std::string stop_rule;
  std::vector<Eigen::Index> path;
  std::vector<double> score_trace;  // log posterior (bits), RSS (fr), |score| (sis/holp)
  std::string json_trace_key = "scores";        // "pi_trace" for bits
  std::string csv_score_header = "score";       // "log_posterior" for bits, "rss" for fr
  Eigen::Index selected_size = 0;
  std::string stop_reason;
  std::vector<double> step_seconds;
  double total_seconds = 0.0;
  bool degraded = false;  // breakdown downgraded to a partial result (exit 1)
  std::vector<std::string> col_names;
};

std::string screen_output_json(const ScreenOutput& out);
void write_screen_json(const std::string& path, const ScreenOutput& out);
void write_screen_csv(const std::string& path, const ScreenOutput& out);

// key = value config file for `simulate`; '#' starts a comment. Keys:
// setting, n, p, rho, k_factors, r_squared, num_true, beta_value,
// replications, seed, lambda (comma list), w, methods (comma list),
// rules (comma list), threads.
SimConfig parse_sim_config(const std::string& path);

std::string report_csv(const SimReport& report);
std::string report_json(const SimReport& report);
void write_report(const std::string& prefix, const SimReport& report);

}  // namespace bitscreen
