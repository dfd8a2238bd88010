#include "bitscreen/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bitscreen/errors.hpp"

namespace bitscreen {

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write file: " + path);
  return out;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& tok, double& out) {
  const std::string t = trim(tok);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

DenseTable load_dense_table(const std::string& path) {
  auto in = open_in(path);
  DenseTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  char delim = ',';
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (first_content) {
      if (line.find('\t') != std::string::npos) delim = '\t';
    }
    auto toks = split(line, delim);
    std::vector<double> row(toks.size());
    bool numeric = true;
    for (std::size_t c = 0; c < toks.size(); ++c) {
      if (!parse_double(toks[c], row[c])) {
        if (first_content) {
          numeric = false;
          break;
        }
        throw input_error(path + ": cannot parse value at row " + std::to_string(lineno) +
                          ", column " + std::to_string(c + 1) + ": '" + trim(toks[c]) + "'");
      }
    }
    if (first_content && !numeric) {
      for (auto& t : toks) table.col_names.push_back(trim(t));
      first_content = false;
      continue;
    }
    first_content = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw input_error(path + ": row " + std::to_string(lineno) + " has " +
                        std::to_string(row.size()) + " fields, expected " +
                        std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw input_error(path + ": no data rows");
  if (!table.col_names.empty() && table.col_names.size() != rows.front().size())
    throw input_error(path + ": header has " + std::to_string(table.col_names.size()) +
                      " fields, rows have " + std::to_string(rows.front().size()));
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

Eigen::SparseMatrix<double> load_matrix_market(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  bool pattern = false;
  if (!std::getline(in, line)) throw input_error(path + ": empty file");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
      throw input_error(path + ": expected a Matrix Market coordinate header");
    if (field == "pattern") pattern = true;
    else if (field != "real" && field != "integer")
      throw input_error(path + ": unsupported Matrix Market field '" + field + "'");
    if (symmetry != "general")
      throw input_error(path + ": only 'general' symmetry is supported");
  }
  Eigen::Index nrows = 0, ncols = 0;
  long long nnz = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (trim(line).empty()) continue;
    std::istringstream ds(line);
    if (!(ds >> nrows >> ncols >> nnz))
      throw input_error(path + ": malformed size line at line " + std::to_string(lineno));
    break;
  }
  if (nrows <= 0 || ncols <= 0)
    throw input_error(path + ": invalid dimensions");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  long long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '%') continue;
    std::istringstream es(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(es >> i >> j) || (!pattern && !(es >> v)))
      throw input_error(path + ": malformed entry at line " + std::to_string(lineno));
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      throw input_error(path + ": index out of range at line " + std::to_string(lineno) +
                        " (indices are 1-based)");
    trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    ++seen;
  }
  if (seen != nnz)
    throw input_error(path + ": expected " + std::to_string(nnz) + " entries, found " +
                      std::to_string(seen));
  Eigen::SparseMatrix<double> m(nrows, ncols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::VectorXd load_response(const std::string& path) {
  auto in = open_in(path);
  std::vector<double> vals;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    double v;
    if (!parse_double(line, v))
      throw input_error(path + ": cannot parse response value at line " + std::to_string(lineno) +
                        ": '" + trim(line) + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw input_error(path + ": no response values");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

StandardizedDesign load_design(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".mtx")
    return standardize(load_matrix_market(path));
  DenseTable t = load_dense_table(path);
  StandardizedDesign d = standardize(t.values);
  d.col_names = std::move(t.col_names);
  return d;
}

void write_dense_csv(const std::string& path, const Eigen::MatrixXd& m,
                     const std::vector<std::string>& col_names) {
  auto out = open_out(path);
  if (!col_names.empty()) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << col_names[static_cast<std::size_t>(j)];
    out << "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt12(m(i, j));
    out << "\n";
  }
}

void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it)
      out << (it.row() + 1) << " " << (it.col() + 1) << " " << fmt12(it.value()) << "\n";
}

void write_response(const std::string& path, const Eigen::VectorXd& v) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << fmt12(v[i]) << "\n";
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

template <typename T, typename F>
void json_array(std::ostream& os, const std::vector<T>& v, F f) {
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << f(v[i]);
  os << "]";
}

}  // namespace

std::string screen_output_json(const ScreenOutput& out) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"method\": \"" << json_escape(out.method) << "\",\n";
  os << "  \"n\": " << out.n << ",\n";
  os << "  \"p\": " << out.p << ",\n";
  if (out.method == "bits") {
    os << "  \"lambda\": " << fmt12(out.lambda) << ",\n";
    os << "  \"w\": " << fmt12(out.w) << ",\n";
  } else if (out.method == "fr") {
    os << "  \"lambda\": 0,\n";
  }
  os << "  \"stop_rule\": \"" << json_escape(out.stop_rule) << "\",\n";
  os << "  \"path\": ";
  json_array(os, out.path, [](Eigen::Index i) { return std::to_string(i + 1); });
  os << ",\n";
  os << "  \"" << out.json_trace_key << "\": ";
  json_array(os, out.score_trace, [](double x) { return fmt12(x); });
  os << ",\n";
  os << "  \"selected\": ";
  std::vector<Eigen::Index> sel(out.path.begin(),
                                out.path.begin() + std::min<std::size_t>(
                                                       static_cast<std::size_t>(out.selected_size),
                                                       out.path.size()));
  json_array(os, sel, [](Eigen::Index i) { return std::to_string(i + 1); });
  os << ",\n";
  os << "  \"stop_reason\": \"" << json_escape(out.stop_reason) << "\",\n";
  os << "  \"degraded\": " << (out.degraded ? "true" : "false") << ",\n";
  os << "  \"timings\": {\"total_seconds\": " << fmt12(out.total_seconds)
     << ", \"steps\": " << out.step_seconds.size() << "}\n";
  os << "}\n";
  return os.str();
}

void write_screen_json(const std::string& path, const ScreenOutput& out) {
  open_out(path) << screen_output_json(out);
}

void write_screen_csv(const std::string& path, const ScreenOutput& out) {
  auto os = open_out(path);
  const bool named = !out.col_names.empty();
  os << "rank,column_index" << (named ? ",column_name," : ",") << out.csv_score_header << "\n";
  for (std::size_t k = 0; k < out.path.size(); ++k) {
    os << (k + 1) << "," << (out.path[k] + 1) << ",";
    if (named) os << out.col_names[static_cast<std::size_t>(out.path[k])] << ",";
    os << (k < out.score_trace.size() ? fmt12(out.score_trace[k]) : "") << "\n";
  }
}

SimConfig parse_sim_config(const std::string& path) {
  auto in = open_in(path);
  SimConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& what) {
    return config_error(path + ":" + std::to_string(lineno) + ": " + what);
  };
  auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    for (auto& t : split(s, ',')) {
      std::string v = trim(t);
      if (!v.empty()) out.push_back(v);
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line;
    if (auto pos = s.find('#'); pos != std::string::npos) s = s.substr(0, pos);
    s = trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw bad("expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    try {
      if (key == "setting") cfg.setting = parse_setting(val);
      else if (key == "n") cfg.n = std::stoll(val);
      else if (key == "p") cfg.p = std::stoll(val);
      else if (key == "rho") cfg.rho = std::stod(val);
      else if (key == "k_factors") cfg.k_factors = std::stoi(val);
      else if (key == "r_squared") cfg.r_squared = std::stod(val);
      else if (key == "num_true") cfg.num_true = std::stoll(val);
      else if (key == "beta_value") cfg.beta_value = std::stod(val);
      else if (key == "replications") cfg.replications = std::stoi(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "w") cfg.w = std::stod(val);
      else if (key == "threads") cfg.threads = std::stoi(val);
      else if (key == "lambda") {
        cfg.lambdas.clear();
        for (auto& t : split_list(val)) cfg.lambdas.push_back(std::stod(t));
      } else if (key == "methods") cfg.methods = split_list(val);
      else if (key == "rules") cfg.rules = split_list(val);
      else throw bad("unknown key '" + key + "'");
    } catch (const config_error&) {
      throw;
    } catch (const std::exception&) {
      throw bad("cannot parse value '" + val + "' for key '" + key + "'");
    }
  }
  return cfg;
}

std::string report_csv(const SimReport& report) {
  std::ostringstream os;
  os << "setting,method,rule,TPR,CP,mean_size,median_size,seconds\n";
  for (const auto& r : report.rows) {
    os << r.setting << "," << r.method << "," << r.rule << "," << fmt12(r.metrics.tpr) << ","
       << fmt12(r.metrics.cp) << "," << fmt12(r.metrics.mean_size) << ","
       << fmt12(r.metrics.median_size) << "," << fmt12(r.seconds) << "\n";
  }
  return os.str();
}

std::string report_json(const SimReport& report) {
  std::ostringstream os;
  os << "{\n  \"rows\": [\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    os << "    {\"setting\": \"" << json_escape(r.setting) << "\", \"method\": \""
       << json_escape(r.method) << "\", \"rule\": \"" << json_escape(r.rule)
       << "\", \"TPR\": " << fmt12(r.metrics.tpr) << ", \"CP\": " << fmt12(r.metrics.cp)
       << ", \"mean_size\": " << fmt12(r.metrics.mean_size)
       << ", \"median_size\": " << fmt12(r.metrics.median_size)
       << ", \"replications\": " << r.metrics.replications
       << ", \"failures\": " << r.failures
       << ", \"seconds\": " << fmt12(r.seconds) << "}" << (i + 1 < report.rows.size() ? "," : "")
       << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

void write_report(const std::string& prefix, const SimReport& report) {
  open_out(prefix + ".csv") << report_csv(report);
  open_out(prefix + ".json") << report_json(report);
}

}  // namespace bitscreen
