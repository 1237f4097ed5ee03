#include "mata/regression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mata/errors.hpp"

namespace mata {
namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kCollinearity = 1e-10;
constexpr double kPerfectFit = 1e-12;

std::string column_label(const DesignData& data, Eigen::Index j) {
  if (static_cast<std::size_t>(j) < data.column_names.size()) return data.column_names[j];
  return "#" + std::to_string(j);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

double RegressionSummary::sigma_hat() const { return std::sqrt(sigma2_hat); }

RegressionSummary make_summary(double theta_hat, double tau_hat, double sigma2_hat, double v_theta,
                               double v_tau, double rho, int n, int p) {
  if (!(n > p && p >= 1)) throw InputError("need n > p >= 1");
  if (!(sigma2_hat > 0.0)) throw InputError("sigma2_hat must be positive");
  if (!(v_theta > 0.0 && v_tau > 0.0)) throw InputError("v_theta and v_tau must be positive");
  if (!(std::fabs(rho) < 1.0)) throw InputError("|rho| must be < 1");
  RegressionSummary s;
  s.theta_hat = theta_hat;
  s.tau_hat = tau_hat;
  s.sigma2_hat = sigma2_hat;
  s.v_theta = v_theta;
  s.v_tau = v_tau;
  s.rho = rho;
  s.n = n;
  s.p = p;
  s.m = n - p;
  s.gamma_hat = tau_hat / (std::sqrt(sigma2_hat) * std::sqrt(v_tau));
  s.rss = s.m * sigma2_hat;
  s.rss_star = tau_hat * tau_hat / v_tau + s.rss;
  return s;
}

RegressionSummary fit_summary(const DesignData& data) {
  const Eigen::Index n = data.X.rows();
  const Eigen::Index p = data.X.cols();
  if (p < 1) throw InputError("model matrix has no columns");
  if (data.Y.size() != n) {
    throw InputError("response length " + std::to_string(data.Y.size()) + " does not match " +
                     std::to_string(n) + " model-matrix rows");
  }
  if (data.a.size() != p || data.c.size() != p) {
    throw InputError("vectors a and c must have length p = " + std::to_string(p) + " (got " +
                     std::to_string(data.a.size()) + " and " + std::to_string(data.c.size()) + ")");
  }
  if (n <= p) {
    throw InputError("need more observations than columns (n = " + std::to_string(n) +
                     ", p = " + std::to_string(p) + ", so m = n - p < 1)");
  }
  if (!data.X.allFinite() || !data.Y.allFinite()) throw InputError("data contain non-finite values");
  if (data.a.isZero(0.0)) throw InputError("vector a must be nonzero");
  if (data.c.isZero(0.0)) throw InputError("vector c must be nonzero");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = kRankTolerance * sv(0);
  std::vector<Eigen::Index> null_dirs;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (!(sv(k) > cutoff)) null_dirs.push_back(k);
  }
  if (!null_dirs.empty()) {
    std::vector<Eigen::Index> offending;
    for (Eigen::Index j = 0; j < p; ++j) {
      for (const auto k : null_dirs) {
        if (std::fabs(svd.matrixV()(j, k)) > 1e-8) {
          offending.push_back(j);
          break;
        }
      }
    }
    std::ostringstream msg;
    msg << "model matrix is rank deficient (rank " << p - static_cast<Eigen::Index>(null_dirs.size())
        << " < " << p << "); linearly dependent columns: {";
    for (std::size_t i = 0; i < offending.size(); ++i) {
      msg << (i ? ", " : "") << column_label(data, offending[i]);
    }
    msg << "}";
    throw InputError(msg.str());
  }

  const Eigen::MatrixXd& V = svd.matrixV();
  const Eigen::VectorXd inv_sv = sv.cwiseInverse();
  const Eigen::VectorXd beta = V * inv_sv.asDiagonal() * (svd.matrixU().transpose() * data.Y);
  // (X'X)^{-1} = V S^{-2} V', so quadratic forms are inner products of S^{-1} V' a.
  const Eigen::VectorXd wa = inv_sv.asDiagonal() * (V.transpose() * data.a);
  const Eigen::VectorXd wc = inv_sv.asDiagonal() * (V.transpose() * data.c);
  const double v_theta = wa.squaredNorm();
  const double v_tau = wc.squaredNorm();
  const double rho = wa.dot(wc) / std::sqrt(v_theta * v_tau);
  if (!(std::fabs(rho) < 1.0 - kCollinearity)) {
    throw InputError("vectors a and c are numerically collinear (|rho| >= 1 - 1e-10)");
  }

  const double rss = (data.Y - data.X * beta).squaredNorm();
  const int m = static_cast<int>(n - p);
  const double sigma2 = rss / m;
  const double fit_floor = kPerfectFit * data.Y.norm();
  if (!(sigma2 > 0.0) || rss <= fit_floor * fit_floor) throw InputError("residual variance is zero (perfect fit)");

  return make_summary(data.a.dot(beta), data.c.dot(beta) - data.t, sigma2, v_theta, v_tau, rho,
                      static_cast<int>(n), static_cast<int>(p));
}

DesignData load_dataset(const std::filesystem::path& path, const DatasetOptions& options,
                        const Eigen::VectorXd& a, const Eigen::VectorXd& c, double t) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path.string() + "'");

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_line(line);
      break;
    }
  }
  if (header.empty()) throw InputError("data file '" + path.string() + "' is empty (no header row)");

  std::size_t response = header.size();
  const auto& key = options.response_column;
  if (!key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    response = std::stoul(key);
  } else {
    response = static_cast<std::size_t>(std::find(header.begin(), header.end(), key) - header.begin());
  }
  if (response >= header.size()) throw InputError("response column '" + key + "' not found in header");

  std::vector<std::vector<double>> rows;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++data_row;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw InputError("row " + std::to_string(data_row) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (cells[j].empty() || cells[j] == "NA" || cells[j] == "NaN") {
        throw InputError("row " + std::to_string(data_row) + ": missing value in column '" + header[j] + "'");
      }
      if (!parse_number(cells[j], values[j])) {
        throw InputError("row " + std::to_string(data_row) + ": non-numeric value '" + cells[j] +
                         "' in column '" + header[j] + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError("data file '" + path.string() + "' has a header but no data rows");

  DesignData data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto predictors = static_cast<Eigen::Index>(header.size() - 1);
  const Eigen::Index offset = options.intercept ? 1 : 0;
  data.X.resize(n, predictors + offset);
  data.Y.resize(n);
  if (options.intercept) data.column_names.push_back("(Intercept)");
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != response) data.column_names.push_back(header[j]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (options.intercept) data.X(i, 0) = 1.0;
    Eigen::Index col = offset;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == response) {
        data.Y(i) = rows[i][j];
      } else {
        data.X(i, col++) = rows[i][j];
      }
    }
  }
  const auto p = data.X.cols();
  if (a.size() != p || c.size() != p) {
    throw InputError("vectors a and c must have length p = " + std::to_string(p) + " (got " +
                     std::to_string(a.size()) + " and " + std::to_string(c.size()) + ")");
  }
  data.a = a;
  data.c = c;
  data.t = t;
  return data;
}

}  // namespace mata
