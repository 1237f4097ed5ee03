#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mata {

/// Model matrix, responses and the (a, c, t) that define
/// theta = a' beta and tau = c' beta - t.
struct DesignData {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  Eigen::VectorXd a;
  Eigen::VectorXd c;
  double t = 0.0;
  /// Column labels in model-matrix order, used in diagnostics. May be empty.
  std::vector<std::string> column_names;
};

/// Sufficient statistics of the full-model least squares fit.
struct RegressionSummary {
  double theta_hat = 0.0;
  double tau_hat = 0.0;
  double sigma2_hat = 0.0;
  double v_theta = 0.0;
  double v_tau = 0.0;
  double rho = 0.0;
  double gamma_hat = 0.0;
  int m = 0;
  int n = 0;
  int p = 0;
  double rss = 0.0;
  /// Residual sum of squares of the fit constrained to tau = 0.
  double rss_star = 0.0;

  double sigma_hat() const;
};

/// Least squares fit of the full model by singular value decomposition.
/// Singular values below 1e-10 times the largest count as zero; a
/// rank-deficient X is reported together with the columns spanning the
/// null space. Throws InputError on any violated precondition.
RegressionSummary fit_summary(const DesignData& data);

/// Assembles a summary from already-known sufficient statistics, filling the
/// derived fields (gamma_hat, rss, rss_star).
RegressionSummary make_summary(double theta_hat, double tau_hat, double sigma2_hat, double v_theta,
                               double v_tau, double rho, int n, int p);

struct DatasetOptions {
  /// Response column given by header name, or by zero-based index when the
  /// string is all digits.
  std::string response_column;
  bool intercept = false;
};

/// Reads a comma-separated file with a header row. Every column other than
/// the response becomes a predictor, in file order; an "(Intercept)" column
/// is prepended when requested.
DesignData load_dataset(const std::filesystem::path& path, const DatasetOptions& options,
                        const Eigen::VectorXd& a, const Eigen::VectorXd& c, double t);

}  // namespace mata
