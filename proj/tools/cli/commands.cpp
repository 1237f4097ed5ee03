#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "csv_table.hpp"
#include "manifest.hpp"
#include "mata/distributions.hpp"
#include "mata/errors.hpp"
#include "mata/performance.hpp"
#include "mata/regression.hpp"
#include "mata/tail.hpp"
#include "mata/weights.hpp"
#include "selfcheck.hpp"
#include "svg_plot.hpp"

namespace mata::cli {
namespace {

constexpr double kMaxSweepD = 64.0;

struct Preset {
  double rho;
  std::vector<int> ms;
};

const std::map<std::string, Preset>& curve_presets() {
  static const std::map<std::string, Preset> p = {{"scenario1", {0.05, {50}}}};
  return p;
}

const std::map<std::string, Preset>& sweep_presets() {
  static const std::map<std::string, Preset> p = {
      {"scenario2", {0.8, {10, 50, 200}}},
      {"scenario3", {0.0, {1, 2, 3}}},
      {"scenario4", {0.8, {1, 2, 3}}},
  };
  return p;
}

std::vector<double> parse_vector(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
      throw InputError(flag + ": expected comma-separated numbers, got '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError(flag + ": empty vector");
  return out;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct WeightFlags {
  std::string kind = "mic";
  double d = 2.0;
  int n = 0;
};

WeightSpec make_weight(const WeightFlags& f, int fallback_n) {
  if (f.kind == "none") return WeightSpec::none();
  if (f.kind == "mic") return WeightSpec::mic(f.d);
  const int n = f.n > 0 ? f.n : fallback_n;
  if (n <= 0) throw InputError("--weight gic needs --n");
  return WeightSpec::gic(f.d, n);
}

nlohmann::ordered_json weight_json(const WeightSpec& w) {
  nlohmann::ordered_json j;
  j["kind"] = w.is_zero() ? "none" : w.kind() == WeightKind::Mic ? "mic" : w.kind() == WeightKind::Gic ? "gic" : "custom";
  if (!w.is_zero()) j["d"] = w.d();
  if (w.kind() == WeightKind::Gic) j["n"] = w.n();
  return j;
}

nlohmann::ordered_json config_json(const ProblemConfig& cfg, const QuadratureOptions& q) {
  nlohmann::ordered_json j;
  j["m"] = cfg.m.value();
  j["rho"] = cfg.rho;
  j["alpha"] = cfg.alpha;
  j["weight"] = weight_json(cfg.weight);
  j["epsilon"] = q.epsilon;
  j["rel_tol"] = q.rel_tol;
  return j;
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  auto out = p;
  out.replace_filename(p.stem().string() + suffix + p.extension().string());
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
}

// ---- interval -------------------------------------------------------------

struct IntervalFlags {
  std::string data, response, a, c;
  double t = 0.0;
  double alpha = 0.05;
  WeightFlags weight;
  bool intercept = false;
  bool json = false;
};

int cmd_interval(const IntervalFlags& f, std::ostream& out) {
  check_alpha(f.alpha);
  const DesignData data = load_dataset(f.data, DatasetOptions{f.response, f.intercept}, to_eigen(parse_vector("--a", f.a)),
                                       to_eigen(parse_vector("--c", f.c)), f.t);
  const RegressionSummary s = fit_summary(data);
  const WeightSpec w = make_weight(f.weight, s.n);
  const Interval iv = mata_interval(s, f.alpha, w);
  const double weight_value = w(s.gamma_hat * s.gamma_hat, DegreesOfFreedom(s.m));
  const double half = student_t_quantile(1.0 - 0.5 * f.alpha, DegreesOfFreedom(s.m)) * std::sqrt(s.v_theta) * s.sigma_hat();

  if (f.json) {
    nlohmann::ordered_json j;
    j["theta_hat"] = s.theta_hat;
    j["tau_hat"] = s.tau_hat;
    j["gamma_hat"] = s.gamma_hat;
    j["rho"] = s.rho;
    j["m"] = s.m;
    j["sigma_hat"] = s.sigma_hat();
    j["weight"] = weight_value;
    j["lower"] = iv.lower;
    j["upper"] = iv.upper;
    j["standard_lower"] = s.theta_hat - half;
    j["standard_upper"] = s.theta_hat + half;
    out << j.dump(2) << '\n';
    return 0;
  }
  out << "theta_hat      " << format_double(s.theta_hat) << '\n'
      << "tau_hat        " << format_double(s.tau_hat) << '\n'
      << "gamma_hat      " << format_double(s.gamma_hat) << '\n'
      << "rho            " << format_double(s.rho) << '\n'
      << "m              " << s.m << '\n'
      << "weight         " << format_double(weight_value) << '\n'
      << "interval       [" << format_double(iv.lower) << ", " << format_double(iv.upper) << "]\n"
      << "standard t     [" << format_double(s.theta_hat - half) << ", " << format_double(s.theta_hat + half) << "]\n";
  return 0;
}

// ---- curves ---------------------------------------------------------------

struct CurvesFlags {
  std::string preset;
  std::optional<int> m;
  std::optional<double> rho;
  double alpha = 0.05;
  WeightFlags weight{"mic", 0.0, 0};
  double gamma_max = 15.0;
  double step = 0.05;
  double epsilon = 1e-8;
  double rel_tol = 1e-8;
  std::string out;
  std::string mc_check;
  std::string plot;
};

int cmd_curves(const CurvesFlags& f, const std::vector<std::string>& argv, std::ostream& out) {
  check_alpha(f.alpha);
  int m = f.m.value_or(0);
  double rho = f.rho.value_or(0.0);
  if (!f.preset.empty()) {
    const Preset& p = curve_presets().at(f.preset);
    if (f.m && *f.m != p.ms.front()) throw InputError("--m conflicts with --preset " + f.preset);
    m = p.ms.front();
    rho = p.rho;
  } else if (!f.m || !f.rho) {
    throw InputError("curves needs --m and --rho (or --preset)");
  }
  const ScanOptions scan{f.gamma_max, f.step, 1e-4};
  const std::vector<double> grid = scan.grid();
  const QuadratureOptions q{f.epsilon, f.rel_tol, QuadratureOptions{}.max_subdivisions};
  q.validate();
  ProblemConfig cfg{DegreesOfFreedom(m), rho, f.alpha, make_weight(f.weight, 0)};
  cfg.validate();

  std::optional<std::int64_t> mc_n;
  std::uint64_t mc_seed = 0;
  if (!f.mc_check.empty()) {
    const auto v = parse_vector("--mc-check", f.mc_check);
    if (v.size() != 2 || v[0] < 1e4 || v[1] < 0 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
      throw InputError("--mc-check expects n,seed with integer n >= 10000");
    }
    mc_n = static_cast<std::int64_t>(v[0]);
    mc_seed = static_cast<std::uint64_t>(v[1]);
  }
  ensure_writable(f.out);
  if (!f.plot.empty()) ensure_writable(f.plot);

  const PerformanceCurve curve = performance_curve(cfg, grid, q);

  RunManifest manifest;
  manifest.command = "curves";
  manifest.config = config_json(cfg, q);
  manifest.config["gamma_max"] = f.gamma_max;
  manifest.config["step"] = f.step;
  if (!f.preset.empty()) manifest.config["preset"] = f.preset;
  if (mc_n) {
    manifest.config["mc_samples"] = *mc_n;
    manifest.seed = mc_seed;
  }
  manifest.argv = argv;

  CsvTable table;
  table.comments = manifest.comment_lines();
  table.comments.push_back("c_min_used " + format_double(curve.c_min_used));
  table.columns = {"gamma", "coverage", "coverage_err", "sel", "sel_err"};
  if (mc_n) {
    table.columns.push_back("mc_coverage");
    table.columns.push_back("mc_se");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row = {grid[i], curve.coverage[i], curve.coverage_err[i], curve.sel[i], curve.sel_err[i]};
    if (mc_n) {
      const McEstimate mc = mc_oracle(grid[i], cfg, *mc_n, mc_seed + i);
      row.push_back(mc.coverage);
      row.push_back(mc.se_coverage);
    }
    table.rows.push_back(std::move(row));
  }
  table.save(f.out);
  manifest.write_sidecar(f.out);
  if (!f.plot.empty()) plot_file(f.out, f.plot);
  out << "wrote " << f.out << " (" << grid.size() << " rows, c_min " << format_double(curve.c_min_used) << ")\n";
  return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepFlags {
  std::string preset;
  std::optional<int> m;
  std::optional<double> rho;
  double alpha = 0.05;
  WeightFlags weight{"mic", 0.0, 0};
  double d_from = 0.0, d_to = 8.0, d_step = 0.1;
  double gamma_max = 15.0;
  double scan_step = 0.05;
  double epsilon = 1e-8;
  double rel_tol = 1e-8;
  std::string out;
  std::string plot;
};

std::vector<double> d_grid(const SweepFlags& f) {
  if (!(f.d_step > 0.0) || !std::isfinite(f.d_step)) throw InputError("--d-step must be positive");
  if (!(f.d_from >= 0.0 && f.d_to <= kMaxSweepD)) throw InputError("d range must lie within [0, 64]");
  if (f.d_from > f.d_to) throw InputError("--d-from must not exceed --d-to");
  const auto steps = static_cast<long>(std::floor((f.d_to - f.d_from) / f.d_step + 1e-9));
  std::vector<double> grid;
  for (long i = 0; i <= steps; ++i) grid.push_back(std::round((f.d_from + i * f.d_step) * 1e12) / 1e12);
  return grid;
}

int run_sweep_one(const SweepFlags& f, int m, double rho, const std::filesystem::path& out_path,
                  const std::filesystem::path& plot_path, const std::vector<std::string>& argv, std::ostream& out) {
  const QuadratureOptions q{f.epsilon, f.rel_tol, QuadratureOptions{}.max_subdivisions};
  const ScanOptions scan{f.gamma_max, f.scan_step, 1e-4};
  ProblemConfig cfg{DegreesOfFreedom(m), rho, f.alpha, make_weight(f.weight, 0)};
  cfg.validate();
  const auto grid = d_grid(f);
  const auto rows = d_sweep(cfg, grid, q, scan);

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.config = config_json(cfg, q);
  manifest.config["weight"].erase("d");
  manifest.config["d_from"] = f.d_from;
  manifest.config["d_to"] = f.d_to;
  manifest.config["d_step"] = f.d_step;
  manifest.config["gamma_max"] = f.gamma_max;
  manifest.config["scan_step"] = f.scan_step;
  if (!f.preset.empty()) manifest.config["preset"] = f.preset;
  manifest.argv = argv;

  CsvTable table;
  table.comments = manifest.comment_lines();
  table.columns = {"d", "cov_loss", "sel_loss", "sel_gain", "gamma_at_min_cov", "gamma_at_max_sel"};
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++failures;
      table.comments.push_back("error d=" + format_double(r.d) + ": " + r.error);
      continue;
    }
    table.rows.push_back({r.d, r.cov_loss, r.sel_loss, r.sel_gain, r.gamma_at_min_cov, r.gamma_at_max_sel});
  }
  table.save(out_path);
  manifest.write_sidecar(out_path);
  if (!plot_path.empty() && !table.rows.empty()) plot_file(out_path, plot_path);
  out << "wrote " << out_path.string() << " (" << table.rows.size() << " rows";
  if (failures) out << ", " << failures << " failed";
  out << ")\n";
  return failures ? 1 : 0;
}

int cmd_sweep(const SweepFlags& f, const std::vector<std::string>& argv, std::ostream& out) {
  check_alpha(f.alpha);
  if (f.weight.kind == "none") throw InputError("sweep needs a penalized weight (mic or gic)");
  {
    QuadratureOptions{f.epsilon, f.rel_tol, QuadratureOptions{}.max_subdivisions}.validate();
    ScanOptions{f.gamma_max, f.scan_step, 1e-4}.validate();
    d_grid(f);
  }
  std::vector<std::pair<int, double>> runs;
  bool per_m_files = false;
  if (!f.preset.empty()) {
    const Preset& p = sweep_presets().at(f.preset);
    if (f.m) {
      if (std::find(p.ms.begin(), p.ms.end(), *f.m) == p.ms.end()) {
        throw InputError("--m " + std::to_string(*f.m) + " is not part of --preset " + f.preset);
      }
      runs.emplace_back(*f.m, p.rho);
    } else {
      for (int m : p.ms) runs.emplace_back(m, p.rho);
      per_m_files = true;
    }
  } else {
    if (!f.m || !f.rho) throw InputError("sweep needs --m and --rho (or --preset)");
    runs.emplace_back(*f.m, *f.rho);
  }
  struct Target {
    std::filesystem::path csv, svg;
  };
  std::vector<Target> targets;
  for (const auto& [m, rho] : runs) {
    const std::string suffix = per_m_files ? "_m" + std::to_string(m) : "";
    Target t{with_suffix(f.out, suffix), f.plot.empty() ? std::filesystem::path() : with_suffix(f.plot, suffix)};
    ensure_writable(t.csv);
    if (!t.svg.empty()) ensure_writable(t.svg);
    targets.push_back(t);
  }
  int code = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    code = std::max(code, run_sweep_one(f, runs[i].first, runs[i].second, targets[i].csv, targets[i].svg, argv, out));
  }
  return code;
}

// ---- selfcheck / plot -----------------------------------------------------

int cmd_selfcheck(bool full, const std::string& fault, std::ostream& out) {
  if (fault == "t-cdf") testing::set_student_t_cdf_bias(1e-2);
  const auto results = run_selfcheck(SelfcheckOptions{full}, out);
  testing::set_student_t_cdf_bias(0.0);
  const auto failed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return !r.passed; });
  out << (failed ? "selfcheck FAILED: " : "selfcheck passed: ") << results.size() - failed << "/" << results.size()
      << " checks\n";
  return failed ? 1 : 0;
}

int cmd_plot(const std::string& in, const std::string& out_path, const std::string& x, const std::string& y,
             const std::string& title, std::ostream& out) {
  ensure_writable(out_path);
  if (x.empty() && y.empty()) {
    plot_file(in, out_path);
  } else {
    const CsvTable table = CsvTable::load(in);
    PlotSpec spec = default_plot_spec(table);
    if (!x.empty()) spec.x_column = x;
    if (!y.empty()) {
      spec.y_columns.clear();
      std::stringstream ss(y);
      for (std::string c; std::getline(ss, c, ',');) spec.y_columns.push_back(c);
    }
    if (!title.empty()) spec.title = title;
    plot_file(in, out_path, &spec);
  }
  out << "wrote " << out_path << '\n';
  return 0;
}

void add_weight_flags(CLI::App* cmd, WeightFlags& w, bool allow_none) {
  auto* opt = cmd->add_option("--weight", w.kind, "Weight family");
  if (allow_none) {
    opt->check(CLI::IsMember({"mic", "gic", "none"}));
  } else {
    opt->check(CLI::IsMember({"mic", "gic"}));
  }
  cmd->add_option("--n", w.n, "Sample size for the GIC weight")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model averaged tail area confidence intervals", "mata"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  IntervalFlags iflags;
  auto* interval = app.add_subcommand("interval", "MATA for theta = a'beta from a CSV dataset");
  interval->add_option("--data", iflags.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  interval->add_option("--response", iflags.response, "Response column (name or 0-based index)")->required();
  interval->add_option("--a", iflags.a, "Comma-separated vector a")->required();
  interval->add_option("--c", iflags.c, "Comma-separated vector c")->required();
  interval->add_option("--t", iflags.t, "tau = c'beta - t");
  interval->add_option("--alpha", iflags.alpha, "Nominal noncoverage");
  add_weight_flags(interval, iflags.weight, true);
  interval->add_option("--d", iflags.weight.d, "Penalty d")->check(CLI::NonNegativeNumber);
  interval->add_flag("--intercept", iflags.intercept, "Prepend an intercept column");
  interval->add_flag("--json", iflags.json, "Print JSON");

  CurvesFlags cflags;
  auto* curves = app.add_subcommand("curves", "Coverage and scaled expected length as functions of gamma");
  curves->add_option("--preset", cflags.preset)->check(CLI::IsMember({"scenario1"}));
  curves->add_option("--m", cflags.m)->check(CLI::PositiveNumber);
  curves->add_option("--rho", cflags.rho);
  curves->add_option("--alpha", cflags.alpha);
  add_weight_flags(curves, cflags.weight, true);
  curves->add_option("--d", cflags.weight.d)->check(CLI::NonNegativeNumber);
  curves->add_option("--gamma-max", cflags.gamma_max);
  curves->add_option("--step", cflags.step);
  curves->add_option("--epsilon", cflags.epsilon);
  curves->add_option("--rel-tol", cflags.rel_tol);
  curves->add_option("--out", cflags.out)->required();
  curves->add_option("--mc-check", cflags.mc_check, "n,seed");
  curves->add_option("--plot", cflags.plot, "SVG output");

  SweepFlags sflags;
  auto* sweep = app.add_subcommand("sweep", "cov loss, sel loss and sel gain over a grid of d");
  sweep->add_option("--preset", sflags.preset)->check(CLI::IsMember({"scenario2", "scenario3", "scenario4"}));
  sweep->add_option("--m", sflags.m)->check(CLI::PositiveNumber);
  sweep->add_option("--rho", sflags.rho);
  sweep->add_option("--alpha", sflags.alpha);
  add_weight_flags(sweep, sflags.weight, false);
  sweep->add_option("--d-from", sflags.d_from);
  sweep->add_option("--d-to", sflags.d_to);
  sweep->add_option("--d-step", sflags.d_step);
  sweep->add_option("--gamma-max", sflags.gamma_max);
  sweep->add_option("--scan-step", sflags.scan_step);
  sweep->add_option("--epsilon", sflags.epsilon);
  sweep->add_option("--rel-tol", sflags.rel_tol);
  sweep->add_option("--out", sflags.out)->required();
  sweep->add_option("--plot", sflags.plot, "SVG output");

  bool quick = false, full = false;
  std::string fault;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the built-in identity and oracle checks");
  auto* quick_flag = selfcheck->add_flag("--quick", quick);
  selfcheck->add_flag("--full", full)->excludes(quick_flag);
  selfcheck->add_option("--inject-fault", fault, "Corrupt a component to test the checks")
      ->check(CLI::IsMember({"t-cdf"}));

  std::string plot_in, plot_out, plot_x, plot_y, plot_title;
  auto* plot = app.add_subcommand("plot", "Render an SVG line chart from a CSV file");
  plot->add_option("--in", plot_in)->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out)->required();
  plot->add_option("--x", plot_x);
  plot->add_option("--y", plot_y, "Comma-separated columns");
  plot->add_option("--title", plot_title);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "mata: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*interval) return cmd_interval(iflags, out);
    if (*curves) return cmd_curves(cflags, args, out);
    if (*sweep) return cmd_sweep(sflags, args, out);
    if (*selfcheck) return cmd_selfcheck(full, fault, out);
    if (*plot) return cmd_plot(plot_in, plot_out, plot_x, plot_y, plot_title, out);
  } catch (const InputError& e) {
    err << "mata: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "mata: numerical failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mata::cli
