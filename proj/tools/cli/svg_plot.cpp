#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mata/errors.hpp"

namespace mata::cli {
namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five ticks at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    step = f * mag;
    if (raw <= step) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

void padded_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : 0.05 * std::fabs(lo);
    lo -= pad;
    hi += pad;
    return;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  if (table.rows.empty()) throw InputError("cannot plot an empty table");
  if (spec.y_columns.empty()) throw InputError("no columns to plot");
  const auto xs = table.column(spec.x_column);
  std::vector<std::vector<double>> ys;
  for (const auto& c : spec.y_columns) ys.push_back(table.column(c));

  double x_lo = *std::min_element(xs.begin(), xs.end());
  double x_hi = *std::max_element(xs.begin(), xs.end());
  double y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& y : ys) {
    for (double v : y) {
      if (!std::isfinite(v)) continue;
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!std::isfinite(y_lo)) throw InputError("no finite values to plot");
  if (!(x_hi > x_lo)) padded_range(x_lo, x_hi);
  padded_range(y_lo, y_hi);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
       << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(x_lo, x_hi)) {
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << num(px(t)) << "\" y2=\"" << kTop + ph + 5
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ticks(y_lo, y_hi)) {
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(py(t)) << "\" x2=\"" << kLeft << "\" y2=\"" << num(py(t))
       << "\" stroke=\"black\"/>";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(t)) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << num(py(t))
       << "\" stroke=\"#dddddd\"/>";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
     << escape(spec.x_column) << "</text>\n";

  for (std::size_t k = 0; k < ys.size(); ++k) {
    const char* colour = kColours[k % std::size(kColours)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(ys[k][i])) continue;
      os << (first ? "" : " ") << num(px(xs[i])) << ',' << num(py(ys[k][i]));
      first = false;
    }
    os << "\"/>\n";
    const double ly = kTop + 10 + 20.0 * k;
    os << "<line x1=\"" << kLeft + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 40 << "\" y2=\"" << ly
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << kLeft + pw + 46 << "\" y=\"" << ly + 4 << "\">" << escape(spec.y_columns[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

PlotSpec default_plot_spec(const CsvTable& table) {
  const auto has = [&](const char* c) { return std::find(table.columns.begin(), table.columns.end(), c) != table.columns.end(); };
  if (has("gamma")) {
    PlotSpec s{"gamma", {"coverage", "sel"}, "coverage and scaled expected length"};
    if (has("mc_coverage")) s.y_columns.push_back("mc_coverage");
    return s;
  }
  if (has("d")) return PlotSpec{"d", {"cov_loss", "sel_loss", "sel_gain"}, "loss and gain against d"};
  if (table.columns.size() < 2) throw InputError("table needs at least two columns to plot");
  return PlotSpec{table.columns[0], {table.columns.begin() + 1, table.columns.end()}, ""};
}

void plot_file(const std::string& csv_path, const std::string& svg_path, const PlotSpec* spec) {
  const CsvTable table = CsvTable::load(csv_path);
  const std::string svg = render_svg(table, spec ? *spec : default_plot_spec(table));
  std::ofstream os(svg_path, std::ios::binary);
  if (!os) throw InputError("cannot write " + svg_path);
  os << svg;
}

}  // namespace mata::cli
