#include "advsysid/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace advsysid {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kFloor = 1e-16;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

bool usable(double y) { return std::isfinite(y) && y > 0.0; }

}  // namespace

std::string render_log_plot(const PlotSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double lmin = xmin;
  double lmax = -xmin;
  for (const auto& s : spec.series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !usable(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      const double ly = std::log10(std::max(y, kFloor));
      lmin = std::min(lmin, ly);
      lmax = std::max(lmax, ly);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    lmin = -1.0;
    lmax = 0.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  lmin = std::floor(lmin);
  lmax = std::ceil(lmax);
  if (lmax == lmin) lmax = lmin + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return kTop + (lmax - ly) / (lmax - lmin) * ph; };

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
     << "</text>\n";

  // Grid lines and tick labels, one per decade.
  const int step = std::max(1, static_cast<int>(std::ceil((lmax - lmin) / 10.0)));
  for (double l = lmin; l <= lmax + 0.5; l += step) {
    const double y = py(l);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
       << "\" stroke=\"#dddddd\"/>\n"
       << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << static_cast<int>(l)
       << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << static_cast<long long>(std::llround(xv)) << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << escape(spec.y_label) << " (log scale)</text>\n";

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    const auto& series = spec.series[s];
    std::ostringstream pts;
    pts.setf(std::ios::fixed);
    pts.precision(2);
    for (const auto& [x, y] : series.points) {
      if (!std::isfinite(x) || !usable(y)) continue;
      pts << px(x) << ',' << py(std::log10(std::max(y, kFloor))) << ' ';
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts.str()
       << "\"/>\n";
    const double ly = kTop + 16 + 20.0 * static_cast<double>(s);
    const double lx = kLeft + pw + 16;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
       << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << escape(series.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

PlotSpec error_plot(const RecoveryReport& report, const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  for (Method m : report.config.estimators) {
    PlotSeries series;
    series.label = to_string(m);
    for (std::size_t k = 0; k < report.config.checkpoints.size(); ++k) {
      std::vector<double> errs;
      for (const auto& t : report.trials) {
        const auto* tr = t.trace(m);
        if (tr && k < tr->points.size() && std::isfinite(tr->points[k].error)) errs.push_back(tr->points[k].error);
      }
      if (errs.empty()) continue;
      std::sort(errs.begin(), errs.end());
      const std::size_t n = errs.size();
      const double med = n % 2 ? errs[n / 2] : 0.5 * (errs[n / 2 - 1] + errs[n / 2]);
      series.points.emplace_back(static_cast<double>(report.config.checkpoints[k]), std::max(med, kFloor));
    }
    spec.series.push_back(std::move(series));
  }
  return spec;
}

}  // namespace advsysid
