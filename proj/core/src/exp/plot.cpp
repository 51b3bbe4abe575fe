#include "ilb/exp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ilb/csv.hpp"
#include "ilb/errors.hpp"

namespace ilb {

namespace {

constexpr double kPanelW = 460, kPanelH = 320, kMargin = 50, kTop = 40;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double v) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << v;
  return o.str();
}

double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10.0 * p;
}

void panel(std::ostringstream& o, const RegretSummary& s, bool cumulative, double x0, const std::string& label) {
  const auto T = static_cast<std::size_t>(s.horizon);
  double ymax = 0.0;
  for (const auto& c : s.curves) {
    const auto& m = cumulative ? c.cumulative_mean : c.simple_mean;
    const auto& e = cumulative ? c.cumulative_se : c.simple_se;
    for (std::size_t t = 0; t < T; ++t) ymax = std::max(ymax, m[t] + e[t]);
  }
  ymax = nice_ceiling(ymax);
  const double pw = kPanelW - 2 * kMargin, ph = kPanelH - kMargin - kTop;
  auto px = [&](std::size_t t) { return x0 + kMargin + (T > 1 ? pw * static_cast<double>(t) / static_cast<double>(T - 1) : 0.0); };
  auto py = [&](double v) { return kTop + ph * (1.0 - std::clamp(v / ymax, 0.0, 1.0)); };

  o << "<g>\n";
  o << "<rect x=\"" << fmt(x0 + kMargin) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  o << "<text x=\"" << fmt(x0 + kPanelW / 2) << "\" y=\"" << fmt(kTop - 12) << "\" text-anchor=\"middle\" font-size=\"14\">"
    << label << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ymax * i / 4.0;
    o << "<text x=\"" << fmt(x0 + kMargin - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
      << csv::format_double(v) << "</text>\n";
  }
  o << "<text x=\"" << fmt(x0 + kMargin) << "\" y=\"" << fmt(kTop + ph + 16) << "\" font-size=\"10\">1</text>\n";
  o << "<text x=\"" << fmt(x0 + kMargin + pw) << "\" y=\"" << fmt(kTop + ph + 16)
    << "\" text-anchor=\"end\" font-size=\"10\">" << T << "</text>\n";
  o << "<text x=\"" << fmt(x0 + kPanelW / 2) << "\" y=\"" << fmt(kTop + ph + 30) << "\" text-anchor=\"middle\" font-size=\"11\">t</text>\n";

  std::size_t colour = 0;
  for (const auto& c : s.curves) {
    const auto& m = cumulative ? c.cumulative_mean : c.simple_mean;
    const auto& e = cumulative ? c.cumulative_se : c.simple_se;
    const char* col = kColours[colour++ % std::size(kColours)];
    o << "<polygon fill=\"" << col << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t t = 0; t < T; ++t) o << fmt(px(t)) << ',' << fmt(py(m[t] + e[t])) << ' ';
    for (std::size_t t = T; t-- > 0;) o << fmt(px(t)) << ',' << fmt(py(std::max(0.0, m[t] - e[t]))) << ' ';
    o << "\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < T; ++t) o << fmt(px(t)) << ',' << fmt(py(m[t])) << ' ';
    o << "\"/>\n";
  }
  o << "</g>\n";
}

}  // namespace

std::string render_regret_svg(const RegretSummary& summary, const std::string& title) {
  if (summary.curves.empty() || summary.horizon < 1) throw ConfigError("nothing to plot");
  const double legend_h = 18.0 * static_cast<double>(summary.curves.size()) + 10.0;
  const double width = 2 * kPanelW, height = kPanelH + legend_h + 20;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
    << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(width / 2) << "\" y=\"16\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  panel(o, summary, false, 0.0, "Simple regret");
  panel(o, summary, true, kPanelW, "Cumulative regret");
  std::size_t i = 0;
  for (const auto& c : summary.curves) {
    const double y = kPanelH + 10 + 18.0 * static_cast<double>(i);
    const char* col = kColours[i % std::size(kColours)];
    o << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kMargin + 24) << "\" y2=\"" << fmt(y)
      << "\" stroke=\"" << col << "\" stroke-width=\"3\"/>\n";
    o << "<text x=\"" << fmt(kMargin + 30) << "\" y=\"" << fmt(y + 4) << "\" font-size=\"12\">" << c.algorithm << " (n="
      << c.instances << ")</text>\n";
    ++i;
  }
  o << "</svg>\n";
  return o.str();
}

void write_regret_svg(const std::filesystem::path& path, const RegretSummary& summary, const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_regret_svg(summary, title);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ilb
