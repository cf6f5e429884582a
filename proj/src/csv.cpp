#include "lrdecon/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lrdecon/errors.hpp"

namespace lrdecon::csv {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 440, kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double xlo = inf, xhi = -inf, ylo = inf, yhi = -inf;
  auto usable = [](double x, double y) { return x > 0 && y > 0 && std::isfinite(x) && std::isfinite(y); };
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xlo = std::min(xlo, std::log10(s.x[i]));
      xhi = std::max(xhi, std::log10(s.x[i]));
      ylo = std::min(ylo, std::log10(s.y[i]));
      yhi = std::max(yhi, std::log10(s.y[i]));
    }
  if (!(xlo <= xhi)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (xhi - xlo < 1e-12) xlo -= 0.5, xhi += 0.5;
  if (yhi - ylo < 1e-12) ylo -= 0.5, yhi += 0.5;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return kTop + (yhi - std::log10(y)) / (yhi - ylo) * ph; };

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write plot file '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
      << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(xlo)); e <= static_cast<int>(std::floor(xhi)); ++e) {
    const double x = kLeft + (e - xlo) / (xhi - xlo) * pw;
    out << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\"" << kTop + ph + 5
        << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << kTop + ph + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ylo)); e <= static_cast<int>(std::floor(yhi)); ++e) {
    const double y = kTop + (yhi - e) / (yhi - ylo) * ph;
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
        << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape_xml(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kTop + ph / 2 << ")\">" << escape_xml(y_label) << "</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 6];
    if (s.markers) {
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
        if (usable(s.x[i], s.y[i]))
          out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"4\" fill=\"" << color
              << "\"/>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
        if (usable(s.x[i], s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      out << "\"/>\n";
    }
    const double ly = kTop + 16 + 20 * static_cast<double>(k);
    out << "<rect x=\"" << kW - kRight + 12 << "\" y=\"" << ly - 9 << "\" width=\"14\" height=\"4\" fill=\"" << color
        << "\"/><text x=\"" << kW - kRight + 32 << "\" y=\"" << ly - 3 << "\" font-size=\"11\">"
        << escape_xml(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw ConfigError("failed writing plot file '" + path + "'");
}

}  // namespace lrdecon::csv
