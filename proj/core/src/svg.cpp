#include "mflab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mflab {
namespace io {

namespace {

const char* kPalette[] = {"#1f6fb2", "#d23f3f", "#2e8540", "#8e5aa8",
                          "#c77f1e", "#3aa6a6", "#777777"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Round tick labels: 5-ish ticks between lo and hi.
std::vector<double> ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  double span = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
  if (span / step > 8) step *= 2;
  if (span / step > 8) step *= 2.5;
  std::vector<double> out;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * span; t += step) out.push_back(t);
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_series(std::string name, std::vector<double> xs, std::vector<double> ys,
                         std::string color, bool dashed) {
  if (color.empty()) color = kPalette[series_.size() % 7];
  series_.push_back({std::move(name), std::move(xs), std::move(ys), std::move(color), dashed});
}

void SvgPlot::write(const std::filesystem::path& path) const {
  const double w = 760, h = 480;
  const double ml = 78, mr = 24, mt = 44, mb = 58;

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  auto tx = [&](double v) { return log_x_ ? std::log10(std::max(v, 1e-300)) : v; };
  auto ty = [&](double v) { return log_y_ ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : series_) {
    for (double v : s.xs) {
      xlo = std::min(xlo, tx(v));
      xhi = std::max(xhi, tx(v));
    }
    for (double v : s.ys) {
      ylo = std::min(ylo, ty(v));
      yhi = std::max(yhi, ty(v));
    }
  }
  if (!(xhi > xlo)) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (!(yhi > ylo)) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  double ypad = 0.06 * (yhi - ylo);
  ylo -= ypad;
  yhi += ypad;

  auto px = [&](double v) { return ml + (tx(v) - xlo) / (xhi - xlo) * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - (ty(v) - ylo) / (yhi - ylo) * (h - mt - mb); };

  std::ofstream out(path, std::ios::binary);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">"
      << title_ << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";

  for (double t : ticks(xlo, xhi)) {
    double x = ml + (t - xlo) / (xhi - xlo) * (w - ml - mr);
    out << "<line x1=\"" << x << "\" y1=\"" << h - mb << "\" x2=\"" << x << "\" y2=\""
        << h - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << h - mb + 20
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << (log_x_ ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
    out << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\""
        << h - mb << "\" stroke=\"#e4e4e4\" stroke-width=\"0.6\"/>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    double y = h - mb - (t - ylo) / (yhi - ylo) * (h - mt - mb);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\""
        << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << (log_y_ ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << w - mr << "\" y2=\""
        << y << "\" stroke=\"#e4e4e4\" stroke-width=\"0.6\"/>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 16
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << x_label_ << "</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 "
      << (mt + h - mb) / 2 << ")\">" << y_label_ << "</text>\n";

  for (const auto& s : series_) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i)
      out << px(s.xs[i]) << "," << py(s.ys[i]) << " ";
    out << "\"/>\n";
    if (s.xs.size() <= 64) {
      for (std::size_t i = 0; i < s.xs.size(); ++i)
        out << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i])
            << "\" r=\"2.2\" fill=\"" << s.color << "\"/>\n";
    }
  }

  double ly = mt + 8;
  for (const auto& s : series_) {
    out << "<line x1=\"" << w - mr - 150 << "\" y1=\"" << ly << "\" x2=\"" << w - mr - 126
        << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";
    out << "<text x=\"" << w - mr - 120 << "\" y=\"" << ly + 4
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.name << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
}

}  // namespace io
}  // namespace mflab
