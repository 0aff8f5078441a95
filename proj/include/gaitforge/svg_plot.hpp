#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gaitforge::svg {

// Bare-bones SVG line/scatter plot, enough for the report figures without a
// rendering dependency.
class Plot {
 public:
  Plot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void line(const std::vector<double>& x, const std::vector<double>& y,
            const std::string& color, const std::string& label = "") {
    series_.push_back({x, y, color, label, false});
    grow_range(x, y);
  }

  void scatter(const std::vector<double>& x, const std::vector<double>& y,
               const std::string& color, const std::string& label = "") {
    series_.push_back({x, y, color, label, true});
    grow_range(x, y);
  }

  void band(const std::vector<double>& x, const std::vector<double>& lo,
            const std::vector<double>& hi, const std::string& color) {
    band_ = Band{x, lo, hi, color};
    grow_range(x, lo);
    grow_range(x, hi);
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    out << render();
  }

  std::string render() const {
    const double w = 640, h = 420, ml = 64, mr = 16, mt = 34, mb = 46;
    const double x0 = finite(xmin_, 0.0), x1 = finite(xmax_, 1.0);
    const double y0 = finite(ymin_, 0.0), y1 = finite(ymax_, 1.0);
    const double xs = (x1 > x0) ? (w - ml - mr) / (x1 - x0) : 1.0;
    const double ys = (y1 > y0) ? (h - mt - mb) / (y1 - y0) : 1.0;
    auto px = [&](double x) { return ml + (x - x0) * xs; };
    auto py = [&](double y) { return h - mb - (y - y0) * ys; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title_ << "</text>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label_ << "</text>\n";
    s << "<text x=\"14\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << h / 2 << ")\">" << y_label_ << "</text>\n";
    s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\""
      << h - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
      const double fx = x0 + (x1 - x0) * i / 4.0;
      const double fy = y0 + (y1 - y0) * i / 4.0;
      s << "<text x=\"" << px(fx) << "\" y=\"" << h - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << round3(fx) << "</text>\n";
      s << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << round3(fy) << "</text>\n";
    }

    if (band_) {
      s << "<path d=\"";
      for (size_t i = 0; i < band_->x.size(); ++i) {
        s << (i == 0 ? 'M' : 'L') << px(band_->x[i]) << ' ' << py(band_->hi[i]) << ' ';
      }
      for (size_t i = band_->x.size(); i-- > 0;) {
        s << 'L' << px(band_->x[i]) << ' ' << py(band_->lo[i]) << ' ';
      }
      s << "Z\" fill=\"" << band_->color << "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    }

    double legend_y = mt + 14;
    for (const auto& ser : series_) {
      if (ser.scatter) {
        for (size_t i = 0; i < ser.x.size(); ++i) {
          s << "<circle cx=\"" << px(ser.x[i]) << "\" cy=\"" << py(ser.y[i])
            << "\" r=\"3\" fill=\"" << ser.color << "\"/>\n";
        }
      } else {
        s << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < ser.x.size(); ++i) {
          s << px(ser.x[i]) << ',' << py(ser.y[i]) << ' ';
        }
        s << "\"/>\n";
      }
      if (!ser.label.empty()) {
        s << "<text x=\"" << w - mr - 150 << "\" y=\"" << legend_y << "\" font-size=\"11\" fill=\""
          << ser.color << "\">" << ser.label << "</text>\n";
        legend_y += 14;
      }
    }
    s << "</svg>\n";
    return s.str();
  }

 private:
  struct Series {
    std::vector<double> x, y;
    std::string color, label;
    bool scatter;
  };
  struct Band {
    std::vector<double> x, lo, hi;
    std::string color;
  };

  static double finite(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

  static std::string round3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
  }

  void grow_range(const std::vector<double>& x, const std::vector<double>& y) {
    for (double v : x) {
      xmin_ = std::min(xmin_, v);
      xmax_ = std::max(xmax_, v);
    }
    for (double v : y) {
      ymin_ = std::min(ymin_, v);
      ymax_ = std::max(ymax_, v);
    }
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::optional<Band> band_;
  double xmin_ = std::numeric_limits<double>::infinity();
  double xmax_ = -std::numeric_limits<double>::infinity();
  double ymin_ = std::numeric_limits<double>::infinity();
  double ymax_ = -std::numeric_limits<double>::infinity();
};

}  // namespace gaitforge::svg
