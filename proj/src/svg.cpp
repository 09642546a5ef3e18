#include "mamimo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mamimo {

namespace {

constexpr double kW = 640, kH = 420;
constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void header(std::ostringstream& os) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
     << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const Series& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  ymax = std::max(ymax, 1.0);

  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - ymin) / (ymax - ymin) * (kH - kTop - kBottom); };

  std::ostringstream os;
  header(os);
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
  // axes
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
     << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    double xv = xmin + t * (xmax - xmin) / 5.0;
    double yv = ymin + t * (ymax - ymin) / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kBottom + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xv) << "</text>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(yv) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (kTop + kH - kBottom) / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (kTop + kH - kBottom) / 2 << ")\">" << y_label << "</text>\n";

  int ci = 0;
  for (const Series& s : series) {
    const char* color = kColors[ci % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (i) os << ' ';
      os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
    }
    os << "\"/>\n";
    double ly = kTop + 16 * ci;
    os << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 34
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kW - kRight + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
       << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_histogram(const std::string& title, const std::vector<double>& edges,
                          const std::vector<long>& counts, double threshold) {
  double xmin = edges.front(), xmax = edges.back();
  if (threshold < xmin) xmin = threshold;
  if (threshold > xmax) xmax = threshold;
  long cmax = 1;
  for (long c : counts) cmax = std::max(cmax, c);

  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kW - kLeft - 40); };
  auto py = [&](double c) { return kH - kBottom - c / static_cast<double>(cmax) * (kH - kTop - kBottom); };

  std::ostringstream os;
  header(os);
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - 40 << "\" y2=\""
     << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (size_t i = 0; i < counts.size(); ++i) {
    double x0 = px(edges[i]), x1 = px(edges[i + 1]);
    double y = py(static_cast<double>(counts[i]));
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(x1 - x0)
       << "\" height=\"" << fmt(kH - kBottom - y) << "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
  }
  os << "<line x1=\"" << fmt(px(threshold)) << "\" y1=\"" << kTop << "\" x2=\""
     << fmt(px(threshold)) << "\" y2=\"" << kH - kBottom
     << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6,3\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    double xv = xmin + t * (xmax - xmin) / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kBottom + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xv) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kW - 40) / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">predicted total power (mW)</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace mamimo
