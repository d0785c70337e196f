#include "ikc/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ikc {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw Error::io("cannot open CSV for writing: " + path.string());
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_escape(header[i]);
  os << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  }
  if (!os) throw Error::io("CSV write failed: " + path.string());
}

std::string fmt_double(double v, int precision) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << std::fixed << v;
  return ss.str();
}

void write_line_plot_svg(const std::filesystem::path& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& x, const std::vector<PlotSeries>& series) {
  if (x.empty() || series.empty()) throw Error::invalid_parameter("write_line_plot_svg: no data");
  for (const auto& s : series)
    if (s.y.size() != x.size())
      throw Error::invalid_parameter("write_line_plot_svg: series length mismatch");

  const int w = 640, h = 420, ml = 70, mr = 160, mt = 40, mb = 50;
  const double px = ml, pw = w - ml - mr, py = mt, ph = h - mt - mb;

  double xmin = *std::min_element(x.begin(), x.end());
  double xmax = *std::max_element(x.begin(), x.end());
  double ymin = series[0].y[0], ymax = series[0].y[0];
  for (const auto& s : series)
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double v) { return px + pw * (v - xmin) / (xmax - xmin); };
  auto sy = [&](double v) { return py + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::ofstream os(path);
  if (!os) throw Error::io("cannot open SVG for writing: " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";
  os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double tx = xmin + (xmax - xmin) * i / nticks;
    const double ty = ymin + (ymax - ymin) * i / nticks;
    os << "<line x1=\"" << sx(tx) << "\" y1=\"" << py + ph << "\" x2=\"" << sx(tx) << "\" y2=\""
       << py + ph + 5 << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << sx(tx) << "\" y=\"" << py + ph + 20
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_double(tx, 2) << "</text>\n";
    os << "<line x1=\"" << px - 5 << "\" y1=\"" << sy(ty) << "\" x2=\"" << px << "\" y2=\""
       << sy(ty) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << px - 8 << "\" y=\"" << sy(ty) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_double(ty, 2) << "</text>\n";
  }
  os << "<text x=\"" << px + pw / 2 << "\" y=\"" << h - 10
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << py + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 18 " << py + ph / 2 << ")\">" << y_label << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const char* color = colors[si % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < x.size(); ++i) os << sx(x[i]) << "," << sy(series[si].y[i]) << " ";
    os << "\"/>\n";
    for (size_t i = 0; i < x.size(); ++i)
      os << "<circle cx=\"" << sx(x[i]) << "\" cy=\"" << sy(series[si].y[i])
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = py + 16 + 18 * double(si);
    os << "<line x1=\"" << px + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << px + pw + 34
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << px + pw + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
       << series[si].label << "</text>\n";
  }
  os << "</svg>\n";
  if (!os) throw Error::io("SVG write failed: " + path.string());
}

Image montage_grid(const std::vector<std::vector<Image>>& rows, int pad, double pad_value) {
  if (rows.empty() || rows[0].empty()) throw Error::invalid_parameter("montage_grid: no images");
  const int ch = rows[0][0].channels();
  const int ih = rows[0][0].height(), iw = rows[0][0].width();
  const int nr = int(rows.size()), nc = int(rows[0].size());
  for (const auto& row : rows)
    for (const auto& im : row)
      if (im.channels() != ch || im.height() != ih || im.width() != iw)
        throw Error::invalid_parameter("montage_grid: images must share one shape");

  Image out = make_image(ch, nr * ih + (nr + 1) * pad, nc * iw + (nc + 1) * pad, pad_value);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c) {
      const int y0 = pad + r * (ih + pad), x0 = pad + c * (iw + pad);
      for (int cc = 0; cc < ch; ++cc)
        for (int y = 0; y < ih; ++y)
          for (int x = 0; x < iw; ++x) out.at(cc, y0 + y, x0 + x) = rows[size_t(r)][size_t(c)].at(cc, y, x);
    }
  return out;
}

}  // namespace ikc
