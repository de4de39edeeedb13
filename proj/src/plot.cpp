#include "momw1/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace momw1 {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("csv: missing column " + name);
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open csv: " + path);
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (t.header.empty())
      t.header = std::move(cells);
    else {
      require(cells.size() == t.header.size(), "csv: ragged row in " + path);
      t.rows.push_back(std::move(cells));
    }
  }
  require(!t.header.empty(), "csv: empty file " + path);
  require(!t.rows.empty(), "csv: no data rows in " + path);
  return t;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt_tick(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) < 1e-3 || std::abs(v) >= 1e4))
    std::snprintf(buf, sizeof(buf), "%.1e", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", std::round(v * 1e6) / 1e6);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
  require(!series.empty(), "plot: no series");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    require(!s.x.empty() && s.x.size() == s.y.size(), "plot: bad series " + s.label);
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      double lo = s.band_lo.empty() ? s.y[i] : std::min(s.y[i], s.band_lo[i]);
      double hi = s.band_hi.empty() ? s.y[i] : std::max(s.y[i], s.band_hi[i]);
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double ypad = 0.06 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double width = 820, height = 520;
  const double ml = 80, mr = 24, mt = 48, mb = 64;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymin + (ymax - ymin) * t / 5.0;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << mt << "\" x2=\"" << px(xv) << "\" y2=\""
        << mt + ph << "\" stroke=\"#eeeeee\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << py(yv) << "\" x2=\"" << ml + pw << "\" y2=\""
        << py(yv) << "\" stroke=\"#eeeeee\"/>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_tick(xv) << "</text>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_tick(yv) << "</text>\n";
  }
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  svg << "<text x=\"20\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " << mt + ph / 2
      << ")\">" << y_label << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!s.band_lo.empty() && s.band_lo.size() == s.x.size() && s.band_hi.size() == s.x.size()) {
      svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) svg << px(s.x[i]) << ',' << py(s.band_hi[i]) << ' ';
      for (size_t i = s.x.size(); i-- > 0;) svg << px(s.x[i]) << ',' << py(s.band_lo[i]) << ' ';
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    svg << "\"/>\n";
    const double ly = mt + 16 + 16 * static_cast<double>(si);
    svg << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw - 126
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw - 120 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << s.label << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path);
  out << svg.str();
}

std::vector<std::string> plot_sweep_summary(const std::string& summary_csv_path,
                                            const std::string& out_dir) {
  const CsvTable t = read_csv(summary_csv_path);
  const int c_ds = t.col("dataset"), c_tau = t.col("tau"), c_k = t.col("k");
  const int c_mean = t.col("mean"), c_q25 = t.col("q25"), c_q75 = t.col("q75");

  std::map<std::string, std::map<double, PlotSeries>> by_dataset;
  for (const auto& row : t.rows) {
    const double tau = std::strtod(row[c_tau].c_str(), nullptr);
    PlotSeries& s = by_dataset[row[c_ds]][tau];
    if (s.label.empty()) s.label = "tau=" + row[c_tau];
    s.x.push_back(std::strtod(row[c_k].c_str(), nullptr));
    s.y.push_back(std::strtod(row[c_mean].c_str(), nullptr));
    s.band_lo.push_back(std::strtod(row[c_q25].c_str(), nullptr));
    s.band_hi.push_back(std::strtod(row[c_q75].c_str(), nullptr));
  }

  std::vector<std::string> written;
  for (auto& [dataset, series_map] : by_dataset) {
    std::vector<PlotSeries> series;
    for (auto& [tau, s] : series_map) series.push_back(std::move(s));
    const std::string path = out_dir + "/sweep_" + dataset + ".svg";
    write_svg_plot(path, "absolute error vs K (" + dataset + ")", "K (blocks)",
                   "|estimate - clean reference|", series);
    written.push_back(path);
  }
  return written;
}

std::vector<std::string> plot_convergence(const std::string& csv_path,
                                          const std::string& out_dir) {
  const CsvTable t = read_csv(csv_path);
  const int c_k = t.col("k"), c_epoch = t.col("epoch"), c_obj = t.col("objective_mean");
  std::map<long, PlotSeries> by_k;
  for (const auto& row : t.rows) {
    const long k = std::strtol(row[c_k].c_str(), nullptr, 10);
    PlotSeries& s = by_k[k];
    if (s.label.empty()) s.label = "K=" + row[c_k];
    s.x.push_back(std::strtod(row[c_epoch].c_str(), nullptr));
    s.y.push_back(std::strtod(row[c_obj].c_str(), nullptr));
  }
  std::vector<PlotSeries> series;
  for (auto& [k, s] : by_k) series.push_back(std::move(s));
  const std::string path = out_dir + "/convergence.svg";
  write_svg_plot(path, "objective vs epoch", "epoch", "objective", series);
  return {path};
}

std::vector<std::string> plot_rate(const std::string& summary_csv_path,
                                   const std::string& out_dir) {
  const CsvTable t = read_csv(summary_csv_path);
  const int c_n = t.col("n"), c_err = t.col("mean_error");
  PlotSeries s;
  s.label = "mean error";
  for (const auto& row : t.rows) {
    s.x.push_back(std::log(std::strtod(row[c_n].c_str(), nullptr)));
    s.y.push_back(std::log(std::strtod(row[c_err].c_str(), nullptr)));
  }
  const std::string path = out_dir + "/rate.svg";
  write_svg_plot(path, "log mean error vs log n", "log n", "log error", {s});
  return {path};
}

}  // namespace momw1
