#include "harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "common/config.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"

namespace aep::harness {

namespace {

constexpr int kWidth = 640, kHeight = 400;
constexpr int kLeft = 70, kRight = 20, kTop = 30, kBottom = 45;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Series {
  std::string method;
  std::vector<double> mean, sd;  // one entry per aligned row
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Maps data coordinates to SVG pixel coordinates.
struct Scale {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void render_svg(const std::string& path, const std::string& title,
                const std::vector<double>& steps, const std::vector<Series>& series) {
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      const double a = s.mean[i] - s.sd[i], b = s.mean[i] + s.sd[i];
      if (first) {
        lo = a;
        hi = b;
        first = false;
      } else {
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
    }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  Scale sc{0.0, steps.empty() ? 1.0 : steps.back(), lo, hi};
  if (sc.x1 <= sc.x0) sc.x1 = sc.x0 + 1.0;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write plot: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  // Axes with 5 ticks each.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = sc.x0 + (sc.x1 - sc.x0) * k / 4.0;
    const double yv = sc.y0 + (sc.y1 - sc.y0) * k / 4.0;
    out << "<text x=\"" << num(sc.px(xv)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(xv)
        << "</text>\n";
    out << "<line x1=\"" << num(sc.px(xv)) << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << num(sc.px(xv)) << "\" y2=\"" << kHeight - kBottom + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sc.py(yv) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(yv)
        << "</text>\n";
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(sc.py(yv)) << "\" x2=\"" << kLeft
        << "\" y2=\"" << num(sc.py(yv)) << "\" stroke=\"black\"/>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">steps</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    // Shaded mean +/- std band.
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < steps.size(); ++i)
      out << num(sc.px(steps[i])) << "," << num(sc.py(series[s].mean[i] + series[s].sd[i]))
          << " ";
    for (std::size_t i = steps.size(); i-- > 0;)
      out << num(sc.px(steps[i])) << "," << num(sc.py(series[s].mean[i] - series[s].sd[i]))
          << " ";
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < steps.size(); ++i)
      out << num(sc.px(steps[i])) << "," << num(sc.py(series[s].mean[i])) << " ";
    out << "\"/>\n";
    // Legend entry.
    const int ly = kTop + 14 * static_cast<int>(s);
    out << "<line x1=\"" << kWidth - kRight - 110 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight - 90 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 84 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].method << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void emit_plots(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  if (run_dirs.empty()) throw ConfigError("emit_plots: no run directories");
  std::filesystem::create_directories(out_dir);

  struct Run {
    std::string method;
    CsvTable table;
  };
  std::vector<Run> runs;
  for (const std::string& dir : run_dirs) {
    Run r;
    r.table = read_csv(dir + "/log.csv");
    KeyValueConfig kv = KeyValueConfig::parse_file(dir + "/config.resolved");
    r.method = kv.get_string("method", "");
    if (r.method.empty()) throw InputError("config.resolved lacks a method: " + dir);
    if (r.table.rows.empty()) throw InputError("empty log.csv in " + dir);
    if (!runs.empty() && r.table.header != runs.front().table.header)
      throw InputError("log schema differs between runs: " + dir);
    runs.push_back(std::move(r));
  }

  // Align on the shortest run and check the logging schedules agree.
  std::size_t rows = runs.front().table.rows.size();
  for (const Run& r : runs) rows = std::min(rows, r.table.rows.size());
  const int steps_col = runs.front().table.column("steps");
  std::vector<double> steps(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    steps[i] = runs.front().table.rows[i][static_cast<std::size_t>(steps_col)];
    for (const Run& r : runs)
      if (r.table.rows[i][static_cast<std::size_t>(steps_col)] != steps[i])
        throw InputError("runs use different logging schedules; cannot align");
  }

  // Stable method order: first appearance.
  std::vector<std::string> methods;
  for (const Run& r : runs)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);

  for (std::size_t col = 0; col < runs.front().table.header.size(); ++col) {
    const std::string metric = runs.front().table.header[col];
    if (metric == "steps") continue;

    std::vector<Series> series;
    for (const std::string& m : methods) {
      Series s;
      s.method = m;
      s.mean.resize(rows);
      s.sd.resize(rows);
      std::vector<const Run*> group;
      for (const Run& r : runs)
        if (r.method == m) group.push_back(&r);
      for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (const Run* r : group) sum += r->table.rows[i][col];
        const double mean = sum / static_cast<double>(group.size());
        double sq = 0.0;
        for (const Run* r : group) {
          const double d = r->table.rows[i][col] - mean;
          sq += d * d;
        }
        s.mean[i] = mean;
        s.sd[i] = group.size() > 1
                      ? std::sqrt(sq / static_cast<double>(group.size() - 1))
                      : 0.0;
      }
      series.push_back(std::move(s));
    }

    std::vector<std::string> header = {"steps"};
    for (const std::string& m : methods) {
      header.push_back(m + "_mean");
      header.push_back(m + "_std");
    }
    CsvWriter csv(out_dir + "/" + metric + ".csv", header);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<double> row = {steps[i]};
      for (const Series& s : series) {
        row.push_back(s.mean[i]);
        row.push_back(s.sd[i]);
      }
      csv.row(row);
    }
    render_svg(out_dir + "/" + metric + ".svg", metric, steps, series);
  }
}

}  // namespace aep::harness
