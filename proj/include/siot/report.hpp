//------------------------------------------------------------------------------
//
//   Copyright 2026 The siot-trust Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "siot/experiments.hpp"
#include "siot/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace siot {

/// Six significant digits, the precision of every written number.
inline std::string format_value(double v)
{
  if (!std::isfinite(v))
  {
    throw std::invalid_argument("metric values must be finite");
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s{buf};
  return s == "-0" ? "0" : s;
}

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file.
inline void atomic_write(std::filesystem::path const &path, std::string const &contents)
{
  namespace fs = std::filesystem;
  if (path.has_parent_path())
  {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
    {
      throw std::runtime_error("cannot create directory '" + path.parent_path().string() +
                               "': " + ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
    if (!out)
    {
      throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    }
    out << contents;
    out.flush();
    if (!out)
    {
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
  {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------------------
// Metrics CSV

inline constexpr char kMetricsHeader[] = "experiment,param,run,metric,value";

inline std::string metrics_csv(std::vector<MetricsRow> rows)
{
  std::stable_sort(rows.begin(), rows.end(), row_less);
  auto check = [](std::string const &field) {
    if (field.find_first_of(",\n\r\"") != std::string::npos)
    {
      throw std::invalid_argument("metric field '" + field + "' contains a CSV delimiter");
    }
  };
  std::string out = kMetricsHeader;
  out += '\n';
  for (auto const &r : rows)
  {
    check(r.experiment);
    check(r.param);
    check(r.metric);
    out += r.experiment;
    out += ',';
    out += r.param;
    out += ',';
    out += r.run ? std::to_string(*r.run) : std::string{"aggregate"};
    out += ',';
    out += r.metric;
    out += ',';
    out += format_value(r.value);
    out += '\n';
  }
  return out;
}

inline void write_metrics(std::vector<MetricsRow> const &rows, std::filesystem::path const &path)
{
  atomic_write(path, metrics_csv(rows));
}

inline std::vector<MetricsRow> parse_metrics(std::istream &in)
{
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
  {
    throw std::runtime_error("metrics CSV must start with '" + std::string{kMetricsHeader} + "'");
  }
  std::vector<MetricsRow> rows;
  std::size_t             line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.empty())
    {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream        ss{line};
    for (std::string cell; std::getline(ss, cell, ',');)
    {
      f.push_back(cell);
    }
    if (f.size() != 5)
    {
      throw std::runtime_error("metrics CSV line " + std::to_string(line_no) +
                               ": expected 5 fields");
    }
    MetricsRow r;
    r.experiment = f[0];
    r.param      = f[1];
    if (f[2] != "aggregate")
    {
      r.run = static_cast<std::size_t>(std::stoull(f[2]));
    }
    r.metric = f[3];
    r.value  = std::stod(f[4]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<MetricsRow> read_metrics_file(std::filesystem::path const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  return parse_metrics(in);
}

// ---------------------------------------------------------------------------
// SVG line plots

namespace detail {

inline std::string svg_escape(std::string const &s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string coord(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Range
{
  double lo{0.0};
  double hi{1.0};
};

inline Range padded(double lo, double hi)
{
  if (hi - lo < 1e-12)
  {
    double const pad = std::max(std::abs(lo) * 0.1, 0.5);
    return {lo - pad, hi + pad};
  }
  double const pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

}  // namespace detail

inline std::string render_plot(PlotSpec const &plot)
{
  using detail::coord;
  using detail::svg_escape;
  if (plot.series.empty())
  {
    throw std::invalid_argument("plot '" + plot.file_stem + "' has no series");
  }
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (auto const &s : plot.series)
  {
    if (s.x.size() != s.y.size())
    {
      throw std::invalid_argument("series '" + s.name + "' has mismatched x/y lengths");
    }
    if (s.x.empty())
    {
      throw std::invalid_argument("series '" + s.name + "' is empty");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
    {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
      {
        throw std::invalid_argument("series '" + s.name + "' has a non-finite point");
      }
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  auto const xr = detail::padded(xlo, xhi);
  auto const yr = detail::padded(ylo, yhi);

  constexpr double W = 720, H = 440, L = 70, R = 170, T = 40, B = 55;
  double const     pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return T + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  static constexpr char const *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\""
    << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << coord(L + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << svg_escape(plot.title) << "</text>\n";
  o << "<g stroke=\"black\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << coord(L) << "\" y1=\"" << coord(T + ph) << "\" x2=\"" << coord(L + pw)
    << "\" y2=\"" << coord(T + ph) << "\"/>\n";
  o << "<line x1=\"" << coord(L) << "\" y1=\"" << coord(T) << "\" x2=\"" << coord(L) << "\" y2=\""
    << coord(T + ph) << "\"/>\n";
  o << "</g>\n";

  o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i)
  {
    double const fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    double const fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    o << "<line x1=\"" << coord(px(fx)) << "\" y1=\"" << coord(T + ph) << "\" x2=\""
      << coord(px(fx)) << "\" y2=\"" << coord(T + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << coord(px(fx)) << "\" y=\"" << coord(T + ph + 18)
      << "\" text-anchor=\"middle\">" << format_value(fx) << "</text>\n";
    o << "<line x1=\"" << coord(L - 5) << "\" y1=\"" << coord(py(fy)) << "\" x2=\"" << coord(L)
      << "\" y2=\"" << coord(py(fy)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << coord(L - 8) << "\" y=\"" << coord(py(fy) + 4)
      << "\" text-anchor=\"end\">" << format_value(fy) << "</text>\n";
  }
  o << "<text x=\"" << coord(L + pw / 2) << "\" y=\"" << coord(H - 12)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << svg_escape(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << coord(T + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << svg_escape(plot.y_label)
    << "</text>\n";
  o << "</g>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k)
  {
    auto const &s     = plot.series[k];
    char const *color = palette[k % std::size(palette)];
    if (s.x.size() > 1)
    {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
      {
        o << (i ? " " : "") << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
      }
      o << "\"/>\n";
    }
    if (s.x.size() <= 12)
    {
      for (std::size_t i = 0; i < s.x.size(); ++i)
      {
        o << "<circle cx=\"" << coord(px(s.x[i])) << "\" cy=\"" << coord(py(s.y[i]))
          << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
      }
    }
    double const ly = T + 14 + 20.0 * static_cast<double>(k);
    o << "<line x1=\"" << coord(L + pw + 15) << "\" y1=\"" << coord(ly) << "\" x2=\""
      << coord(L + pw + 40) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2.5\"/>\n";
    o << "<text x=\"" << coord(L + pw + 46) << "\" y=\"" << coord(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << svg_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_plot(PlotSpec const &plot, std::filesystem::path const &path)
{
  atomic_write(path, render_plot(plot));
}

// ---------------------------------------------------------------------------
// Bundle: everything one experiment writes under the output directory.

struct ReportBundle
{
  std::filesystem::path              metrics;
  std::filesystem::path              summary;
  std::optional<std::filesystem::path> trace;
  std::vector<std::filesystem::path> plots;
};

/// Aggregates as written to the CSV (six significant digits), keyed by
/// parameter point then metric.
inline nlohmann::json summary_json(ExperimentResult const &res)
{
  nlohmann::json agg = nlohmann::json::object();
  for (auto const &r : res.rows)
  {
    if (!r.run)
    {
      agg[r.param][r.metric] = std::stod(format_value(r.value));
    }
  }
  return nlohmann::json{{"experiment", res.name},
                        {"runs", res.runs},
                        {"parameters", res.parameters},
                        {"aggregates", std::move(agg)}};
}

inline ReportBundle write_report(ExperimentResult const &res, std::filesystem::path const &dir,
                                 bool with_trace)
{
  ReportBundle b;
  b.metrics = dir / (res.name + ".csv");
  write_metrics(res.rows, b.metrics);
  for (auto const &p : res.plots)
  {
    auto path = dir / (p.file_stem + ".svg");
    write_plot(p, path);
    b.plots.push_back(path);
  }
  if (with_trace)
  {
    std::string lines;
    for (auto const &l : res.trace)
    {
      lines += l;
      lines += '\n';
    }
    b.trace = dir / (res.name + ".trace.jsonl");
    atomic_write(*b.trace, lines);
  }
  b.summary = dir / (res.name + ".summary.json");
  atomic_write(b.summary, summary_json(res).dump(2) + "\n");
  return b;
}

}  // namespace siot
