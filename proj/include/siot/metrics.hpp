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

#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace siot {

/// One measurement. `run` is empty for the across-run aggregate.
struct MetricsRow
{
  std::string                experiment;
  std::string                param;
  std::optional<std::size_t> run;
  std::string                metric;
  double                     value{0.0};

  friend bool operator==(MetricsRow const &, MetricsRow const &) = default;
};

/// Orders strings so that embedded digit runs compare numerically
/// ("k=9" < "k=10"). Falls back to plain comparison on ties.
inline bool natural_less(std::string_view a, std::string_view b)
{
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size())
  {
    bool const da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    bool const db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db)
    {
      std::size_t ei = i, ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei])))
      {
        ++ei;
      }
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej])))
      {
        ++ej;
      }
      auto na = a.substr(i, ei - i), nb = b.substr(j, ej - j);
      while (na.size() > 1 && na.front() == '0')
      {
        na.remove_prefix(1);
      }
      while (nb.size() > 1 && nb.front() == '0')
      {
        nb.remove_prefix(1);
      }
      if (na.size() != nb.size())
      {
        return na.size() < nb.size();
      }
      if (na != nb)
      {
        return na < nb;
      }
      i = ei;
      j = ej;
      continue;
    }
    if (a[i] != b[j])
    {
      return a[i] < b[j];
    }
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j))
  {
    return (a.size() - i) < (b.size() - j);
  }
  return a < b;
}

/// Canonical row order: parameter point, then run (aggregate last), then
/// metric name.
inline bool row_less(MetricsRow const &a, MetricsRow const &b)
{
  if (a.experiment != b.experiment)
  {
    return a.experiment < b.experiment;
  }
  if (a.param != b.param)
  {
    return natural_less(a.param, b.param);
  }
  if (a.run != b.run)
  {
    if (!a.run || !b.run)
    {
      return a.run.has_value();
    }
    return *a.run < *b.run;
  }
  return natural_less(a.metric, b.metric);
}

struct MeanSd
{
  double mean{0.0};
  double sd{0.0};
};

/// Mean and sample standard deviation, folded in input order so the result is
/// independent of how runs were scheduled. One value has sd 0.
inline MeanSd mean_sd(std::vector<double> const &xs)
{
  MeanSd out;
  if (xs.empty())
  {
    return out;
  }
  double sum = 0.0;
  for (double x : xs)
  {
    sum += x;
  }
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1)
  {
    double ss = 0.0;
    for (double x : xs)
    {
      ss += (x - out.mean) * (x - out.mean);
    }
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

/// Appends, for every (param, metric) among `per_run`, an aggregate mean row
/// and a `<metric>_sd` row. Runs are folded by ascending run index.
inline void append_aggregates(std::vector<MetricsRow> &rows)
{
  std::map<std::pair<std::string, std::string>, std::map<std::size_t, double>> groups;
  std::string                                                                  experiment;
  for (auto const &r : rows)
  {
    if (r.run)
    {
      groups[{r.param, r.metric}][*r.run] = r.value;
      experiment                          = r.experiment;
    }
  }
  for (auto const &[key, by_run] : groups)
  {
    std::vector<double> xs;
    xs.reserve(by_run.size());
    for (auto const &[_, v] : by_run)
    {
      xs.push_back(v);
    }
    auto const ms = mean_sd(xs);
    rows.push_back(MetricsRow{experiment, key.first, std::nullopt, key.second, ms.mean});
    rows.push_back(MetricsRow{experiment, key.first, std::nullopt, key.second + "_sd", ms.sd});
  }
}

/// Aggregate value of (param, metric), if present.
inline std::optional<double> find_aggregate(std::vector<MetricsRow> const &rows,
                                            std::string_view param, std::string_view metric)
{
  for (auto const &r : rows)
  {
    if (!r.run && r.param == param && r.metric == metric)
    {
      return r.value;
    }
  }
  return std::nullopt;
}

/// Per-run values of (param, metric), ordered by run index.
inline std::vector<double> per_run_values(std::vector<MetricsRow> const &rows,
                                          std::string_view param, std::string_view metric)
{
  std::map<std::size_t, double> by_run;
  for (auto const &r : rows)
  {
    if (r.run && r.param == param && r.metric == metric)
    {
      by_run[*r.run] = r.value;
    }
  }
  std::vector<double> out;
  for (auto const &[_, v] : by_run)
  {
    out.push_back(v);
  }
  return out;
}

struct Series
{
  std::string         name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec
{
  std::string         file_stem;
  std::string         title;
  std::string         x_label;
  std::string         y_label;
  std::vector<Series> series;
};

}  // namespace siot
