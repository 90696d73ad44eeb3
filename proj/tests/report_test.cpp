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

#include "siot/experiments.hpp"
#include "siot/report.hpp"

#include "gtest/gtest.h"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace siot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const &name)
{
  auto dir = fs::path{testing::TempDir()} / ("siot_report_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(fs::path const &p)
{
  std::ifstream      in{p, std::ios::binary};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(std::string const &text, std::string const &needle)
{
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
  {
    ++n;
  }
  return n;
}

}  // namespace

TEST(ReportTests, FormatsSixSignificantDigits)
{
  EXPECT_EQ(format_value(0.123456789), "0.123457");
  EXPECT_EQ(format_value(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_value(2.0), "2");
  EXPECT_EQ(format_value(-0.0), "0");
  EXPECT_THROW(format_value(std::nan("")), std::invalid_argument);
}

TEST(ReportTests, EmptyRowsWriteOnlyTheHeader)
{
  auto dir = scratch("empty");
  write_metrics({}, dir / "m.csv");
  EXPECT_EQ(slurp(dir / "m.csv"), std::string{kMetricsHeader} + "\n");
  EXPECT_FALSE(fs::exists(dir / "m.csv.tmp"));
}

TEST(ReportTests, OneRowWritesTwoLines)
{
  auto dir = scratch("one");
  write_metrics({MetricsRow{"e", "k=1", 0, "m", 0.5}}, dir / "m.csv");
  EXPECT_EQ(slurp(dir / "m.csv"), std::string{kMetricsHeader} + "\ne,k=1,0,m,0.5\n");
}

TEST(ReportTests, RowsAreOrderedNaturally)
{
  std::vector<MetricsRow> rows{{"e", "k=10", 0, "b", 1},
                               {"e", "k=9", std::nullopt, "a", 2},
                               {"e", "k=9", 1, "a", 3},
                               {"e", "k=9", 0, "z", 4},
                               {"e", "k=9", 0, "a", 5}};
  auto csv = metrics_csv(rows);
  EXPECT_EQ(csv, std::string{kMetricsHeader} +
                     "\ne,k=9,0,a,5\ne,k=9,0,z,4\ne,k=9,1,a,3\ne,k=9,aggregate,a,2\ne,k=10,0,b,1\n");
  EXPECT_TRUE(natural_less("iteration=2", "iteration=10"));
  EXPECT_FALSE(natural_less("iteration=10", "iteration=2"));
}

TEST(ReportTests, CsvRoundTrip)
{
  auto                    rng = make_rng(4);
  std::vector<MetricsRow> rows;
  for (std::size_t i = 0; i < 200; ++i)
  {
    std::optional<std::size_t> run;
    if (i % 3 != 0)
    {
      run = i % 7;
    }
    rows.push_back(MetricsRow{"exp", "p=" + std::to_string(i % 11), run,
                              "m" + std::to_string(i), uniform(rng, -1e3, 1e3)});
  }
  std::istringstream in{metrics_csv(rows)};
  auto               back = parse_metrics(in);
  ASSERT_EQ(back.size(), rows.size());
  std::stable_sort(rows.begin(), rows.end(), row_less);
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    EXPECT_EQ(back[i].param, rows[i].param);
    EXPECT_EQ(back[i].run, rows[i].run);
    EXPECT_EQ(back[i].metric, rows[i].metric);
    EXPECT_EQ(format_value(back[i].value), format_value(rows[i].value));
    EXPECT_NEAR(back[i].value, rows[i].value, 1e-5 * std::abs(rows[i].value));
  }
}

TEST(ReportTests, RejectsDelimitersAndBadInput)
{
  EXPECT_THROW(metrics_csv({MetricsRow{"e", "a,b", 0, "m", 1}}), std::invalid_argument);
  std::istringstream wrong_header{"a,b\n"};
  EXPECT_THROW(parse_metrics(wrong_header), std::runtime_error);
  std::istringstream short_row{std::string{kMetricsHeader} + "\ne,p,0\n"};
  EXPECT_THROW(parse_metrics(short_row), std::runtime_error);
  EXPECT_THROW(write_metrics({}, "/proc/definitely/not/writable/m.csv"), std::runtime_error);
}

TEST(ReportTests, EnvironmentSeriesHasNineHundredRows)
{
  Scenario sc;
  sc.set_runs(2);
  auto        res = run_experiment(ExperimentKind::environment, SocialGraph{}, sc);
  std::size_t n   = 0;
  for (auto const &r : res.rows)
  {
    n += (r.metric == "s_hat" && !r.run) ? 1 : 0;
  }
  EXPECT_EQ(n, 3u * 300u);

  ASSERT_EQ(res.plots.size(), 1u);
  auto svg = render_plot(res.plots[0]);
  EXPECT_EQ(count(svg, "<polyline"), 3u);
  EXPECT_NE(svg.find("corrected"), std::string::npos);
}

TEST(ReportTests, SinglePointSeriesGetsOneMarker)
{
  PlotSpec p{"single", "One", "x", "y", {Series{"s", {1.0}, {2.0}}}};
  auto     svg = render_plot(p);
  EXPECT_EQ(count(svg, "<circle"), 1u);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(ReportTests, PlotErrors)
{
  PlotSpec empty{"e", "t", "x", "y", {}};
  EXPECT_THROW(render_plot(empty), std::invalid_argument);
  PlotSpec ragged{"r", "t", "x", "y", {Series{"s", {1.0, 2.0}, {1.0}}}};
  EXPECT_THROW(render_plot(ragged), std::invalid_argument);
  PlotSpec nan{"n", "t", "x", "y", {Series{"s", {1.0}, {std::nan("")}}}};
  EXPECT_THROW(render_plot(nan), std::invalid_argument);
}

TEST(ReportTests, LegendTextIsEscaped)
{
  PlotSpec p{"esc", "a<b", "x", "y", {Series{"s&t", {0.0, 1.0}, {0.0, 1.0}}}};
  auto     svg = render_plot(p);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("s&amp;t"), std::string::npos);
}

TEST(ReportTests, BundleIsByteIdenticalAcrossWrites)
{
  Scenario sc;
  sc.set_runs(3);
  sc.set_iterations(20);
  auto res = run_experiment(ExperimentKind::environment, SocialGraph{}, sc);
  auto a   = scratch("bundle_a");
  auto b   = scratch("bundle_b");
  auto ba  = write_report(res, a, true);
  write_report(run_experiment(ExperimentKind::environment, SocialGraph{}, sc), b, true);
  for (auto const &entry : fs::directory_iterator{a})
  {
    auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
  }
  EXPECT_TRUE(fs::exists(ba.metrics));
  EXPECT_TRUE(fs::exists(ba.summary));
  ASSERT_TRUE(ba.trace.has_value());
  EXPECT_TRUE(fs::exists(*ba.trace));
  ASSERT_EQ(ba.plots.size(), 1u);
  EXPECT_EQ(ba.plots[0].extension(), ".svg");
}

TEST(ReportTests, SummaryMatchesCsvAggregates)
{
  Scenario sc;
  sc.set_runs(3);
  auto res     = run_experiment(ExperimentKind::environment, SocialGraph{}, sc);
  auto summary = summary_json(res);
  auto dir     = scratch("summary");
  write_metrics(res.rows, dir / "m.csv");
  std::size_t checked = 0;
  for (auto const &r : read_metrics_file(dir / "m.csv"))
  {
    if (!r.run)
    {
      EXPECT_EQ(summary["aggregates"][r.param][r.metric].get<double>(), r.value);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
  EXPECT_EQ(summary["runs"], 3);
  EXPECT_EQ(summary["experiment"], "environment");
}
